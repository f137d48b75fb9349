#pragma once

#include <array>
#include <string_view>

namespace t3 {

/// Built-in template documents, one per fixture domain plus a generic set.
/// The same text ships under templates/<domain>.tpl.
struct BuiltinTemplate {
    std::string_view domain;
    std::string_view text;
};

inline constexpr std::string_view kGenericTemplates = R"(# Generic template set. One template per relation: "<relation>: <text>".
# Placeholders: {head} {tail} {relation}; {Head} and {Tail} capitalize the first letter.
@domain generic
has observations: {Head} has {tail} recorded observations.
spans: {Head} covers the period {tail}.
unit: {Head} is measured in {tail}.
maximum: The highest value of {head} was {tail}.
minimum: The lowest value of {head} was {tail}.
has trend: {Head} follows {tail}.
direction: {Head} is {tail}.
from: {Head} begins on {tail}.
to: {Head} ends on {tail}.
percent change: Over {head}, the value changes by {tail}.
has regime: {Head} passes through {tail}.
average level: During {head}, the average level is {tail}.
has peak: {Head} reaches a local high labelled {tail}.
peak value: {Head} has a value of {tail}.
peak date: {Head} occurs on {tail}.
)";

inline constexpr std::string_view kCovidTemplates = R"(# COVID19 case counts.
@domain covid19
has observations: {Head} are reported on {tail} days.
spans: {Head} are tracked over the period {tail}.
unit: {Head} are counted as {tail}.
maximum: The highest daily count of {head} was {tail}.
minimum: The lowest daily count of {head} was {tail}.
has trend: {Head} follow {tail}.
direction: {Head} is {tail}.
from: {Head} starts on {tail}.
to: {Head} ends on {tail}.
percent change: Over {head}, daily cases change by {tail}.
has regime: {Head} go through {tail}.
average level: During {head}, the average daily count is {tail}.
has peak: {Head} reach a wave crest labelled {tail}.
peak value: {Head} records {tail}.
peak date: {Head} falls on {tail}.
)";

inline constexpr std::string_view kDotsTemplates = R"(# Direction of Trade Statistics exports.
@domain dots_exports
has observations: {Head} are reported for {tail} months.
spans: {Head} are tracked over the period {tail}.
unit: {Head} are measured in {tail}.
maximum: The highest monthly value of {head} was {tail}.
minimum: The lowest monthly value of {head} was {tail}.
has trend: {Head} follow {tail}.
direction: {Head} is {tail}.
from: {Head} starts in {tail}.
to: {Head} ends in {tail}.
percent change: Over {head}, exports change by {tail}.
has regime: {Head} go through {tail}.
average level: During {head}, monthly exports average {tail}.
has peak: {Head} reach a high labelled {tail}.
peak value: {Head} records {tail}.
peak date: {Head} falls in {tail}.
)";

inline constexpr std::string_view kPollutionTemplates = R"(# Carbon monoxide pollution readings.
@domain co_pollution
has observations: {Head} has {tail} daily readings.
spans: {Head} is monitored over the period {tail}.
unit: {Head} is measured in {tail}.
maximum: The highest reading of {head} was {tail}.
minimum: The lowest reading of {head} was {tail}.
has trend: {Head} follows {tail}.
direction: {Head} is {tail}.
from: {Head} starts on {tail}.
to: {Head} ends on {tail}.
percent change: Over {head}, the concentration changes by {tail}.
has regime: {Head} passes through {tail}.
average level: During {head}, the average concentration is {tail}.
has peak: {Head} shows a spike labelled {tail}.
peak value: {Head} reads {tail}.
peak date: {Head} is recorded on {tail}.
)";

inline constexpr std::string_view kPopulationTemplates = R"(# World population counts.
@domain world_population
has observations: {Head} is recorded for {tail} years.
spans: {Head} is tracked over the period {tail}.
unit: {Head} is counted in {tail}.
maximum: The largest value of {head} was {tail}.
minimum: The smallest value of {head} was {tail}.
has trend: {Head} follows {tail}.
direction: {Head} is {tail}.
from: {Head} starts in {tail}.
to: {Head} ends in {tail}.
percent change: Over {head}, the population changes by {tail}.
has regime: {Head} passes through {tail}.
average level: During {head}, the average population is {tail}.
has peak: {Head} reaches a high labelled {tail}.
peak value: {Head} counts {tail}.
peak date: {Head} falls in {tail}.
)";

inline constexpr std::string_view kTemperatureTemplates = R"(# Average land temperature.
@domain global_temperature
has observations: {Head} has {tail} monthly records.
spans: {Head} is recorded over the period {tail}.
unit: {Head} is measured in {tail}.
maximum: The warmest month for {head} reached {tail}.
minimum: The coldest month for {head} reached {tail}.
has trend: {Head} follows {tail}.
direction: {Head} is {tail}.
from: {Head} starts in {tail}.
to: {Head} ends in {tail}.
percent change: Over {head}, the temperature changes by {tail}.
has regime: {Head} passes through {tail}.
average level: During {head}, the average temperature is {tail}.
has peak: {Head} shows a warm spell labelled {tail}.
peak value: {Head} reaches {tail}.
peak date: {Head} falls in {tail}.
)";

inline constexpr std::array<BuiltinTemplate, 6> kBuiltinTemplates = {{
    {"generic", kGenericTemplates},
    {"covid19", kCovidTemplates},
    {"dots_exports", kDotsTemplates},
    {"co_pollution", kPollutionTemplates},
    {"world_population", kPopulationTemplates},
    {"global_temperature", kTemperatureTemplates},
}};

} // namespace t3
