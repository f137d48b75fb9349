#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "t3/error.hpp"

namespace t3 {

struct Tokenized {
    std::vector<std::string> words;
    std::vector<std::string> sentences;
};

struct MetricsReport {
    double re = 0.0;
    double ttr = 0.0;
    double g = 0.0;
    std::size_t word_count = 0;
    std::size_t sentence_count = 0;
    std::size_t type_count = 0;
};

/// Counts grammatical errors in one sentence.
using GrammarChecker = std::function<std::size_t(std::string_view sentence)>;

namespace detail {

inline bool is_word_char(char c)
{
    const auto u = static_cast<unsigned char>(c);
    // Bytes >= 0x80 belong to UTF-8 sequences; keep them inside words.
    return std::isalnum(u) || c == '\'' || u >= 0x80;
}

inline bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::vector<std::string> words_of(std::string_view text)
{
    std::vector<std::string> words;
    std::string current;
    for (char c : text) {
        if (is_word_char(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        words.push_back(std::move(current));
    return words;
}

inline std::string_view trim_space(std::string_view s)
{
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Sentences end at '.', '!' or '?' followed by whitespace or end of text;
/// an unterminated remainder is a sentence too. Words are lowercased maximal
/// runs of letters, digits and apostrophes. Abbreviations such as "U.S."
/// therefore end a sentence when followed by a space.
inline std::vector<std::string> split_sentences(std::string_view text)
{
    std::vector<std::string> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!detail::is_terminal(text[i]))
            continue;
        while (i + 1 < text.size() && detail::is_terminal(text[i + 1]))
            ++i;
        if (i + 1 == text.size() || detail::is_space(text[i + 1])) {
            const auto s = detail::trim_space(text.substr(start, i + 1 - start));
            if (!s.empty())
                sentences.emplace_back(s);
            start = i + 1;
        }
    }
    const auto rest = detail::trim_space(text.substr(std::min(start, text.size())));
    if (!rest.empty())
        sentences.emplace_back(rest);
    return sentences;
}

inline Tokenized tokenize(std::string_view text)
{
    Tokenized out;
    out.sentences = split_sentences(text);
    out.words = detail::words_of(text);
    if (out.words.empty() || out.sentences.empty())
        fail(ErrorKind::EmptyText, "metrics", "text has no words");
    return out;
}

/// Vowel groups (a, e, i, o, u, y), minus a silent trailing 'e' unless the
/// word ends in consonant + "le"; never below 1.
inline std::size_t syllables(std::string_view word)
{
    std::string w;
    for (char c : word)
        if (std::isalpha(static_cast<unsigned char>(c)))
            w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    auto vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; };
    std::size_t groups = 0;
    bool in_group = false;
    for (char c : w) {
        if (vowel(c)) {
            if (!in_group)
                ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if (w.size() >= 2 && w.back() == 'e') {
        const bool consonant_le = w.size() >= 3 && w[w.size() - 2] == 'l' && !vowel(w[w.size() - 3]);
        if (!consonant_le && groups > 0)
            --groups;
    }
    return std::max<std::size_t>(groups, 1);
}

/// Flesch Reading Ease, unclamped.
inline double flesch_re(std::string_view text)
{
    const auto tok = tokenize(text);
    std::size_t syl = 0;
    for (const auto& w : tok.words)
        syl += syllables(w);
    const auto words = static_cast<double>(tok.words.size());
    const auto sentences = static_cast<double>(tok.sentences.size());
    return 206.835 - 1.015 * (words / sentences) - 84.6 * (static_cast<double>(syl) / words);
}

inline std::size_t type_count(const std::vector<std::string>& words)
{
    return std::set<std::string>(words.begin(), words.end()).size();
}

/// Distinct lowercased word forms over total words.
inline double ttr(std::string_view text)
{
    const auto tok = tokenize(text);
    return static_cast<double>(type_count(tok.words)) / static_cast<double>(tok.words.size());
}

/// Relative change from `baseline` to `value`, in percent.
inline double ttr_gain(double value, double baseline) { return 100.0 * (value - baseline) / baseline; }

/// Rule-based checker: lowercase sentence start, missing terminal
/// punctuation, and each immediate repetition of a word. Repeats only count
/// for tokens with a letter, so date parts like "01 01" are not errors.
inline std::size_t naive_checker(std::string_view sentence)
{
    sentence = detail::trim_space(sentence);
    if (sentence.empty())
        return 0;
    std::size_t errors = 0;
    const auto first = std::find_if(sentence.begin(), sentence.end(), [](char c) { return detail::is_word_char(c); });
    if (first != sentence.end() && std::islower(static_cast<unsigned char>(*first)))
        ++errors;
    if (!detail::is_terminal(sentence.back()))
        ++errors;
    const auto words = detail::words_of(sentence);
    for (std::size_t i = 1; i < words.size(); ++i)
        if (words[i] == words[i - 1]
            && std::any_of(words[i].begin(), words[i].end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
            ++errors;
    return errors;
}

inline std::size_t zero_checker(std::string_view) { return 0; }

/// Mean over sentences of max(0, 1 - errors / words).
inline double grammar_score(std::string_view text, const GrammarChecker& checker)
{
    const auto sentences = split_sentences(text);
    if (sentences.empty())
        fail(ErrorKind::EmptyText, "metrics", "text has no sentences");
    double total = 0.0;
    for (const auto& s : sentences) {
        const auto words = detail::words_of(s).size();
        const auto errors = static_cast<double>(checker(s));
        if (words == 0)
            total += errors > 0.0 ? 0.0 : 1.0;
        else
            total += std::max(0.0, 1.0 - errors / static_cast<double>(words));
    }
    return total / static_cast<double>(sentences.size());
}

inline MetricsReport evaluate_text(std::string_view text, const GrammarChecker& checker = naive_checker)
{
    const auto tok = tokenize(text);
    MetricsReport r;
    r.word_count = tok.words.size();
    r.sentence_count = tok.sentences.size();
    r.type_count = type_count(tok.words);
    r.ttr = static_cast<double>(r.type_count) / static_cast<double>(r.word_count);
    r.re = flesch_re(text);
    r.g = grammar_score(text, checker);
    return r;
}

} // namespace t3
