#pragma once

#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "t3/decode.hpp"
#include "t3/error.hpp"
#include "t3/kg.hpp"
#include "t3/templates.hpp"
#include "t3/verbalize.hpp"

namespace t3 {

inline constexpr std::string_view kWireVersion = "t3/1";

enum class Generator { templated, neural };

constexpr std::string_view to_string(Generator g) noexcept { return g == Generator::templated ? "templated" : "neural"; }

struct Narrative {
    std::string text;
    Generator generator = Generator::templated;
    std::optional<DecodingConfig> decoding;
    std::optional<std::string> model_id;
};

/// Relation-keyed sentence templates for one domain.
class TemplateSet {
public:
    TemplateSet() = default;
    TemplateSet(std::string domain, std::map<std::string, std::string, std::less<>> templates)
        : domain_(std::move(domain))
        , templates_(std::move(templates))
    {
        for (const auto& [relation, text] : templates_)
            check_placeholders(relation, text);
    }

    const std::string& domain() const noexcept { return domain_; }
    const std::map<std::string, std::string, std::less<>>& templates() const noexcept { return templates_; }

    const std::string* find(std::string_view relation) const
    {
        const auto it = templates_.find(relation);
        return it == templates_.end() ? nullptr : &it->second;
    }

    /// Parses the template document format:
    ///   - blank lines and lines starting with '#' are ignored
    ///   - "@domain <name>" names the set
    ///   - "<relation>: <template>" splits at the first colon; both sides are
    ///     trimmed
    static TemplateSet parse(std::string_view text)
    {
        std::string domain = "custom";
        std::map<std::string, std::string, std::less<>> templates;
        std::size_t line_no = 0;
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            const auto trimmed = detail::trim(line);
            if (trimmed.empty() || trimmed.front() == '#')
                continue;
            if (trimmed.starts_with("@domain")) {
                domain = std::string(detail::trim(trimmed.substr(7)));
                continue;
            }
            const auto colon = trimmed.find(':');
            if (colon == std::string_view::npos)
                fail(ErrorKind::InvalidConfig, "narrate", "template line " + std::to_string(line_no) + " has no ':'");
            const auto relation = detail::trim(trimmed.substr(0, colon));
            const auto body = detail::trim(trimmed.substr(colon + 1));
            if (relation.empty() || body.empty())
                fail(ErrorKind::InvalidConfig, "narrate", "template line " + std::to_string(line_no) + " is incomplete");
            if (!templates.emplace(std::string(relation), std::string(body)).second)
                fail(ErrorKind::InvalidConfig, "narrate",
                    "duplicate template for relation '" + std::string(relation) + "' on line " + std::to_string(line_no));
        }
        return TemplateSet(std::move(domain), std::move(templates));
    }

    static TemplateSet load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::Io, "narrate", "cannot open template file " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    /// Built-in set for `domain`, or the generic set when the domain is
    /// unknown.
    static TemplateSet builtin(std::string_view domain)
    {
        for (const auto& b : kBuiltinTemplates)
            if (b.domain == domain)
                return parse(b.text);
        return parse(kGenericTemplates);
    }

    static bool has_builtin(std::string_view domain)
    {
        for (const auto& b : kBuiltinTemplates)
            if (b.domain == domain)
                return true;
        return false;
    }

private:
    static void check_placeholders(const std::string& relation, std::string_view text)
    {
        for (std::size_t open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
            const auto close = text.find('}', open);
            if (close == std::string_view::npos)
                fail(ErrorKind::InvalidConfig, "narrate", "unterminated placeholder in template for '" + relation + "'");
            const auto name = text.substr(open + 1, close - open - 1);
            if (name != "head" && name != "Head" && name != "tail" && name != "Tail" && name != "relation")
                fail(ErrorKind::InvalidConfig, "narrate",
                    "unknown placeholder {" + std::string(name) + "} in template for '" + relation + "'");
        }
    }

    std::string domain_ = "generic";
    std::map<std::string, std::string, std::less<>> templates_;
};

namespace detail {

inline std::string capitalized(std::string s)
{
    if (!s.empty())
        s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
    return s;
}

inline std::string fill_template(std::string_view tpl, const Triple& t)
{
    std::string out;
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const auto open = tpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(pos));
            break;
        }
        out.append(tpl.substr(pos, open - pos));
        const auto close = tpl.find('}', open);
        const auto name = tpl.substr(open + 1, close - open - 1);
        if (name == "head")
            out += t.head;
        else if (name == "Head")
            out += capitalized(t.head);
        else if (name == "tail")
            out += t.tail;
        else if (name == "Tail")
            out += capitalized(t.tail);
        else
            out += t.relation;
        pos = close + 1;
    }
    return out;
}

} // namespace detail

/// One sentence per triple, in graph order, joined by single spaces.
inline Narrative template_render(const KnowledgeGraph& kg, const TemplateSet& templates)
{
    std::string text;
    for (const auto& t : kg.triples()) {
        const std::string* tpl = templates.find(t.relation);
        if (!tpl)
            fail(ErrorKind::UncoveredRelation, "narrate",
                "template set '" + templates.domain() + "' has no template for relation '" + t.relation + "'");
        if (!text.empty())
            text += ' ';
        text += detail::fill_template(*tpl, t);
    }
    return Narrative{std::move(text), Generator::templated, std::nullopt, std::nullopt};
}

// --- t3/1 wire contract -----------------------------------------------------

inline nlohmann::ordered_json decoding_to_json(const DecodingConfig& d)
{
    nlohmann::ordered_json j;
    j["strategy"] = std::string(to_string(d.strategy));
    j["k"] = d.k;
    j["p"] = d.p;
    j["seed"] = d.seed;
    j["max_tokens"] = d.max_tokens;
    return j;
}

inline nlohmann::ordered_json make_narrate_request(const KnowledgeGraph& kg, const DecodingConfig& decoding)
{
    nlohmann::ordered_json body;
    body["version"] = std::string(kWireVersion);
    body["linearized"] = linearize(kg);
    body["decoding"] = decoding_to_json(decoding);
    return body;
}

struct NarrateResponse {
    std::string narrative;
    std::string model_id;
    std::int64_t token_count = 0;
};

/// Validates a 200 response body against the contract.
inline NarrateResponse parse_narrate_response(std::string_view body)
{
    auto violation = [](const std::string& why) { fail(ErrorKind::ContractViolation, "narrate", why); };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        violation(std::string("response is not JSON: ") + e.what());
    }
    if (!j.is_object())
        violation("response is not an object");
    if (!j.contains("version") || !j["version"].is_string() || j["version"].get<std::string>() != kWireVersion)
        violation("response version is missing or not " + std::string(kWireVersion));
    if (!j.contains("narrative") || !j["narrative"].is_string())
        violation("response has no string 'narrative'");
    if (!j.contains("model_id") || !j["model_id"].is_string())
        violation("response has no string 'model_id'");
    if (!j.contains("token_count") || !j["token_count"].is_number_integer() || j["token_count"].get<std::int64_t>() < 0)
        violation("response has no non-negative integer 'token_count'");
    NarrateResponse r{j["narrative"].get<std::string>(), j["model_id"].get<std::string>(), j["token_count"].get<std::int64_t>()};
    if (r.narrative.empty())
        violation("response narrative is empty");
    if (contains_marker(r.narrative))
        violation("response narrative contains graph markers");
    return r;
}

namespace detail {

inline httplib::Client make_client(const std::string& endpoint, std::chrono::milliseconds timeout)
{
    if (endpoint.empty())
        fail(ErrorKind::BackendUnreachable, "narrate", "no backend endpoint configured (--endpoint or T3_ENDPOINT)");
    httplib::Client client(endpoint);
    if (!client.is_valid())
        fail(ErrorKind::BackendUnreachable, "narrate", "invalid backend endpoint '" + endpoint + "'");
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    return client;
}

[[noreturn]] inline void transport_failure(httplib::Error err, const std::string& endpoint)
{
    const std::string what = endpoint + ": " + httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::Write)
        fail(ErrorKind::Timeout, "narrate", "backend did not answer in time (" + what + ")");
    fail(ErrorKind::BackendUnreachable, "narrate", "cannot reach backend (" + what + ")");
}

} // namespace detail

/// GET /health. Returns the served model id when the backend reports ready.
inline std::optional<std::string> backend_health(const std::string& endpoint, std::chrono::milliseconds timeout)
{
    auto client = detail::make_client(endpoint, timeout);
    auto res = client.Get("/health");
    if (!res)
        detail::transport_failure(res.error(), endpoint);
    if (res->status != 200)
        return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(res->body);
        if (j.value("status", "") == "ok" && j.contains("model_id") && j["model_id"].is_string())
            return j["model_id"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
    }
    fail(ErrorKind::ContractViolation, "narrate", "malformed /health response");
}

/// POSTs the linearized graph to `endpoint` and returns the backend's text
/// verbatim.
inline Narrative neural_narrate(const KnowledgeGraph& kg, const std::string& endpoint, const DecodingConfig& decoding,
    std::chrono::milliseconds timeout)
{
    decoding.validate();
    auto client = detail::make_client(endpoint, timeout);
    const auto body = make_narrate_request(kg, decoding).dump();
    auto res = client.Post("/narrate", body, "application/json");
    if (!res)
        detail::transport_failure(res.error(), endpoint);
    if (res->status != 200) {
        std::string message = res->body;
        try {
            const auto j = nlohmann::json::parse(res->body);
            message = j.value("error", std::string("unknown"));
            if (j.contains("detail") && j["detail"].is_string())
                message += ": " + j["detail"].get<std::string>();
        } catch (const nlohmann::json::exception&) {
        }
        fail(ErrorKind::BackendError, "narrate", "backend returned status " + std::to_string(res->status) + " (" + message + ")");
    }
    auto parsed = parse_narrate_response(res->body);
    return Narrative{std::move(parsed.narrative), Generator::neural, decoding, std::move(parsed.model_id)};
}

enum class NarrationMode { templated, neural, neural_with_fallback };

constexpr std::string_view to_string(NarrationMode m) noexcept
{
    switch (m) {
    case NarrationMode::templated: return "templated";
    case NarrationMode::neural: return "neural";
    case NarrationMode::neural_with_fallback: return "neural-with-fallback";
    }
    return "unknown";
}

inline std::optional<NarrationMode> parse_mode(std::string_view name)
{
    if (name == "templated")
        return NarrationMode::templated;
    if (name == "neural")
        return NarrationMode::neural;
    if (name == "neural-with-fallback" || name == "neural_with_fallback")
        return NarrationMode::neural_with_fallback;
    return std::nullopt;
}

struct NarrationRequest {
    NarrationMode mode = NarrationMode::templated;
    TemplateSet templates = TemplateSet::builtin("generic");
    std::string endpoint;
    DecodingConfig decoding;
    std::chrono::milliseconds timeout{30000};
};

struct NarrationResult {
    Narrative narrative;
    std::vector<std::string> warnings;
};

/// Mode dispatch. With fallback, a failing backend yields the templated
/// narrative plus a warning naming the failure.
inline NarrationResult narrate(const KnowledgeGraph& kg, const NarrationRequest& request)
{
    switch (request.mode) {
    case NarrationMode::templated: return {template_render(kg, request.templates), {}};
    case NarrationMode::neural: return {neural_narrate(kg, request.endpoint, request.decoding, request.timeout), {}};
    case NarrationMode::neural_with_fallback:
        try {
            return {neural_narrate(kg, request.endpoint, request.decoding, request.timeout), {}};
        } catch (const Error& e) {
            if (e.module() != "narrate")
                throw;
            return {template_render(kg, request.templates),
                {std::string("neural backend failed, fell back to templates: ") + e.what()}};
        }
    }
    fail(ErrorKind::InvalidConfig, "narrate", "unknown narration mode");
}

} // namespace t3
