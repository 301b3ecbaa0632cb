#include "ransomrisk/cti/llm_client.hpp"

#include <cstdlib>
#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/cti/prompt.hpp"

namespace ransomrisk::cti {

std::string_view to_string(FinishReason r) {
    switch (r) {
        case FinishReason::complete: return "complete";
        case FinishReason::length_truncated: return "length_truncated";
        case FinishReason::other: return "other";
    }
    return "other";
}

FinishReason parse_finish_reason(std::string_view s) {
    if (s == "complete" || s == "stop") return FinishReason::complete;
    if (s == "length_truncated" || s == "length") return FinishReason::length_truncated;
    return FinishReason::other;
}

std::vector<RawResponse> query(ChatClient& client, const std::string& prompt, std::size_t part_cap) {
    if (part_cap == 0) throw Error("InvalidPartCap", "part cap must be positive", ErrorKind::usage);
    auto window = client.context_window();
    auto check_window = [&](const std::string& request) {
        auto tokens = estimate_tokens(request);
        if (tokens > window)
            throw Error("ContextWindowExceeded",
                        "estimated " + std::to_string(tokens) + " tokens exceeds window of " + std::to_string(window));
    };

    check_window(prompt);
    std::vector<RawResponse> parts;
    std::string accumulated;
    std::string request = prompt;
    for (;;) {
        auto c = client.complete(request);
        parts.push_back({parts.size(), c.text, c.finish_reason});
        accumulated += c.text;
        if (c.finish_reason != FinishReason::length_truncated) return parts;
        if (parts.size() >= part_cap)
            throw Error("PartLimitExceeded", "reply still truncated after " + std::to_string(part_cap) + " parts");
        request = continuation_prompt(prompt, accumulated);
        check_window(request);
    }
}

// ---------------------------------------------------------------------------

FixtureClient::FixtureClient(std::map<std::string, std::vector<Completion>> exchanges, std::size_t context_window)
    : exchanges_(std::move(exchanges)), window_(context_window) {}

FixtureClient::FixtureClient(const std::string& dir, std::size_t context_window) : window_(context_window) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("FileNotFound", "fixture directory " + dir, ErrorKind::usage);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        auto j = read_json_file(entry.path().string());
        try {
            auto sha = j.at("prompt_sha256").get<std::string>();
            std::vector<Completion> parts;
            for (const auto& p : j.at("parts"))
                parts.push_back({p.at("text").get<std::string>(),
                                 parse_finish_reason(p.value("finish_reason", std::string("complete")))});
            if (parts.empty()) throw Error("MalformedFixture", entry.path().string() + ": no parts");
            exchanges_[sha] = std::move(parts);
        } catch (const nlohmann::json::exception& e) {
            throw Error("MalformedFixture", entry.path().string() + ": " + e.what());
        }
    }
}

Completion FixtureClient::serve(const std::string& exchange, std::size_t part, const std::string& prompt,
                                std::string accumulated) {
    const auto& parts = exchanges_.at(exchange);
    auto c = parts[part];
    accumulated += c.text;
    if (c.finish_reason == FinishReason::length_truncated && part + 1 < parts.size())
        pending_[sha256_hex(continuation_prompt(prompt, accumulated))] = {exchange, part + 1, prompt, accumulated};
    return c;
}

Completion FixtureClient::complete(const std::string& prompt) {
    std::lock_guard lock(mutex_);
    auto sha = sha256_hex(prompt);
    if (exchanges_.count(sha)) return serve(sha, 0, prompt, "");
    auto it = pending_.find(sha);
    if (it != pending_.end()) {
        auto p = std::move(it->second);
        pending_.erase(it);
        return serve(p.exchange, p.next_part, p.prompt, std::move(p.accumulated));
    }
    throw Error("ClientError", "no recorded exchange for prompt sha256 " + sha);
}

// ---------------------------------------------------------------------------

HttpChatClient::HttpChatClient(std::string api_base, std::string api_key, std::string model,
                               std::size_t context_window)
    : base_(std::move(api_base)), key_(std::move(api_key)), model_(std::move(model)), window_(context_window) {
    while (!base_.empty() && base_.back() == '/') base_.pop_back();
}

std::unique_ptr<HttpChatClient> HttpChatClient::from_environment() {
    auto env = [](const char* k) -> std::string {
        const char* v = std::getenv(k);
        return v ? v : "";
    };
    auto base = env("LLM_API_BASE");
    auto model = env("LLM_MODEL");
    if (base.empty() || model.empty())
        throw Error("ClientError", "LLM_API_BASE and LLM_MODEL must be set for the http client", ErrorKind::usage);
    std::size_t window = 128000;
    if (auto w = env("LLM_CONTEXT_WINDOW"); !w.empty()) window = std::stoul(w);
    return std::make_unique<HttpChatClient>(base, env("LLM_API_KEY"), model, window);
}

Completion HttpChatClient::complete(const std::string& prompt) {
    // Split "scheme://host[:port]/prefix" into the origin and the path prefix.
    auto scheme_end = base_.find("://");
    auto path_start = base_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    auto origin = base_.substr(0, path_start);
    auto prefix = path_start == std::string::npos ? std::string() : base_.substr(path_start);

    httplib::Client cli(origin);
    cli.set_read_timeout(600, 0);
    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);

    nlohmann::json body = {
        {"model", model_},
        {"temperature", 0},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    auto res = cli.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw Error("ClientError", "request to " + base_ + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error("ClientError", "HTTP " + std::to_string(res->status) + " from " + base_ + ": " + res->body);
    try {
        auto j = nlohmann::json::parse(res->body);
        const auto& choice = j.at("choices").at(0);
        Completion c;
        c.text = choice.at("message").at("content").get<std::string>();
        auto fr = choice.value("finish_reason", nlohmann::json());
        c.finish_reason = fr.is_string() ? parse_finish_reason(fr.get<std::string>()) : FinishReason::other;
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error("ClientError", std::string("unexpected response body: ") + e.what());
    }
}

void write_fixture(const std::string& dir, const std::string& prompt, const std::vector<RawResponse>& parts) {
    std::filesystem::create_directories(dir);
    auto sha = sha256_hex(prompt);
    nlohmann::json j;
    j["prompt_sha256"] = sha;
    j["parts"] = nlohmann::json::array();
    for (const auto& p : parts)
        j["parts"].push_back({{"text", p.text}, {"finish_reason", std::string(to_string(p.finish_reason))}});
    write_json_file((std::filesystem::path(dir) / (sha + ".json")).string(), j);
}

}  // namespace ransomrisk::cti
