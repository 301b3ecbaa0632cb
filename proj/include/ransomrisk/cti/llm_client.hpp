#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace ransomrisk::cti {

enum class FinishReason { complete, length_truncated, other };

std::string_view to_string(FinishReason r);
/// Accepts our names plus the chat-completions "stop" / "length".
FinishReason parse_finish_reason(std::string_view s);

struct Completion {
    std::string text;
    FinishReason finish_reason = FinishReason::complete;
};

/// One part of a (possibly multi-part) model reply.
struct RawResponse {
    std::size_t part_index = 0;
    std::string text;
    FinishReason finish_reason = FinishReason::complete;
};

/// Port to a chat-completion model.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    /// Single request/response. Transport failures throw Error("ClientError").
    virtual Completion complete(const std::string& prompt) = 0;
    virtual std::size_t context_window() const { return 128000; }
};

inline constexpr std::size_t kDefaultPartCap = 8;

/// Sends `prompt`, following length-truncated replies with continuation
/// requests until a complete part or `part_cap` parts. Throws
/// ContextWindowExceeded before any call when the prompt is estimated over
/// the client's window, and PartLimitExceeded when the cap is hit.
std::vector<RawResponse> query(ChatClient& client, const std::string& prompt, std::size_t part_cap = kDefaultPartCap);

/// Replays recorded exchanges from a directory of JSON files
/// {prompt_sha256, parts: [{text, finish_reason}]}. Continuation requests
/// are recognised by hashing the continuation prompt the caller will send.
class FixtureClient : public ChatClient {
public:
    explicit FixtureClient(const std::string& dir, std::size_t context_window = 128000);
    FixtureClient(std::map<std::string, std::vector<Completion>> exchanges, std::size_t context_window = 128000);

    Completion complete(const std::string& prompt) override;
    std::size_t context_window() const override { return window_; }
    std::size_t exchange_count() const { return exchanges_.size(); }

private:
    struct Pending {
        std::string exchange;
        std::size_t next_part;
        std::string prompt;
        std::string accumulated;
    };

    Completion serve(const std::string& exchange, std::size_t part, const std::string& prompt, std::string accumulated);

    std::map<std::string, std::vector<Completion>> exchanges_;
    std::map<std::string, Pending> pending_;
    std::size_t window_;
    std::mutex mutex_;
};

/// Chat-completions over HTTP(S), configured from LLM_API_BASE, LLM_API_KEY
/// and LLM_MODEL (LLM_CONTEXT_WINDOW optional).
class HttpChatClient : public ChatClient {
public:
    HttpChatClient(std::string api_base, std::string api_key, std::string model, std::size_t context_window = 128000);
    /// Throws Error("ClientError") when LLM_API_BASE or LLM_MODEL is unset.
    static std::unique_ptr<HttpChatClient> from_environment();

    Completion complete(const std::string& prompt) override;
    std::size_t context_window() const override { return window_; }

private:
    std::string base_;
    std::string key_;
    std::string model_;
    std::size_t window_;
};

/// Writes `<sha>.json` in the fixture format for a finished exchange.
void write_fixture(const std::string& dir, const std::string& prompt, const std::vector<RawResponse>& parts);

}  // namespace ransomrisk::cti
