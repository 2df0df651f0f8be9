#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace arda::llm {

using Json = nlohmann::ordered_json;

enum class Role { System, User, Assistant };
std::string to_string(Role r);
Role role_from_string(std::string_view name);

struct Message {
    Role role = Role::User;
    std::string content;
};

struct RequestParams {
    double temperature = 0.0;
    int max_tokens = 2048;
    std::string model = "scripted";
};

struct Usage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
    int total_tokens = 0;
};

/// One chat completion: request messages plus, once completed, the response
/// and its bookkeeping.
struct ChatExchange {
    std::vector<Message> messages;
    RequestParams params;
    std::string response;
    Usage usage;
    double latency_seconds = 0.0;
    int attempts = 0;
    bool completed = false;

    Json to_json() const;
    static ChatExchange from_json(const Json& j);
    /// All message contents concatenated; what scripted matchers see.
    std::string request_text() const;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    /// Fills in response/usage/latency on the exchange and returns the
    /// response text. Throws on failure. Safe for concurrent calls.
    virtual std::string complete(ChatExchange& exchange) = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

enum class ExhaustionPolicy { Error, Echo };

struct ScriptEntry {
    /// All substrings must occur in the request text; empty matches anything.
    std::vector<std::string> match_contains;
    /// Exact request text match (used by record/replay scripts).
    std::optional<std::string> match_exact;
    std::string response;
    enum class Kind {
        Text,
        /// Deterministic rule: echo back the slot plan found after the
        /// SUBTASK_JSON marker in the request as a grounding fragment.
        GroundPassthrough,
    };
    Kind kind = Kind::Text;
    /// Re-usable entries are never consumed; plain entries serve one request.
    bool repeat = false;

    bool matches(const std::string& request_text) const;
};

struct Script {
    std::vector<ScriptEntry> entries;
    ExhaustionPolicy exhaustion = ExhaustionPolicy::Error;

    Json to_json() const;
    static Script from_json(const Json& j);
    static Script load(const std::string& path);
};

/// Bit-deterministic backend driven by a Script: the first unconsumed
/// matching entry answers each request; with none left, the exhaustion
/// policy applies (error, or echo the last user message).
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(Script script);
    std::string name() const override { return "scripted"; }
    std::string complete(ChatExchange& exchange) override;

private:
    Script script_;
    std::vector<bool> consumed_;
    std::mutex mutex_;
};

/// Builds a verbatim-replay script from a completed session.
Script record_replay(const std::vector<ChatExchange>& session);

/// Stable content hash of a session (order-sensitive).
std::uint64_t session_hash(const std::vector<ChatExchange>& session);

// ---------------------------------------------------------------------------
// Recording wrapper
// ---------------------------------------------------------------------------

/// Wraps any backend and keeps (optionally persists) every completed
/// exchange, to feed record_replay or a CycleReport transcript.
class RecordingBackend final : public Backend {
public:
    explicit RecordingBackend(Backend& inner, std::optional<std::string> session_log_path = {});
    std::string name() const override { return inner_.name(); }
    std::string complete(ChatExchange& exchange) override;
    std::vector<ChatExchange> session() const;

private:
    Backend& inner_;
    std::optional<std::string> log_path_;
    std::vector<ChatExchange> session_;
    mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Remote backend
// ---------------------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 3;
    double initial_backoff_s = 0.5;
    double max_backoff_s = 2.0;
    double timeout_s = 60.0;
};

/// Token-bucket limiter shared by all remote calls in a process.
class RateLimiter {
public:
    RateLimiter(double tokens_per_second, double burst);
    void acquire();

private:
    double rate_;
    double burst_;
    double available_;
    std::chrono::steady_clock::time_point last_refill_;
    std::mutex mutex_;
};

struct RemoteOptions {
    std::string endpoint;  // base URL, e.g. http://127.0.0.1:8080
    std::string api_key;
    std::string model = "gpt-4-32k";
    RetryPolicy retry;
    double rate_per_second = 0.0;  // <= 0 disables the limiter
};

/// Chat-completions client for an OpenAI-compatible endpoint with retry,
/// exponential backoff, and hard timeouts.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteOptions options);
    std::string name() const override { return "remote"; }
    std::string complete(ChatExchange& exchange) override;

private:
    RemoteOptions options_;
    std::unique_ptr<RateLimiter> limiter_;
};

// ---------------------------------------------------------------------------
// Prompt registry
// ---------------------------------------------------------------------------

/// Named, versioned prompt templates with {{placeholder}} substitution.
class PromptRegistry {
public:
    struct Prompt {
        int version = 1;
        std::string system;
        std::string user;
    };

    static PromptRegistry load(const std::string& path);
    static PromptRegistry from_json(const Json& j);

    const Prompt& get(const std::string& name) const;
    std::vector<Message> render(const std::string& name,
                                const std::map<std::string, std::string>& vars) const;

private:
    std::map<std::string, Prompt> prompts_;
};

std::string substitute_placeholders(std::string text,
                                    const std::map<std::string, std::string>& vars);

/// Deterministic token estimate used by offline backends: ceil(bytes / 4).
int approximate_tokens(std::string_view text);

}  // namespace arda::llm
