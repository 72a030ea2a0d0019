#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <deque>
#include <vector>

#include "json.hpp"

namespace routeforge {

enum class BackendKind { HttpChat, Scripted, Replay };

std::string to_tag(BackendKind kind);
BackendKind backend_kind_from_tag(const std::string& tag);

struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    std::string endpoint;                   // HttpChat: full URL of the chat endpoint
    std::string model_name = "generic-chat";
    std::string api_key_env;                // name of the env var holding the key; never the key itself
    double temperature = 0.7;               // solve/refine default; classification calls pass 0.0
    int timeout_ms = 30000;
    int max_retries = 2;                    // transport errors only
    int retry_backoff_ms = 250;             // doubled per attempt
    std::string cassette_path;              // Replay
    std::vector<std::string> script;        // Scripted
};

struct TranscriptEntry {
    std::string prompt;
    std::string response;
    std::string timestamp;  // ISO 8601 UTC for live backends, empty offline
    BackendKind backend = BackendKind::Scripted;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;
};

// One recorded exchange. prompt_sha256 is the lookup key; the stored prompt
// confirms the match byte-for-byte.
struct CassetteRecord {
    std::string prompt_sha256;
    std::string prompt;
    std::string response;
};

struct Cassette {
    std::vector<CassetteRecord> records;

    static Cassette load(const std::string& path);  // Error(IO_ERROR, CASSETTE_FORMAT)
    void save(const std::string& path) const;
    void add(const std::string& prompt, const std::string& response);
    static Cassette from_transcript(const Transcript& transcript);
};

std::string sha256_hex(const std::string& data);

// Resolves a relative cassette path against ROUTEFORGE_CASSETTE_DIR when the
// variable is set, else against base_dir.
std::string resolve_cassette_path(const std::string& path, const std::string& base_dir);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete_once(const std::string& prompt, double temperature) = 0;
    virtual BackendKind kind() const = 0;
    // Offline backends are deterministic and get no transcript timestamps.
    virtual bool offline() const { return true; }
};

// Returns canned responses in order; throws Error(SCRIPT_EXHAUSTED) past the
// end. Single-run only: concurrent calls are rejected.
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses);
    std::string complete_once(const std::string& prompt, double temperature) override;
    BackendKind kind() const override { return BackendKind::Scripted; }

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    std::mutex mu_;
};

// Replays recorded responses for byte-identical prompts, consuming records
// for a repeated prompt in file order. Throws Error(REPLAY_MISS) otherwise.
class ReplayBackend final : public ChatBackend {
public:
    explicit ReplayBackend(const Cassette& cassette);
    std::string complete_once(const std::string& prompt, double temperature) override;
    BackendKind kind() const override { return BackendKind::Replay; }

private:
    std::unordered_map<std::string, std::deque<CassetteRecord>> by_hash_;
    std::mutex mu_;
};

// Generic JSON chat endpoint: POST {model, messages:[{role,content}],
// temperature} with bearer auth, answer read from
// choices[0].message.content. TLS is mandatory off-localhost.
class HttpChatBackend final : public ChatBackend {
public:
    explicit HttpChatBackend(BackendConfig config);
    std::string complete_once(const std::string& prompt, double temperature) override;
    BackendKind kind() const override { return BackendKind::HttpChat; }
    bool offline() const override { return false; }

private:
    BackendConfig config_;
};

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config);

// Owns one backend and funnels every completion through retry handling and
// transcript recording.
class Gateway {
public:
    explicit Gateway(BackendConfig config);
    Gateway(BackendConfig config, std::shared_ptr<ChatBackend> backend);

    // Sends one prompt, retrying TRANSPORT_ERROR failures with exponential
    // backoff up to max_retries. Appends the exchange to the transcript.
    std::string complete(const std::string& prompt, Transcript& transcript,
                         std::optional<double> temperature_override = std::nullopt);

    const BackendConfig& config() const { return config_; }

private:
    BackendConfig config_;
    std::shared_ptr<ChatBackend> backend_;
};

void to_json(nlohmann::json& j, const TranscriptEntry& e);
void to_json(nlohmann::json& j, const Transcript& t);
// Secrets never serialize: only the env var NAME appears.
void to_json(nlohmann::json& j, const BackendConfig& c);

}  // namespace routeforge
