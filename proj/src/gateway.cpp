#include "routeforge/gateway.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "routeforge/error.hpp"

namespace routeforge {

namespace {

using json = nlohmann::json;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error("CONFIG_ERROR", "endpoint '" + url + "' has no scheme");
    }
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http" && out.scheme != "https") {
        throw Error("CONFIG_ERROR", "endpoint scheme must be http or https, got '" + out.scheme + "'");
    }
    std::string rest = url.substr(scheme_end + 3);
    const auto path_start = rest.find('/');
    if (path_start == std::string::npos) {
        out.path = "/";
    } else {
        out.path = rest.substr(path_start);
        rest = rest.substr(0, path_start);
    }
    const auto colon = rest.find(':');
    if (colon == std::string::npos) {
        out.host = rest;
        out.port = out.scheme == "https" ? 443 : 80;
    } else {
        out.host = rest.substr(0, colon);
        out.port = std::atoi(rest.substr(colon + 1).c_str());
        if (out.port <= 0) throw Error("CONFIG_ERROR", "endpoint '" + url + "' has a bad port");
    }
    if (out.host.empty()) throw Error("CONFIG_ERROR", "endpoint '" + url + "' has no host");
    return out;
}

bool is_local_host(const std::string& host) {
    return host == "localhost" || host == "127.0.0.1" || host == "::1";
}

}  // namespace

std::string to_tag(BackendKind kind) {
    switch (kind) {
        case BackendKind::HttpChat: return "HTTP_CHAT";
        case BackendKind::Scripted: return "SCRIPTED";
        case BackendKind::Replay: return "REPLAY";
    }
    return "SCRIPTED";
}

BackendKind backend_kind_from_tag(const std::string& tag) {
    if (tag == "HTTP_CHAT") return BackendKind::HttpChat;
    if (tag == "SCRIPTED") return BackendKind::Scripted;
    if (tag == "REPLAY") return BackendKind::Replay;
    throw Error("CONFIG_ERROR", "unknown backend kind '" + tag + "'");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &digest_len, EVP_sha256(), nullptr)) {
        throw Error("INTERNAL", "SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string resolve_cassette_path(const std::string& path, const std::string& base_dir) {
    namespace fs = std::filesystem;
    if (path.empty() || fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("ROUTEFORGE_CASSETTE_DIR"); dir && *dir) {
        return (fs::path(dir) / path).string();
    }
    if (!base_dir.empty()) return (fs::path(base_dir) / path).string();
    return path;
}

Cassette Cassette::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IO_ERROR", "cannot open cassette '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("CASSETTE_FORMAT", "invalid JSON in '" + path + "': " + e.what());
    }
    if (!j.is_array()) throw Error("CASSETTE_FORMAT", "cassette must be a JSON array");
    Cassette cassette;
    for (const auto& je : j) {
        CassetteRecord record;
        try {
            record.prompt_sha256 = je.at("prompt_sha256").get<std::string>();
            record.prompt = je.at("prompt").get<std::string>();
            record.response = je.at("response").get<std::string>();
        } catch (const json::exception& e) {
            throw Error("CASSETTE_FORMAT", std::string("malformed cassette record: ") + e.what());
        }
        cassette.records.push_back(std::move(record));
    }
    return cassette;
}

void Cassette::save(const std::string& path) const {
    json j = json::array();
    for (const auto& record : records) {
        j.push_back({{"prompt_sha256", record.prompt_sha256},
                     {"prompt", record.prompt},
                     {"response", record.response}});
    }
    std::ofstream out(path);
    if (!out) throw Error("IO_ERROR", "cannot write cassette '" + path + "'");
    out << j.dump(2) << "\n";
}

void Cassette::add(const std::string& prompt, const std::string& response) {
    records.push_back({sha256_hex(prompt), prompt, response});
}

Cassette Cassette::from_transcript(const Transcript& transcript) {
    Cassette cassette;
    for (const auto& entry : transcript.entries) {
        cassette.add(entry.prompt, entry.response);
    }
    return cassette;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedBackend::complete_once(const std::string& prompt, double) {
    std::unique_lock<std::mutex> lock(mu_, std::try_to_lock);
    if (!lock.owns_lock()) {
        throw Error("SCRIPTED_CONCURRENT_USE", "a scripted backend serves one run at a time");
    }
    (void)prompt;
    if (next_ >= responses_.size()) {
        throw Error("SCRIPT_EXHAUSTED", "scripted backend has no response left for prompt " +
                                            std::to_string(next_ + 1));
    }
    return responses_[next_++];
}

ReplayBackend::ReplayBackend(const Cassette& cassette) {
    for (const auto& record : cassette.records) {
        by_hash_[record.prompt_sha256].push_back(record);
    }
}

std::string ReplayBackend::complete_once(const std::string& prompt, double) {
    std::lock_guard<std::mutex> lock(mu_);
    const std::string hash = sha256_hex(prompt);
    auto it = by_hash_.find(hash);
    if (it == by_hash_.end() || it->second.empty()) {
        throw Error("REPLAY_MISS",
                    "no recorded response for prompt starting \"" + prompt.substr(0, 60) + "\"");
    }
    CassetteRecord record = std::move(it->second.front());
    it->second.pop_front();
    if (record.prompt != prompt) {
        throw Error("REPLAY_MISS", "hash matched but the recorded prompt differs byte-wise");
    }
    return record.response;
}

HttpChatBackend::HttpChatBackend(BackendConfig config) : config_(std::move(config)) {}

std::string HttpChatBackend::complete_once(const std::string& prompt, double temperature) {
    // Credentials come only from the named env var, checked before any
    // network traffic. An empty name means an unauthenticated local server.
    std::string api_key;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key) {
            throw Error("AUTH_ERROR",
                        "environment variable '" + config_.api_key_env + "' is not set");
        }
        api_key = key;
    }

    const ParsedUrl url = parse_url(config_.endpoint);
    if (url.scheme == "http" && !is_local_host(url.host)) {
        throw Error("CONFIG_ERROR",
                    "plain http is only allowed for localhost endpoints, use https for '" +
                        url.host + "'");
    }

    httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
    client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    const json body = {{"model", config_.model_name},
                       {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                       {"temperature", temperature}};

    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error("TRANSPORT_ERROR",
                    "request to '" + config_.endpoint + "' failed: " + httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
        throw Error("AUTH_ERROR", "endpoint rejected the credentials (HTTP " +
                                      std::to_string(res->status) + ")");
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error("TRANSPORT_ERROR", "endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
        const json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error("TRANSPORT_ERROR", std::string("malformed chat response: ") + e.what());
    }
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config) {
    switch (config.kind) {
        case BackendKind::Scripted:
            return std::make_shared<ScriptedBackend>(config.script);
        case BackendKind::Replay: {
            const std::string path = resolve_cassette_path(config.cassette_path, "");
            return std::make_shared<ReplayBackend>(Cassette::load(path));
        }
        case BackendKind::HttpChat:
            return std::make_shared<HttpChatBackend>(config);
    }
    throw Error("CONFIG_ERROR", "unsupported backend kind");
}

Gateway::Gateway(BackendConfig config) : config_(std::move(config)) {
    backend_ = make_backend(config_);
}

Gateway::Gateway(BackendConfig config, std::shared_ptr<ChatBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)) {}

std::string Gateway::complete(const std::string& prompt, Transcript& transcript,
                              std::optional<double> temperature_override) {
    if (prompt.empty()) throw Error("EMPTY_PROMPT", "refusing to send an empty prompt");
    const double temperature = temperature_override.value_or(config_.temperature);

    int attempt = 0;
    for (;;) {
        try {
            std::string response = backend_->complete_once(prompt, temperature);
            transcript.entries.push_back(
                {prompt, response, backend_->offline() ? "" : utc_timestamp(), backend_->kind()});
            return response;
        } catch (const Error& e) {
            if (e.code() != "TRANSPORT_ERROR" || attempt >= config_.max_retries) throw;
            const auto delay = std::chrono::milliseconds(
                static_cast<long long>(config_.retry_backoff_ms) << attempt);
            std::this_thread::sleep_for(delay);
            ++attempt;
        }
    }
}

void to_json(nlohmann::json& j, const TranscriptEntry& e) {
    j = nlohmann::json{{"prompt", e.prompt},
                       {"response", e.response},
                       {"timestamp", e.timestamp},
                       {"backend", to_tag(e.backend)}};
}

void to_json(nlohmann::json& j, const Transcript& t) { j = t.entries; }

void to_json(nlohmann::json& j, const BackendConfig& c) {
    j = nlohmann::json{{"kind", to_tag(c.kind)},
                       {"endpoint", c.endpoint},
                       {"model_name", c.model_name},
                       {"api_key_env", c.api_key_env},
                       {"temperature", c.temperature},
                       {"timeout_ms", c.timeout_ms},
                       {"max_retries", c.max_retries},
                       {"retry_backoff_ms", c.retry_backoff_ms},
                       {"cassette_path", c.cassette_path},
                       {"script_length", c.script.size()}};
}

}  // namespace routeforge
