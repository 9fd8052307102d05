#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "seeksolve/prompt.hpp"

namespace seeksolve {

/// Decoding parameters. Reproduction runs keep temperature at 0 (greedy)
/// with a fixed seed.
struct DecodeConfig {
    double temperature = 0.0;
    int seed = 0;
    int max_tokens = 1024;

    bool operator==(const DecodeConfig&) const = default;
};

DecodeConfig decode_from_json(const nlohmann::json& doc);
nlohmann::json decode_to_json(const DecodeConfig& cfg);

enum class BackendKind { http_openai_compatible, scripted_mock };

/// One chat-completion backend. The http kind targets any server speaking
/// the standard chat-completions wire protocol; the mock replays scripted
/// responses keyed by prompt digest and errors on unknown digests.
struct BackendSpec {
    BackendKind kind = BackendKind::scripted_mock;
    std::string endpoint;   // e.g. "http://localhost:8000/v1"
    std::string model_name;
    std::map<std::string, std::string> script; // prompt digest -> response
    std::string api_key_env = "SEEKSOLVE_API_KEY";
    int max_attempts = 3;
    int retry_backoff_ms = 250;
    int timeout_s = 120;
    int mock_latency_ms = 0;
};

BackendSpec backend_from_json(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
nlohmann::json backend_to_json(const BackendSpec& spec);

/// Per-slot batch result; `error` is empty on success.
struct Completion {
    std::string text;
    std::string error;
    bool ok() const { return error.empty(); }
};

/// Uniform backend access with deterministic decoding, an on-disk response
/// cache, and bounded-parallel batch execution. Safe for concurrent callers;
/// cache writes are serialized.
class Gateway {
public:
    Gateway(BackendSpec backend, DecodeConfig decode,
            std::filesystem::path cache_dir = {});

    /// Returns the assistant text, serving cache hits without touching the
    /// backend. Throws TransientError after bounded retries, PermanentError
    /// on 4xx, FixtureError on an unknown mock digest.
    std::string complete(const Prompt& prompt);

    /// Results align index-for-index with `prompts`; per-item failures are
    /// captured in-slot. At most `parallelism` requests are in flight.
    std::vector<Completion> complete_batch(const std::vector<Prompt>& prompts,
                                           int parallelism);

    /// Backend invocations since construction (cache hits excluded).
    int backend_calls() const { return backend_calls_.load(); }
    /// High-water mark of concurrent in-flight requests.
    int max_in_flight() const { return max_in_flight_.load(); }

    /// Content digest of (system_text, user_text, model, temperature, seed,
    /// max_tokens); names the cache entry.
    static std::string cache_key(const Prompt& prompt, const BackendSpec& backend,
                                 const DecodeConfig& decode);

private:
    std::string call_backend(const Prompt& prompt);
    std::string call_http(const Prompt& prompt);
    std::string call_mock(const Prompt& prompt);

    BackendSpec backend_;
    DecodeConfig decode_;
    std::filesystem::path cache_dir_;
    std::mutex cache_mutex_;
    std::atomic<int> backend_calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

} // namespace seeksolve
