#include "seeksolve/gateway.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <httplib.h>

#include "seeksolve/digest.hpp"
#include "seeksolve/errors.hpp"

namespace seeksolve {

namespace {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// "http://host:1234/v1" -> base "http://host:1234", prefix "/v1".
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("endpoint \"" + endpoint + "\" has no scheme");
    size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, slash), prefix};
}

} // namespace

DecodeConfig decode_from_json(const nlohmann::json& doc) {
    DecodeConfig cfg;
    try {
        cfg.temperature = doc.value("temperature", cfg.temperature);
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.max_tokens = doc.value("max_tokens", cfg.max_tokens);
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(std::string("bad decode config: ") + err.what());
    }
    if (cfg.max_tokens <= 0) throw ConfigError("max_tokens must be positive");
    return cfg;
}

nlohmann::json decode_to_json(const DecodeConfig& cfg) {
    return {{"temperature", cfg.temperature},
            {"seed", cfg.seed},
            {"max_tokens", cfg.max_tokens}};
}

BackendSpec backend_from_json(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir) {
    BackendSpec spec;
    try {
        std::string kind = doc.at("kind").get<std::string>();
        if (kind == "http" || kind == "http_openai_compatible") {
            spec.kind = BackendKind::http_openai_compatible;
        } else if (kind == "mock" || kind == "scripted_mock") {
            spec.kind = BackendKind::scripted_mock;
        } else {
            throw ConfigError("unknown backend kind \"" + kind +
                              "\"; expected \"http\" or \"mock\"");
        }
        spec.endpoint = doc.value("endpoint", spec.endpoint);
        spec.model_name = doc.value("model", spec.model_name);
        spec.api_key_env = doc.value("api_key_env", spec.api_key_env);
        spec.max_attempts = doc.value("max_attempts", spec.max_attempts);
        spec.retry_backoff_ms = doc.value("retry_backoff_ms", spec.retry_backoff_ms);
        spec.timeout_s = doc.value("timeout_s", spec.timeout_s);
        spec.mock_latency_ms = doc.value("mock_latency_ms", spec.mock_latency_ms);

        nlohmann::json script = doc.value("script", nlohmann::json::object());
        if (doc.contains("script_file")) {
            std::filesystem::path file = doc.at("script_file").get<std::string>();
            if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
            script = nlohmann::json::parse(read_text_file(file));
        }
        for (const auto& [digest, response] : script.items())
            spec.script[digest] = response.get<std::string>();
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(std::string("bad backend config: ") + err.what());
    }

    if (spec.kind == BackendKind::http_openai_compatible) {
        if (spec.endpoint.empty())
            throw ConfigError("http backend needs an \"endpoint\"");
        if (spec.model_name.empty())
            throw ConfigError("http backend needs a \"model\"");
        split_endpoint(spec.endpoint); // validates the scheme early
    }
    if (spec.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    return spec;
}

nlohmann::json backend_to_json(const BackendSpec& spec) {
    nlohmann::json doc{
        {"kind", spec.kind == BackendKind::http_openai_compatible ? "http" : "mock"},
        {"endpoint", spec.endpoint},
        {"model", spec.model_name},
        {"api_key_env", spec.api_key_env},
        {"max_attempts", spec.max_attempts},
        {"retry_backoff_ms", spec.retry_backoff_ms},
        {"timeout_s", spec.timeout_s},
        {"mock_latency_ms", spec.mock_latency_ms}};
    nlohmann::json script = nlohmann::json::object();
    for (const auto& [digest, response] : spec.script) script[digest] = response;
    doc["script"] = std::move(script);
    return doc;
}

Gateway::Gateway(BackendSpec backend, DecodeConfig decode,
                 std::filesystem::path cache_dir)
    : backend_(std::move(backend)),
      decode_(decode),
      cache_dir_(std::move(cache_dir)) {
    if (!cache_dir_.empty()) std::filesystem::create_directories(cache_dir_);
}

std::string Gateway::cache_key(const Prompt& prompt, const BackendSpec& backend,
                               const DecodeConfig& decode) {
    // Canonical JSON (sorted keys) keeps the key stable across processes.
    nlohmann::json doc{{"system", prompt.system_text},
                       {"user", prompt.user_text},
                       {"model", backend.model_name},
                       {"temperature", decode.temperature},
                       {"seed", decode.seed},
                       {"max_tokens", decode.max_tokens}};
    return sha256_hex(doc.dump());
}

std::string Gateway::complete(const Prompt& prompt) {
    std::filesystem::path cache_file;
    if (!cache_dir_.empty()) {
        cache_file = cache_dir_ / (cache_key(prompt, backend_, decode_) + ".json");
        if (std::filesystem::exists(cache_file)) {
            // Writes are atomic renames, so a plain read never sees torn data.
            nlohmann::json doc = nlohmann::json::parse(read_text_file(cache_file));
            return doc.at("text").get<std::string>();
        }
    }

    std::string text = call_backend(prompt);

    if (!cache_file.empty()) {
        nlohmann::json doc{{"text", text},
                           {"prompt_digest", prompt.digest()},
                           {"variant_tag", prompt.variant_tag},
                           {"model", backend_.model_name}};
        std::lock_guard<std::mutex> lock(cache_mutex_);
        std::filesystem::path tmp = cache_file;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << doc.dump(2) << "\n";
            if (!out) throw GatewayError("cannot write cache file " + tmp.string());
        }
        std::filesystem::rename(tmp, cache_file);
    }
    return text;
}

std::string Gateway::call_backend(const Prompt& prompt) {
    in_flight_.fetch_add(1);
    int now = in_flight_.load();
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {}
    struct Depart {
        std::atomic<int>& counter;
        ~Depart() { counter.fetch_sub(1); }
    } depart{in_flight_};

    for (int attempt = 0;; ++attempt) {
        backend_calls_.fetch_add(1);
        try {
            return backend_.kind == BackendKind::scripted_mock ? call_mock(prompt)
                                                               : call_http(prompt);
        } catch (const TransientError&) {
            if (attempt + 1 >= backend_.max_attempts) throw;
            auto backoff = std::chrono::milliseconds(
                static_cast<long long>(backend_.retry_backoff_ms) << attempt);
            if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
        }
    }
}

std::string Gateway::call_http(const Prompt& prompt) {
    auto [base, prefix] = split_endpoint(backend_.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(backend_.timeout_s, 0);
    client.set_read_timeout(backend_.timeout_s, 0);
    client.set_write_timeout(backend_.timeout_s, 0);

    const char* key = std::getenv(backend_.api_key_env.c_str());
    if (key && *key) client.set_bearer_token_auth(key);

    nlohmann::json messages = nlohmann::json::array();
    if (!prompt.system_text.empty())
        messages.push_back({{"role", "system"}, {"content", prompt.system_text}});
    messages.push_back({{"role", "user"}, {"content", prompt.user_text}});
    nlohmann::json body{{"model", backend_.model_name},
                        {"messages", std::move(messages)},
                        {"temperature", decode_.temperature},
                        {"seed", decode_.seed},
                        {"max_tokens", decode_.max_tokens}};

    httplib::Result res =
        client.Post(prefix + "/chat/completions", body.dump(), "application/json");
    if (!res)
        throw TransientError("request to " + backend_.endpoint +
                             " failed: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw TransientError("backend returned HTTP " + std::to_string(res->status));
    if (res->status != 200)
        throw PermanentError("backend returned HTTP " + std::to_string(res->status) +
                             ": " + res->body.substr(0, 200));

    try {
        nlohmann::json doc = nlohmann::json::parse(res->body);
        const nlohmann::json& choice = doc.at("choices").at(0);
        if (choice.value("finish_reason", "") == "length")
            std::cerr << "warning: completion for prompt " << prompt.digest().substr(0, 12)
                      << " was truncated at max_tokens=" << decode_.max_tokens << "\n";
        return choice.at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& err) {
        throw PermanentError(std::string("malformed chat-completions response: ") +
                             err.what());
    }
}

std::string Gateway::call_mock(const Prompt& prompt) {
    if (backend_.mock_latency_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(backend_.mock_latency_ms));
    auto it = backend_.script.find(prompt.digest());
    if (it == backend_.script.end())
        throw FixtureError("scripted mock has no response for prompt digest " +
                           prompt.digest() + " (variant " + prompt.variant_tag + ")");
    return it->second;
}

std::vector<Completion> Gateway::complete_batch(const std::vector<Prompt>& prompts,
                                                int parallelism) {
    std::vector<Completion> results(prompts.size());
    auto work_one = [&](size_t i) {
        try {
            results[i].text = complete(prompts[i]);
        } catch (const std::exception& err) {
            results[i].error = err.what();
        }
    };

    size_t workers = static_cast<size_t>(std::max(parallelism, 1));
    workers = std::min(workers, prompts.size());
    if (workers <= 1) {
        for (size_t i = 0; i < prompts.size(); ++i) work_one(i);
        return results;
    }

    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < prompts.size();
                 i = next.fetch_add(1))
                work_one(i);
        });
    for (std::thread& t : pool) t.join();
    return results;
}

} // namespace seeksolve
