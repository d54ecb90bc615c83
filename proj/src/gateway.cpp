#include "cerlens/gateway.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cerlens/scoring.hpp"

namespace cerlens {

std::string_view to_string(ProviderKind kind) {
    return kind == ProviderKind::Mock ? "mock" : "http_chat";
}

std::optional<ProviderKind> provider_kind_from_string(std::string_view name) {
    if (name == "mock") return ProviderKind::Mock;
    if (name == "http_chat" || name == "http") return ProviderKind::HttpChat;
    return std::nullopt;
}

std::string build_prompt(const Problem& problem) {
    std::string prompt;
    prompt += "You are given a Python program and the exact text it reads from standard input.\n";
    prompt += "Reason about how the program executes on this input and predict what it prints.\n\n";
    prompt += "Program:\n```python\n";
    prompt += problem.source;
    if (!problem.source.empty() && problem.source.back() != '\n') prompt += '\n';
    prompt += "```\n\n";
    prompt += "Standard input:\n```\n";
    prompt += problem.input_text;
    if (!problem.input_text.empty() && problem.input_text.back() != '\n') prompt += '\n';
    prompt += "```\n\n";
    prompt += "You may explain your reasoning first. End your answer with a line containing only ";
    prompt += kAnswerMarker;
    prompt += " followed by the predicted output on the next line(s), exactly as the program would print it.\n";
    return prompt;
}

std::string prompt_hash(std::string_view prompt) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : prompt) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

void validate(const ProviderConfig& config) {
    if (config.model_id.empty()) throw Error("provider configuration needs a model id");
    if (config.kind == ProviderKind::HttpChat) {
        const char* key = std::getenv(config.api_key_env.c_str());
        if (config.api_key_env.empty() || key == nullptr || *key == '\0') {
            throw MissingApiKey(config.api_key_env.empty() ? "<unset api_key_env>" : config.api_key_env);
        }
    } else if (!std::filesystem::exists(config.mock_fixture)) {
        throw MissingFile(config.mock_fixture);
    }
}

namespace {

std::string excerpt(std::string_view body, std::size_t limit = 200) {
    if (body.size() <= limit) return std::string(body);
    return std::string(body.substr(0, limit)) + "...";
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos)) {
        text.replace(pos, secret.size(), "<redacted>");
    }
    return text;
}

std::string query_mock(const ProviderConfig& config, const std::string& prompt) {
    std::ifstream in(config.mock_fixture);
    if (!in) throw MissingFile(config.mock_fixture);
    nlohmann::json fixture;
    try {
        fixture = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(config.mock_fixture.string() + ": " + e.what());
    }
    const std::string hash = prompt_hash(prompt);
    for (const std::string& key : {hash, std::string("default")}) {
        if (auto it = fixture.find(key); it != fixture.end() && it->is_string()) {
            return it->get<std::string>();
        }
    }
    throw MockFixtureMiss("no mock response for prompt hash " + hash + " in " + config.mock_fixture.string());
}

struct Endpoint {
    std::string origin;
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, pattern)) throw Error("invalid endpoint URL: " + url);
    std::string path = m[2].matched ? m[2].str() : std::string();
    while (!path.empty() && path.back() == '/') path.pop_back();
    if (path.empty()) path = "/v1";
    if (!path.ends_with("/chat/completions")) path += "/chat/completions";
    return {m[1].str(), path};
}

bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

std::string query_http(const ProviderConfig& config, const std::string& prompt) {
    const char* env = std::getenv(config.api_key_env.c_str());
    if (env == nullptr || *env == '\0') throw MissingApiKey(config.api_key_env);
    const std::string key = env;
    const Endpoint endpoint = split_endpoint(config.endpoint);

    const nlohmann::json request = {
        {"model", config.model_id},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config.temperature},
        {"max_tokens", config.max_tokens},
    };
    const std::string body = request.dump();

    httplib::Client client(endpoint.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    const httplib::Headers headers = {{"Authorization", "Bearer " + key}};

    auto delay = config.backoff;
    std::string last_failure;
    bool last_was_timeout = false;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
        if (config.verbose) {
            fmt::print(stderr, "[{}] POST {}{} (attempt {})\n{}\n", config.model_id, endpoint.origin, endpoint.path,
                       attempt + 1, redact(body, key));
        }
        auto response = client.Post(endpoint.path, headers, body, "application/json");
        if (!response) {
            const auto err = response.error();
            last_was_timeout = err == httplib::Error::Read || err == httplib::Error::Write ||
                               err == httplib::Error::ConnectionTimeout;
            last_failure = httplib::to_string(err);
            if (config.verbose) fmt::print(stderr, "[{}] transport error: {}\n", config.model_id, last_failure);
            continue;
        }
        if (config.verbose) {
            fmt::print(stderr, "[{}] HTTP {}\n{}\n", config.model_id, response->status, redact(response->body, key));
        }
        if (transient(response->status)) {
            last_was_timeout = response->status == 408;
            last_failure = fmt::format("HTTP {}: {}", response->status, excerpt(response->body));
            if (attempt == config.max_retries && !last_was_timeout) {
                throw HttpError(response->status, excerpt(redact(response->body, key)));
            }
            continue;
        }
        if (response->status < 200 || response->status >= 300) {
            throw HttpError(response->status, excerpt(redact(response->body, key)));
        }
        try {
            const auto parsed = nlohmann::json::parse(response->body);
            const auto& content = parsed.at("choices").at(0).at("message").at("content");
            return content.is_string() ? content.get<std::string>() : std::string();
        } catch (const nlohmann::json::exception& e) {
            throw HttpError(response->status, "unexpected response body: " + excerpt(response->body));
        }
    }
    if (last_was_timeout) throw Timeout("request to " + endpoint.origin + " timed out: " + last_failure);
    throw HttpError(0, "request to " + endpoint.origin + " failed: " + last_failure);
}

class RateLimiter {
public:
    explicit RateLimiter(double per_minute)
        : interval_(per_minute > 0 ? std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                         std::chrono::duration<double>(60.0 / per_minute))
                                   : std::chrono::steady_clock::duration::zero()) {}

    void acquire() {
        if (interval_ == std::chrono::steady_clock::duration::zero()) return;
        std::chrono::steady_clock::time_point slot;
        {
            std::lock_guard lock(mutex_);
            const auto now = std::chrono::steady_clock::now();
            slot = std::max(now, next_);
            next_ = slot + interval_;
        }
        std::this_thread::sleep_until(slot);
    }

private:
    std::chrono::steady_clock::duration interval_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_{};
};

}  // namespace

std::string query_model(const ProviderConfig& config, const std::string& prompt) {
    return config.kind == ProviderKind::Mock ? query_mock(config, prompt) : query_http(config, prompt);
}

ResultSet collect_predictions(const ProviderConfig& config, const std::vector<Problem>& problems,
                              const std::filesystem::path& out_dir) {
    validate(config);
    if (problems.empty()) return ResultSet{config.model_id, {}, {}, {}};
    const std::string benchmark = problems.front().benchmark_id;
    const auto path = out_dir / result_filename(config.model_id, benchmark);

    ResultSet set;
    if (std::filesystem::exists(path)) {
        set = load_results(path);
    } else {
        set.model_id = config.model_id;
        set.benchmark_id = benchmark;
    }
    set.metadata["prompt_template"] = std::string(kPromptTemplateVersion);
    set.metadata["temperature"] = config.temperature;
    set.metadata["max_tokens"] = config.max_tokens;

    std::vector<const Problem*> pending;
    for (const auto& p : problems) {
        const auto it = set.records.find(p.problem_id);
        if (it == set.records.end() || it->second.error) pending.push_back(&p);
    }
    std::filesystem::create_directories(out_dir);
    if (pending.empty()) {
        write_results(path, set);
        return set;
    }

    std::mutex writer;
    RateLimiter limiter(config.requests_per_minute);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < pending.size(); i = next++) {
            const Problem& problem = *pending[i];
            PredictionRecord record;
            record.problem_id = problem.problem_id;
            try {
                limiter.acquire();
                const std::string response = query_model(config, build_prompt(problem));
                record.predicted_output = extract_answer(response);
                record.reasoning = response;
            } catch (const Error& e) {
                record.error = e.what();
                if (config.verbose) fmt::print(stderr, "[{}] {} failed: {}\n", config.model_id, problem.key(), e.what());
            }
            std::lock_guard lock(writer);
            set.records[problem.problem_id] = std::move(record);
            write_results(path, set);
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(config.concurrency, 1, pending.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    return set;
}

}  // namespace cerlens
