#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cerlens/corpus.hpp"

namespace cerlens {

enum class ProviderKind { HttpChat, Mock };

std::string_view to_string(ProviderKind kind);
std::optional<ProviderKind> provider_kind_from_string(std::string_view name);

struct ProviderConfig {
    std::string model_id;
    /// OpenAI-compatible base URL or full chat-completions URL.
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    double temperature = 0.0;
    int max_tokens = 1024;
    ProviderKind kind = ProviderKind::HttpChat;
    /// JSON object mapping prompt hashes (and optionally "default") to responses.
    std::filesystem::path mock_fixture;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 3;
    /// Delay before the first retry; doubled for each further attempt.
    std::chrono::milliseconds backoff{1000};
    std::size_t concurrency = 4;
    /// 0 disables rate limiting.
    double requests_per_minute = 0;
    bool verbose = false;
};

class MissingApiKey : public Error {
public:
    explicit MissingApiKey(const std::string& env)
        : Error("environment variable " + env + " holding the API key is not set") {}
};

class HttpError : public Error {
public:
    HttpError(int status, std::string excerpt)
        : Error("HTTP " + std::to_string(status) + ": " + excerpt), status_(status), excerpt_(std::move(excerpt)) {}
    int status() const noexcept { return status_; }
    const std::string& excerpt() const noexcept { return excerpt_; }

private:
    int status_;
    std::string excerpt_;
};

class Timeout : public Error {
public:
    using Error::Error;
};

class MockFixtureMiss : public Error {
public:
    using Error::Error;
};

inline constexpr std::string_view kPromptTemplateVersion = "output-prediction/v1";

std::string build_prompt(const Problem& problem);

/// 16 lowercase hex digits of the FNV-1a 64-bit hash of `prompt`.
std::string prompt_hash(std::string_view prompt);

/// Throws MissingApiKey / DataError for configurations that cannot work at all.
void validate(const ProviderConfig& config);

std::string query_model(const ProviderConfig& config, const std::string& prompt);

/// Queries every problem missing from (or failed in) the existing result file
/// at `out_dir/{model}_{benchmark}.json`, rewriting the file after each answer.
/// Per-problem failures are stored as empty predictions with `error` set.
ResultSet collect_predictions(const ProviderConfig& config, const std::vector<Problem>& problems,
                              const std::filesystem::path& out_dir);

}  // namespace cerlens
