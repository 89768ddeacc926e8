#pragma once

#ifdef BHI_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bhi/dates.hpp"
#include "bhi/error.hpp"
#include "bhi/impact.hpp"
#include "bhi/types.hpp"

namespace bhi {

struct FetchOptions {
    std::string github_api = "https://api.github.com";
    std::string huggingface_api = "https://huggingface.co";
    std::optional<std::string> github_token;       // defaults to $BHI_GITHUB_TOKEN
    std::optional<std::string> huggingface_token;  // defaults to $BHI_HF_TOKEN
    double timeout_seconds = 10.0;
    std::size_t concurrency = 4;
    std::size_t max_attempts = 3;
    double backoff_base_seconds = 0.5;
    std::size_t min_interval_ms = 0;  // per-platform pacing between requests
    std::optional<Date> stamp;        // fetched_at override; default = today (UTC)
};

namespace detail {

inline Date today_utc() {
    const auto now = std::time(nullptr);
    return Date{static_cast<std::int32_t>(now / 86400)};
}

inline std::optional<std::string> env_token(const char* name) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
}

/// Serializes request dispatch per platform and enforces a minimum interval.
class Pacer {
public:
    explicit Pacer(std::size_t min_interval_ms) : interval_(min_interval_ms) {}

    void wait_turn() {
        std::unique_lock lock(mutex_);
        if (interval_.count() > 0) {
            const auto now = std::chrono::steady_clock::now();
            if (now < next_) std::this_thread::sleep_until(next_);
            next_ = std::chrono::steady_clock::now() + interval_;
        }
    }

private:
    std::mutex mutex_;
    std::chrono::milliseconds interval_;
    std::chrono::steady_clock::time_point next_{};
};

struct PlatformResult {
    std::optional<nlohmann::json> body;  // empty on not-found
    std::optional<std::string> warning;
};

/// One GET with bounded retries. Rate limits (429, or 403 with an exhausted
/// quota header) and server errors back off exponentially, honoring
/// Retry-After when present; 404 resolves to an absent platform.
inline PlatformResult fetch_json(const std::string& base, const std::string& path,
                                 const std::optional<std::string>& token, const char* platform,
                                 const FetchOptions& options, Pacer& pacer) {
    httplib::Client client(base);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(options.timeout_seconds * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(static_cast<int>(options.timeout_seconds * 1000)));
    client.set_follow_location(true);

    httplib::Headers headers{{"User-Agent", "bhi-fetch"}, {"Accept", "application/json"}};
    if (token.has_value()) headers.emplace("Authorization", "Bearer " + *token);

    std::string last_failure = "no attempt made";
    for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        if (attempt > 0) {
            double delay = options.backoff_base_seconds * std::pow(2.0, static_cast<double>(attempt - 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<int>(delay * 1000)));
        }
        pacer.wait_turn();
        auto res = client.Get(path, headers);
        if (!res) {
            last_failure = "connection error (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status == 200) {
            try {
                return {nlohmann::json::parse(res->body), std::nullopt};
            } catch (const nlohmann::json::exception& e) {
                throw Error("fetch", std::string(platform) + ": invalid JSON from " + path + ": " + e.what());
            }
        }
        if (res->status == 404) return {std::nullopt, std::string(platform) + ": not found: " + path};
        if (res->status == 401)
            throw Error("fetch", std::string(platform) + ": authentication failed (401) for " + path);
        const bool rate_limited =
            res->status == 429 ||
            (res->status == 403 && res->get_header_value("X-RateLimit-Remaining") == "0");
        if (res->status == 403 && !rate_limited)
            throw Error("fetch", std::string(platform) + ": access forbidden (403) for " + path);
        if (rate_limited || res->status >= 500) {
            last_failure = "status " + std::to_string(res->status);
            const std::string retry_after = res->get_header_value("Retry-After");
            if (!retry_after.empty()) {
                const long seconds = std::strtol(retry_after.c_str(), nullptr, 10);
                if (seconds > 0 && seconds <= 30)
                    std::this_thread::sleep_for(std::chrono::seconds(seconds));
            }
            continue;
        }
        throw Error("fetch", std::string(platform) + ": unexpected status " + std::to_string(res->status) +
                                 " for " + path);
    }
    throw Error("fetch", std::string(platform) + ": giving up on " + path + " after " +
                             std::to_string(options.max_attempts) + " attempts: " + last_failure);
}

}  // namespace detail

/// Snapshot community statistics for every benchmark carrying platform
/// identifiers. Requests run with bounded concurrency; a missing repo or
/// dataset is recorded as an absent platform (with a note), never as zeros.
inline SnapshotFile fetch_community(const BenchmarkRegistry& benchmarks, FetchOptions options = {}) {
    if (!options.github_token.has_value()) options.github_token = detail::env_token("BHI_GITHUB_TOKEN");
    if (!options.huggingface_token.has_value())
        options.huggingface_token = detail::env_token("BHI_HF_TOKEN");
    if (options.concurrency == 0) options.concurrency = 1;

    SnapshotFile snapshot;
    snapshot.fetched_at = options.stamp.value_or(detail::today_utc());
    snapshot.entries.resize(benchmarks.size());

    std::vector<std::vector<std::string>> notes(benchmarks.size());
    detail::Pacer github_pacer(options.min_interval_ms);
    detail::Pacer huggingface_pacer(options.min_interval_ms);

    std::atomic<std::size_t> cursor{0};
    std::mutex failure_mutex;
    std::optional<Error> failure;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= benchmarks.size()) return;
            {
                std::scoped_lock lock(failure_mutex);
                if (failure.has_value()) return;
            }
            const BenchmarkMeta& meta = benchmarks.items()[i];
            CommunitySnapshot entry;
            entry.benchmark_id = meta.id;
            try {
                if (meta.github_repo.has_value()) {
                    const auto result =
                        detail::fetch_json(options.github_api, "/repos/" + *meta.github_repo,
                                           options.github_token, "github", options, github_pacer);
                    if (result.body.has_value()) {
                        GithubCounts counts;
                        counts.stars = result.body->value("stargazers_count", std::int64_t{0});
                        counts.forks = result.body->value("forks_count", std::int64_t{0});
                        entry.github = counts;
                    }
                    if (result.warning.has_value())
                        notes[i].push_back(meta.id + ": " + *result.warning);
                }
                if (meta.hf_dataset.has_value()) {
                    const auto result = detail::fetch_json(options.huggingface_api,
                                                           "/api/datasets/" + *meta.hf_dataset,
                                                           options.huggingface_token, "huggingface",
                                                           options, huggingface_pacer);
                    if (result.body.has_value()) {
                        HuggingFaceCounts counts;
                        counts.likes = result.body->value("likes", std::int64_t{0});
                        counts.downloads = result.body->value("downloads", std::int64_t{0});
                        entry.huggingface = counts;
                    }
                    if (result.warning.has_value())
                        notes[i].push_back(meta.id + ": " + *result.warning);
                }
            } catch (const Error& e) {
                std::scoped_lock lock(failure_mutex);
                if (!failure.has_value()) failure = e;
                return;
            }
            snapshot.entries[i] = std::move(entry);
        }
    };

    std::vector<std::thread> pool;
    const std::size_t threads = std::min(options.concurrency, benchmarks.size());
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure.has_value()) throw *failure;

    snapshot.notes.push_back(
        "huggingface downloads recorded as returned by the hub API 'downloads' field (default window)");
    for (auto& group : notes)
        for (auto& note : group) snapshot.notes.push_back(std::move(note));
    return snapshot;
}

}  // namespace bhi
