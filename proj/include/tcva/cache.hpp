#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tcva/judge.hpp"

namespace tcva {

// Persisted per-sample claims and verdicts. The key deliberately excludes the
// aggregation temperature: stored verdicts re-aggregate at any temperature
// with zero judge calls.
struct CachedEvaluation {
    std::string sample_id;
    std::string metric_name;
    std::vector<Claim> claims;
    std::vector<VerdictRecord> verdicts;
    std::string judge_model_id;
    std::string prompt_version;
    std::string created_at; // ISO-8601 UTC

    std::vector<VerdictLevel> levels() const;
    std::string to_jsonl() const;
    static CachedEvaluation from_jsonl(const std::string& line);
};

struct CacheKey {
    std::string sample_id;
    std::string metric_name;
    std::string judge_model_id;
    std::string prompt_version;

    auto operator<=>(const CacheKey&) const = default;
    std::string describe() const;
};

// JSON Lines verdict cache, one CachedEvaluation per line. A mutex
// serializes all access (single-writer contract).
class VerdictCache {
public:
    VerdictCache() = default;
    VerdictCache(VerdictCache&& other) noexcept;
    VerdictCache& operator=(VerdictCache&& other) noexcept;

    // Loads existing entries; a missing file is an empty cache.
    static VerdictCache load(const std::string& path);

    std::optional<CachedEvaluation> find(const CacheKey& key) const;
    void insert(const CachedEvaluation& entry);
    std::size_t size() const;

    // Every entry in deterministic (key-sorted) order.
    std::vector<CachedEvaluation> entries() const;

    // Rewrites `path` with entries in key-sorted order, so cache files from
    // parallel runs are byte-identical modulo timestamps.
    void save(const std::string& path) const;

    // Appends a single entry to `path` (crash-safe incremental persistence).
    static void append_line(const std::string& path, const CachedEvaluation& entry);

private:
    mutable std::mutex mutex_;
    std::map<CacheKey, CachedEvaluation> entries_;
};

std::string current_utc_timestamp();

} // namespace tcva
