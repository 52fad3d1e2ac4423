#include "tcva/cache.hpp"

#include <ctime>
#include <fstream>

#include <json.hpp>

#include "tcva/error.hpp"

namespace tcva {

using nlohmann::json;

std::string current_utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::vector<VerdictLevel> CachedEvaluation::levels() const {
    std::vector<VerdictLevel> levels;
    levels.reserve(verdicts.size());
    for (const auto& verdict : verdicts) levels.push_back(verdict.level);
    return levels;
}

std::string CachedEvaluation::to_jsonl() const {
    json claims_json = json::array();
    for (const auto& claim : claims)
        claims_json.push_back({{"index", claim.index}, {"text", claim.text}});

    json verdicts_json = json::array();
    for (const auto& verdict : verdicts) {
        json v{{"index", verdict.claim.index},
               {"level", std::string(to_string(verdict.level))},
               {"reasoning", verdict.reasoning}};
        if (verdict.grounding_excerpt) v["grounding"] = *verdict.grounding_excerpt;
        verdicts_json.push_back(std::move(v));
    }

    return json{{"sample_id", sample_id},
                {"metric_name", metric_name},
                {"claims", claims_json},
                {"verdicts", verdicts_json},
                {"judge_model_id", judge_model_id},
                {"prompt_version", prompt_version},
                {"created_at", created_at}}
        .dump();
}

CachedEvaluation CachedEvaluation::from_jsonl(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        fail(Errc::schema, std::string("cache line is not valid JSON: ") + e.what());
    }
    try {
        CachedEvaluation entry;
        entry.sample_id = doc.at("sample_id").get<std::string>();
        entry.metric_name = doc.at("metric_name").get<std::string>();
        entry.judge_model_id = doc.at("judge_model_id").get<std::string>();
        entry.prompt_version = doc.at("prompt_version").get<std::string>();
        entry.created_at = doc.at("created_at").get<std::string>();
        for (const auto& claim_json : doc.at("claims")) {
            Claim claim;
            claim.index = claim_json.at("index").get<std::size_t>();
            claim.text = claim_json.at("text").get<std::string>();
            entry.claims.push_back(std::move(claim));
        }
        for (const auto& verdict_json : doc.at("verdicts")) {
            VerdictRecord verdict;
            verdict.claim.index = verdict_json.at("index").get<std::size_t>();
            const auto level_name = verdict_json.at("level").get<std::string>();
            const auto level = parse_verdict_level(level_name);
            if (!level) fail(Errc::schema, "cache entry: unknown level '" + level_name + "'");
            verdict.level = *level;
            verdict.reasoning = verdict_json.at("reasoning").get<std::string>();
            if (verdict_json.contains("grounding"))
                verdict.grounding_excerpt = verdict_json.at("grounding").get<std::string>();
            if (verdict.claim.index < entry.claims.size())
                verdict.claim.text = entry.claims[verdict.claim.index].text;
            entry.verdicts.push_back(std::move(verdict));
        }
        if (entry.claims.empty() || entry.claims.size() != entry.verdicts.size())
            fail(Errc::schema, "cache entry '" + entry.sample_id +
                                   "': |claims| must equal |verdicts| and be >= 1");
        return entry;
    } catch (const json::exception& e) {
        fail(Errc::schema, std::string("cache entry missing field: ") + e.what());
    }
}

std::string CacheKey::describe() const {
    return "(sample_id=" + sample_id + ", metric=" + metric_name + ", judge=" + judge_model_id +
           ", prompt_version=" + prompt_version + ")";
}

namespace {

CacheKey key_of(const CachedEvaluation& entry) {
    return CacheKey{entry.sample_id, entry.metric_name, entry.judge_model_id,
                    entry.prompt_version};
}

} // namespace

VerdictCache::VerdictCache(VerdictCache&& other) noexcept {
    std::lock_guard lock(other.mutex_);
    entries_ = std::move(other.entries_);
}

VerdictCache& VerdictCache::operator=(VerdictCache&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        entries_ = std::move(other.entries_);
    }
    return *this;
}

VerdictCache VerdictCache::load(const std::string& path) {
    VerdictCache cache;
    std::ifstream in(path);
    if (!in) return cache;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            cache.insert(CachedEvaluation::from_jsonl(line));
        } catch (const Error& e) {
            fail(Errc::schema,
                 "cache '" + path + "' line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cache;
}

std::optional<CachedEvaluation> VerdictCache::find(const CacheKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void VerdictCache::insert(const CachedEvaluation& entry) {
    std::lock_guard lock(mutex_);
    entries_.insert_or_assign(key_of(entry), entry);
}

std::size_t VerdictCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<CachedEvaluation> VerdictCache::entries() const {
    std::lock_guard lock(mutex_);
    std::vector<CachedEvaluation> out;
    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) out.push_back(entry);
    return out;
}

void VerdictCache::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write cache file '" + path + "'");
    for (const auto& entry : entries()) out << entry.to_jsonl() << '\n';
}

void VerdictCache::append_line(const std::string& path, const CachedEvaluation& entry) {
    std::ofstream out(path, std::ios::app);
    if (!out) fail(Errc::io, "cannot append to cache file '" + path + "'");
    out << entry.to_jsonl() << '\n';
}

} // namespace tcva
