#include "tcva/pipeline.hpp"

#include <atomic>
#include <thread>

#include <json.hpp>

#include "tcva/error.hpp"

namespace tcva {

using nlohmann::json;

namespace {

// Spans of balanced {...} blocks in `text`, respecting string literals.
std::vector<std::string> candidate_json_blocks(const std::string& text) {
    std::vector<std::string> blocks;
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}' && --depth == 0) {
                blocks.push_back(text.substr(start, i - start + 1));
                start = i; // resume scanning after this block
                break;
            }
        }
    }
    return blocks;
}

template <typename Fn>
auto with_retries(const RetryPolicy& policy, JudgeBackend& judge, JudgeRequest request,
                  const std::string& retry_reminder, Fn&& parse) {
    Errc last_code = Errc::parse;
    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        try {
            return parse(judge.complete(request));
        } catch (const Error& e) {
            if (e.code() != Errc::transport && e.code() != Errc::parse &&
                e.code() != Errc::extraction_failure)
                throw;
            last_code = e.code();
            last_error = e.what();
        }
        if (attempt == policy.max_attempts) break;
        if (last_code != Errc::transport && !retry_reminder.empty())
            request.messages.push_back({"user", retry_reminder});
        if (policy.base_delay.count() > 0)
            std::this_thread::sleep_for(policy.base_delay * (1 << (attempt - 1)));
    }
    fail(last_code, "judge gave no usable reply after " + std::to_string(policy.max_attempts) +
                        " attempts; last error: " + last_error);
}

} // namespace

std::vector<std::string> parse_extraction_response(const std::string& raw) {
    json payload;
    bool found = false;
    for (const auto& block : candidate_json_blocks(raw)) {
        json doc = json::parse(block, nullptr, false);
        if (doc.is_discarded() || !doc.contains("claims") || !doc.at("claims").is_array())
            continue;
        payload = doc.at("claims");
        found = true;
        break;
    }
    if (!found) {
        // tolerate a bare JSON array reply
        json doc = json::parse(raw, nullptr, false);
        if (doc.is_array()) {
            payload = doc;
            found = true;
        }
    }
    if (!found) fail(Errc::parse, "no claims payload found in judge reply: " + raw);

    std::vector<std::string> claims;
    for (const auto& item : payload) {
        if (!item.is_string()) fail(Errc::parse, "claims payload holds a non-string entry");
        if (auto text = item.get<std::string>(); !text.empty()) claims.push_back(std::move(text));
    }
    if (claims.empty())
        fail(Errc::extraction_failure, "judge returned zero claims; raw reply: " + raw);
    return claims;
}

ParsedVerdict parse_judge_response(const std::string& raw) {
    for (const auto& block : candidate_json_blocks(raw)) {
        json doc = json::parse(block, nullptr, false);
        if (doc.is_discarded() || !doc.contains("level") || !doc.at("level").is_string())
            continue;
        const auto level = parse_verdict_level(doc.at("level").get<std::string>());
        if (!level) continue;
        ParsedVerdict parsed;
        parsed.level = *level;
        if (doc.contains("reasoning") && doc.at("reasoning").is_string())
            parsed.reasoning = doc.at("reasoning").get<std::string>();
        if (doc.contains("grounding") && doc.at("grounding").is_string())
            parsed.grounding = doc.at("grounding").get<std::string>();
        return parsed;
    }
    fail(Errc::parse, "no recognizable verdict level in judge reply: " + raw);
}

std::vector<Claim> extract_claims(const EvaluationSample& sample, const MetricConfig& config,
                                  JudgeBackend& judge, const PipelineOptions& options) {
    sample.validate();
    config.validate();

    JudgeRequest request;
    request.kind = JudgeRequest::Kind::ClaimExtraction;
    request.sample_id = sample.id;
    request.metric_name = config.metric_name;
    request.answer = sample.answer;
    request.messages = render_extraction_prompt(options.templates, sample, config);

    auto texts = with_retries(options.retry, judge, std::move(request),
                              options.templates.retry_reminder,
                              [](const std::string& raw) { return parse_extraction_response(raw); });

    if (texts.size() > config.max_claims) texts.resize(config.max_claims);
    std::vector<Claim> claims;
    claims.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) claims.push_back({i, std::move(texts[i])});
    return claims;
}

VerdictRecord assign_verdict(const Claim& claim, const EvaluationSample& sample,
                             const MetricConfig& config, JudgeBackend& judge,
                             const PipelineOptions& options) {
    JudgeRequest request;
    request.kind = JudgeRequest::Kind::VerdictAssignment;
    request.sample_id = sample.id;
    request.metric_name = config.metric_name;
    request.answer = sample.answer;
    request.claim_text = claim.text;
    request.messages = render_verdict_prompt(options.templates, claim, sample, config);

    auto parsed = with_retries(options.retry, judge, std::move(request),
                               options.templates.retry_reminder,
                               [](const std::string& raw) { return parse_judge_response(raw); });

    VerdictRecord record;
    record.claim = claim;
    record.level = parsed.level;
    record.reasoning = parsed.reasoning;
    if (!parsed.grounding.empty()) record.grounding_excerpt = parsed.grounding;
    return record;
}

CachedEvaluation evaluate_sample(const EvaluationSample& sample, const MetricConfig& config,
                                 JudgeBackend& judge, VerdictCache& cache,
                                 const PipelineOptions& options) {
    sample.validate();
    config.validate();

    const CacheKey key{sample.id, config.metric_name, judge.model_id(),
                       options.templates.version()};
    if (auto hit = cache.find(key)) return *hit;

    CachedEvaluation entry;
    entry.sample_id = sample.id;
    entry.metric_name = config.metric_name;
    entry.judge_model_id = key.judge_model_id;
    entry.prompt_version = key.prompt_version;
    entry.claims = extract_claims(sample, config, judge, options);
    for (const auto& claim : entry.claims)
        entry.verdicts.push_back(assign_verdict(claim, sample, config, judge, options));
    entry.created_at = current_utc_timestamp();

    cache.insert(entry);
    return entry;
}

DatasetEvaluation evaluate_dataset(const std::vector<EvaluationSample>& samples,
                                   const MetricConfig& config, JudgeBackend& judge,
                                   VerdictCache& cache, unsigned parallelism,
                                   const PipelineOptions& options) {
    if (parallelism == 0) fail(Errc::config, "parallelism must be >= 1");

    struct Slot {
        std::optional<CachedEvaluation> evaluation;
        std::optional<SampleFailure> failure;
    };
    std::vector<Slot> slots(samples.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= samples.size()) return;
            try {
                slots[i].evaluation = evaluate_sample(samples[i], config, judge, cache, options);
            } catch (const std::exception& e) {
                slots[i].failure = SampleFailure{samples[i].id, e.what()};
            }
        }
    };

    const unsigned n_workers =
        std::min<std::size_t>(parallelism, std::max<std::size_t>(samples.size(), 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (unsigned t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }

    DatasetEvaluation result;
    for (auto& slot : slots) {
        if (slot.evaluation) result.evaluations.push_back(std::move(*slot.evaluation));
        else if (slot.failure) result.failures.push_back(std::move(*slot.failure));
    }
    return result;
}

} // namespace tcva
