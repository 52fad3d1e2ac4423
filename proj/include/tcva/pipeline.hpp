#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "tcva/cache.hpp"
#include "tcva/judge.hpp"
#include "tcva/prompts.hpp"

namespace tcva {

// Up to max_attempts on transport errors and parse failures; parse retries
// re-ask with the templates' stricter format reminder appended.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{250}; // doubled per attempt; zero in tests
};

struct PipelineOptions {
    PromptTemplates templates = PromptTemplates::standard();
    RetryPolicy retry;
};

struct ParsedVerdict {
    VerdictLevel level = VerdictLevel::None;
    std::string reasoning;
    std::string grounding;
};

// Extracts the first well-formed verdict payload from a judge reply,
// tolerating surrounding prose. The level keyword is matched
// case-insensitively; throws Errc::parse when no payload carries one.
ParsedVerdict parse_judge_response(const std::string& raw);

// Claim texts from an extraction reply ({"claims": [...]} or a bare JSON
// array). Throws Errc::parse on malformed payloads and
// Errc::extraction_failure (with the raw reply attached) on zero claims.
std::vector<std::string> parse_extraction_response(const std::string& raw);

// Step 1: asks the judge for at most config.max_claims sentence-level claims;
// over-production is truncated by index.
std::vector<Claim> extract_claims(const EvaluationSample& sample, const MetricConfig& config,
                                  JudgeBackend& judge, const PipelineOptions& options = {});

// Step 2 for one claim.
VerdictRecord assign_verdict(const Claim& claim, const EvaluationSample& sample,
                             const MetricConfig& config, JudgeBackend& judge,
                             const PipelineOptions& options = {});

// Steps 1-2 with caching: returns the cached entry when (sample_id, metric,
// judge_model_id, prompt_version) hits; otherwise extracts, judges every
// claim, persists into `cache` and returns. Partial failures are not
// persisted.
CachedEvaluation evaluate_sample(const EvaluationSample& sample, const MetricConfig& config,
                                 JudgeBackend& judge, VerdictCache& cache,
                                 const PipelineOptions& options = {});

struct SampleFailure {
    std::string sample_id;
    std::string error;
};

struct DatasetEvaluation {
    std::vector<CachedEvaluation> evaluations; // dataset order, failures omitted
    std::vector<SampleFailure> failures;
};

// Evaluates every sample with at most `parallelism` concurrent workers.
// Failures are captured per sample; the run continues.
DatasetEvaluation evaluate_dataset(const std::vector<EvaluationSample>& samples,
                                   const MetricConfig& config, JudgeBackend& judge,
                                   VerdictCache& cache, unsigned parallelism = 1,
                                   const PipelineOptions& options = {});

} // namespace tcva
