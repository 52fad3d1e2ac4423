#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcva/judge.hpp"

namespace tcva {

// The prompt templates behind claim extraction and verdict assignment.
// version() is a content hash over every template string, so any wording
// change invalidates cache entries keyed on it.
struct PromptTemplates {
    std::string extraction_system;
    std::string extraction_user; // placeholders: {max_claims} {question} {answer} {contexts}
    std::string verdict_system;
    std::string verdict_user;    // placeholders: {metric} {criteria} {question} {answer} {contexts} {claim}
    std::string retry_reminder;  // appended when a reply fails to parse

    static const PromptTemplates& standard();
    std::string version() const;
};

std::vector<ChatMessage> render_extraction_prompt(const PromptTemplates& templates,
                                                  const EvaluationSample& sample,
                                                  const MetricConfig& config);

std::vector<ChatMessage> render_verdict_prompt(const PromptTemplates& templates,
                                               const Claim& claim,
                                               const EvaluationSample& sample,
                                               const MetricConfig& config);

// FNV-1a 64-bit, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace tcva
