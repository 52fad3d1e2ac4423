#include "tcva/prompts.hpp"

#include <cstdio>

namespace tcva {

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

namespace {

std::string replace_all(std::string text, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
    return text;
}

std::string join_contexts(const std::vector<std::string>& contexts) {
    if (contexts.empty()) return "(no context provided)";
    std::string joined;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        joined += "[" + std::to_string(i + 1) + "] " + contexts[i];
        if (i + 1 < contexts.size()) joined += "\n";
    }
    return joined;
}

} // namespace

const PromptTemplates& PromptTemplates::standard() {
    static const PromptTemplates templates = [] {
        PromptTemplates t;
        t.extraction_system =
            "You decompose AI answers into atomic claims for evaluation. "
            "You reply with a single JSON object and nothing else.";
        t.extraction_user =
            "Break the answer below into atomic claims.\n"
            "\n"
            "Rules:\n"
            "- One claim per sentence of the answer; keep sentence-level granularity. "
            "Do not split a sentence into fragments and do not merge sentences.\n"
            "- Keep the wording of the answer; do not add facts or commentary.\n"
            "- Extract at most {max_claims} claims. If the answer contains more "
            "sentences, keep the first {max_claims}.\n"
            "\n"
            "Question:\n{question}\n"
            "\n"
            "Answer:\n{answer}\n"
            "\n"
            "Context:\n{contexts}\n"
            "\n"
            "Reply with exactly: {\"claims\": [\"...\", ...]}";
        t.verdict_system =
            "You judge one claim at a time against the metric criteria. "
            "You reply with a single JSON object and nothing else.";
        t.verdict_user =
            "Metric: {metric}\n"
            "Criteria: {criteria}\n"
            "\n"
            "Question:\n{question}\n"
            "\n"
            "Full answer:\n{answer}\n"
            "\n"
            "Context:\n{contexts}\n"
            "\n"
            "Claim under evaluation:\n{claim}\n"
            "\n"
            "Procedure:\n"
            "1. First locate the context passage most relevant to the claim and "
            "quote it in the \"grounding\" field (empty string if nothing relates).\n"
            "2. Then assign exactly one verdict level:\n"
            "- fully: the claim is fully supported by the context. A paraphrase of "
            "the context still counts as fully, not mostly.\n"
            "- mostly: grounded in the context, with only slight changes of "
            "structure or emphasis.\n"
            "- partially: about half supported by the context and half unsupported.\n"
            "- minor: not actually confirmed by the context, though isolated words "
            "or phrases from the claim do appear there.\n"
            "- none: the claim directly contradicts the context, or the context "
            "contains no related information at all. Reserve none for exactly "
            "these two cases.\n"
            "\n"
            "Reply with exactly: {\"grounding\": \"...\", \"level\": "
            "\"fully|mostly|partially|minor|none\", \"reasoning\": \"...\"}";
        t.retry_reminder =
            "Your previous reply could not be parsed. Reply with exactly one JSON "
            "object in the requested shape and no surrounding prose.";
        return t;
    }();
    return templates;
}

std::string PromptTemplates::version() const {
    return fnv1a_hex(extraction_system + "\x1f" + extraction_user + "\x1f" + verdict_system +
                     "\x1f" + verdict_user + "\x1f" + retry_reminder);
}

std::vector<ChatMessage> render_extraction_prompt(const PromptTemplates& templates,
                                                  const EvaluationSample& sample,
                                                  const MetricConfig& config) {
    std::string user = templates.extraction_user;
    user = replace_all(user, "{max_claims}", std::to_string(config.max_claims));
    user = replace_all(user, "{question}", sample.question);
    user = replace_all(user, "{answer}", sample.answer);
    user = replace_all(user, "{contexts}", join_contexts(sample.contexts));
    return {{"system", templates.extraction_system}, {"user", user}};
}

std::vector<ChatMessage> render_verdict_prompt(const PromptTemplates& templates,
                                               const Claim& claim,
                                               const EvaluationSample& sample,
                                               const MetricConfig& config) {
    std::string user = templates.verdict_user;
    user = replace_all(user, "{metric}", config.metric_name);
    user = replace_all(user, "{criteria}", config.criteria_text);
    user = replace_all(user, "{question}", sample.question);
    user = replace_all(user, "{answer}", sample.answer);
    user = replace_all(user, "{contexts}", join_contexts(sample.contexts));
    user = replace_all(user, "{claim}", claim.text);
    return {{"system", templates.verdict_system}, {"user", user}};
}

} // namespace tcva
