#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcva/verdict.hpp"

namespace tcva {

// One dataset row: the question x, the AI answer y, retrieval contexts D and
// an optional human annotation, normalized to [0,1].
struct EvaluationSample {
    std::string id;
    std::string question;
    std::string answer;
    std::vector<std::string> contexts;
    std::optional<double> human_score;

    void validate() const; // id and answer nonempty
};

struct MetricConfig {
    std::string metric_name = "faithfulness";
    std::string criteria_text =
        "Every claim must be supported by the provided context.";
    std::size_t max_claims = 8; // in [1, 50]
    double temperature = 0.5;

    void validate() const;
};

struct Claim {
    std::size_t index = 0;
    std::string text;
};

struct VerdictRecord {
    Claim claim;
    VerdictLevel level = VerdictLevel::None;
    std::string reasoning;
    std::optional<std::string> grounding_excerpt;
};

struct ChatMessage {
    std::string role; // "system" | "user"
    std::string content;
};

// What the pipeline asks a backend to complete. Remote backends only look at
// `messages`; the scripted backend keys its replies off the structured fields
// so mock runs stay robust to prompt wording.
struct JudgeRequest {
    enum class Kind { ClaimExtraction, VerdictAssignment };
    Kind kind = Kind::ClaimExtraction;
    std::string sample_id;
    std::string metric_name;
    std::string answer;     // the text under evaluation
    std::string claim_text; // VerdictAssignment only
    std::vector<ChatMessage> messages;
};

// A chat-completion transport. Implementations must be safe to call from
// multiple threads. Transport failures throw Errc::transport.
class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual std::string model_id() const = 0;
    virtual std::string complete(const JudgeRequest& request) = 0;
};

// Deterministic scripted judge. Claims per sample id and a level per claim
// text are configured up front; unscripted samples fall back to sentence
// splitting and unscripted claims to `default_level`. Replies are rendered as
// the same payloads a real judge would produce, so they exercise the parser.
class ScriptedJudge : public JudgeBackend {
public:
    struct Script {
        std::map<std::string, std::vector<std::string>> claims_by_sample;
        struct Verdict {
            VerdictLevel level = VerdictLevel::Fully;
            std::string reasoning;
        };
        std::map<std::string, Verdict> verdict_by_claim;
        VerdictLevel default_level = VerdictLevel::Fully;
        std::string model_id = "scripted-judge";
    };

    explicit ScriptedJudge(Script script) : script_(std::move(script)) {}

    // Loads the JSON script layout documented in the README.
    static Script load_script(const std::string& path);

    std::string model_id() const override { return script_.model_id; }
    std::string complete(const JudgeRequest& request) override;

private:
    Script script_;
};

// Counts completions by request kind; used to assert the zero-extra-call
// guarantees. Thread-safe.
class CountingJudge : public JudgeBackend {
public:
    explicit CountingJudge(std::shared_ptr<JudgeBackend> inner) : inner_(std::move(inner)) {}

    std::string model_id() const override { return inner_->model_id(); }
    std::string complete(const JudgeRequest& request) override {
        if (request.kind == JudgeRequest::Kind::ClaimExtraction) ++extraction_calls_;
        else ++verdict_calls_;
        return inner_->complete(request);
    }

    std::size_t extraction_calls() const { return extraction_calls_.load(); }
    std::size_t verdict_calls() const { return verdict_calls_.load(); }
    std::size_t total_calls() const { return extraction_calls() + verdict_calls(); }

private:
    std::shared_ptr<JudgeBackend> inner_;
    std::atomic<std::size_t> extraction_calls_{0};
    std::atomic<std::size_t> verdict_calls_{0};
};

struct RemoteJudgeConfig {
    std::string endpoint;                    // e.g. https://api.openai.com
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4.1-mini";
    std::string api_key_env = "TCVA_API_KEY"; // key read from the environment only
    double request_temperature = 0.0;
    int timeout_seconds = 120;
};

// Chat-completion client for any endpoint speaking the OpenAI-style
// interchange format. The judge model is one configuration, not a dependency.
class RemoteJudge : public JudgeBackend {
public:
    explicit RemoteJudge(RemoteJudgeConfig config);

    std::string model_id() const override { return config_.model; }
    std::string complete(const JudgeRequest& request) override;

private:
    RemoteJudgeConfig config_;
    std::string api_key_;
    std::string host_; // host[:port], path split off into config_.path
    bool use_tls_ = false;
};

// Splits text into sentences on '.', '!', '?' boundaries; the scripted
// judge's fallback extraction and handy for building fixtures.
std::vector<std::string> split_sentences(const std::string& text);

} // namespace tcva
