#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <regex>

#include "tcva/cache.hpp"
#include "tcva/error.hpp"
#include "tcva/judge.hpp"
#include "tcva/pipeline.hpp"
#include "tcva/prompts.hpp"

using namespace tcva;
namespace fs = std::filesystem;

namespace {

EvaluationSample heart_attack_sample() {
    EvaluationSample sample;
    sample.id = "heart";
    sample.question = "What are the main symptoms of myocardial infarction?";
    sample.answer = "Pressing chest pain is a symptom. Shortness of breath is a symptom. "
                    "Nausea is a symptom. Fever is a symptom.";
    sample.contexts = {"Heart attack symptoms: chest pain, shortness of breath, nausea, "
                       "cold sweat."};
    return sample;
}

ScriptedJudge::Script heart_attack_script() {
    ScriptedJudge::Script script;
    script.verdict_by_claim["Pressing chest pain is a symptom."] = {VerdictLevel::Fully,
                                                                    "Confirmed by the context."};
    script.verdict_by_claim["Shortness of breath is a symptom."] = {VerdictLevel::Fully,
                                                                    "Confirmed by the context."};
    script.verdict_by_claim["Nausea is a symptom."] = {VerdictLevel::Fully,
                                                       "Confirmed by the context."};
    script.verdict_by_claim["Fever is a symptom."] = {VerdictLevel::None,
                                                      "Not mentioned in the context."};
    return script;
}

PipelineOptions fast_options() {
    PipelineOptions options;
    options.retry.base_delay = std::chrono::milliseconds(0);
    return options;
}

// Fails `failures` times with the given error, then delegates to the mock.
class FlakyJudge : public JudgeBackend {
public:
    FlakyJudge(std::shared_ptr<JudgeBackend> inner, int failures, Errc code)
        : inner_(std::move(inner)), remaining_(failures), code_(code) {}

    std::string model_id() const override { return inner_->model_id(); }
    std::string complete(const JudgeRequest& request) override {
        if (remaining_-- > 0) fail(code_, "injected failure");
        return inner_->complete(request);
    }

private:
    std::shared_ptr<JudgeBackend> inner_;
    std::atomic<int> remaining_;
    Errc code_;
};

class GarbageJudge : public JudgeBackend {
public:
    std::string model_id() const override { return "garbage"; }
    std::string complete(const JudgeRequest&) override { return "no payload here at all"; }
};

std::string strip_timestamps(std::string text) {
    static const std::regex ts("\"created_at\":\"[^\"]*\"");
    return std::regex_replace(text, ts, "\"created_at\":\"\"");
}

std::string cache_bytes(const VerdictCache& cache) {
    std::string bytes;
    for (const auto& entry : cache.entries()) bytes += entry.to_jsonl() + "\n";
    return strip_timestamps(bytes);
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tcva_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("parse_judge_response accepts the structured payload") {
    const auto parsed = parse_judge_response(R"({"level": "fully", "reasoning": "clear"})");
    CHECK(parsed.level == VerdictLevel::Fully);
    CHECK(parsed.reasoning == "clear");
}

TEST_CASE("parse_judge_response matches levels case-insensitively") {
    CHECK(parse_judge_response(R"({"level": "MOSTLY", "reasoning": "x"})").level ==
          VerdictLevel::Mostly);
    CHECK(parse_judge_response(R"({"level": "Minor", "reasoning": "x"})").level ==
          VerdictLevel::Minor);
}

TEST_CASE("parse_judge_response tolerates surrounding prose") {
    const std::string raw = "Sure! After weighing the evidence carefully, here is my verdict:\n"
                            R"({"grounding": "the context says {so}", "level": "partially",)"
                            R"( "reasoning": "half supported"})"
                            "\nHope that helps!";
    const auto parsed = parse_judge_response(raw);
    CHECK(parsed.level == VerdictLevel::Partially);
    CHECK(parsed.reasoning == "half supported");
    CHECK(parsed.grounding == "the context says {so}");
}

TEST_CASE("parse_judge_response skips decoy blocks without a level") {
    const std::string raw = R"({"note": "not a verdict"} {"level": "none", "reasoning": "r"})";
    CHECK(parse_judge_response(raw).level == VerdictLevel::None);
}

TEST_CASE("parse_judge_response fails without a recognizable level") {
    CHECK_THROWS_AS(parse_judge_response("I think it is mostly fine"), Error);
    CHECK_THROWS_AS(parse_judge_response(R"({"level": "excellent", "reasoning": "r"})"), Error);
    try {
        parse_judge_response("{\"level\": 3}");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse);
    }
}

TEST_CASE("parse_judge_response keeps an empty reasoning as a warning case, not an error") {
    const auto parsed = parse_judge_response(R"({"level": "fully"})");
    CHECK(parsed.level == VerdictLevel::Fully);
    CHECK(parsed.reasoning.empty());
}

TEST_CASE("parse_extraction_response reads claims payloads") {
    const auto claims = parse_extraction_response(R"({"claims": ["a.", "b."]})");
    CHECK(claims == std::vector<std::string>{"a.", "b."});
    CHECK(parse_extraction_response(R"(["one."])") == std::vector<std::string>{"one."});
    const auto wrapped =
        parse_extraction_response("Here you go: {\"claims\": [\"x.\"]} enjoy");
    CHECK(wrapped == std::vector<std::string>{"x."});
}

TEST_CASE("parse_extraction_response flags zero claims with the raw reply attached") {
    try {
        parse_extraction_response(R"({"claims": []})");
        FAIL("expected an extraction failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::extraction_failure);
        CHECK(std::string(e.what()).find("claims") != std::string::npos);
    }
}

TEST_CASE("extract_claims: worked heart-attack example yields four claims") {
    auto judge = ScriptedJudge(heart_attack_script());
    MetricConfig config;
    const auto claims = extract_claims(heart_attack_sample(), config, judge, fast_options());
    REQUIRE(claims.size() == 4);
    CHECK(claims[3].text == "Fever is a symptom.");
    for (std::size_t i = 0; i < claims.size(); ++i) CHECK(claims[i].index == i);
}

TEST_CASE("extract_claims: one-sentence answer yields exactly that claim") {
    EvaluationSample sample;
    sample.id = "one";
    sample.question = "q";
    sample.answer = "The sky is blue.";
    auto judge = ScriptedJudge({});
    const auto claims = extract_claims(sample, MetricConfig{}, judge, fast_options());
    REQUIRE(claims.size() == 1);
    CHECK(claims[0].text == "The sky is blue.");
}

TEST_CASE("extract_claims truncates over-production to max_claims by index") {
    EvaluationSample sample;
    sample.id = "long";
    sample.question = "q";
    std::string answer;
    for (int i = 1; i <= 12; ++i) answer += "Sentence number " + std::to_string(i) + ". ";
    sample.answer = answer;
    auto judge = ScriptedJudge({});
    MetricConfig config;
    config.max_claims = 8;
    const auto claims = extract_claims(sample, config, judge, fast_options());
    REQUIRE(claims.size() == 8);
    CHECK(claims[0].text == "Sentence number 1.");
    CHECK(claims[7].text == "Sentence number 8.");
}

TEST_CASE("extract_claims rejects an empty answer before any judge call") {
    EvaluationSample sample;
    sample.id = "empty";
    sample.question = "q";
    sample.answer = "";
    auto judge = ScriptedJudge({});
    CHECK_THROWS_AS(extract_claims(sample, MetricConfig{}, judge, fast_options()), Error);
}

TEST_CASE("assign_verdict returns the scripted level with reasoning") {
    auto judge = ScriptedJudge(heart_attack_script());
    const auto sample = heart_attack_sample();
    const auto record = assign_verdict({3, "Fever is a symptom."}, sample, MetricConfig{}, judge,
                                       fast_options());
    CHECK(record.level == VerdictLevel::None);
    CHECK(record.reasoning == "Not mentioned in the context.");
    CHECK(record.claim.index == 3);
}

TEST_CASE("retries recover from transient transport failures") {
    auto inner = std::make_shared<ScriptedJudge>(heart_attack_script());
    FlakyJudge flaky(inner, 2, Errc::transport);
    const auto record = assign_verdict({0, "Pressing chest pain is a symptom."},
                                       heart_attack_sample(), MetricConfig{}, flaky,
                                       fast_options());
    CHECK(record.level == VerdictLevel::Fully);
}

TEST_CASE("persistent failures surface after the attempt budget") {
    auto inner = std::make_shared<ScriptedJudge>(heart_attack_script());

    SUBCASE("transport errors keep their category") {
        FlakyJudge flaky(inner, 99, Errc::transport);
        try {
            assign_verdict({0, "x"}, heart_attack_sample(), MetricConfig{}, flaky,
                           fast_options());
            FAIL("expected a transport error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::transport);
        }
    }

    SUBCASE("unparseable output keeps the raw payload in the message") {
        GarbageJudge garbage;
        try {
            assign_verdict({0, "x"}, heart_attack_sample(), MetricConfig{}, garbage,
                           fast_options());
            FAIL("expected a parse error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::parse);
            CHECK(std::string(e.what()).find("no payload here at all") != std::string::npos);
        }
    }
}

TEST_CASE("evaluate_sample caches by (sample, metric, judge, prompt_version)") {
    auto inner = std::make_shared<ScriptedJudge>(heart_attack_script());
    auto counting = std::make_shared<CountingJudge>(inner);
    VerdictCache cache;
    MetricConfig config;

    const auto first =
        evaluate_sample(heart_attack_sample(), config, *counting, cache, fast_options());
    CHECK(first.claims.size() == 4);
    CHECK(first.verdicts.size() == 4);
    CHECK(counting->extraction_calls() == 1);
    CHECK(counting->verdict_calls() == 4);

    SUBCASE("a second identical call is a pure cache hit") {
        const auto second =
            evaluate_sample(heart_attack_sample(), config, *counting, cache, fast_options());
        CHECK(counting->extraction_calls() == 1);
        CHECK(counting->verdict_calls() == 4);
        CHECK(second.to_jsonl() == first.to_jsonl());
    }

    SUBCASE("a changed prompt template is a cache miss") {
        auto options = fast_options();
        options.templates.verdict_user += " (v2)";
        CHECK(options.templates.version() != PromptTemplates::standard().version());
        evaluate_sample(heart_attack_sample(), config, *counting, cache, options);
        CHECK(counting->extraction_calls() == 2);
        CHECK(cache.size() == 2);
    }

    SUBCASE("a different metric is a cache miss") {
        config.metric_name = "relevancy";
        evaluate_sample(heart_attack_sample(), config, *counting, cache, fast_options());
        CHECK(counting->extraction_calls() == 2);
    }
}

TEST_CASE("partial failures are not persisted") {
    auto inner = std::make_shared<ScriptedJudge>(heart_attack_script());
    // extraction succeeds, then every verdict call fails
    class VerdictKiller : public JudgeBackend {
    public:
        explicit VerdictKiller(std::shared_ptr<JudgeBackend> inner) : inner_(std::move(inner)) {}
        std::string model_id() const override { return inner_->model_id(); }
        std::string complete(const JudgeRequest& request) override {
            if (request.kind == JudgeRequest::Kind::VerdictAssignment)
                fail(Errc::transport, "verdict channel down");
            return inner_->complete(request);
        }

    private:
        std::shared_ptr<JudgeBackend> inner_;
    };
    VerdictKiller killer(inner);
    VerdictCache cache;
    CHECK_THROWS_AS(
        evaluate_sample(heart_attack_sample(), MetricConfig{}, killer, cache, fast_options()),
        Error);
    CHECK(cache.size() == 0);
}

TEST_CASE("scripted runs are deterministic: byte-identical cache modulo timestamps") {
    auto judge = std::make_shared<ScriptedJudge>(heart_attack_script());
    MetricConfig config;

    VerdictCache first_cache, second_cache;
    evaluate_sample(heart_attack_sample(), config, *judge, first_cache, fast_options());
    evaluate_sample(heart_attack_sample(), config, *judge, second_cache, fast_options());
    CHECK(cache_bytes(first_cache) == cache_bytes(second_cache));
}

TEST_CASE("verdict totality: every persisted level is one of the five") {
    auto judge = std::make_shared<ScriptedJudge>(heart_attack_script());
    VerdictCache cache;
    const auto entry =
        evaluate_sample(heart_attack_sample(), MetricConfig{}, *judge, cache, fast_options());
    const auto reparsed = CachedEvaluation::from_jsonl(entry.to_jsonl());
    for (const auto& verdict : reparsed.verdicts) {
        const int level = static_cast<int>(verdict.level);
        CHECK(level >= 0);
        CHECK(level <= 4);
    }
}

TEST_CASE("evaluate_dataset runs every sample once and captures failures") {
    std::vector<EvaluationSample> samples;
    for (int i = 0; i < 10; ++i) {
        EvaluationSample sample;
        sample.id = "d" + std::to_string(i);
        sample.question = "q";
        sample.answer = "Claim " + std::to_string(i) + " alpha. Claim " + std::to_string(i) +
                        " beta.";
        samples.push_back(sample);
    }
    samples[4].answer = ""; // invalid: fails validation, run must continue

    auto inner = std::make_shared<ScriptedJudge>(ScriptedJudge::Script{});
    auto counting = std::make_shared<CountingJudge>(inner);
    VerdictCache cache;
    const auto outcome =
        evaluate_dataset(samples, MetricConfig{}, *counting, cache, 1, fast_options());
    CHECK(outcome.evaluations.size() == 9);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].sample_id == "d4");
    CHECK(counting->extraction_calls() == 9);
    CHECK(cache.size() == 9);

    SUBCASE("parallel execution produces the same evaluations") {
        VerdictCache parallel_cache;
        const auto parallel =
            evaluate_dataset(samples, MetricConfig{}, *counting, parallel_cache, 4,
                             fast_options());
        CHECK(parallel.evaluations.size() == outcome.evaluations.size());
        CHECK(cache_bytes(parallel_cache) == cache_bytes(cache));
    }
}

TEST_CASE("cache files round-trip and reject malformed lines") {
    const auto dir = temp_dir("cache_roundtrip");
    const std::string path = (dir / "verdicts.jsonl").string();

    auto judge = std::make_shared<ScriptedJudge>(heart_attack_script());
    VerdictCache cache;
    evaluate_sample(heart_attack_sample(), MetricConfig{}, *judge, cache, fast_options());
    cache.save(path);

    const auto loaded = VerdictCache::load(path);
    CHECK(loaded.size() == 1);
    CHECK(cache_bytes(loaded) == cache_bytes(cache));

    SUBCASE("missing file loads as an empty cache") {
        CHECK(VerdictCache::load((dir / "absent.jsonl").string()).size() == 0);
    }

    SUBCASE("a corrupt line is a schema error naming the line") {
        std::ofstream out(path, std::ios::app);
        out << "{not json}\n";
        out.close();
        try {
            VerdictCache::load(path);
            FAIL("expected a schema error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::schema);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
}

TEST_CASE("prompt version changes with any template edit") {
    const auto base = PromptTemplates::standard();
    CHECK(base.version() == PromptTemplates::standard().version());
    auto changed = base;
    changed.extraction_user += ".";
    CHECK(changed.version() != base.version());
    auto changed_system = base;
    changed_system.verdict_system[0] = 'y';
    CHECK(changed_system.version() != base.version());
}

TEST_CASE("scripted judge loads its JSON script") {
    const auto dir = temp_dir("script_load");
    const std::string path = (dir / "script.json").string();
    std::ofstream(path) << R"({
        "model_id": "mock-x",
        "default_level": "partially",
        "claims": {"s1": ["First claim.", "Second claim."]},
        "verdicts": {"First claim.": {"level": "mostly", "reasoning": "ok"}}
    })";
    const auto script = ScriptedJudge::load_script(path);
    CHECK(script.model_id == "mock-x");
    CHECK(script.default_level == VerdictLevel::Partially);
    CHECK(script.claims_by_sample.at("s1").size() == 2);

    ScriptedJudge judge(script);
    JudgeRequest request;
    request.kind = JudgeRequest::Kind::VerdictAssignment;
    request.claim_text = "First claim.";
    CHECK(parse_judge_response(judge.complete(request)).level == VerdictLevel::Mostly);
    request.claim_text = "Unknown claim.";
    CHECK(parse_judge_response(judge.complete(request)).level == VerdictLevel::Partially);

    CHECK_THROWS_AS(ScriptedJudge::load_script((dir / "absent.json").string()), Error);
}

TEST_CASE("remote judge construction validates its configuration") {
    RemoteJudgeConfig config;
    CHECK_THROWS_AS(RemoteJudge{config}, Error); // endpoint required
    config.endpoint = "http://127.0.0.1:1";      // nothing listens here
    RemoteJudge judge(config);
    CHECK(judge.model_id() == "gpt-4.1-mini");
    JudgeRequest request;
    request.messages = {{"user", "ping"}};
    try {
        judge.complete(request);
        FAIL("expected a transport error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::transport);
    }
}
