#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "tcva.h"

namespace fs = std::filesystem;

namespace {

const std::string kDataDir = TCVA_TEST_DATA_DIR;

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tcva_capi_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("version and error plumbing") {
    CHECK(std::strlen(tcva_version()) > 0);
    double out = 0.0;
    CHECK(tcva_temperature_to_p(2.0, &out) == TCVA_ERR_OUT_OF_RANGE);
    CHECK(std::strlen(tcva_last_error()) > 0);
    CHECK(tcva_temperature_to_p(0.5, nullptr) == TCVA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("temperature mapping through the C surface") {
    double p = 0.0;
    REQUIRE(tcva_temperature_to_p(0.5, &p) == TCVA_OK);
    CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(tcva_temperature_to_p_custom(0.5, 0.0, 1.0, -2.0, 2.0, &p) == TCVA_OK);
    CHECK(p == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("power mean and penalty through the C surface") {
    const double weights[] = {1.0, 0.9, 0.7};
    double mean = 0.0;
    REQUIRE(tcva_power_mean(weights, 3, 1.0, &mean) == TCVA_OK);
    CHECK(mean == doctest::Approx(0.8666666666).epsilon(1e-9));
    REQUIRE(tcva_power_mean(weights, 3, std::numeric_limits<double>::infinity(), &mean) ==
            TCVA_OK);
    CHECK(mean == 1.0);
    CHECK(tcva_power_mean(weights, 0, 1.0, &mean) == TCVA_ERR_EMPTY_INPUT);

    double factor = 0.0;
    REQUIRE(tcva_none_penalty_factor(1, 4, 0.5, &factor) == TCVA_OK);
    CHECK(factor == 0.75);
    CHECK(tcva_none_penalty_factor(3, 2, 0.5, &factor) == TCVA_ERR_CONTRACT);
}

TEST_CASE("scheme weights lookup") {
    double weights[5] = {0};
    REQUIRE(tcva_scheme_weights("Default", weights) == TCVA_OK);
    CHECK(weights[0] == 1.0);
    CHECK(weights[1] == 0.9);
    CHECK(weights[4] == 0.0);
    CHECK(tcva_scheme_weights("Nope", weights) == TCVA_ERR_CONFIG);
}

TEST_CASE("aggregate and ablation through the C surface") {
    const tcva_verdict verdicts[] = {TCVA_VERDICT_FULLY, TCVA_VERDICT_FULLY, TCVA_VERDICT_FULLY,
                                     TCVA_VERDICT_NONE};
    tcva_score score;
    REQUIRE(tcva_aggregate(verdicts, 4, 0.5, "Default", &score) == TCVA_OK);
    CHECK(score.final_score == doctest::Approx(0.5625).epsilon(1e-12));
    CHECK(score.claim_count == 4);
    CHECK(score.none_fraction == 0.25);

    tcva_score no_penalty;
    REQUIRE(tcva_run_ablation(verdicts, 4, TCVA_ABLATION_NO_PENALTY, 0.5, "Default",
                              &no_penalty) == TCVA_OK);
    CHECK(no_penalty.final_score == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(tcva_run_ablation(verdicts, 4, 9, 0.5, "Default", &no_penalty) ==
          TCVA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("baseline aggregators through the C surface") {
    const int yes_flags[] = {1, 1, 1, 0};
    double score = 0.0;
    REQUIRE(tcva_binary_fraction(yes_flags, 4, &score) == TCVA_OK);
    CHECK(score == 0.75);

    const int ternary[] = {1, 0, -1};
    REQUIRE(tcva_ternary_mean(ternary, 3, 0, &score) == TCVA_OK);
    CHECK(score == 0.5);

    const tcva_verdict graded[] = {TCVA_VERDICT_FULLY, TCVA_VERDICT_PARTIALLY};
    double collapsed[2] = {9, 9};
    REQUIRE(tcva_collapse_to_binary(graded, 2, collapsed) == TCVA_OK);
    CHECK(collapsed[0] == 1.0);
    CHECK(collapsed[1] == 0.0);
}

TEST_CASE("statistics through the C surface") {
    const double a[] = {0.1, 0.5, 0.9, 0.3};
    const double b[] = {0.2, 0.6, 1.0, 0.4};
    double rho = 0.0, tau = 0.0, err = 0.0;
    REQUIRE(tcva_spearman(a, b, 4, &rho) == TCVA_OK);
    CHECK(rho == 1.0);
    REQUIRE(tcva_kendall(a, b, 4, &tau) == TCVA_OK);
    CHECK(tau == 1.0);
    REQUIRE(tcva_mae(a, b, 4, &err) == TCVA_OK);
    CHECK(err == doctest::Approx(0.1).epsilon(1e-12));

    const double constant[] = {0.5, 0.5, 0.5, 0.5};
    CHECK(tcva_spearman(constant, b, 4, &rho) == TCVA_ERR_UNDEFINED_CORRELATION);

    tcva_bootstrap_report report;
    const double method[] = {0.0, 1.0};
    const double human[] = {0.0, 0.0};
    REQUIRE(tcva_bootstrap_ci(method, human, 2, TCVA_STAT_MAE, 10000, 0.95, 20240817, &report) ==
            TCVA_OK);
    CHECK(report.ci_low == 0.0);
    CHECK(report.ci_high == 1.0);
    CHECK(report.point_estimate == 0.5);

    double delta = 1.0, p_value = 0.0;
    REQUIRE(tcva_paired_bootstrap_test(a, a, b, 4, TCVA_STAT_SPEARMAN, 500, 3, &delta,
                                       &p_value) == TCVA_OK);
    CHECK(delta == 0.0);
    CHECK(p_value == 1.0);
}

TEST_CASE("dataset handle lifecycle") {
    CHECK(tcva_dataset_load("/definitely/absent.jsonl") == nullptr);
    CHECK(std::strlen(tcva_last_error()) > 0);

    tcva_dataset* dataset = tcva_dataset_load((kDataDir + "/fixture20.jsonl").c_str());
    REQUIRE(dataset != nullptr);
    CHECK(tcva_dataset_size(dataset) == 20);
    REQUIRE(tcva_dataset_sample_id(dataset, 0) != nullptr);
    CHECK(std::string(tcva_dataset_sample_id(dataset, 0)) == "s01");
    CHECK(tcva_dataset_sample_id(dataset, 99) == nullptr);
    double human = -1.0;
    REQUIRE(tcva_dataset_human_score(dataset, 0, &human) == TCVA_OK);
    CHECK(human == 1.0);
    tcva_dataset_free(dataset);
}

TEST_CASE("evaluate command and cache handle through the C surface") {
    const auto dir = temp_dir("cmd");
    const std::string config = std::string("{") + "\"dataset\": \"" + kDataDir +
                               "/fixture20.jsonl\", \"output_dir\": \"" + dir.string() +
                               "\", \"judge\": {\"backend\": \"mock\", \"script\": \"" +
                               kDataDir + "/fixture20_script.json\"}}";

    char* summary = nullptr;
    REQUIRE(tcva_cmd_evaluate(config.c_str(), &summary) == TCVA_OK);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary).find("20/20") != std::string::npos);
    tcva_string_free(summary);

    tcva_cache* cache = tcva_cache_open((dir / "verdicts.jsonl").string().c_str());
    REQUIRE(cache != nullptr);
    CHECK(tcva_cache_size(cache) == 20);
    REQUIRE(tcva_cache_sample_id(cache, 0) != nullptr);
    tcva_verdict levels[16];
    size_t count = 0;
    REQUIRE(tcva_cache_levels(cache, 0, levels, 16, &count) == TCVA_OK);
    CHECK(count >= 1);
    tcva_cache_free(cache);

    SUBCASE("reaggregate and ablate run off the same cache") {
        char* text = nullptr;
        REQUIRE(tcva_cmd_reaggregate(config.c_str(), "Default,Linear", "0.3,0.7", &text) ==
                TCVA_OK);
        CHECK(std::string(text).find("zero judge calls") != std::string::npos);
        tcva_string_free(text);

        REQUIRE(tcva_cmd_ablate(config.c_str(), &text) == TCVA_OK);
        tcva_string_free(text);
    }

    SUBCASE("stats command runs end to end") {
        char* text = nullptr;
        REQUIRE(tcva_cmd_stats((dir / "scores.csv").string().c_str(),
                               (kDataDir + "/fixture20.jsonl").c_str(), nullptr, nullptr, 500,
                               0.95, 7, 1, (dir / "stats").string().c_str(), &text) == TCVA_OK);
        CHECK(std::string(text).find("rho=") != std::string::npos);
        tcva_string_free(text);
    }

    SUBCASE("plot command emits figures") {
        char* text = nullptr;
        REQUIRE(tcva_cmd_plot((dir / "scores.csv").string().c_str(),
                              (kDataDir + "/fixture20.jsonl").c_str(),
                              (dir / "figures").string().c_str(), &text) == TCVA_OK);
        CHECK(std::string(text).find(".svg") != std::string::npos);
        tcva_string_free(text);
    }

    SUBCASE("malformed config is rejected") {
        CHECK(tcva_cmd_evaluate("not json", nullptr) == TCVA_ERR_CONFIG);
    }
}

TEST_CASE("sample and convert commands through the C surface") {
    const auto dir = temp_dir("sampleconv");
    char* summary = nullptr;
    REQUIRE(tcva_cmd_sample((kDataDir + "/fixture20.jsonl").c_str(),
                            (dir / "subset.jsonl").string().c_str(), 5, 2, 11,
                            &summary) == TCVA_OK);
    CHECK(std::string(summary).find("bin [") != std::string::npos);
    tcva_string_free(summary);

    const std::string summeval_path = (dir / "summeval.jsonl").string();
    std::ofstream(summeval_path)
        << R"({"text": "src", "machine_summaries": ["a.", "b."], "consistency": [4.0, 2.0]})"
        << "\n";
    REQUIRE(tcva_cmd_convert("summeval", summeval_path.c_str(),
                             (dir / "conv.jsonl").string().c_str(), nullptr,
                             &summary) == TCVA_OK);
    CHECK(std::string(summary).find("wrote 2 samples") != std::string::npos);
    tcva_string_free(summary);

    CHECK(tcva_cmd_convert("bogus", summeval_path.c_str(),
                           (dir / "x.jsonl").string().c_str(), nullptr, nullptr) ==
          TCVA_ERR_CONFIG);
}
