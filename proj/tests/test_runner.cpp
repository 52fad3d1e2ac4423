#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "tcva/aggregate.hpp"
#include "tcva/cache.hpp"
#include "tcva/csv.hpp"
#include "tcva/dataset.hpp"
#include "tcva/error.hpp"
#include "tcva/prompts.hpp"
#include "tcva/runner.hpp"

using namespace tcva;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = TCVA_TEST_DATA_DIR;
const std::string kFixture = kDataDir + "/fixture20.jsonl";
const std::string kScript = kDataDir + "/fixture20_script.json";

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tcva_runner_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig fixture_config(const fs::path& out_dir) {
    RunConfig config;
    config.dataset_path = kFixture;
    config.metric_name = "faithfulness";
    config.judge.backend = "mock";
    config.judge.script_path = kScript;
    config.output_dir = out_dir.string();
    return config;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    json doc;
    in >> doc;
    return doc;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("cmd_evaluate populates cache, scores and manifest") {
    const auto dir = temp_dir("evaluate");
    const auto config = fixture_config(dir);
    const auto result = cmd_evaluate(config);

    const auto manifest = read_json((dir / "manifest.json").string());
    CHECK(manifest.at("counts").at("samples") == 20);
    CHECK(manifest.at("counts").at("evaluated") == 20);
    CHECK(manifest.at("counts").at("failed") == 0);
    CHECK(manifest.at("counts").at("extraction_calls") == 20);
    CHECK(manifest.at("counts").at("verdict_calls") == 66); // one per scripted claim
    CHECK(manifest.at("prompt_version") == PromptTemplates::standard().version());
    CHECK(manifest.at("failures").empty());

    const auto rows = read_score_csv((dir / "scores.csv").string());
    CHECK(rows.size() == 20 * 5); // default five temperatures

    const auto cache = VerdictCache::load((dir / "verdicts.jsonl").string());
    CHECK(cache.size() == 20);

    SUBCASE("a warm rerun makes zero judge calls and reproduces the bytes") {
        const auto scores_before = read_bytes((dir / "scores.csv").string());
        const auto rerun = cmd_evaluate(config);
        const auto manifest2 = read_json((dir / "manifest.json").string());
        CHECK(manifest2.at("counts").at("extraction_calls") == 0);
        CHECK(manifest2.at("counts").at("verdict_calls") == 0);
        CHECK(read_bytes((dir / "scores.csv").string()) == scores_before);
    }

    SUBCASE("score rows match direct aggregation of the cached verdicts") {
        const auto& scheme = WeightScheme::named("Default");
        std::map<std::string, std::vector<VerdictLevel>> levels_by_id;
        for (const auto& entry : cache.entries()) levels_by_id[entry.sample_id] = entry.levels();
        for (const auto& row : rows) {
            const auto direct =
                aggregate(levels_by_id.at(row.sample_id), row.temperature, scheme);
            CHECK(row.final_score == direct.final_score);
            CHECK(row.raw_score == direct.raw_score);
        }
    }
}

TEST_CASE("cmd_evaluate rejects an out-of-range temperature before any work") {
    const auto dir = temp_dir("badtemp");
    auto config = fixture_config(dir);
    config.temperatures = {0.5, 1.2};
    try {
        cmd_evaluate(config);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::config);
        CHECK(std::string(e.what()).find("1.2") != std::string::npos);
    }
    CHECK(!fs::exists(dir / "scores.csv"));
}

TEST_CASE("cmd_evaluate is deterministic across runs and parallelism") {
    const auto dir_serial = temp_dir("det_serial");
    const auto dir_parallel = temp_dir("det_parallel");

    auto serial = fixture_config(dir_serial);
    serial.parallelism = 1;
    auto parallel = fixture_config(dir_parallel);
    parallel.parallelism = 4;

    cmd_evaluate(serial);
    cmd_evaluate(parallel);
    CHECK(read_bytes((dir_serial / "scores.csv").string()) ==
          read_bytes((dir_parallel / "scores.csv").string()));

    // canonical cache order makes the files identical modulo timestamps
    auto strip = [](std::string text) {
        std::size_t pos = 0;
        while ((pos = text.find("\"created_at\":\"", pos)) != std::string::npos) {
            const auto end = text.find('"', pos + 15);
            text.erase(pos, end - pos + 1);
        }
        return text;
    };
    CHECK(strip(read_bytes((dir_serial / "verdicts.jsonl").string())) ==
          strip(read_bytes((dir_parallel / "verdicts.jsonl").string())));
}

TEST_CASE("cmd_evaluate records judge failures and continues") {
    const auto dir = temp_dir("failures");
    // dataset with one empty-answered sample injected
    const auto dataset_path = (dir / "dataset.jsonl").string();
    {
        std::ofstream out(dataset_path);
        out << R"({"id": "good", "question": "q", "answer": "Fine claim."})" << "\n";
        out << R"({"id": "bad", "question": "q", "answer": " "})" << "\n";
    }
    RunConfig config;
    config.dataset_path = dataset_path;
    config.judge.backend = "mock";
    config.output_dir = (dir / "out").string();
    const auto result = cmd_evaluate(config);

    const auto manifest = read_json((dir / "out" / "manifest.json").string());
    CHECK(manifest.at("counts").at("evaluated") == 1);
    CHECK(manifest.at("counts").at("failed") == 1);
    REQUIRE(manifest.at("failures").size() == 1);
    CHECK(manifest.at("failures")[0].at("sample_id") == "bad");
}

TEST_CASE("cmd_reaggregate sweeps schemes x temperatures with zero judge calls") {
    const auto dir = temp_dir("reaggregate");
    const auto config = fixture_config(dir);
    cmd_evaluate(config);

    const std::vector<std::string> schemes = {"Default", "Linear", "Aggressive", "Conservative"};
    const std::vector<double> temperatures = {0.2, 0.3, 0.5, 0.7, 0.9};
    const auto result = cmd_reaggregate(config, schemes, temperatures);
    const auto rows = read_score_csv((dir / "reaggregated.csv").string());
    CHECK(rows.size() == 20 * 4 * 5);

    SUBCASE("cells match direct aggregate calls") {
        const auto cache = VerdictCache::load((dir / "verdicts.jsonl").string());
        std::map<std::string, std::vector<VerdictLevel>> levels_by_id;
        for (const auto& entry : cache.entries()) levels_by_id[entry.sample_id] = entry.levels();
        for (const auto& row : rows) {
            const auto direct = aggregate(levels_by_id.at(row.sample_id), row.temperature,
                                          WeightScheme::named(row.scheme));
            CHECK(row.final_score == direct.final_score);
        }
    }

    SUBCASE("empty override lists are configuration errors") {
        CHECK_THROWS_AS(cmd_reaggregate(config, {}, temperatures), Error);
        CHECK_THROWS_AS(cmd_reaggregate(config, schemes, {}), Error);
    }
}

TEST_CASE("cmd_reaggregate without a cache names the expected key") {
    const auto dir = temp_dir("nocache");
    const auto config = fixture_config(dir);
    try {
        cmd_reaggregate(config, {"Default"}, {0.5});
        FAIL("expected a cache miss");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::cache_miss);
        CHECK(std::string(e.what()).find("faithfulness") != std::string::npos);
        CHECK(std::string(e.what()).find("scripted-judge-v1") != std::string::npos);
    }
}

TEST_CASE("cmd_ablate emits four configs with deltas against config A") {
    const auto dir = temp_dir("ablate");
    auto config = fixture_config(dir);
    config.temperatures = {0.5};
    cmd_evaluate(config);
    cmd_ablate(config);

    const auto rows = read_score_csv((dir / "ablation.csv").string());
    CHECK(rows.size() == 20 * 4);

    std::map<std::string, std::map<std::string, double>> finals; // sample -> variant -> score
    for (const auto& row : rows) finals[row.sample_id][row.variant] = row.final_score;
    const auto dataset = load_dataset(kFixture);
    CHECK(finals.size() == 20);
    for (const auto& [sample_id, by_variant] : finals) {
        REQUIRE(by_variant.size() == 4);
        // at T = 0.5 the arithmetic-mean config equals full TCVA
        CHECK(by_variant.at("full_tcva") ==
              doctest::Approx(by_variant.at("arithmetic_mean")).epsilon(1e-12));
        // removing the penalty never lowers the score
        CHECK(by_variant.at("no_penalty") >= by_variant.at("full_tcva") - 1e-12);
    }

    SUBCASE("the wide table mirrors the deltas") {
        std::ifstream wide((dir / "ablation_delta.csv").string());
        REQUIRE(wide);
        std::string header;
        std::getline(wide, header);
        CHECK(header ==
              "sample_id,temperature,scheme,final_a,final_b,final_c,final_d,delta_b,delta_c,"
              "delta_d");
        std::string line;
        std::size_t count = 0;
        while (std::getline(wide, line)) {
            if (line.empty()) continue;
            ++count;
            const auto fields = csv_split(line);
            REQUIRE(fields.size() == 10);
            const double final_a = std::stod(fields[3]);
            const double final_c = std::stod(fields[5]);
            const double delta_c = std::stod(fields[8]);
            CHECK(delta_c == doctest::Approx(final_c - final_a).epsilon(1e-12));
        }
        CHECK(count == 20);
    }
}

TEST_CASE("cmd_sample writes a stratified subset with a bin summary") {
    const auto dir = temp_dir("sample");
    // uniform synthetic corpus of 500
    const auto dataset_path = (dir / "uniform.jsonl").string();
    {
        std::ofstream out(dataset_path);
        for (int i = 0; i < 500; ++i) {
            json doc{{"id", "u" + std::to_string(i)},
                     {"question", "q"},
                     {"answer", "A."},
                     {"human_score", static_cast<double>(i) / 499.0}};
            out << doc.dump() << "\n";
        }
    }

    SampleRequest request;
    request.dataset_path = dataset_path;
    request.output_path = (dir / "subset.jsonl").string();
    request.n_bins = 5;
    request.per_bin = 40;
    request.seed = 4242;
    const auto result = cmd_sample(request);
    CHECK(result.summary.find("drew 200 of 500") != std::string::npos);

    const auto subset = load_dataset(request.output_path);
    CHECK(subset.size() == 200);

    SUBCASE("same seed reproduces identical bytes") {
        const auto first = read_bytes(request.output_path);
        cmd_sample(request);
        CHECK(read_bytes(request.output_path) == first);
    }

    SUBCASE("a dataset without human scores is rejected") {
        const auto bare_path = (dir / "bare.jsonl").string();
        std::ofstream(bare_path) << R"({"id": "a", "question": "q", "answer": "A."})" << "\n";
        SampleRequest bare = request;
        bare.dataset_path = bare_path;
        CHECK_THROWS_AS(cmd_sample(bare), Error);
    }

    SUBCASE("a skewed corpus balances up to bin availability") {
        const auto skew_path = (dir / "skew.jsonl").string();
        {
            std::ofstream out(skew_path);
            for (int i = 0; i < 100; ++i) {
                json doc{{"id", "s" + std::to_string(i)},
                         {"question", "q"},
                         {"answer", "A."},
                         {"human_score", i < 90 ? 0.95 : 0.05}};
                out << doc.dump() << "\n";
            }
        }
        SampleRequest skewed = request;
        skewed.dataset_path = skew_path;
        skewed.output_path = (dir / "skew_out.jsonl").string();
        skewed.per_bin = 20;
        cmd_sample(skewed);
        const auto picked = load_dataset(skewed.output_path);
        std::size_t low = 0, high = 0;
        for (const auto& sample : picked) {
            if (*sample.human_score < 0.5) ++low;
            else ++high;
        }
        CHECK(low == 10);  // all available low-bin members
        CHECK(high == 20); // per_bin from the crowded bin
    }
}

TEST_CASE("cmd_stats correlates score tables against the dataset annotations") {
    const auto dir = temp_dir("stats");
    const auto config = fixture_config(dir);
    cmd_evaluate(config);

    StatsRequest request;
    request.scores_path = (dir / "scores.csv").string();
    request.dataset_path = kFixture;
    request.output_dir = (dir / "stats").string();
    request.n_resamples = 500;
    request.seed = 7;
    const auto result = cmd_stats(request);
    CHECK(fs::exists(dir / "stats" / "correlations.csv"));
    CHECK(fs::exists(dir / "stats" / "summary.txt"));
    CHECK(result.summary.find("rho=") != std::string::npos);
    CHECK(result.summary.find("<- best T") != std::string::npos);

    SUBCASE("method against itself as baseline gives delta 0 and p 1") {
        StatsRequest with_baseline = request;
        // filter the scores table to a single temperature group for the baseline
        const auto rows = read_score_csv(request.scores_path);
        std::vector<ScoreRow> only_05;
        for (const auto& row : rows)
            if (row.temperature == 0.5) only_05.push_back(row);
        const auto baseline_path = (dir / "baseline.csv").string();
        write_score_csv(baseline_path, only_05);
        with_baseline.baseline_path = baseline_path;
        with_baseline.baseline_name = "self";

        const auto with = cmd_stats(with_baseline);
        // the T=0.5 row contains the self-comparison
        CHECK(with.summary.find("delta=+0.0000 p=1.0000") != std::string::npos);
    }

    SUBCASE("unmatched sample ids are listed") {
        // score table with an id the dataset does not know
        auto rows = read_score_csv(request.scores_path);
        rows[0].sample_id = "ghost";
        const auto ghost_path = (dir / "ghost.csv").string();
        write_score_csv(ghost_path, rows);
        StatsRequest ghost = request;
        ghost.scores_path = ghost_path;
        try {
            cmd_stats(ghost);
            FAIL("expected an alignment error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("ghost") != std::string::npos);
        }
    }
}

TEST_CASE("no hidden state: deleting the output dir and rerunning with a warm "
          "cache reproduces the score bytes") {
    const auto dir = temp_dir("hidden_state");
    auto config = fixture_config(dir / "out");
    config.cache_path = (dir / "external_cache.jsonl").string(); // survives the wipe
    cmd_evaluate(config);
    const auto scores_before = read_bytes((dir / "out" / "scores.csv").string());

    fs::remove_all(dir / "out");
    cmd_evaluate(config);
    const auto manifest = read_json((dir / "out" / "manifest.json").string());
    CHECK(manifest.at("counts").at("extraction_calls") == 0); // warm cache
    CHECK(read_bytes((dir / "out" / "scores.csv").string()) == scores_before);

    SUBCASE("manifest carries per-sample status in dataset order") {
        REQUIRE(manifest.at("samples").size() == 20);
        CHECK(manifest.at("samples")[0].at("id") == "s01");
        CHECK(manifest.at("samples")[0].at("status") == "ok");
        CHECK(manifest.at("samples")[0].at("claims") == 3);
    }
}

TEST_CASE("cmd_plot emits scatter and temperature-curve figures") {
    const auto dir = temp_dir("plot");
    const auto config = fixture_config(dir);
    cmd_evaluate(config);

    PlotRequest request;
    request.scores_path = (dir / "scores.csv").string();
    request.dataset_path = kFixture;
    request.output_dir = (dir / "figures").string();
    const auto result = cmd_plot(request);
    REQUIRE(result.output_files.size() == 2); // one scatter, one curve
    for (const auto& path : result.output_files) {
        const auto svg = read_bytes(path);
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
    }
    CHECK(result.summary.find("best T") != std::string::npos);

    SUBCASE("a dataset without annotations is rejected") {
        const auto bare_path = (dir / "bare.jsonl").string();
        std::ofstream(bare_path) << R"({"id": "s01", "question": "q", "answer": "A."})" << "\n";
        PlotRequest bare = request;
        bare.dataset_path = bare_path;
        CHECK_THROWS_AS(cmd_plot(bare), Error);
    }
}

TEST_CASE("cmd_stats rho matches an independently coded oracle on a 200-sample fixture") {
    const auto dir = temp_dir("stats_oracle");

    // synthetic corpus with planted rank noise
    std::vector<double> human(200), method(200);
    std::uint64_t state = 99;
    auto next_unit = [&state] {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    };
    const auto dataset_path = (dir / "synthetic.jsonl").string();
    std::vector<ScoreRow> rows;
    {
        std::ofstream out(dataset_path);
        for (int i = 0; i < 200; ++i) {
            human[i] = next_unit();
            method[i] = std::clamp(human[i] * 0.8 + 0.2 * next_unit(), 0.0, 1.0);
            const std::string id = "n" + std::to_string(i);
            json doc{{"id", id}, {"question", "q"}, {"answer", "A."}, {"human_score", human[i]}};
            out << doc.dump() << "\n";
            rows.push_back({id, 0.5, "Default", "method", method[i], 1.0, method[i]});
        }
    }
    const auto scores_path = (dir / "scores.csv").string();
    write_score_csv(scores_path, rows);

    StatsRequest request;
    request.scores_path = scores_path;
    request.dataset_path = dataset_path;
    request.output_dir = (dir / "out").string();
    request.n_resamples = 200;
    cmd_stats(request);

    // independently coded oracle: counting-based average ranks + pearson
    auto oracle_ranks = [](const std::vector<double>& values) {
        std::vector<double> ranks(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::size_t less = 0, equal = 0;
            for (std::size_t j = 0; j < values.size(); ++j) {
                if (values[j] < values[i]) ++less;
                if (values[j] == values[i]) ++equal;
            }
            ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) * 0.5;
        }
        return ranks;
    };
    const auto ra = oracle_ranks(method);
    const auto rb = oracle_ranks(human);
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= 200.0;
    mean_b /= 200.0;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - mean_a) * (rb[i] - mean_b);
        var_a += (ra[i] - mean_a) * (ra[i] - mean_a);
        var_b += (rb[i] - mean_b) * (rb[i] - mean_b);
    }
    const double oracle_rho = cov / std::sqrt(var_a * var_b);

    // parse the emitted report and compare
    std::ifstream report((dir / "out" / "correlations.csv").string());
    REQUIRE(report);
    std::string header, line;
    std::getline(report, header);
    REQUIRE(std::getline(report, line));
    const auto fields = csv_split(line);
    const double reported_rho = std::stod(fields[4]);
    CHECK(std::abs(reported_rho - oracle_rho) <= 1e-12);
}

TEST_CASE("run config json round-trips") {
    json doc{{"dataset", "d.jsonl"},
             {"metric", "relevancy"},
             {"temperatures", {0.3, 0.5}},
             {"scheme", "Linear"},
             {"seed", 9},
             {"parallelism", 3},
             {"judge", {{"backend", "remote"}, {"endpoint", "http://localhost:1"},
                        {"model", "judge-1"}, {"api_key_env", "KEY"}}}};
    const auto config = RunConfig::from_json(doc);
    CHECK(config.metric_name == "relevancy");
    CHECK(config.temperatures == std::vector<double>{0.3, 0.5});
    CHECK(config.judge.backend == "remote");
    CHECK(config.judge.remote.model == "judge-1");

    const auto round = RunConfig::from_json(config.to_json());
    CHECK(round.scheme_name == "Linear");
    CHECK(round.parallelism == 3);
    CHECK(round.judge.remote.endpoint == "http://localhost:1");

    SUBCASE("unknown scheme fails validation") {
        auto bad = config;
        bad.scheme_name = "Nope";
        CHECK_THROWS_AS(bad.validate(), Error);
    }

    SUBCASE("an api key in the config file is refused") {
        json leaky = doc;
        leaky["judge"]["api_key"] = "sk-oops";
        try {
            RunConfig::from_json(leaky);
            FAIL("expected a config error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::config);
            CHECK(std::string(e.what()).find("api_key_env") != std::string::npos);
        }
    }
}
