// tcva command-line harness. Parses flags, merges them over an optional JSON
// config file and drives the shared library through its C interface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcva.h"

namespace {

using nlohmann::json;

struct GlobalFlags {
    std::string config_path;
    std::string output_dir;
    std::int64_t seed = -1;
    int parallelism = 0;
};

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open config file '" << path << "'\n";
        std::exit(2);
    }
    try {
        json doc;
        in >> doc;
        if (!doc.is_object()) throw std::runtime_error("config must be a JSON object");
        return doc;
    } catch (const std::exception& e) {
        std::cerr << "error: config file '" << path << "': " << e.what() << "\n";
        std::exit(2);
    }
}

void apply_globals(json& config, const GlobalFlags& flags) {
    if (!flags.output_dir.empty()) config["output_dir"] = flags.output_dir;
    if (flags.seed >= 0) config["seed"] = static_cast<std::uint64_t>(flags.seed);
    if (flags.parallelism > 0) config["parallelism"] = flags.parallelism;
}

int finish(tcva_status status, char* summary) {
    if (summary) {
        std::fputs(summary, stdout);
        tcva_string_free(summary);
    }
    if (status != TCVA_OK) {
        std::cerr << "error: " << tcva_last_error() << "\n";
        return 1;
    }
    return 0;
}

std::string join_doubles(const std::vector<double>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << values[i];
    }
    return out.str();
}

std::string join_strings(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += values[i];
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temperature-controlled verdict aggregation for AI-system evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(tcva_version()));

    GlobalFlags globals;
    app.add_option("--config", globals.config_path, "JSON config file")->envname("TCVA_CONFIG");
    app.add_option("--seed", globals.seed, "Seed for every randomized step");
    app.add_option("--output-dir", globals.output_dir, "Directory for run artifacts");
    app.add_option("--parallelism", globals.parallelism, "Concurrent judge evaluations");

    // evaluate ---------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "Judge a dataset and score it");
    std::string dataset, metric, scheme, judge_backend, endpoint, model, api_key_env, mock_script,
        cache_path, criteria;
    std::vector<double> temperatures;
    int max_claims = 0;
    evaluate->add_option("--dataset", dataset, "JSONL dataset path");
    evaluate->add_option("--metric", metric, "Metric name (e.g. faithfulness)");
    evaluate->add_option("--criteria", criteria, "Criteria text shown to the judge");
    evaluate->add_option("--temperatures", temperatures, "Aggregation temperatures")->delimiter(',');
    evaluate->add_option("--scheme", scheme, "Weight scheme name");
    evaluate->add_option("--judge", judge_backend, "Judge backend: mock | remote");
    evaluate->add_option("--endpoint", endpoint, "Remote judge endpoint URL");
    evaluate->add_option("--model", model, "Remote judge model id");
    evaluate->add_option("--api-key-env", api_key_env,
                         "Environment variable holding the API key");
    evaluate->add_option("--mock-script", mock_script, "Scripted mock judge JSON file");
    evaluate->add_option("--cache", cache_path, "Verdict cache path");
    evaluate->add_option("--max-claims", max_claims, "Claim budget per answer");

    // reaggregate --------------------------------------------------------------
    auto* reaggregate =
        app.add_subcommand("reaggregate", "Re-score stored verdicts; zero judge calls");
    std::vector<std::string> sweep_schemes;
    std::vector<double> sweep_temperatures;
    bool all_schemes = false;
    reaggregate->add_option("--dataset", dataset, "JSONL dataset path");
    reaggregate->add_option("--metric", metric, "Metric name");
    reaggregate->add_option("--cache", cache_path, "Verdict cache path");
    reaggregate->add_option("--judge", judge_backend, "Judge backend the cache was built with");
    reaggregate->add_option("--model", model, "Remote judge model id");
    reaggregate->add_option("--mock-script", mock_script, "Scripted mock judge JSON file");
    reaggregate->add_option("--schemes", sweep_schemes, "Weight schemes to sweep")->delimiter(',');
    reaggregate->add_flag("--all-schemes", all_schemes,
                          "Sweep Default, Linear, Aggressive and Conservative");
    reaggregate->add_option("--temperatures", sweep_temperatures, "Temperatures to sweep")->delimiter(',');

    // stats -------------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "Correlate score tables with human annotations");
    std::string scores_path, baseline_path, baseline_name = "baseline";
    std::uint64_t resamples = 10000;
    double confidence = 0.95;
    stats->add_option("--scores", scores_path, "Score table CSV")->required();
    stats->add_option("--dataset", dataset, "JSONL dataset with human scores")->required();
    stats->add_option("--baseline", baseline_path, "Baseline score table for the paired test");
    stats->add_option("--baseline-name", baseline_name, "Label for the baseline method");
    stats->add_option("--resamples", resamples, "Bootstrap resamples");
    stats->add_option("--confidence", confidence, "Confidence level for the CI");

    // ablate -------------------------------------------------------------------
    auto* ablate = app.add_subcommand("ablate", "Run ablation configs A-D over stored verdicts");
    ablate->add_option("--dataset", dataset, "JSONL dataset path");
    ablate->add_option("--metric", metric, "Metric name");
    ablate->add_option("--cache", cache_path, "Verdict cache path");
    ablate->add_option("--judge", judge_backend, "Judge backend the cache was built with");
    ablate->add_option("--model", model, "Remote judge model id");
    ablate->add_option("--mock-script", mock_script, "Scripted mock judge JSON file");
    ablate->add_option("--scheme", scheme, "Weight scheme name");
    ablate->add_option("--temperatures", temperatures, "Temperatures to ablate at")->delimiter(',');

    // sample -------------------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "Stratified subsample by human score");
    std::string sample_output;
    std::uint64_t n_bins = 5, per_bin = 40;
    sample->add_option("--dataset", dataset, "JSONL dataset path")->required();
    sample->add_option("--output", sample_output, "Output dataset path")->required();
    sample->add_option("--bins", n_bins, "Number of equal-width bins");
    sample->add_option("--per-bin", per_bin, "Samples drawn per bin");

    // convert ------------------------------------------------------------------
    auto* convert = app.add_subcommand("convert", "Convert a public benchmark layout");
    std::string format, convert_input, convert_output, dimension;
    convert->add_option("--format", format, "summeval | usr")->required();
    convert->add_option("--input", convert_input, "Benchmark file")->required();
    convert->add_option("--output", convert_output, "Output JSONL dataset")->required();
    convert->add_option("--dimension", dimension,
                        "Annotation dimension (default: consistency / Maintains Context)");

    // plot ------------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "Emit SVG figures from a score table");
    plot->add_option("--scores", scores_path, "Score table CSV")->required();
    plot->add_option("--dataset", dataset, "JSONL dataset with human scores")->required();

    CLI11_PARSE(app, argc, argv);

    json config = load_config_file(globals.config_path);
    apply_globals(config, globals);
    if (!dataset.empty()) config["dataset"] = dataset;
    if (!metric.empty()) config["metric"] = metric;
    if (!criteria.empty()) config["criteria"] = criteria;
    if (!scheme.empty()) config["scheme"] = scheme;
    if (!temperatures.empty()) config["temperatures"] = temperatures;
    if (!cache_path.empty()) config["cache"] = cache_path;
    if (max_claims > 0) config["max_claims"] = max_claims;
    if (!judge_backend.empty() || !endpoint.empty() || !model.empty() || !api_key_env.empty() ||
        !mock_script.empty()) {
        json judge = config.value("judge", json::object());
        if (!judge_backend.empty()) judge["backend"] = judge_backend;
        if (!endpoint.empty()) judge["endpoint"] = endpoint;
        if (!model.empty()) judge["model"] = model;
        if (!api_key_env.empty()) judge["api_key_env"] = api_key_env;
        if (!mock_script.empty()) judge["script"] = mock_script;
        if (!judge.contains("backend") && (!endpoint.empty() || !model.empty()))
            judge["backend"] = "remote";
        config["judge"] = judge;
    }
    const std::string config_text = config.dump();

    char* summary = nullptr;
    if (*evaluate) {
        const tcva_status status = tcva_cmd_evaluate(config_text.c_str(), &summary);
        return finish(status, summary);
    }
    if (*reaggregate) {
        if (all_schemes && sweep_schemes.empty())
            sweep_schemes = {"Default", "Linear", "Aggressive", "Conservative"};
        const std::string schemes_csv = join_strings(sweep_schemes);
        const std::string temps_csv = join_doubles(sweep_temperatures);
        const tcva_status status = tcva_cmd_reaggregate(
            config_text.c_str(), sweep_schemes.empty() ? nullptr : schemes_csv.c_str(),
            sweep_temperatures.empty() ? nullptr : temps_csv.c_str(), &summary);
        return finish(status, summary);
    }
    if (*stats) {
        const std::string out_dir = config.value("output_dir", "tcva-out");
        const std::uint64_t seed = config.value("seed", std::uint64_t{42});
        const unsigned threads = config.value("parallelism", 1u);
        const tcva_status status = tcva_cmd_stats(
            scores_path.c_str(), dataset.c_str(),
            baseline_path.empty() ? nullptr : baseline_path.c_str(), baseline_name.c_str(),
            resamples, confidence, seed, threads, out_dir.c_str(), &summary);
        return finish(status, summary);
    }
    if (*ablate) {
        const tcva_status status = tcva_cmd_ablate(config_text.c_str(), &summary);
        return finish(status, summary);
    }
    if (*sample) {
        const std::uint64_t seed = config.value("seed", std::uint64_t{42});
        const tcva_status status = tcva_cmd_sample(dataset.c_str(), sample_output.c_str(),
                                                   n_bins, per_bin, seed, &summary);
        return finish(status, summary);
    }
    if (*convert) {
        const tcva_status status =
            tcva_cmd_convert(format.c_str(), convert_input.c_str(), convert_output.c_str(),
                             dimension.empty() ? nullptr : dimension.c_str(), &summary);
        return finish(status, summary);
    }
    if (*plot) {
        const std::string out_dir = config.value("output_dir", "tcva-out");
        const tcva_status status =
            tcva_cmd_plot(scores_path.c_str(), dataset.c_str(), out_dir.c_str(), &summary);
        return finish(status, summary);
    }
    return 0;
}
