#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcva/judge.hpp"

namespace tcva {

struct JudgeSelection {
    std::string backend = "mock"; // "mock" | "remote"
    std::string script_path;      // mock: optional JSON script
    RemoteJudgeConfig remote;
};

// Declarative run configuration: a flat JSON object with one nested "judge"
// object. Flag overrides are merged on top by the CLI before parsing.
struct RunConfig {
    std::string dataset_path;
    std::string metric_name = "faithfulness";
    std::string criteria_text;
    std::size_t max_claims = 8;
    std::vector<double> temperatures = {0.2, 0.3, 0.5, 0.7, 0.9};
    std::string scheme_name = "Default";
    JudgeSelection judge;
    std::uint64_t seed = 42;
    unsigned parallelism = 1;
    std::string cache_path;  // defaults to <output_dir>/verdicts.jsonl
    std::string output_dir = "tcva-out";

    static RunConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
    void validate() const; // rejects out-of-range temperatures before any work
};

struct CommandResult {
    std::string summary;                   // human-readable block
    std::vector<std::string> output_files; // everything written
};

// Runs the judge pipeline over the dataset, writes the verdict cache, a
// score table at every configured temperature and a run manifest. Failed
// samples are listed in the manifest; the run continues past them.
CommandResult cmd_evaluate(const RunConfig& config);

// Re-aggregates stored verdicts over schemes x temperatures with zero judge
// calls. Empty override lists are a configuration error; a missing cache
// names the expected key.
CommandResult cmd_reaggregate(const RunConfig& config,
                              const std::vector<std::string>& scheme_names,
                              const std::vector<double>& temperatures);

struct StatsRequest {
    std::string scores_path;
    std::string dataset_path;   // supplies human annotations
    std::string baseline_path;  // optional second method for the paired test
    std::string baseline_name = "baseline";
    std::size_t n_resamples = 10000;
    double confidence_level = 0.95;
    std::uint64_t seed = 42;
    unsigned n_threads = 1;
    std::string output_dir = "tcva-out";
};

// Correlation report per (variant, scheme, temperature) group: Spearman,
// Kendall, MAE, bootstrap CI and, when a baseline is supplied, a paired
// bootstrap test. Flags the best-correlating temperature.
CommandResult cmd_stats(const StatsRequest& request);

// Ablation configs A-D over the stored verdicts, with deltas relative to A.
CommandResult cmd_ablate(const RunConfig& config);

struct SampleRequest {
    std::string dataset_path;
    std::string output_path;
    std::size_t n_bins = 5;
    std::size_t per_bin = 40;
    std::uint64_t seed = 42;
};

// Stratified subset of the dataset plus a bin-count summary.
CommandResult cmd_sample(const SampleRequest& request);

struct ConvertRequest {
    std::string format; // "summeval" | "usr"
    std::string input_path;
    std::string output_path;
    std::string dimension; // defaults per format
};

CommandResult cmd_convert(const ConvertRequest& request);

struct PlotRequest {
    std::string scores_path;
    std::string dataset_path; // supplies human annotations
    std::string output_dir = "tcva-out";
};

// SVG figures from a score table: a method-vs-human scatter per method group
// (at its best-correlating temperature) and a Spearman-vs-temperature curve
// when the table sweeps temperatures.
CommandResult cmd_plot(const PlotRequest& request);

} // namespace tcva
