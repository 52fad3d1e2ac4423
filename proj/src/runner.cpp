#include "tcva/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tcva/aggregate.hpp"
#include "tcva/baselines.hpp"
#include "tcva/cache.hpp"
#include "tcva/csv.hpp"
#include "tcva/dataset.hpp"
#include "tcva/error.hpp"
#include "tcva/pipeline.hpp"
#include "tcva/plot.hpp"
#include "tcva/stats.hpp"

namespace tcva {

using nlohmann::json;
namespace fs = std::filesystem;

RunConfig RunConfig::from_json(const json& doc) {
    RunConfig config;
    if (doc.contains("dataset")) config.dataset_path = doc.at("dataset").get<std::string>();
    if (doc.contains("metric")) config.metric_name = doc.at("metric").get<std::string>();
    if (doc.contains("criteria")) config.criteria_text = doc.at("criteria").get<std::string>();
    if (doc.contains("max_claims")) config.max_claims = doc.at("max_claims").get<std::size_t>();
    if (doc.contains("temperatures"))
        config.temperatures = doc.at("temperatures").get<std::vector<double>>();
    if (doc.contains("scheme")) config.scheme_name = doc.at("scheme").get<std::string>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("parallelism")) config.parallelism = doc.at("parallelism").get<unsigned>();
    if (doc.contains("cache")) config.cache_path = doc.at("cache").get<std::string>();
    if (doc.contains("output_dir")) config.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("judge")) {
        const auto& judge = doc.at("judge");
        if (judge.contains("api_key"))
            fail(Errc::config,
                 "config: judge.api_key is not accepted; set judge.api_key_env to the name of "
                 "an environment variable instead");
        if (judge.contains("backend")) config.judge.backend = judge.at("backend").get<std::string>();
        if (judge.contains("script")) config.judge.script_path = judge.at("script").get<std::string>();
        if (judge.contains("endpoint"))
            config.judge.remote.endpoint = judge.at("endpoint").get<std::string>();
        if (judge.contains("model")) config.judge.remote.model = judge.at("model").get<std::string>();
        if (judge.contains("api_key_env"))
            config.judge.remote.api_key_env = judge.at("api_key_env").get<std::string>();
        if (judge.contains("timeout_seconds"))
            config.judge.remote.timeout_seconds = judge.at("timeout_seconds").get<int>();
    }
    return config;
}

json RunConfig::to_json() const {
    json judge_json{{"backend", judge.backend}};
    if (judge.backend == "mock") {
        if (!judge.script_path.empty()) judge_json["script"] = judge.script_path;
    } else {
        judge_json["endpoint"] = judge.remote.endpoint;
        judge_json["model"] = judge.remote.model;
        judge_json["api_key_env"] = judge.remote.api_key_env;
    }
    return json{{"dataset", dataset_path},
                {"metric", metric_name},
                {"criteria", criteria_text},
                {"max_claims", max_claims},
                {"temperatures", temperatures},
                {"scheme", scheme_name},
                {"seed", seed},
                {"parallelism", parallelism},
                {"cache", cache_path},
                {"output_dir", output_dir},
                {"judge", judge_json}};
}

void RunConfig::validate() const {
    if (dataset_path.empty()) fail(Errc::config, "config: dataset path is required");
    if (temperatures.empty()) fail(Errc::config, "config: at least one temperature is required");
    for (double t : temperatures)
        if (!(t >= 0.1 && t <= 1.0))
            fail(Errc::config,
                 "config: temperature " + format_double(t) + " outside [0.1, 1.0]");
    if (parallelism < 1) fail(Errc::config, "config: parallelism must be >= 1");
    if (max_claims < 1 || max_claims > 50) fail(Errc::config, "config: max_claims in [1, 50]");
    WeightScheme::named(scheme_name); // throws on unknown names
    if (judge.backend != "mock" && judge.backend != "remote")
        fail(Errc::config, "config: judge backend must be \"mock\" or \"remote\"");
    if (judge.backend == "remote" && judge.remote.endpoint.empty())
        fail(Errc::config, "config: remote judge requires an endpoint");
}

namespace {

std::string default_criteria(const std::string& metric_name) {
    if (metric_name == "faithfulness")
        return "Every claim must be supported by facts from the provided context.";
    if (metric_name == "relevancy" || metric_name == "relevance")
        return "Every claim must directly address the question asked.";
    return "Every claim must satisfy the metric '" + metric_name + "'.";
}

MetricConfig metric_config_of(const RunConfig& config) {
    MetricConfig metric;
    metric.metric_name = config.metric_name;
    metric.criteria_text =
        config.criteria_text.empty() ? default_criteria(config.metric_name) : config.criteria_text;
    metric.max_claims = config.max_claims;
    metric.temperature = config.temperatures.front();
    return metric;
}

std::string cache_path_of(const RunConfig& config) {
    if (!config.cache_path.empty()) return config.cache_path;
    return (fs::path(config.output_dir) / "verdicts.jsonl").string();
}

std::shared_ptr<JudgeBackend> make_judge(const JudgeSelection& selection) {
    if (selection.backend == "remote")
        return std::make_shared<RemoteJudge>(selection.remote);
    ScriptedJudge::Script script;
    if (!selection.script_path.empty())
        script = ScriptedJudge::load_script(selection.script_path);
    return std::make_shared<ScriptedJudge>(std::move(script));
}

// Model id the cache key will carry, derivable without any network call.
std::string expected_model_id(const JudgeSelection& selection) {
    if (selection.backend == "remote") return selection.remote.model;
    if (!selection.script_path.empty())
        return ScriptedJudge::load_script(selection.script_path).model_id;
    return ScriptedJudge::Script{}.model_id;
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(Errc::io, "cannot create output directory '" + dir + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    out << text;
}

// Loads the cache and returns the entries matching the expected key, in
// dataset order. Errors actionably when nothing matches.
struct CachedRun {
    std::vector<std::string> sample_ids;
    std::vector<std::vector<VerdictLevel>> verdicts;
    std::size_t dataset_size = 0;
};

CachedRun load_cached_run(const RunConfig& config) {
    const auto samples = load_dataset(config.dataset_path);
    const std::string model_id = expected_model_id(config.judge);
    const std::string prompt_version = PromptTemplates::standard().version();
    const std::string cache_file = cache_path_of(config);

    VerdictCache cache = VerdictCache::load(cache_file);
    CachedRun run;
    run.dataset_size = samples.size();
    for (const auto& sample : samples) {
        const CacheKey key{sample.id, config.metric_name, model_id, prompt_version};
        if (auto entry = cache.find(key)) {
            run.sample_ids.push_back(sample.id);
            run.verdicts.push_back(entry->levels());
        }
    }
    if (run.sample_ids.empty()) {
        const CacheKey expected{samples.front().id, config.metric_name, model_id, prompt_version};
        fail(Errc::cache_miss, "no cached verdicts in '" + cache_file + "' for key " +
                                   expected.describe() +
                                   "; run `tcva evaluate` first with the same judge and metric");
    }
    return run;
}

} // namespace

CommandResult cmd_evaluate(const RunConfig& config) {
    config.validate();
    ensure_output_dir(config.output_dir);

    const auto samples = load_dataset(config.dataset_path);
    const auto metric = metric_config_of(config);
    const std::string cache_file = cache_path_of(config);

    auto backend = make_judge(config.judge);
    CountingJudge judge(backend);

    VerdictCache cache = VerdictCache::load(cache_file);
    PipelineOptions options;
    const auto outcome =
        evaluate_dataset(samples, metric, judge, cache, config.parallelism, options);
    cache.save(cache_file);

    const WeightScheme& scheme = WeightScheme::named(config.scheme_name);
    std::vector<ScoreRow> rows;
    rows.reserve(outcome.evaluations.size() * config.temperatures.size());
    for (const auto& evaluation : outcome.evaluations) {
        const auto levels = evaluation.levels();
        for (double temperature : config.temperatures) {
            const auto score = aggregate(levels, temperature, scheme);
            rows.push_back({evaluation.sample_id, temperature, scheme.name(),
                            std::string(to_string(AblationVariant::FullTCVA)), score.raw_score,
                            score.penalty_factor, score.final_score});
        }
    }

    const std::string scores_path = (fs::path(config.output_dir) / "scores.csv").string();
    write_score_csv(scores_path, rows);

    json failures = json::array();
    for (const auto& failure : outcome.failures)
        failures.push_back({{"sample_id", failure.sample_id}, {"error", failure.error}});

    // per-sample status in dataset order
    std::map<std::string, std::size_t> claims_by_id;
    for (const auto& evaluation : outcome.evaluations)
        claims_by_id[evaluation.sample_id] = evaluation.claims.size();
    json sample_status = json::array();
    for (const auto& sample : samples) {
        auto it = claims_by_id.find(sample.id);
        if (it != claims_by_id.end())
            sample_status.push_back({{"id", sample.id}, {"status", "ok"}, {"claims", it->second}});
        else
            sample_status.push_back({{"id", sample.id}, {"status", "failed"}});
    }

    const json manifest{
        {"command", "evaluate"},
        {"created_at", current_utc_timestamp()},
        {"config", config.to_json()},
        {"prompt_version", options.templates.version()},
        {"judge_model_id", judge.model_id()},
        {"seed", config.seed},
        {"counts",
         {{"samples", samples.size()},
          {"evaluated", outcome.evaluations.size()},
          {"failed", outcome.failures.size()},
          {"extraction_calls", judge.extraction_calls()},
          {"verdict_calls", judge.verdict_calls()}}},
        {"failures", failures},
        {"samples", sample_status},
        {"outputs", {scores_path, cache_file}}};
    const std::string manifest_path = (fs::path(config.output_dir) / "manifest.json").string();
    write_text_file(manifest_path, manifest.dump(2) + "\n");

    std::ostringstream summary;
    summary << "evaluate: " << outcome.evaluations.size() << "/" << samples.size()
            << " samples scored at " << config.temperatures.size() << " temperature(s), scheme "
            << scheme.name() << "\n"
            << "judge: " << judge.model_id() << " (" << judge.extraction_calls()
            << " extraction calls, " << judge.verdict_calls() << " verdict calls)\n"
            << "scores: " << scores_path << "\ncache: " << cache_file
            << "\nmanifest: " << manifest_path << "\n";
    if (!outcome.failures.empty())
        summary << "failed samples: " << outcome.failures.size() << " (see manifest)\n";
    return {summary.str(), {scores_path, cache_file, manifest_path}};
}

CommandResult cmd_reaggregate(const RunConfig& config,
                              const std::vector<std::string>& scheme_names,
                              const std::vector<double>& temperatures) {
    config.validate();
    if (scheme_names.empty()) fail(Errc::config, "reaggregate: scheme list must be nonempty");
    if (temperatures.empty()) fail(Errc::config, "reaggregate: temperature list must be nonempty");
    for (double t : temperatures)
        if (!(t >= 0.1 && t <= 1.0))
            fail(Errc::config, "reaggregate: temperature " + format_double(t) + " outside [0.1, 1.0]");
    ensure_output_dir(config.output_dir);

    std::vector<WeightScheme> schemes;
    schemes.reserve(scheme_names.size());
    for (const auto& name : scheme_names) schemes.push_back(WeightScheme::named(name));

    const CachedRun run = load_cached_run(config);
    const auto cells = reaggregate_sweep(run.verdicts, temperatures, schemes);

    std::vector<ScoreRow> rows;
    rows.reserve(cells.size());
    for (const auto& cell : cells) {
        rows.push_back({run.sample_ids[cell.sample_index], cell.temperature, cell.scheme_name,
                        std::string(to_string(AblationVariant::FullTCVA)), cell.score.raw_score,
                        cell.score.penalty_factor, cell.score.final_score});
    }
    const std::string out_path = (fs::path(config.output_dir) / "reaggregated.csv").string();
    write_score_csv(out_path, rows);

    std::ostringstream summary;
    summary << "reaggregate: " << run.sample_ids.size() << " cached samples x "
            << temperatures.size() << " temperatures x " << schemes.size() << " schemes = "
            << cells.size() << " scores, zero judge calls\n"
            << "scores: " << out_path << "\n";
    if (run.sample_ids.size() < run.dataset_size)
        summary << "note: " << (run.dataset_size - run.sample_ids.size())
                << " dataset sample(s) have no cached verdicts and were skipped\n";
    return {summary.str(), {out_path}};
}

namespace {

struct GroupKey {
    std::string variant;
    std::string scheme;
    double temperature = 0.0;
    auto operator<=>(const GroupKey&) const = default;
};

std::map<GroupKey, std::vector<const ScoreRow*>> group_rows(const std::vector<ScoreRow>& rows) {
    std::map<GroupKey, std::vector<const ScoreRow*>> groups;
    for (const auto& row : rows)
        groups[{row.variant, row.scheme, row.temperature}].push_back(&row);
    return groups;
}

PairedScores align_with_human(const std::vector<const ScoreRow*>& rows,
                              const std::map<std::string, double>& human_by_id,
                              const std::string& scores_path) {
    std::vector<std::string> unmatched;
    PairedScores pairs;
    for (const ScoreRow* row : rows) {
        auto it = human_by_id.find(row->sample_id);
        if (it == human_by_id.end()) {
            unmatched.push_back(row->sample_id);
            continue;
        }
        pairs.method_scores.push_back(row->final_score);
        pairs.human_scores.push_back(it->second);
        pairs.sample_ids.push_back(row->sample_id);
    }
    if (!unmatched.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < unmatched.size() && i < 20; ++i)
            joined += (i ? ", " : "") + unmatched[i];
        if (unmatched.size() > 20) joined += ", ...";
        fail(Errc::schema, "'" + scores_path + "' has " + std::to_string(unmatched.size()) +
                               " sample id(s) without human annotations: " + joined);
    }
    return pairs;
}

} // namespace

CommandResult cmd_stats(const StatsRequest& request) {
    if (request.scores_path.empty() || request.dataset_path.empty())
        fail(Errc::config, "stats: scores and dataset paths are required");
    ensure_output_dir(request.output_dir);

    const auto rows = read_score_csv(request.scores_path);
    const auto samples = load_dataset(request.dataset_path);
    std::map<std::string, double> human_by_id;
    for (const auto& sample : samples)
        if (sample.human_score) human_by_id[sample.id] = *sample.human_score;
    if (human_by_id.empty())
        fail(Errc::schema, "dataset '" + request.dataset_path + "' carries no human scores");

    // Optional baseline: a score table forming exactly one method group.
    std::optional<PairedScores> baseline;
    if (!request.baseline_path.empty()) {
        const auto baseline_rows = read_score_csv(request.baseline_path);
        const auto baseline_groups = group_rows(baseline_rows);
        if (baseline_groups.size() != 1)
            fail(Errc::config, "stats: baseline '" + request.baseline_path + "' holds " +
                                   std::to_string(baseline_groups.size()) +
                                   " method groups; filter it to exactly one");
        baseline =
            align_with_human(baseline_groups.begin()->second, human_by_id, request.baseline_path);
    }

    const auto groups = group_rows(rows);

    struct ReportRow {
        GroupKey key;
        std::size_t n = 0;
        std::optional<double> rho, tau;
        double mae_value = 0.0;
        std::optional<BootstrapReport> ci;
        std::optional<PairedTestResult> test;
        std::string note;
    };
    std::vector<ReportRow> report;

    for (const auto& [key, group] : groups) {
        ReportRow row;
        row.key = key;
        const auto pairs = align_with_human(group, human_by_id, request.scores_path);
        row.n = pairs.size();
        row.mae_value = mae(pairs);
        try {
            row.rho = spearman_rho(pairs);
            row.tau = kendall_tau(pairs);
            row.ci = bootstrap_ci(pairs, spearman_statistic(), request.n_resamples,
                                  request.confidence_level, request.seed, request.n_threads);
        } catch (const Error& e) {
            if (e.code() != Errc::undefined_correlation && e.code() != Errc::degenerate_bootstrap)
                throw;
            row.note = e.what();
        }
        if (baseline && row.rho) {
            // align baseline to this group's sample ids
            std::map<std::string, double> baseline_by_id;
            for (std::size_t i = 0; i < baseline->size(); ++i)
                baseline_by_id[baseline->sample_ids[i]] = baseline->method_scores[i];
            std::vector<double> a, b, h;
            std::vector<std::string> unmatched;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                auto it = baseline_by_id.find(pairs.sample_ids[i]);
                if (it == baseline_by_id.end()) {
                    unmatched.push_back(pairs.sample_ids[i]);
                    continue;
                }
                a.push_back(pairs.method_scores[i]);
                b.push_back(it->second);
                h.push_back(pairs.human_scores[i]);
            }
            if (!unmatched.empty()) {
                std::string joined;
                for (std::size_t i = 0; i < unmatched.size() && i < 20; ++i)
                    joined += (i ? ", " : "") + unmatched[i];
                fail(Errc::schema, "stats: baseline lacks sample id(s): " + joined);
            }
            try {
                row.test = paired_bootstrap_test(a, b, h, spearman_statistic(),
                                                 request.n_resamples, request.seed,
                                                 request.n_threads);
            } catch (const Error& e) {
                if (e.code() != Errc::undefined_correlation &&
                    e.code() != Errc::degenerate_bootstrap)
                    throw;
                if (!row.note.empty()) row.note += "; ";
                row.note += e.what();
            }
        }
        report.push_back(std::move(row));
    }

    // flag the best temperature within each (variant, scheme) family
    std::map<std::pair<std::string, std::string>, const ReportRow*> best;
    for (const auto& row : report) {
        if (!row.rho) continue;
        auto& slot = best[{row.key.variant, row.key.scheme}];
        if (!slot || *row.rho > *slot->rho) slot = &row;
    }

    std::ostringstream csv;
    csv << "variant,scheme,temperature,n,spearman_rho,rho_ci_low,rho_ci_high,kendall_tau,mae,"
           "delta_vs_baseline,p_value,best_temperature\n";
    std::ostringstream text;
    for (const auto& row : report) {
        const bool is_best =
            best.count({row.key.variant, row.key.scheme}) &&
            best[{row.key.variant, row.key.scheme}] == &row;
        csv << csv_escape(row.key.variant) << ',' << csv_escape(row.key.scheme) << ','
            << format_double(row.key.temperature) << ',' << row.n << ','
            << (row.rho ? format_double(*row.rho) : "") << ','
            << (row.ci ? format_double(row.ci->ci_low) : "") << ','
            << (row.ci ? format_double(row.ci->ci_high) : "") << ','
            << (row.tau ? format_double(*row.tau) : "") << ',' << format_double(row.mae_value)
            << ',' << (row.test ? format_double(row.test->delta) : "") << ','
            << (row.test ? format_double(row.test->p_value) : "") << ',' << (is_best ? "1" : "0")
            << '\n';

        char line[256];
        std::snprintf(line, sizeof(line), "%s scheme=%s T=%.3g  n=%zu  ", row.key.variant.c_str(),
                      row.key.scheme.c_str(), row.key.temperature, row.n);
        text << line;
        if (row.rho) {
            std::snprintf(line, sizeof(line), "rho=%.4f", *row.rho);
            text << line;
            if (row.ci) {
                std::snprintf(line, sizeof(line), " [%.4f, %.4f]", row.ci->ci_low,
                              row.ci->ci_high);
                text << line;
            }
            std::snprintf(line, sizeof(line), "  tau=%.4f", row.tau ? *row.tau : 0.0);
            text << line;
        } else {
            text << "rho=undefined";
        }
        std::snprintf(line, sizeof(line), "  mae=%.4f", row.mae_value);
        text << line;
        if (row.test) {
            std::snprintf(line, sizeof(line), "  vs %s: delta=%+.4f p=%.4f",
                          request.baseline_name.c_str(), row.test->delta, row.test->p_value);
            text << line;
        }
        if (is_best) text << "  <- best T";
        if (!row.note.empty()) text << "  (" << row.note << ")";
        text << '\n';
    }

    const std::string csv_path = (fs::path(request.output_dir) / "correlations.csv").string();
    const std::string summary_path = (fs::path(request.output_dir) / "summary.txt").string();
    write_text_file(csv_path, csv.str());
    write_text_file(summary_path, text.str());

    std::string summary = text.str();
    summary += "report: " + csv_path + "\nsummary: " + summary_path + "\n";
    return {summary, {csv_path, summary_path}};
}

CommandResult cmd_ablate(const RunConfig& config) {
    config.validate();
    ensure_output_dir(config.output_dir);

    const CachedRun run = load_cached_run(config);
    const WeightScheme& scheme = WeightScheme::named(config.scheme_name);

    static constexpr AblationVariant kVariants[] = {
        AblationVariant::FullTCVA, AblationVariant::NoPenalty, AblationVariant::ArithmeticMean,
        AblationVariant::BinaryVerdicts};

    std::vector<ScoreRow> rows;
    std::ostringstream wide;
    wide << "sample_id,temperature,scheme,final_a,final_b,final_c,final_d,delta_b,delta_c,"
            "delta_d\n";
    for (std::size_t i = 0; i < run.sample_ids.size(); ++i) {
        for (double temperature : config.temperatures) {
            double finals[4] = {0, 0, 0, 0};
            for (std::size_t v = 0; v < 4; ++v) {
                AblationConfig ablation;
                ablation.variant = kVariants[v];
                ablation.temperature = temperature;
                ablation.scheme = &scheme;
                const auto score = run_ablation(run.verdicts[i], ablation);
                finals[v] = score.final_score;
                rows.push_back({run.sample_ids[i], temperature, scheme.name(),
                                std::string(to_string(kVariants[v])), score.raw_score,
                                score.penalty_factor, score.final_score});
            }
            wide << csv_escape(run.sample_ids[i]) << ',' << format_double(temperature) << ','
                 << csv_escape(scheme.name()) << ',' << format_double(finals[0]) << ','
                 << format_double(finals[1]) << ',' << format_double(finals[2]) << ','
                 << format_double(finals[3]) << ',' << format_double(finals[1] - finals[0]) << ','
                 << format_double(finals[2] - finals[0]) << ','
                 << format_double(finals[3] - finals[0]) << '\n';
        }
    }

    const std::string long_path = (fs::path(config.output_dir) / "ablation.csv").string();
    const std::string wide_path = (fs::path(config.output_dir) / "ablation_delta.csv").string();
    write_score_csv(long_path, rows);
    write_text_file(wide_path, wide.str());

    std::ostringstream summary;
    summary << "ablate: " << run.sample_ids.size() << " cached samples x "
            << config.temperatures.size() << " temperature(s) x 4 configs\n"
            << "scores: " << long_path << "\ndeltas: " << wide_path << "\n";
    return {summary.str(), {long_path, wide_path}};
}

CommandResult cmd_sample(const SampleRequest& request) {
    if (request.dataset_path.empty() || request.output_path.empty())
        fail(Errc::config, "sample: dataset and output paths are required");
    const auto samples = load_dataset(request.dataset_path);

    std::vector<double> human;
    human.reserve(samples.size());
    for (const auto& sample : samples) {
        if (!sample.human_score)
            fail(Errc::schema, "sample: dataset sample '" + sample.id +
                                   "' has no human_score; stratified sampling needs one per sample");
        human.push_back(*sample.human_score);
    }

    const auto picked =
        stratified_sample_indices(human, request.n_bins, request.per_bin, request.seed);
    std::vector<EvaluationSample> subset;
    subset.reserve(picked.size());
    for (std::size_t index : picked) subset.push_back(samples[index]);
    save_dataset(request.output_path, subset);

    // bin-count summary: available vs drawn per bin
    std::vector<std::size_t> available(request.n_bins, 0), drawn(request.n_bins, 0);
    auto bin_of = [&](double score) {
        auto bin = static_cast<std::size_t>(score * static_cast<double>(request.n_bins));
        return std::min(bin, request.n_bins - 1);
    };
    for (double score : human) ++available[bin_of(score)];
    for (std::size_t index : picked) ++drawn[bin_of(human[index])];

    std::ostringstream summary;
    summary << "sample: drew " << picked.size() << " of " << samples.size() << " samples into "
            << request.output_path << " (seed " << request.seed << ")\n";
    for (std::size_t b = 0; b < request.n_bins; ++b) {
        const double lo = static_cast<double>(b) / static_cast<double>(request.n_bins);
        const double hi = static_cast<double>(b + 1) / static_cast<double>(request.n_bins);
        summary << "bin [" << format_double(lo) << ", " << format_double(hi)
                << (b + 1 == request.n_bins ? "]" : ")") << ": " << drawn[b] << " drawn of "
                << available[b] << " available\n";
    }
    return {summary.str(), {request.output_path}};
}

CommandResult cmd_plot(const PlotRequest& request) {
    if (request.scores_path.empty() || request.dataset_path.empty())
        fail(Errc::config, "plot: scores and dataset paths are required");
    ensure_output_dir(request.output_dir);

    const auto rows = read_score_csv(request.scores_path);
    const auto samples = load_dataset(request.dataset_path);
    std::map<std::string, double> human_by_id;
    for (const auto& sample : samples)
        if (sample.human_score) human_by_id[sample.id] = *sample.human_score;
    if (human_by_id.empty())
        fail(Errc::schema, "dataset '" + request.dataset_path + "' carries no human scores");

    const auto groups = group_rows(rows);

    // method family -> temperature -> (rho, group pointer)
    struct TemperaturePoint {
        double temperature;
        double rho;
        const std::vector<const ScoreRow*>* group;
    };
    std::map<std::pair<std::string, std::string>, std::vector<TemperaturePoint>> families;
    for (const auto& [key, group] : groups) {
        const auto pairs = align_with_human(group, human_by_id, request.scores_path);
        double rho = 0.0;
        try {
            rho = spearman_rho(pairs);
        } catch (const Error& e) {
            if (e.code() != Errc::undefined_correlation) throw;
            continue;
        }
        families[{key.variant, key.scheme}].push_back({key.temperature, rho, &group});
    }
    if (families.empty())
        fail(Errc::undefined_correlation,
             "plot: no method group has a defined correlation with the human scores");

    std::vector<std::string> outputs;
    std::ostringstream summary;
    for (auto& [family, points] : families) {
        std::sort(points.begin(), points.end(),
                  [](const TemperaturePoint& a, const TemperaturePoint& b) {
                      return a.temperature < b.temperature;
                  });
        const auto best = std::max_element(points.begin(), points.end(),
                                           [](const TemperaturePoint& a,
                                              const TemperaturePoint& b) {
                                               return a.rho < b.rho;
                                           });
        const std::string stem = family.first + "_" + family.second;

        std::vector<ScatterPoint> scatter;
        for (const ScoreRow* row : *best->group)
            scatter.push_back({human_by_id.at(row->sample_id), row->final_score});
        const std::string scatter_path =
            (fs::path(request.output_dir) /
             ("scatter_" + stem + "_T" + format_double(best->temperature) + ".svg"))
                .string();
        write_text_file(scatter_path,
                        render_scatter_svg(scatter,
                                           family.first + " (" + family.second + ", T=" +
                                               format_double(best->temperature) + ")",
                                           "human score", "method score"));
        outputs.push_back(scatter_path);

        if (points.size() >= 2) {
            std::vector<ScatterPoint> curve;
            for (const auto& point : points) curve.push_back({point.temperature, point.rho});
            const std::string curve_path =
                (fs::path(request.output_dir) / ("temperature_curve_" + stem + ".svg")).string();
            write_text_file(curve_path,
                            render_curve_svg(curve, family.first + " (" + family.second + ")",
                                             "temperature", "spearman rho"));
            outputs.push_back(curve_path);
        }
        summary << family.first << " scheme=" << family.second << ": best T "
                << format_double(best->temperature) << " (rho " << format_double(best->rho)
                << ")\n";
    }
    for (const auto& path : outputs) summary << "figure: " << path << "\n";
    return {summary.str(), outputs};
}

CommandResult cmd_convert(const ConvertRequest& request) {
    if (request.input_path.empty() || request.output_path.empty())
        fail(Errc::config, "convert: input and output paths are required");
    std::size_t count = 0;
    std::string dimension = request.dimension;
    if (request.format == "summeval") {
        if (dimension.empty()) dimension = "consistency";
        count = convert_summeval(request.input_path, request.output_path, dimension);
    } else if (request.format == "usr") {
        if (dimension.empty()) dimension = "Maintains Context";
        count = convert_usr(request.input_path, request.output_path, dimension);
    } else {
        fail(Errc::config, "convert: unknown format '" + request.format +
                               "' (expected summeval or usr)");
    }
    std::ostringstream summary;
    summary << "convert: wrote " << count << " samples (" << request.format << ", dimension '"
            << dimension << "') to " << request.output_path << "\n";
    return {summary.str(), {request.output_path}};
}

} // namespace tcva
