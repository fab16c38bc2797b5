#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "gbafs/baselines.hpp"
#include "gbafs/classify.hpp"
#include "gbafs/errors.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/random.hpp"
#include "output.hpp"

namespace gbafs::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

// Undefined values become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& vs) {
    Json a = Json::array();
    for (double v : vs) a.push_back(number(v));
    return a;
}

Json feature_list(const std::vector<std::size_t>& idx, const std::vector<std::string>& names) {
    Json a = Json::array();
    for (auto i : idx) a.push_back({{"index", i}, {"name", names[i]}});
    return a;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

const char* shape_name(CurveShape s) {
    switch (s) {
        case CurveShape::ConcaveIncreasing: return "concave_increasing";
        case CurveShape::ConcaveDecreasing: return "concave_decreasing";
        case CurveShape::ConvexIncreasing: return "convex_increasing";
        case CurveShape::ConvexDecreasing: return "convex_decreasing";
    }
    return "unknown";
}

struct LoadedData {
    Dataset all;    // normalized
    Dataset train;  // all rows unless a split was requested
    Dataset test;   // empty unless a split was requested
    bool split = false;
};

LoadedData load(const RunConfig& cfg, bool want_split) {
    if (cfg.input.empty()) throw ConfigError("--input is required");
    LoadedData d;
    d.all = minmax_normalize(load_csv(cfg.input, LabelColumn::parse(cfg.label)));
    d.all.validate();
    if (want_split) {
        SplitSpec spec;
        spec.train_fraction = cfg.train_fraction;
        spec.seed = cfg.seed;
        std::tie(d.train, d.test) = split_train_test(d.all, spec);
        d.split = true;
    } else {
        d.train = d.all;
    }
    return d;
}

void prepare_output(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw DataError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
}

Json input_echo(const RunConfig& cfg, const LoadedData& d) {
    Json j;
    j["path"] = cfg.input;
    j["label"] = cfg.label;
    j["rows"] = d.all.rows();
    j["features"] = d.all.features();
    j["classes"] = d.all.class_ids;
    j["normalization"] = "min-max per feature";
    if (d.split) {
        j["train_fraction"] = cfg.train_fraction;
        j["train_rows"] = d.train.rows();
        j["test_rows"] = d.test.rows();
    }
    return j;
}

Json tsne_echo(const TsneConfig& t) {
    return {{"perplexity", t.perplexity},
            {"iterations", t.iterations},
            {"output_dim", t.output_dim},
            {"learning_rate", t.learning_rate},
            {"early_exaggeration", t.early_exaggeration},
            {"exaggeration_iters", t.exaggeration_iters},
            {"momentum_initial", t.momentum_initial},
            {"momentum_final", t.momentum_final},
            {"momentum_switch_iter", t.momentum_switch_iter},
            {"init_stddev", t.init_stddev},
            {"min_gain", t.min_gain}};
}

Json pipeline_echo(const PipelineConfig& p) {
    return {{"seed", p.seed},
            {"folds", p.fold_count},
            {"k_max", p.k_max},
            {"knee_sensitivity", p.knee_sensitivity},
            {"knee_smoothing", p.knee_smoothing},
            {"reference_indices", p.reference_indices},
            {"pam_max_rounds", p.pam.max_rounds},
            {"pam_restarts", p.pam.restarts},
            {"tsne", tsne_echo(p.tsne)}};
}

Json curve_json(const MSSCurve& c) {
    Json j;
    j["k"] = c.ks;
    j["mss"] = numbers(c.averaged);
    if (!c.averaged_silhouette.empty()) {
        j["silhouette"] = numbers(c.averaged_silhouette);
        j["simplified_silhouette"] = numbers(c.averaged_simplified);
    }
    Json folds = Json::array();
    for (std::size_t f = 0; f < c.fold_values.rows(); ++f) {
        std::vector<double> row(c.fold_values.row(f).begin(), c.fold_values.row(f).end());
        folds.push_back(numbers(row));
    }
    j["mss_per_fold"] = folds;
    return j;
}

Json selection_json(const SelectionResult& r, const std::vector<std::string>& names) {
    Json j;
    j["k_min"] = r.k_min;
    j["selected_features"] = feature_list(r.selected_features, names);
    Json knee;
    knee["found"] = r.knee.x.has_value();
    knee["fallback"] = r.knee_fallback;
    knee["shape"] = shape_name(r.knee.shape);
    j["knee"] = knee;
    j["curve"] = curve_json(r.curve);
    j["embedding"] = {{"effective_perplexity", r.effective_perplexity},
                      {"initial_kl", r.embedding.initial_kl},
                      {"final_kl", r.embedding.final_kl},
                      {"unconverged_rows", r.embedding.unconverged_rows}};
    j["clustering"] = {{"cost", r.clustering.cost}, {"swap_rounds", r.clustering.swap_rounds}};
    j["warnings"] = r.warnings;
    return j;
}

void write_timings(const RunConfig& cfg, const std::vector<std::pair<std::string, double>>& stages) {
    Json j;
    j["threads"] = max_threads();
    Json s;
    for (const auto& [name, seconds] : stages) s[name] = seconds;
    j["seconds"] = s;
    write_text(cfg.output_dir / "timings.json", dump(j));
}

std::vector<std::size_t> all_features(std::size_t m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

std::vector<std::size_t> indices_by_name(const Dataset& d, const std::vector<std::string>& wanted) {
    std::map<std::string, std::size_t> by_name;
    for (std::size_t f = 0; f < d.features(); ++f) by_name.emplace(d.feature_names[f], f);
    std::vector<std::size_t> out;
    for (const auto& w : wanted) {
        auto it = by_name.find(w);
        if (it == by_name.end()) throw ConfigError("unknown feature name: " + w);
        out.push_back(it->second);
    }
    if (out.empty()) throw ConfigError("feature subset is empty");
    return out;
}

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(list);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> names_from_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open selection file: " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw DataError("selection file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.contains("selected_features")) throw DataError("selection file has no selected_features: " + path.string());
    std::vector<std::string> names;
    for (const auto& f : j["selected_features"]) names.push_back(f.at("name").get<std::string>());
    return names;
}

std::vector<std::size_t> baseline_subset(const std::string& method, const Dataset& train, std::size_t k,
                                         const RunConfig& cfg, std::uint64_t seed) {
    if (method == "relieff") {
        ReliefFOptions o{cfg.relieff_neighbors, cfg.relieff_samples, seed};
        return relieff_weights(train, o).top(k);
    }
    if (method == "fisher") return fisher_scores(train).top(k);
    if (method == "cfs") return cfs_select(train, k);
    if (method == "random") return random_select(train.features(), k, seed);
    throw ConfigError("unknown baseline method: " + method);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.seed = seed;
    p.fold_count = folds;
    p.k_max = k_max;
    p.knee_sensitivity = knee_sensitivity;
    p.knee_smoothing = knee_smoothing;
    p.reference_indices = reference_indices;
    p.tsne.perplexity = perplexity;
    p.tsne.iterations = iterations;
    p.pam.restarts = pam_restarts;
    p.validate();
    return p;
}

int cmd_select(const RunConfig& cfg, std::ostream& out) {
    const auto pipeline = cfg.pipeline();
    const LoadedData d = load(cfg, cfg.train_fraction < 1.0);
    prepare_output(cfg);

    const auto result = select_features(d.train, pipeline);
    const auto& names = d.train.feature_names;

    Json report;
    report["command"] = "select";
    report["version"] = kVersion;
    report["input"] = input_echo(cfg, d);
    report["config"] = pipeline_echo(pipeline);
    const Json selection = selection_json(result, names);
    for (const auto& [key, value] : selection.items()) report[key] = value;

    write_text(cfg.output_dir / "report.json", dump(report));
    write_text(cfg.output_dir / "curve.csv", curve_csv(result.curve));
    write_text(cfg.output_dir / "embedding.csv",
               embedding_csv(result.embedding.coords, names, result.selected_features));
    if (cfg.export_feature_space) {
        write_text(cfg.output_dir / "feature_space.csv",
                   feature_space_csv(result.feature_space, names, d.train.without_empty_classes().class_ids));
    }
    if (cfg.plots) {
        write_text(cfg.output_dir / "curve.svg", curve_svg(result.curve, result.k_min));
        write_text(cfg.output_dir / "embedding.svg",
                   embedding_svg(result.embedding.coords, names, result.selected_features));
    }
    write_timings(cfg, result.timings);

    out << "k_min = " << result.k_min << " of " << names.size() << " features\n";
    for (auto f : result.selected_features) out << "  " << names[f] << "\n";
    for (const auto& w : result.warnings) out << "warning: " << w << "\n";
    out << "wrote " << (cfg.output_dir / "report.json").string() << "\n";
    return kSuccess;
}

int cmd_embed_only(const RunConfig& cfg, std::ostream& out) {
    const auto pipeline = cfg.pipeline();
    const LoadedData d = load(cfg, cfg.train_fraction < 1.0);
    prepare_output(cfg);

    const auto start = std::chrono::steady_clock::now();
    const Dataset data = d.train.without_empty_classes();
    const SeparabilityMatrix z = build_feature_space(data);
    TsneConfig tsne = pipeline.tsne;
    tsne.seed = pipeline.seed;
    tsne.perplexity = effective_perplexity(pipeline, z.features());
    const Embedding e = embed(z, tsne);
    const double elapsed = seconds_since(start);

    Json report;
    report["command"] = "embed-only";
    report["version"] = kVersion;
    report["input"] = input_echo(cfg, d);
    report["config"] = {{"seed", pipeline.seed}, {"tsne", tsne_echo(tsne)}};
    report["embedding"] = {{"initial_kl", e.initial_kl},
                           {"final_kl", e.final_kl},
                           {"unconverged_rows", e.unconverged_rows}};
    write_text(cfg.output_dir / "report.json", dump(report));
    write_text(cfg.output_dir / "embedding.csv", embedding_csv(e.coords, data.feature_names, {}));
    if (cfg.export_feature_space) {
        write_text(cfg.output_dir / "feature_space.csv", feature_space_csv(z, data.feature_names, data.class_ids));
    }
    if (cfg.plots && e.coords.cols() >= 2) {
        write_text(cfg.output_dir / "embedding.svg", embedding_svg(e.coords, data.feature_names, {}));
    }
    write_timings(cfg, {{"embedding", elapsed}});

    out << "embedded " << z.features() << " features, KL " << e.initial_kl << " -> " << e.final_kl << "\n";
    if (!e.unconverged_rows.empty()) {
        out << "warning: perplexity search did not converge for " << e.unconverged_rows.size() << " feature(s)\n";
    }
    return kSuccess;
}

int cmd_baseline(const RunConfig& cfg, std::ostream& out) {
    if (cfg.method.empty()) throw ConfigError("--method is required");
    const LoadedData d = load(cfg, cfg.train_fraction < 1.0);
    std::size_t k = cfg.k;
    if (!cfg.selection.empty()) k = names_from_report(cfg.selection).size();
    if (k < 1 || k > d.train.features()) {
        throw ConfigError("--k must lie in [1, " + std::to_string(d.train.features()) + "] (or pass --selection)");
    }
    prepare_output(cfg);

    const auto start = std::chrono::steady_clock::now();
    const auto subset = baseline_subset(cfg.method, d.train, k, cfg, cfg.seed);
    const double elapsed = seconds_since(start);

    Json report;
    report["command"] = "baseline";
    report["version"] = kVersion;
    report["input"] = input_echo(cfg, d);
    report["config"] = {{"method", cfg.method},
                        {"k", k},
                        {"seed", cfg.seed},
                        {"relieff_neighbors", cfg.relieff_neighbors},
                        {"relieff_samples", cfg.relieff_samples}};
    report["selected_features"] = feature_list(subset, d.train.feature_names);
    const fs::path path = cfg.output_dir / ("baseline_" + cfg.method + ".json");
    write_text(path, dump(report));
    write_timings(cfg, {{"baseline_" + cfg.method, elapsed}});

    out << cfg.method << " selected " << k << " features\n";
    for (auto f : subset) out << "  " << d.train.feature_names[f] << "\n";
    out << "wrote " << path.string() << "\n";
    return kSuccess;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const LoadedData d = load(cfg, true);
    std::vector<std::string> wanted;
    if (!cfg.selection.empty()) wanted = names_from_report(cfg.selection);
    for (const auto& n : split_names(cfg.features)) wanted.push_back(n);
    if (wanted.empty()) throw ConfigError("give the subset with --features or --selection");
    const auto subset = indices_by_name(d.all, wanted);
    prepare_output(cfg);

    const ClassifierConfig classifier{cfg.neighbors};
    const auto on_subset = evaluate(d.train, d.test, subset, classifier);
    const auto on_all = evaluate(d.train, d.test, all_features(d.all.features()), classifier);

    auto metrics = [](const EvalReport& r) {
        return Json{{"features", r.subset.size()}, {"accuracy", r.accuracy}, {"balanced_f", r.balanced_f}};
    };
    Json report;
    report["command"] = "evaluate";
    report["version"] = kVersion;
    report["input"] = input_echo(cfg, d);
    report["config"] = {{"seed", cfg.seed}, {"n_neighbors", cfg.neighbors}};
    report["subset"] = feature_list(subset, d.all.feature_names);
    report["subset_metrics"] = metrics(on_subset);
    report["all_features_metrics"] = metrics(on_all);
    write_text(cfg.output_dir / "evaluation.json", dump(report));
    write_timings(cfg, {{"predict_subset", on_subset.predict_time}, {"predict_all", on_all.predict_time}});

    out << std::fixed << std::setprecision(4);
    out << "subset (" << subset.size() << " features): accuracy " << on_subset.accuracy << ", balanced F "
        << on_subset.balanced_f << ", predict " << on_subset.predict_time << " s\n";
    out << "all (" << d.all.features() << " features): accuracy " << on_all.accuracy << ", balanced F "
        << on_all.balanced_f << ", predict " << on_all.predict_time << " s\n";
    out << "time saved: " << 100.0 * (1.0 - on_subset.predict_time / on_all.predict_time) << " %\n";
    return kSuccess;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    if (cfg.repetitions < 1) throw ConfigError("--repetitions must be at least 1");
    const auto base = cfg.pipeline();
    const LoadedData d = load(cfg, false);
    prepare_output(cfg);

    const std::vector<std::string> methods{"gb-afs", "relieff", "fisher", "cfs", "random", "all"};
    std::map<std::string, std::vector<double>> acc, bf;
    std::vector<std::size_t> k_mins;
    std::vector<double> t_subset, t_all;
    Json reps = Json::array();
    const ClassifierConfig classifier{cfg.neighbors};

    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, 0x636d70, r);
        SplitSpec spec;
        spec.train_fraction = cfg.train_fraction;
        spec.seed = rep_seed;
        const auto [train, test] = split_train_test(d.all, spec);

        PipelineConfig p = base;
        p.seed = rep_seed;
        const auto selection = select_features(train, p);
        const std::size_t k = selection.k_min;
        k_mins.push_back(k);

        Json rep{{"repetition", r}, {"seed", rep_seed}, {"k_min", k}};
        Json per_method;
        for (const auto& m : methods) {
            std::vector<std::size_t> subset;
            if (m == "gb-afs") {
                subset = selection.selected_features;
            } else if (m == "all") {
                subset = all_features(d.all.features());
            } else {
                subset = baseline_subset(m, train, k, cfg, derive_seed(rep_seed, 0x62736c, 0));
            }
            const auto e = evaluate(train, test, subset, classifier);
            acc[m].push_back(e.accuracy);
            bf[m].push_back(e.balanced_f);
            if (m == "gb-afs") t_subset.push_back(e.predict_time);
            if (m == "all") t_all.push_back(e.predict_time);
            per_method[m] = {{"accuracy", e.accuracy},
                             {"balanced_f", e.balanced_f},
                             {"features", feature_list(subset, d.all.feature_names)}};
        }
        rep["methods"] = per_method;
        reps.push_back(rep);
        out << "repetition " << r + 1 << "/" << cfg.repetitions << ": k_min = " << k << "\n";
    }

    Json summary;
    std::string table = "method,mean_accuracy,std_accuracy,mean_balanced_f,std_balanced_f\n";
    for (const auto& m : methods) {
        summary[m] = {{"mean_accuracy", mean(acc[m])},
                      {"std_accuracy", stddev(acc[m])},
                      {"mean_balanced_f", mean(bf[m])},
                      {"std_balanced_f", stddev(bf[m])}};
        table += m + "," + format_number(mean(acc[m])) + "," + format_number(stddev(acc[m])) + "," +
                 format_number(mean(bf[m])) + "," + format_number(stddev(bf[m])) + "\n";
    }

    Json report;
    report["command"] = "compare";
    report["version"] = kVersion;
    report["input"] = input_echo(cfg, d);
    report["config"] = pipeline_echo(base);
    report["config"]["repetitions"] = cfg.repetitions;
    report["config"]["train_fraction"] = cfg.train_fraction;
    report["config"]["n_neighbors"] = cfg.neighbors;
    report["config"]["relieff_neighbors"] = cfg.relieff_neighbors;
    report["config"]["relieff_samples"] = cfg.relieff_samples;
    report["summary"] = summary;
    report["repetitions"] = reps;
    write_text(cfg.output_dir / "compare.json", dump(report));
    write_text(cfg.output_dir / "compare_accuracy.csv", table);

    // Timings vary run to run and live apart from the deterministic report.
    std::string timing = "repetition,k_min,features,predict_time_subset,predict_time_all,time_saved\n";
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        timing += std::to_string(r) + "," + std::to_string(k_mins[r]) + "," + std::to_string(d.all.features()) + "," +
                  format_number(t_subset[r]) + "," + format_number(t_all[r]) + "," +
                  format_number(1.0 - t_subset[r] / t_all[r]) + "\n";
    }
    const double saved = 1.0 - mean(t_subset) / mean(t_all);
    write_text(cfg.output_dir / "compare_timing.csv", timing);
    write_timings(cfg, {{"mean_predict_subset", mean(t_subset)}, {"mean_predict_all", mean(t_all)}});

    out << "\n" << std::left << std::setw(10) << "method" << std::right << std::setw(12) << "accuracy"
        << std::setw(12) << "balanced F" << "\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& m : methods) {
        out << std::left << std::setw(10) << m << std::right << std::setw(12) << mean(acc[m]) << std::setw(12)
            << mean(bf[m]) << "\n";
    }
    std::vector<double> ks(k_mins.begin(), k_mins.end());
    out << "\nmean k_min " << std::setprecision(1) << mean(ks) << " of " << d.all.features() << " features\n";
    out << std::setprecision(6) << "predict time: subset " << mean(t_subset) << " s, all " << mean(t_all)
        << " s, time saved " << std::setprecision(1) << 100.0 * saved << " %\n";
    return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph-based automatic feature selection: picks a small, non-redundant feature subset\n"
                 "by embedding per-feature class separability and clustering the features."};
    app.name(args.empty() ? "gbafs" : args.front());
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    std::size_t threads = 0;
    app.add_option("-j,--threads", threads, "Worker threads, 0 = all cores (env " + std::string(kThreadsEnv) + ")")
        ->envname(kThreadsEnv);

    RunConfig select_cfg, embed_cfg, baseline_cfg, evaluate_cfg, compare_cfg;
    select_cfg.train_fraction = 1.0;
    embed_cfg.train_fraction = 1.0;
    baseline_cfg.train_fraction = 1.0;

    auto add_common = [&](CLI::App* sub, RunConfig& c) {
        sub->add_option("-i,--input", c.input, "CSV file with a header row")->required();
        sub->add_option("-l,--label", c.label, "Label column name or zero-based index")->capture_default_str();
        sub->add_option("-s,--seed", c.seed, "Random seed")->required();
        sub->add_option("-o,--output-dir", c.output_dir,
                        "Directory for reports and plots (env " + std::string(kOutputDirEnv) + ")")
            ->envname(kOutputDirEnv)
            ->capture_default_str();
    };
    auto add_split = [&](CLI::App* sub, RunConfig& c, const std::string& what) {
        sub->add_option("--train-fraction", c.train_fraction, what)
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    };
    auto add_tsne = [&](CLI::App* sub, RunConfig& c) {
        sub->add_option("--perplexity", c.perplexity, "t-SNE perplexity (capped at (features - 1) / 3)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--iterations", c.iterations, "t-SNE iterations")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    auto add_selection = [&](CLI::App* sub, RunConfig& c) {
        add_tsne(sub, c);
        sub->add_option("--folds", c.folds, "Cross-validation folds for the index curve")
            ->check(CLI::Range(2, 1000))
            ->capture_default_str();
        sub->add_option("--k-max", c.k_max, "Largest k on the curve, 0 = number of features")->capture_default_str();
        sub->add_option("--knee-sensitivity", c.knee_sensitivity, "Knee detection sensitivity")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--knee-smoothing", c.knee_smoothing, "Moving-average window for the curve, 0 = off")
            ->capture_default_str();
        sub->add_option("--pam-restarts", c.pam_restarts, "Seeded k-medoids starts per k; the cheapest is kept")
            ->check(CLI::Range(1, 1000))
            ->capture_default_str();
        sub->add_flag("!--no-reference-indices", c.reference_indices,
                      "Skip silhouette and simplified silhouette curves");
    };
    auto add_outputs = [&](CLI::App* sub, RunConfig& c) {
        sub->add_flag("!--no-plots", c.plots, "Do not write SVG plots");
        sub->add_flag("--export-feature-space", c.export_feature_space,
                      "Also write the per-feature class-pair separability matrix");
    };
    auto add_relieff = [&](CLI::App* sub, RunConfig& c) {
        sub->add_option("--relieff-neighbors", c.relieff_neighbors, "ReliefF neighbors per class")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--relieff-samples", c.relieff_samples, "ReliefF sampled instances, 0 = all")
            ->capture_default_str();
    };

    auto* select = app.add_subcommand("select", "Choose k_min features and write report, curves and plots");
    add_common(select, select_cfg);
    add_selection(select, select_cfg);
    add_split(select, select_cfg, "Run on this fraction of rows (seeded split as in evaluate), 1 = all rows");
    add_outputs(select, select_cfg);

    auto* embed_only = app.add_subcommand("embed-only", "Write the feature embedding without clustering");
    add_common(embed_only, embed_cfg);
    add_tsne(embed_only, embed_cfg);
    add_split(embed_only, embed_cfg, "Run on this fraction of rows, 1 = all rows");
    add_outputs(embed_only, embed_cfg);

    auto* baseline = app.add_subcommand("baseline", "Run a filter baseline for a given number of features");
    add_common(baseline, baseline_cfg);
    baseline->add_option("-m,--method", baseline_cfg.method, "relieff, fisher, cfs or random")
        ->required()
        ->check(CLI::IsMember({"relieff", "fisher", "cfs", "random"}));
    baseline->add_option("-k,--k", baseline_cfg.k, "Number of features to select");
    baseline->add_option("--selection", baseline_cfg.selection, "Take k from a select report");
    add_split(baseline, baseline_cfg, "Run on this fraction of rows, 1 = all rows");
    add_relieff(baseline, baseline_cfg);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "KNN accuracy, balanced F and timing for a subset");
    add_common(evaluate_cmd, evaluate_cfg);
    evaluate_cmd->add_option("--features", evaluate_cfg.features, "Comma-separated feature names");
    evaluate_cmd->add_option("--selection", evaluate_cfg.selection, "Report with selected_features (select or baseline)");
    add_split(evaluate_cmd, evaluate_cfg, "Training fraction of the seeded split");
    evaluate_cmd->add_option("-n,--neighbors", evaluate_cfg.neighbors, "KNN neighbors")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Repeat selection, baselines and KNN evaluation over seeded splits");
    add_common(compare, compare_cfg);
    add_selection(compare, compare_cfg);
    add_split(compare, compare_cfg, "Training fraction of each split");
    add_relieff(compare, compare_cfg);
    compare->add_option("-r,--repetitions", compare_cfg.repetitions, "Number of seeded splits")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    compare->add_option("-n,--neighbors", compare_cfg.neighbors, "KNN neighbors")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    app.footer(
        "Exit codes: 0 success, 1 usage or configuration error, 2 data or I/O error, 3 numerical failure.\n"
        "Run '<command> --help' for the options of a subcommand.");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help or --version.
            const int code = app.exit(e, out, err);
            return code == 0 ? kSuccess : kUsageError;
        }
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        set_max_threads(threads);
        if (*select) return cmd_select(select_cfg, out);
        if (*embed_only) return cmd_embed_only(embed_cfg, out);
        if (*baseline) return cmd_baseline(baseline_cfg, out);
        if (*evaluate_cmd) return cmd_evaluate(evaluate_cfg, out);
        if (*compare) return cmd_compare(compare_cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "internal failure: " << e.what() << "\n";
        return kNumericalError;
    }
    return kUsageError;
}

}  // namespace gbafs::cli
