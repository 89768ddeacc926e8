// bhi: benchmark health audits from model x benchmark score matrices.
//
// Subcommands: audit, fetch, robustness, sweep-delta, plot-data.
// Any long flag can also be supplied through --config <file.json>; explicit
// flags override config values.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bhi/bhi.hpp"
#include "bhi/fetch.hpp"

namespace {

struct InputArgs {
    std::string scores;
    std::string benchmarks;
    std::string models;
    std::string snapshot;
    std::string as_of;
    std::string weighting = "critic";
    double delta = bhi::kDefaultDeltaFrac;
    std::uint64_t seed = 42;
    bool theta_zero_uncovered = false;
};

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw bhi::Error("config", std::string(flag) + ": invalid number '" + token + "'");
        }
    }
    if (out.empty()) throw bhi::Error("config", std::string(flag) + ": empty list");
    return out;
}

nlohmann::json load_config(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw bhi::Error("config", "cannot open config '" + path + "'");
    try {
        auto doc = nlohmann::json::parse(in);
        if (!doc.is_object()) throw bhi::Error("config", path + ": expected a JSON object");
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw bhi::Error("config", path + ": " + e.what());
    }
}

void cfg_get(const nlohmann::json& cfg, const char* key, std::string& var) {
    if (cfg.contains(key)) {
        const auto& v = cfg.at(key);
        if (v.is_array()) {  // list flags may be JSON arrays
            std::string joined;
            for (const auto& item : v) {
                if (!joined.empty()) joined += ',';
                joined += item.dump();
            }
            var = joined;
        } else if (v.is_string()) {
            var = v.get<std::string>();
        } else {
            var = v.dump();
        }
    }
}

void cfg_get(const nlohmann::json& cfg, const char* key, double& var) {
    if (cfg.contains(key)) var = cfg.at(key).get<double>();
}

void cfg_get(const nlohmann::json& cfg, const char* key, std::uint64_t& var) {
    if (cfg.contains(key)) var = cfg.at(key).get<std::uint64_t>();
}

void cfg_get(const nlohmann::json& cfg, const char* key, bool& var) {
    if (cfg.contains(key)) var = cfg.at(key).get<bool>();
}

void apply_input_config(const nlohmann::json& cfg, InputArgs& args) {
    cfg_get(cfg, "scores", args.scores);
    cfg_get(cfg, "benchmarks", args.benchmarks);
    cfg_get(cfg, "models", args.models);
    cfg_get(cfg, "snapshot", args.snapshot);
    cfg_get(cfg, "as-of", args.as_of);
    cfg_get(cfg, "weighting", args.weighting);
    cfg_get(cfg, "delta", args.delta);
    cfg_get(cfg, "seed", args.seed);
    cfg_get(cfg, "theta-zero-uncovered", args.theta_zero_uncovered);
}

void add_input_options(CLI::App* cmd, InputArgs& args, bool snapshot_relevant = true) {
    cmd->add_option("--scores", args.scores, "scores CSV (model_id,benchmark_id,score_raw,...)");
    cmd->add_option("--benchmarks", args.benchmarks, "benchmark metadata JSON");
    cmd->add_option("--models", args.models, "model metadata JSON");
    if (snapshot_relevant)
        cmd->add_option("--snapshot", args.snapshot, "community snapshot JSON (from 'bhi fetch')");
    cmd->add_option("--as-of", args.as_of, "audit reference date YYYY-MM-DD (default: latest eval date)");
    cmd->add_option("--weighting", args.weighting, "critic|equal (default critic)");
    cmd->add_option("--delta", args.delta, "differentiation threshold as a fraction of range (default 0.02)");
    cmd->add_option("--seed", args.seed, "random seed for the stochastic protocols (default 42)");
    cmd->add_flag("--theta-zero-uncovered", args.theta_zero_uncovered,
                  "assign capability 0 to models with no out-of-sample data instead of failing");
    cmd->add_option("--config", "JSON config file; flags override its values")->expected(1);
}

void require_flag(const std::string& value, const char* flag) {
    if (value.empty()) throw bhi::Error("config", std::string("missing required ") + flag);
}

bhi::AuditConfig make_config(const InputArgs& args) {
    bhi::AuditConfig config;
    config.delta_frac = args.delta;
    config.weighting = bhi::parse_weighting(args.weighting);
    config.seed = args.seed;
    config.zero_theta_when_uncovered = args.theta_zero_uncovered;
    if (!args.as_of.empty()) config.as_of = bhi::parse_date(args.as_of);
    config.validate();
    return config;
}

struct LoadedInputs {
    bhi::AuditInput input;
    std::vector<bhi::InputDigest> digests;
};

LoadedInputs load_inputs(const InputArgs& args, bool snapshot_required) {
    require_flag(args.scores, "--scores");
    require_flag(args.benchmarks, "--benchmarks");
    require_flag(args.models, "--models");
    LoadedInputs out;
    auto parsed = bhi::parse_inputs(args.scores, args.benchmarks, args.models);
    out.input.records = std::move(parsed.records);
    out.input.benchmarks = std::move(parsed.benchmarks);
    out.input.models = std::move(parsed.models);
    out.digests.push_back(bhi::digest_file("scores", args.scores));
    out.digests.push_back(bhi::digest_file("benchmarks", args.benchmarks));
    out.digests.push_back(bhi::digest_file("models", args.models));
    if (!args.snapshot.empty()) {
        out.input.snapshot = bhi::parse_snapshot_json(args.snapshot);
        out.digests.push_back(bhi::digest_file("snapshot", args.snapshot));
    } else if (snapshot_required) {
        throw bhi::Error("impact", "community snapshot required: pass --snapshot (see 'bhi fetch')");
    }
    return out;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    bhi::write_text_file(out_path, text);
}

nlohmann::ordered_json provenance_json(const std::vector<bhi::InputDigest>& digests) {
    nlohmann::ordered_json doc;
    doc["tool"] = {{"name", bhi::kToolName}, {"version", bhi::kToolVersion}};
    doc["inputs"] = nlohmann::ordered_json::array();
    for (const auto& d : digests)
        doc["inputs"].push_back({{"label", d.label}, {"path", d.path}, {"fnv1a64", d.fnv1a64_hex}});
    return doc;
}

nlohmann::ordered_json calibration_json(const std::map<std::string, bhi::CapabilityProfile>& profiles) {
    nlohmann::ordered_json doc;
    for (const auto& [held_out, profile] : profiles) {
        nlohmann::ordered_json entry;
        entry["pool_size"] = profile.pool_size;
        entry["models"] = nlohmann::ordered_json::object();
        for (const auto& [model_id, theta] : profile.theta) {
            entry["models"][model_id] = {{"theta", theta},
                                         {"win_rate", profile.win_rate.at(model_id)},
                                         {"participation", profile.participation.at(model_id)}};
        }
        doc[held_out] = std::move(entry);
    }
    return doc;
}

int run(int argc, char** argv) {
    CLI::App app{"benchmark health index auditing"};
    app.require_subcommand(1);
    const auto cfg = load_config(argc, argv);

    // audit
    InputArgs audit_args;
    std::string audit_out = "-";
    std::string audit_format = "json";
    std::string dump_calibration;
    apply_input_config(cfg, audit_args);
    cfg_get(cfg, "out", audit_out);
    cfg_get(cfg, "format", audit_format);
    cfg_get(cfg, "dump-calibration", dump_calibration);
    auto* audit_cmd = app.add_subcommand("audit", "compute the health report for a score matrix");
    add_input_options(audit_cmd, audit_args);
    audit_cmd->add_option("--format", audit_format, "json|csv|markdown (default json)");
    audit_cmd->add_option("--out", audit_out, "output path, '-' for stdout");
    audit_cmd->add_option("--dump-calibration", dump_calibration, "also write calibration profiles JSON");

    // fetch
    std::string fetch_benchmarks;
    std::string fetch_out = "snapshot.json";
    double fetch_timeout = 10.0;
    std::size_t fetch_concurrency = 4;
    std::string fetch_github_api = "https://api.github.com";
    std::string fetch_hf_api = "https://huggingface.co";
    std::size_t fetch_min_interval = 0;
    std::string fetch_stamp;
    cfg_get(cfg, "benchmarks", fetch_benchmarks);
    cfg_get(cfg, "out", fetch_out);
    cfg_get(cfg, "timeout", fetch_timeout);
    cfg_get(cfg, "concurrency", fetch_concurrency);
    cfg_get(cfg, "github-api", fetch_github_api);
    cfg_get(cfg, "hf-api", fetch_hf_api);
    auto* fetch_cmd = app.add_subcommand("fetch", "snapshot community statistics for the benchmark registry");
    fetch_cmd->add_option("--benchmarks", fetch_benchmarks, "benchmark metadata JSON");
    fetch_cmd->add_option("--out", fetch_out, "snapshot output path");
    fetch_cmd->add_option("--timeout", fetch_timeout, "per-request timeout in seconds (default 10)");
    fetch_cmd->add_option("--concurrency", fetch_concurrency, "parallel request cap (default 4)");
    fetch_cmd->add_option("--github-api", fetch_github_api, "GitHub API base URL");
    fetch_cmd->add_option("--hf-api", fetch_hf_api, "HuggingFace API base URL");
    fetch_cmd->add_option("--min-interval-ms", fetch_min_interval, "minimum per-platform request spacing");
    fetch_cmd->add_option("--stamp", fetch_stamp, "fetched_at override YYYY-MM-DD (default: today)");
    fetch_cmd->add_option("--config", "JSON config file; flags override its values")->expected(1);

    // robustness
    InputArgs robust_args;
    std::string robust_mode;
    std::string robust_out = "-";
    std::size_t robust_iters = 100;
    std::string robust_etas = "0.05,0.10,0.15,0.20,0.40,0.55";
    std::string robust_sigmas = "0.01,0.02,0.05,0.10,0.15,0.20";
    std::string robust_deltas = "0.005,0.01,0.015,0.02,0.025,0.03,0.04,0.05";
    apply_input_config(cfg, robust_args);
    cfg_get(cfg, "mode", robust_mode);
    cfg_get(cfg, "out", robust_out);
    cfg_get(cfg, "iters", robust_iters);
    cfg_get(cfg, "etas", robust_etas);
    cfg_get(cfg, "sigmas", robust_sigmas);
    cfg_get(cfg, "deltas", robust_deltas);
    auto* robust_cmd = app.add_subcommand("robustness", "stress the ranking: dropout, noise, loo, delta");
    add_input_options(robust_cmd, robust_args);
    robust_cmd->add_option("--mode", robust_mode, "dropout|noise|loo|delta");
    robust_cmd->add_option("--iters", robust_iters, "iterations per setting (default 100)");
    robust_cmd->add_option("--etas", robust_etas, "comma-separated dropout ratios");
    robust_cmd->add_option("--sigmas", robust_sigmas, "comma-separated noise levels on the [0,1] scale");
    robust_cmd->add_option("--deltas", robust_deltas, "comma-separated differentiation thresholds");
    robust_cmd->add_option("--out", robust_out, "summary output path, '-' for stdout");

    // sweep-delta
    InputArgs sweep_args;
    std::string sweep_out = "-";
    std::string sweep_deltas = "0.005,0.01,0.015,0.02,0.025,0.03,0.04,0.05";
    apply_input_config(cfg, sweep_args);
    cfg_get(cfg, "out", sweep_out);
    cfg_get(cfg, "deltas", sweep_deltas);
    auto* sweep_cmd = app.add_subcommand("sweep-delta", "differentiation-threshold sensitivity table");
    add_input_options(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--deltas", sweep_deltas, "comma-separated thresholds to sweep");
    sweep_cmd->add_option("--out", sweep_out, "output path, '-' for stdout");

    // plot-data
    InputArgs plot_args;
    std::string plot_kind;
    std::string plot_out = "-";
    std::size_t plot_top_k = 0;
    apply_input_config(cfg, plot_args);
    cfg_get(cfg, "kind", plot_kind);
    cfg_get(cfg, "out", plot_out);
    cfg_get(cfg, "top-k", plot_top_k);
    auto* plot_cmd = app.add_subcommand("plot-data", "emit plot-ready series (no rendering)");
    add_input_options(plot_cmd, plot_args);
    plot_cmd->add_option("--kind", plot_kind, "ranking_bar|trend_lines|sensitivity_curve");
    plot_cmd->add_option("--top-k", plot_top_k, "ranking_bar: keep only the top K rows");
    plot_cmd->add_option("--out", plot_out, "output path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (audit_cmd->parsed()) {
        const auto config = make_config(audit_args);
        const auto loaded = load_inputs(audit_args, /*snapshot_required=*/true);
        const auto aligned = bhi::align_inputs(loaded.input, config);
        const auto report = bhi::audit_aligned(aligned, config);
        write_output(audit_out, bhi::render_report(report, bhi::parse_output_format(audit_format),
                                                   loaded.digests));
        if (!dump_calibration.empty()) {
            const auto profiles = bhi::calibration_profiles(aligned, config);
            bhi::write_text_file(dump_calibration, calibration_json(profiles).dump(2) + "\n");
        }
        return 0;
    }

    if (fetch_cmd->parsed()) {
        require_flag(fetch_benchmarks, "--benchmarks");
        bhi::FetchOptions options;
        options.github_api = fetch_github_api;
        options.huggingface_api = fetch_hf_api;
        options.timeout_seconds = fetch_timeout;
        options.concurrency = fetch_concurrency;
        options.min_interval_ms = fetch_min_interval;
        if (!fetch_stamp.empty()) options.stamp = bhi::parse_date(fetch_stamp);
        const auto registry = bhi::parse_benchmarks_json(fetch_benchmarks);
        const auto snapshot = bhi::fetch_community(registry, options);
        bhi::write_text_file(fetch_out, bhi::snapshot_to_json(snapshot).dump(2) + "\n");
        std::cerr << "bhi: wrote " << snapshot.entries.size() << " snapshot entries to " << fetch_out
                  << "\n";
        return 0;
    }

    if (robust_cmd->parsed() || sweep_cmd->parsed()) {
        const bool is_sweep = sweep_cmd->parsed();
        const InputArgs& args = is_sweep ? sweep_args : robust_args;
        const std::string mode = is_sweep ? "delta" : robust_mode;
        if (mode.empty()) throw bhi::Error("config", "missing required --mode");

        const auto config = make_config(args);
        const auto loaded = load_inputs(args, /*snapshot_required=*/true);
        const auto aligned = bhi::align_inputs(loaded.input, config);

        bhi::RobustnessSummary summary;
        if (mode == "dropout") {
            summary = bhi::dropout_protocol(aligned, config, parse_double_list(robust_etas, "--etas"),
                                            robust_iters, config.seed);
        } else if (mode == "noise") {
            summary = bhi::noise_protocol(aligned, config, parse_double_list(robust_sigmas, "--sigmas"),
                                          robust_iters, config.seed);
        } else if (mode == "loo") {
            summary = bhi::loo_ablation(aligned, config);
        } else if (mode == "delta") {
            const std::string& deltas = is_sweep ? sweep_deltas : robust_deltas;
            summary = bhi::delta_sweep(aligned, config, parse_double_list(deltas, "--deltas"));
        } else {
            throw bhi::Error("config", "unknown mode '" + mode + "' (dropout|noise|loo|delta)");
        }

        auto doc = provenance_json(loaded.digests);
        doc["summary"] = bhi::summary_to_json(summary);
        write_output(is_sweep ? sweep_out : robust_out, doc.dump(2) + "\n");
        return 0;
    }

    if (plot_cmd->parsed()) {
        if (plot_kind.empty()) throw bhi::Error("config", "missing required --kind");
        const auto config = make_config(plot_args);
        const auto loaded = load_inputs(plot_args, /*snapshot_required=*/true);
        const auto aligned = bhi::align_inputs(loaded.input, config);

        nlohmann::ordered_json series;
        if (plot_kind == "ranking_bar") {
            series = bhi::ranking_bar_series(bhi::audit_aligned(aligned, config), plot_top_k);
        } else if (plot_kind == "trend_lines") {
            series = bhi::trend_lines_series(bhi::audit_aligned(aligned, config));
        } else if (plot_kind == "sensitivity_curve") {
            series = bhi::sensitivity_curve_series(bhi::delta_sweep(aligned, config));
        } else {
            throw bhi::Error("config",
                             "unknown kind '" + plot_kind + "' (ranking_bar|trend_lines|sensitivity_curve)");
        }
        auto doc = provenance_json(loaded.digests);
        doc["plot"] = std::move(series);
        write_output(plot_out, doc.dump(2) + "\n");
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bhi::Error& e) {
        std::cerr << "bhi: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "bhi: unexpected error: " << e.what() << "\n";
        return 1;
    }
}
