#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbr/error.hpp"
#include "cbr/experiment.hpp"
#include "cbr/metrics.hpp"
#include "cbr/model.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumeric = 3;

using nlohmann::json;

// Flags shared by train and bench; unset optionals leave the config untouched.
struct ProtocolFlags {
    std::vector<std::string> data;
    std::vector<std::string> algo;
    std::optional<std::size_t> buffer;
    std::optional<double> eta;
    std::optional<double> c;
    std::optional<std::string> c_grid;
    std::optional<std::size_t> folds;
    std::optional<std::size_t> tuning_folds;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> cap;
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<std::string> out;
    bool serial = false;
};

void add_protocol_flags(CLI::App* cmd, ProtocolFlags& f) {
    cmd->add_option("--data", f.data, "LibSVM dataset path (repeatable for bench)");
    cmd->add_option("--algo", f.algo, "cbr-rs | cbr-fifo | cbr-diag-fifo | uniexp | pa-pair (repeatable for bench)");
    cmd->add_option("--buffer", f.buffer, "Per-class buffer capacity (default 50)");
    cmd->add_option("--eta", f.eta, "Confidence level in (0.5, 1) (default 0.7)");
    auto* c = cmd->add_option("--c", f.c, "Fixed penalty C (learning rate for uniexp); disables tuning");
    cmd->add_option("--c-grid", f.c_grid, "Tuning grid 2^lo..2^hi as lo:hi (default -10:10)")->excludes(c);
    cmd->add_option("--folds", f.folds, "Evaluation folds (default 5)");
    cmd->add_option("--tuning-folds", f.tuning_folds, "Cross-validation folds for tuning (default 2)");
    cmd->add_option("--runs", f.runs, "Averaged runs (default 10, or 5 for high-dimensional data)");
    cmd->add_option("--cap", f.cap, "Sample cap per run (default 8000, or 2000 for high-dimensional data)");
    cmd->add_option("--profile", f.profile, "auto | benchmark | highdim");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out, "Output path (bench: report, train: snapshot)");
}

std::vector<double> parse_grid(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw cbr::InvalidInput("--c-grid expects lo:hi, got '" + text + "'");
    try {
        std::size_t used_lo = 0, used_hi = 0;
        const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
        const int a = std::stoi(lo, &used_lo);
        const int b = std::stoi(hi, &used_hi);
        if (used_lo != lo.size() || used_hi != hi.size()) throw std::invalid_argument("trailing");
        return cbr::power_grid(a, b);
    } catch (const std::logic_error&) {
        throw cbr::InvalidInput("--c-grid expects integer exponents lo:hi, got '" + text + "'");
    }
}

struct BenchPlan {
    cbr::ExperimentConfig base;
    std::vector<std::string> data;
    std::vector<cbr::Algorithm> algorithms;
    cbr::ReportFormat format = cbr::ReportFormat::Csv;
    std::optional<std::string> out;
};

std::vector<std::string> string_or_list(const json& j, const char* key) {
    if (j.is_string()) return {j.get<std::string>()};
    if (j.is_array()) return j.get<std::vector<std::string>>();
    throw cbr::InvalidInput(std::string("config key '") + key + "' must be a string or an array of strings");
}

void apply_config_file(const std::string& path, BenchPlan& plan) {
    std::ifstream in(path);
    if (!in) throw cbr::InvalidInput("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw cbr::InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw cbr::InvalidInput("config must be a JSON object");
    const auto base_dir = std::filesystem::path(path).parent_path();
    auto& cfg = plan.base;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "data") {
                plan.data.clear();
                for (const auto& p : string_or_list(value, "data")) {
                    const std::filesystem::path fp(p);
                    plan.data.push_back(fp.is_absolute() ? p : (base_dir / fp).string());
                }
            } else if (key == "algo") {
                plan.algorithms.clear();
                for (const auto& a : string_or_list(value, "algo")) plan.algorithms.push_back(cbr::parse_algorithm(a));
            } else if (key == "buffer") {
                cfg.buffer = value.get<std::size_t>();
            } else if (key == "eta") {
                cfg.eta = value.get<double>();
            } else if (key == "c") {
                cfg.c_grid = {value.get<double>()};
            } else if (key == "c_grid") {
                cfg.c_grid = value.is_string() ? parse_grid(value.get<std::string>())
                                               : cbr::power_grid(value.at(0).get<int>(), value.at(1).get<int>());
            } else if (key == "folds") {
                cfg.folds = value.get<std::size_t>();
            } else if (key == "tuning_folds") {
                cfg.tuning_folds = value.get<std::size_t>();
            } else if (key == "runs") {
                cfg.runs = value.get<std::size_t>();
            } else if (key == "cap") {
                cfg.cap = value.get<std::size_t>();
            } else if (key == "profile") {
                cfg.profile = cbr::parse_profile(value.get<std::string>());
            } else if (key == "seed") {
                cfg.seed = value.get<std::uint64_t>();
            } else if (key == "format") {
                plan.format = cbr::parse_report_format(value.get<std::string>());
            } else if (key == "out") {
                plan.out = value.get<std::string>();
            } else if (key == "parallel_runs") {
                cfg.parallel_runs = value.get<bool>();
            } else {
                throw cbr::InvalidInput("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw cbr::InvalidInput("config '" + path + "': " + e.what());
    }
}

void apply_flags(const ProtocolFlags& f, BenchPlan& plan) {
    auto& cfg = plan.base;
    if (!f.data.empty()) plan.data = f.data;
    if (!f.algo.empty()) {
        plan.algorithms.clear();
        for (const auto& a : f.algo) plan.algorithms.push_back(cbr::parse_algorithm(a));
    }
    if (f.buffer) cfg.buffer = *f.buffer;
    if (f.eta) cfg.eta = *f.eta;
    if (f.c) cfg.c_grid = {*f.c};
    if (f.c_grid) cfg.c_grid = parse_grid(*f.c_grid);
    if (f.folds) cfg.folds = *f.folds;
    if (f.tuning_folds) cfg.tuning_folds = *f.tuning_folds;
    if (f.runs) cfg.runs = *f.runs;
    if (f.cap) cfg.cap = *f.cap;
    if (f.profile) cfg.profile = cbr::parse_profile(*f.profile);
    if (f.seed) cfg.seed = *f.seed;
    if (f.format) plan.format = cbr::parse_report_format(*f.format);
    if (f.out) plan.out = *f.out;
    if (f.serial) cfg.parallel_runs = false;
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw cbr::InvalidInput("cannot write '" + *path + "'");
    out << text;
}

int run_bench(const std::optional<std::string>& config_path, const ProtocolFlags& flags) {
    BenchPlan plan;
    plan.algorithms = {cbr::Algorithm::CbrFifo};
    if (config_path) apply_config_file(*config_path, plan);
    apply_flags(flags, plan);
    if (plan.data.empty()) throw cbr::InvalidInput("no dataset given (--data or config key 'data')");
    plan.base.validate();

    cbr::ExperimentReport report;
    for (const auto& path : plan.data) {
        auto cfg = plan.base;
        cfg.data_path = path;
        const auto data = cbr::load_libsvm(path, cbr::derive_seed(cfg.seed, 0x4c41));
        for (auto algo : plan.algorithms) {
            cfg.algorithm = algo;
            report.rows.push_back(cbr::run_experiment(cfg, data, cbr::dataset_name_from_path(path)));
        }
    }
    write_text(plan.out, cbr::emit_report(report, plan.format));
    return 0;
}

json metrics_json(const cbr::ScoredSet& scores) {
    const auto op = cbr::accuracy_at_optroc(scores);
    return {{"auc", cbr::auc(scores)}, {"acc", op.accuracy}, {"threshold", op.threshold},
            {"positives", scores.positives.size()}, {"negatives", scores.negatives.size()}};
}

void print_metrics(const json& m, cbr::ReportFormat format) {
    if (format == cbr::ReportFormat::Json) {
        std::cout << m.dump(2) << "\n";
        return;
    }
    std::cout << "auc,acc,threshold,positives,negatives\n";
    char line[160];
    std::snprintf(line, sizeof line, "%.4f,%.4f,%.6g,%zu,%zu\n", m["auc"].get<double>(), m["acc"].get<double>(),
                  m["threshold"].get<double>(), m["positives"].get<std::size_t>(),
                  m["negatives"].get<std::size_t>());
    std::cout << line;
}

int run_train(const ProtocolFlags& flags) {
    BenchPlan plan;
    plan.algorithms = {cbr::Algorithm::CbrFifo};
    apply_flags(flags, plan);
    if (plan.data.size() != 1) throw cbr::InvalidInput("train needs exactly one --data");
    if (plan.algorithms.size() != 1) throw cbr::InvalidInput("train needs exactly one --algo");
    if (!plan.out) throw cbr::InvalidInput("train needs --out for the snapshot");
    auto& cfg = plan.base;
    cfg.validate();
    const auto algo = plan.algorithms.front();

    const auto raw = cbr::load_libsvm(plan.data.front(), cbr::derive_seed(cfg.seed, 0x4c41));
    if (!raw.has_both_classes()) throw cbr::InvalidInput("dataset has a single class; AUC is undefined");
    if (cbr::uses_full_covariance(algo) && raw.dim() > cfg.full_covariance_dim_limit) {
        throw cbr::InvalidInput("dimension " + std::to_string(raw.dim()) +
                                " is too large for the full covariance; use --algo cbr-diag-fifo");
    }
    const auto scaled = cbr::scale_features(raw);
    const cbr::AlgorithmParams params{cfg.buffer, cfg.eta};
    const double hyper =
        cbr::tune_penalty(scaled.data, cfg.c_grid, algo, params, cfg.tuning_folds, cbr::derive_seed(cfg.seed, 4))
            .chosen;
    cbr::TrainStats stats;
    const auto model = cbr::train_model(algo, scaled.data, hyper, params, cbr::derive_seed(cfg.seed, 5), &stats);
    cbr::save_snapshot(*plan.out, {model, scaled.record});

    auto m = metrics_json(cbr::score_dataset(model, scaled.data));
    m["chosen_c"] = hyper;
    m["pair_steps"] = stats.pair_steps;
    std::cerr << "snapshot written to " << *plan.out << " (C = " << hyper << ", training-set metrics below)\n";
    print_metrics(m, plan.format);
    return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path, std::uint64_t seed,
             const std::string& format) {
    const auto snap = cbr::load_snapshot(model_path);
    auto data = cbr::load_libsvm(data_path, cbr::derive_seed(seed, 0x4c41));
    if (data.dim() > cbr::model_dim(snap.model)) {
        throw cbr::InvalidInput("dataset dimension " + std::to_string(data.dim()) + " exceeds model dimension " +
                                std::to_string(cbr::model_dim(snap.model)));
    }
    if (snap.scaling) data = cbr::apply_scaling(data, *snap.scaling);
    if (!data.has_both_classes()) throw cbr::InvalidInput("dataset has a single class; AUC is undefined");
    print_metrics(metrics_json(cbr::score_dataset(snap.model, data)), cbr::parse_report_format(format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online confidence-weighted bipartite ranking"};
    app.require_subcommand(1);

    ProtocolFlags train_flags;
    auto* train = app.add_subcommand("train", "Train one model (C tuned by CV unless --c), write a snapshot");
    add_protocol_flags(train, train_flags);

    ProtocolFlags bench_flags;
    std::optional<std::string> config_path;
    auto* bench = app.add_subcommand("bench", "Run the evaluation protocol and emit a report");
    bench->add_option("--config", config_path, "JSON config; flags override its values")->check(CLI::ExistingFile);
    add_protocol_flags(bench, bench_flags);
    bench->add_flag("--serial", bench_flags.serial, "Run the averaged runs one after another");

    std::string model_path, eval_data, eval_format = "csv";
    std::uint64_t eval_seed = 0;
    auto* eval = app.add_subcommand("eval", "Score a snapshot against a dataset");
    eval->add_option("--model", model_path, "Snapshot path")->required();
    eval->add_option("--data", eval_data, "LibSVM dataset path")->required();
    eval->add_option("--seed", eval_seed, "Seed for multiclass label mapping");
    eval->add_option("--format", eval_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*train) return run_train(train_flags);
        if (*bench) return run_bench(config_path, bench_flags);
        return run_eval(model_path, eval_data, eval_seed, eval_format);
    } catch (const cbr::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const cbr::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const cbr::TuningError& e) {
        std::cerr << "tuning failed: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
