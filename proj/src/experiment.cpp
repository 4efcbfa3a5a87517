#include "cbr/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <numeric>

#include "cbr/error.hpp"
#include "cbr/random.hpp"
#include "json.hpp"

namespace cbr {
namespace {

// Sub-stream tags for derive_seed.
enum SeedPurpose : std::uint64_t {
    kLabels = 0x4c41,
    kPermute = 1,
    kSubsample = 2,
    kSplit = 3,
    kTune = 4,
    kTrain = 5,
};

constexpr std::size_t kSplitAttempts = 10;

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); zero for a single run.
double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool folds_have_both_classes(const Dataset& data, const SplitPlan& plan) {
    std::vector<std::size_t> pos(plan.fold_count, 0), neg(plan.fold_count, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        (data[i].label > 0 ? pos : neg)[plan.fold_assignment[i]] += 1;
    }
    for (std::size_t f = 0; f < plan.fold_count; ++f) {
        if (pos[f] == 0 || neg[f] == 0) return false;
    }
    return true;
}

// First split (over derived seeds) whose every fold holds both classes.
std::optional<SplitPlan> two_class_split(const Dataset& data, std::size_t k, std::uint64_t seed) {
    for (std::size_t attempt = 0; attempt < kSplitAttempts; ++attempt) {
        auto plan = split_folds(data, k, attempt == 0 ? seed : derive_seed(seed, attempt));
        if (folds_have_both_classes(data, plan)) return plan;
    }
    return std::nullopt;
}

// Held-out fold needs both classes for AUC; the training side then has both too.
std::optional<SplitPlan> evaluation_split(const Dataset& data, std::size_t k, std::size_t test_fold,
                                          std::uint64_t seed) {
    for (std::size_t attempt = 0; attempt < kSplitAttempts; ++attempt) {
        auto plan = split_folds(data, k, attempt == 0 ? seed : derive_seed(seed, attempt));
        const auto test = data.select(plan.fold_rows(test_fold));
        const auto train = data.select(plan.rows_except(test_fold));
        if (test.has_both_classes() && train.has_both_classes()) return plan;
    }
    return std::nullopt;
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string_view algorithm_id(Algorithm algo) {
    switch (algo) {
        case Algorithm::CbrRs: return "cbr-rs";
        case Algorithm::CbrFifo: return "cbr-fifo";
        case Algorithm::CbrDiagFifo: return "cbr-diag-fifo";
        case Algorithm::UniExp: return "uniexp";
        case Algorithm::PaPair: return "pa-pair";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view id) {
    for (auto a : {Algorithm::CbrRs, Algorithm::CbrFifo, Algorithm::CbrDiagFifo, Algorithm::UniExp, Algorithm::PaPair}) {
        if (algorithm_id(a) == id) return a;
    }
    throw InvalidInput("unknown algorithm '" + std::string(id) +
                       "' (expected cbr-rs, cbr-fifo, cbr-diag-fifo, uniexp or pa-pair)");
}

bool uses_full_covariance(Algorithm algo) { return algo == Algorithm::CbrRs || algo == Algorithm::CbrFifo; }

Model train_model(Algorithm algo, const Dataset& train, double hyper, const AlgorithmParams& params,
                  std::uint64_t seed, TrainStats* stats) {
    const auto& stream = train.instances();
    switch (algo) {
        case Algorithm::CbrRs:
        case Algorithm::CbrFifo:
        case Algorithm::CbrDiagFifo: {
            CbrConfig cfg;
            cfg.policy = algo == Algorithm::CbrRs ? BufferPolicy::ReservoirSampling : BufferPolicy::Fifo;
            cfg.pos_capacity = cfg.neg_capacity = params.buffer;
            cfg.penalty = hyper;
            cfg.eta = params.eta;
            cfg.seed = seed;
            if (algo == Algorithm::CbrDiagFifo) return train_cbr_diag(stream, train.dim(), cfg, stats);
            return train_cbr(stream, train.dim(), cfg, stats);
        }
        case Algorithm::UniExp:
            return UniExpModel{train_uniexp(stream, train.dim(), UniExpConfig{hyper, std::nullopt}, stats)};
        case Algorithm::PaPair: {
            PaPairConfig cfg;
            cfg.pos_capacity = cfg.neg_capacity = params.buffer;
            cfg.penalty = hyper;
            cfg.seed = seed;
            return PaPairModel{train_pa_pair(stream, train.dim(), cfg, stats)};
        }
    }
    throw InvalidInput("unknown algorithm");
}

ScoredSet score_dataset(const Model& model, const Dataset& data) {
    ScoredSet s;
    for (const auto& x : data.instances()) {
        (x.label > 0 ? s.positives : s.negatives).push_back(score(model, x));
    }
    return s;
}

std::vector<double> power_grid(int lo, int hi) {
    if (lo > hi) throw InvalidInput("grid bounds reversed: " + std::to_string(lo) + ":" + std::to_string(hi));
    std::vector<double> grid;
    for (int k = lo; k <= hi; ++k) grid.push_back(std::ldexp(1.0, k));
    return grid;
}

std::string_view to_string(Profile profile) {
    switch (profile) {
        case Profile::Benchmark: return "benchmark";
        case Profile::HighDim: return "highdim";
        default: return "auto";
    }
}

Profile parse_profile(std::string_view name) {
    if (name == "auto") return Profile::Auto;
    if (name == "benchmark") return Profile::Benchmark;
    if (name == "highdim") return Profile::HighDim;
    throw InvalidInput("unknown profile '" + std::string(name) + "' (expected auto, benchmark or highdim)");
}

void ExperimentConfig::validate() const {
    if (buffer == 0) throw InvalidInput("buffer capacity must be at least 1");
    if (!(eta > 0.5 && eta < 1.0)) throw InvalidInput("eta must lie in (0.5, 1)");
    if (c_grid.empty()) throw InvalidInput("hyperparameter grid is empty");
    for (double c : c_grid) {
        if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("grid values must be positive and finite");
    }
    if (folds < 2) throw InvalidInput("need at least 2 evaluation folds");
    if (tuning_folds < 2) throw InvalidInput("need at least 2 tuning folds");
    if (runs && *runs == 0) throw InvalidInput("runs must be at least 1");
    if (cap && *cap == 0) throw InvalidInput("sample cap must be at least 1");
}

Profile ExperimentConfig::resolved_profile(std::size_t dim) const {
    if (profile != Profile::Auto) return profile;
    return dim > high_dim_threshold ? Profile::HighDim : Profile::Benchmark;
}

std::size_t ExperimentConfig::resolved_runs(std::size_t dim) const {
    if (runs) return *runs;
    return resolved_profile(dim) == Profile::HighDim ? 5 : 10;
}

std::size_t ExperimentConfig::resolved_cap(std::size_t dim) const {
    if (cap) return *cap;
    return resolved_profile(dim) == Profile::HighDim ? 2000 : 8000;
}

TuneResult tune_penalty(const Dataset& train, std::span<const double> grid, Algorithm algo,
                        const AlgorithmParams& params, std::size_t tuning_folds, std::uint64_t seed) {
    if (grid.empty()) throw InvalidInput("hyperparameter grid is empty");
    TuneResult result;
    if (grid.size() == 1) {
        result.chosen = grid.front();
        return result;
    }
    if (train.size() < tuning_folds) throw TuningError("too few training instances for tuning folds");
    const auto plan = two_class_split(train, tuning_folds, seed);
    if (!plan) throw TuningError("could not form tuning folds containing both classes");

    std::vector<Dataset> fit, held;
    for (std::size_t f = 0; f < tuning_folds; ++f) {
        fit.push_back(train.select(plan->rows_except(f)));
        held.push_back(train.select(plan->fold_rows(f)));
    }
    const std::uint64_t train_seed = derive_seed(seed, kTrain);

    result.mean_auc.assign(grid.size(), -1.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        try {
            double total = 0.0;
            for (std::size_t f = 0; f < tuning_folds; ++f) {
                const auto model = train_model(algo, fit[f], grid[g], params, train_seed);
                total += auc(score_dataset(model, held[f]));
            }
            result.mean_auc[g] = total / static_cast<double>(tuning_folds);
        } catch (const NumericError&) {
            // A diverging grid value is simply never selected.
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const bool better = result.mean_auc[g] > result.mean_auc[best] ||
                            (result.mean_auc[g] == result.mean_auc[best] && grid[g] < grid[best]);
        if (better) best = g;
    }
    if (result.mean_auc[best] < 0.0) throw NumericError("every hyperparameter value diverged during tuning");
    result.chosen = grid[best];
    return result;
}

ReportRow run_experiment(const ExperimentConfig& config, const Dataset& data, const std::string& dataset_name) {
    config.validate();
    if (!data.has_both_classes()) {
        throw InvalidInput("dataset '" + dataset_name + "' has a single class; AUC is undefined");
    }
    if (uses_full_covariance(config.algorithm) && data.dim() > config.full_covariance_dim_limit) {
        throw InvalidInput("dimension " + std::to_string(data.dim()) + " exceeds the full-covariance limit of " +
                           std::to_string(config.full_covariance_dim_limit) + "; use cbr-diag-fifo instead");
    }

    const std::size_t runs = config.resolved_runs(data.dim());
    const std::size_t cap = config.resolved_cap(data.dim());
    const AlgorithmParams params{config.buffer, config.eta};

    std::vector<RunRecord> records(runs);
    std::vector<std::exception_ptr> errors(runs);

    auto one_run = [&](std::size_t r) {
        RunRecord rec;
        rec.index = r;
        rec.seed = derive_seed(config.seed, r);
        const auto permuted = permute(data, derive_seed(rec.seed, kPermute));
        const auto sampled = subsample(permuted, cap, derive_seed(rec.seed, kSubsample));
        if (sampled.size() < config.folds) throw InvalidInput("fewer instances than evaluation folds");
        const std::size_t test_fold = r % config.folds;
        const auto plan = evaluation_split(sampled, config.folds, test_fold, derive_seed(rec.seed, kSplit));
        if (!plan) throw InvalidInput("could not form a test fold containing both classes");

        const auto raw_train = sampled.select(plan->rows_except(test_fold));
        const auto raw_test = sampled.select(plan->fold_rows(test_fold));
        const auto scaling = fit_scaling(raw_train);
        const auto train = apply_scaling(raw_train, scaling);
        const auto test = apply_scaling(raw_test, scaling);

        rec.chosen_c = tune_penalty(train, config.c_grid, config.algorithm, params, config.tuning_folds,
                                    derive_seed(rec.seed, kTune))
                           .chosen;

        const auto start = std::chrono::steady_clock::now();
        const auto model = train_model(config.algorithm, train, rec.chosen_c, params, derive_seed(rec.seed, kTrain));
        const auto stop = std::chrono::steady_clock::now();
        rec.train_ms = std::chrono::duration<double, std::milli>(stop - start).count();

        const auto scores = score_dataset(model, test);
        rec.auc = auc(scores);
        rec.accuracy = accuracy_at_optroc(scores).accuracy;
        return rec;
    };

    const auto n = static_cast<std::ptrdiff_t>(runs);
#pragma omp parallel for schedule(dynamic) if (config.parallel_runs)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        try {
            records[r] = one_run(static_cast<std::size_t>(r));
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ReportRow row;
    row.dataset = dataset_name;
    row.algorithm = std::string(algorithm_id(config.algorithm));
    row.runs = runs;
    row.seed = config.seed;
    std::vector<double> aucs, accs, times;
    for (const auto& rec : records) {
        aucs.push_back(rec.auc);
        accs.push_back(rec.accuracy);
        times.push_back(rec.train_ms);
    }
    row.mean_auc = mean_of(aucs);
    row.std_auc = std_of(aucs);
    row.mean_acc = mean_of(accs);
    row.std_acc = std_of(accs);
    row.mean_train_ms = mean_of(times);
    row.details = std::move(records);
    return row;
}

std::string dataset_name_from_path(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

ReportRow run_experiment(const ExperimentConfig& config) {
    const auto data = load_libsvm(config.data_path, derive_seed(config.seed, kLabels));
    return run_experiment(config, data, dataset_name_from_path(config.data_path));
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw InvalidInput("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string out = "dataset,algorithm,mean_auc,std_auc,mean_acc,std_acc,mean_train_ms,runs,seed\n";
        for (const auto& row : report.rows) {
            out += row.dataset + ',' + row.algorithm + ',' + fixed4(row.mean_auc) + ',' + fixed4(row.std_auc) + ',' +
                   fixed4(row.mean_acc) + ',' + fixed4(row.std_acc) + ',' + fixed4(row.mean_train_ms) + ',' +
                   std::to_string(row.runs) + ',' + std::to_string(row.seed) + '\n';
        }
        return out;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json details = nlohmann::json::array();
        for (const auto& d : row.details) {
            details.push_back({{"index", d.index},
                               {"seed", d.seed},
                               {"chosen_c", d.chosen_c},
                               {"auc", d.auc},
                               {"acc", d.accuracy},
                               {"train_ms", d.train_ms}});
        }
        rows.push_back({{"dataset", row.dataset},
                        {"algorithm", row.algorithm},
                        {"mean_auc", row.mean_auc},
                        {"std_auc", row.std_auc},
                        {"mean_acc", row.mean_acc},
                        {"std_acc", row.std_acc},
                        {"mean_train_ms", row.mean_train_ms},
                        {"runs", row.runs},
                        {"seed", row.seed},
                        {"details", std::move(details)}});
    }
    return rows.dump(2) + "\n";
}

ExperimentReport parse_report_json(std::string_view text) {
    ExperimentReport report;
    try {
        const auto rows = nlohmann::json::parse(text);
        if (!rows.is_array()) throw InvalidInput("report JSON must be an array");
        for (const auto& j : rows) {
            ReportRow row;
            row.dataset = j.at("dataset").get<std::string>();
            row.algorithm = j.at("algorithm").get<std::string>();
            row.mean_auc = j.at("mean_auc").get<double>();
            row.std_auc = j.at("std_auc").get<double>();
            row.mean_acc = j.at("mean_acc").get<double>();
            row.std_acc = j.at("std_acc").get<double>();
            row.mean_train_ms = j.at("mean_train_ms").get<double>();
            row.runs = j.at("runs").get<std::size_t>();
            row.seed = j.at("seed").get<std::uint64_t>();
            for (const auto& d : j.value("details", nlohmann::json::array())) {
                row.details.push_back({d.at("index").get<std::size_t>(), d.at("seed").get<std::uint64_t>(),
                                       d.at("chosen_c").get<double>(), d.at("auc").get<double>(),
                                       d.at("acc").get<double>(), d.at("train_ms").get<double>()});
            }
            report.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed report JSON: ") + e.what());
    }
    return report;
}

}  // namespace cbr
