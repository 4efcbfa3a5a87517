#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/dataset.hpp"
#include "cbr/metrics.hpp"
#include "cbr/model.hpp"

namespace cbr {

enum class Algorithm { CbrRs, CbrFifo, CbrDiagFifo, UniExp, PaPair };

/// "cbr-rs", "cbr-fifo", "cbr-diag-fifo", "uniexp", "pa-pair".
std::string_view algorithm_id(Algorithm algo);
Algorithm parse_algorithm(std::string_view id);

bool uses_full_covariance(Algorithm algo);

struct AlgorithmParams {
    std::size_t buffer = 50;
    double eta = 0.7;
};

/// Trains one model. `hyper` is the penalty C, or the learning rate for Uni-Exp.
/// `seed` drives reservoir sampling where the algorithm uses it.
Model train_model(Algorithm algo, const Dataset& train, double hyper, const AlgorithmParams& params,
                  std::uint64_t seed, TrainStats* stats = nullptr);

ScoredSet score_dataset(const Model& model, const Dataset& data);

/// 2^lo, 2^(lo+1), ..., 2^hi.
std::vector<double> power_grid(int lo, int hi);

enum class Profile { Auto, Benchmark, HighDim };

std::string_view to_string(Profile profile);
Profile parse_profile(std::string_view name);

struct ExperimentConfig {
    std::string data_path;
    Algorithm algorithm = Algorithm::CbrFifo;
    std::size_t buffer = 50;
    double eta = 0.7;
    std::vector<double> c_grid = power_grid(-10, 10);
    std::size_t folds = 5;
    std::size_t tuning_folds = 2;
    std::optional<std::size_t> runs;  // default: 10 benchmark, 5 high-dimensional
    std::optional<std::size_t> cap;   // default: 8000 benchmark, 2000 high-dimensional
    Profile profile = Profile::Auto;  // Auto: high-dimensional when dim > high_dim_threshold
    std::size_t high_dim_threshold = 1000;
    std::size_t full_covariance_dim_limit = 1000;
    std::uint64_t seed = 0;
    bool parallel_runs = true;

    /// Throws InvalidInput for unusable values.
    void validate() const;

    Profile resolved_profile(std::size_t dim) const;
    std::size_t resolved_runs(std::size_t dim) const;
    std::size_t resolved_cap(std::size_t dim) const;
};

struct RunRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double chosen_c = 0.0;
    double auc = 0.0;
    double accuracy = 0.0;
    double train_ms = 0.0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct ReportRow {
    std::string dataset;
    std::string algorithm;
    double mean_auc = 0.0;
    double std_auc = 0.0;
    double mean_acc = 0.0;
    double std_acc = 0.0;
    double mean_train_ms = 0.0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<RunRecord> details;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

struct TuneResult {
    double chosen = 0.0;
    std::vector<double> mean_auc;  // per grid value; -1 where training failed numerically
};

/// k-fold CV on `train` (both classes required in every fold; up to 10
/// re-splits with derived seeds, then TuningError). Returns the grid value with
/// the best mean validation AUC, ties going to the smaller value. A one-element
/// grid is returned without any training.
TuneResult tune_penalty(const Dataset& train, std::span<const double> grid, Algorithm algo,
                        const AlgorithmParams& params, std::size_t tuning_folds, std::uint64_t seed);

/// The evaluation protocol on in-memory data. Per run r: derive a run seed from
/// the master seed; permute; subsample to the cap; split into folds and hold out
/// fold r mod k; scale with training statistics; tune C by CV on the training
/// folds; retrain on all training folds (timed); score the held-out fold.
ReportRow run_experiment(const ExperimentConfig& config, const Dataset& data, const std::string& dataset_name);

/// Loads config.data_path (multiclass labels binarized with a seed derived from config.seed).
ReportRow run_experiment(const ExperimentConfig& config);

std::string dataset_name_from_path(const std::string& path);

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(std::string_view name);

/// CSV: header `dataset,algorithm,mean_auc,std_auc,mean_acc,std_acc,mean_train_ms,runs,seed`,
/// reals with 4 decimals. JSON: array of row objects at full precision, with per-run details.
std::string emit_report(const ExperimentReport& report, ReportFormat format);

/// Inverse of emit_report(..., Json).
ExperimentReport parse_report_json(std::string_view text);

}  // namespace cbr
