#pragma once

#include <filesystem>
#include <vector>

#include "tcn/config.hpp"
#include "tcn/dataset.hpp"
#include "tcn/eval.hpp"
#include "tcn/network.hpp"
#include "tcn/similarity.hpp"

namespace tcn {

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double l_d = 0.0;
    double l_t = 0.0;
    double total = 0.0;
    double val_metric = 0.0;  // NaN when there are no validation classes
};

struct TrainReport {
    std::vector<EpochRecord> records;
    std::size_t best_epoch = 0;  // 1-based; the last epoch when nothing is validated
    TcnParams params;            // parameters of best_epoch
    SimilarityMatrix similarity;
    double seconds = 0.0;
};

// Mini-batch Adam on L_D + alpha·L_T. Each batch is contrasted against every
// training source class and every transfer class (targets, plus validation
// classes acting as pseudo-targets). Target-class labels are never read.
TrainReport train(const Dataset& dataset, const TrainConfig& config);

struct EvalSet {
    Matrix features;
    std::vector<ClassId> labels;
};

struct SweepResult {
    double alpha = 0.0;
    TrainReport report;
    GzslMetrics metrics;
};

// One model per alpha, all from the same seed, each evaluated on `test`.
std::vector<SweepResult> alpha_sweep(const Dataset& dataset, const TrainConfig& config,
                                     const std::vector<double>& alphas, const EvalSet& test);

// epoch,l_d,l_t,total,val_metric
void write_train_log(const std::filesystem::path& path, const TrainReport& report);
// alpha,ts,tr,h,zsl_acc
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepResult>& results);

}  // namespace tcn
