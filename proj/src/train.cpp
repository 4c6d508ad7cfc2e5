#include "tcn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "tcn/error.hpp"
#include "tcn/linalg.hpp"
#include "tcn/loss.hpp"

namespace tcn {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

class Adam {
public:
    Adam(const TcnTensors& shape, double lr)
        : lr_(lr), first_(shape.zeros_like()), second_(shape.zeros_like()) {}

    void step(TcnTensors& params, const TcnGradients& grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t_));
        auto p = params.tensors();
        auto g = grad.tensors();
        auto m = first_.tensors();
        auto v = second_.tensors();
        for (std::size_t n = 0; n < p.size(); ++n) {
            auto pv = p[n]->values();
            auto gv = g[n]->values();
            auto mv = m[n]->values();
            auto vv = v[n]->values();
            for (std::size_t i = 0; i < pv.size(); ++i) {
                mv[i] = kAdamBeta1 * mv[i] + (1.0 - kAdamBeta1) * gv[i];
                vv[i] = kAdamBeta2 * vv[i] + (1.0 - kAdamBeta2) * gv[i] * gv[i];
                pv[i] -= lr_ * (mv[i] / c1) / (std::sqrt(vv[i] / c2) + kAdamEps);
            }
        }
    }

private:
    double lr_;
    std::size_t t_ = 0;
    TcnTensors first_;
    TcnTensors second_;
};

// Splits labeled rows into the rows used for gradient steps and, when
// validation classes exist, the rows used to score the validation metric.
struct RowPlan {
    std::vector<ClassId> train_classes;     // source classes that supervise L_D
    std::vector<ClassId> transfer_classes;  // classes receiving L_T
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> val_rows;      // held-out train-class rows + val-class rows
};

RowPlan plan_rows(const Dataset& d, const TrainConfig& config, std::mt19937_64& rng) {
    RowPlan plan;
    const std::set<ClassId> val(d.val_classes.begin(), d.val_classes.end());
    for (ClassId c : d.source_classes)
        if (!val.contains(c)) plan.train_classes.push_back(c);
    if (plan.train_classes.empty()) {
        throw Error(ErrorKind::InvalidArgument, "every source class is a validation class");
    }
    plan.transfer_classes = d.target_classes;
    plan.transfer_classes.insert(plan.transfer_classes.end(), d.val_classes.begin(),
                                 d.val_classes.end());

    if (val.empty()) {
        plan.train_rows.resize(d.labels.size());
        std::iota(plan.train_rows.begin(), plan.train_rows.end(), std::size_t{0});
        return plan;
    }
    for (ClassId c : plan.train_classes) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < d.labels.size(); ++i)
            if (d.labels[i] == c) rows.push_back(i);
        std::shuffle(rows.begin(), rows.end(), rng);
        auto held = static_cast<std::size_t>(
            std::floor(config.val_holdout_fraction * static_cast<double>(rows.size())));
        if (rows.size() >= 2) held = std::clamp<std::size_t>(held, 1, rows.size() - 1);
        else held = 0;
        plan.val_rows.insert(plan.val_rows.end(), rows.begin(), rows.begin() + held);
        plan.train_rows.insert(plan.train_rows.end(), rows.begin() + held, rows.end());
    }
    for (std::size_t i = 0; i < d.labels.size(); ++i)
        if (val.contains(d.labels[i])) plan.val_rows.push_back(i);
    std::sort(plan.train_rows.begin(), plan.train_rows.end());
    std::sort(plan.val_rows.begin(), plan.val_rows.end());
    if (plan.train_rows.empty()) throw Error(ErrorKind::InvalidArgument, "no training rows left");
    return plan;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = m.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix column_block(const Matrix& m, std::size_t first, std::size_t count) {
    Matrix out(m.rows(), count);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, first + j);
    return out;
}

}  // namespace

TrainReport train(const Dataset& dataset, const TrainConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    validate(dataset);
    config.validate();

    // Independent streams for initialization, row planning and shuffling.
    std::mt19937_64 plan_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::mt19937_64 shuffle_rng(config.seed ^ 0xc2b2ae3d27d4eb4fULL);

    const RowPlan plan = plan_rows(dataset, config, plan_rng);
    TrainReport report;
    report.similarity = class_similarity(dataset.semantics, plan.train_classes,
                                         plan.transfer_classes, config.beta);

    const std::size_t da = dataset.semantic_dim();
    TcnParams params = init_params(da, dataset.feature_dim(), resolve_hidden_dim(config.hidden_dim_g, da),
                                   resolve_hidden_dim(config.hidden_dim_h, da), config.leaky_slope,
                                   config.seed);
    params.normalize_features = config.normalize_features;

    std::vector<ClassId> grid_classes = plan.train_classes;
    grid_classes.insert(grid_classes.end(), plan.transfer_classes.begin(),
                        plan.transfer_classes.end());
    const Matrix grid_semantics = select_rows(dataset.semantics, grid_classes);
    const std::size_t k = plan.train_classes.size();
    const std::size_t l = plan.transfer_classes.size();

    // Validation: held-out rows of training classes are "seen", rows of the
    // validation classes are "unseen"; the search space is every class.
    const bool validating = !dataset.val_classes.empty();
    Matrix val_features;
    std::vector<ClassId> val_labels;
    std::vector<ClassId> search = dataset.source_classes;
    search.insert(search.end(), dataset.target_classes.begin(), dataset.target_classes.end());
    if (validating) {
        val_features = gather_rows(dataset.features, plan.val_rows);
        for (std::size_t r : plan.val_rows) val_labels.push_back(dataset.labels[r]);
    }

    Adam optimizer(params, config.learning_rate);
    std::vector<std::size_t> order = plan.train_rows;
    const std::size_t n = order.size();
    const std::size_t batch = std::min(config.batch_size, n);
    double best_metric = -std::numeric_limits<double>::infinity();
    std::size_t step = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        EpochRecord rec;
        rec.epoch = epoch;
        for (std::size_t start = 0; start < n; start += batch) {
            ++step;
            const std::span<const std::size_t> rows(order.data() + start, std::min(batch, n - start));
            const Matrix features = gather_rows(dataset.features, rows);
            std::vector<ClassId> labels;
            labels.reserve(rows.size());
            for (std::size_t r : rows) labels.push_back(dataset.labels[r]);

            auto fwd = contrast_forward(params, features, grid_semantics);
            const auto loss = combined_loss(
                column_block(fwd.trace.logits, 0, k), column_block(fwd.trace.logits, k, l),
                indicator_targets(labels, plan.train_classes),
                transfer_targets(labels, report.similarity), config.alpha, config.reduction);
            if (!std::isfinite(loss.breakdown.total)) {
                throw Error(ErrorKind::Divergence, "non-finite loss at epoch " + std::to_string(epoch) +
                                                       ", step " + std::to_string(step));
            }
            const double weight = config.reduction == LossReduction::Mean
                                      ? static_cast<double>(rows.size()) / static_cast<double>(n)
                                      : 1.0;
            rec.l_d += weight * loss.breakdown.l_d;
            rec.l_t += weight * loss.breakdown.l_t;
            rec.total += weight * loss.breakdown.total;

            optimizer.step(params, contrast_backward_logits(fwd.trace, loss.grad));
        }

        rec.val_metric = std::numeric_limits<double>::quiet_NaN();
        if (validating) {
            const Matrix logits = contrast_logits(params, val_features, dataset.semantics);
            rec.val_metric =
                gzsl_metrics(logits, val_labels, plan.train_classes, dataset.val_classes, search).h;
            if (rec.val_metric > best_metric) {
                best_metric = rec.val_metric;
                report.best_epoch = epoch;
                report.params = params;
            }
        }
        report.records.push_back(rec);
    }
    if (!validating || report.best_epoch == 0) {
        report.best_epoch = config.epochs;
        report.params = params;
    }
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::vector<SweepResult> alpha_sweep(const Dataset& dataset, const TrainConfig& config,
                                     const std::vector<double>& alphas, const EvalSet& test) {
    if (alphas.empty()) throw Error(ErrorKind::InvalidArgument, "alpha_sweep: no alpha values");
    std::vector<SweepResult> results;
    for (double alpha : alphas) {
        TrainConfig c = config;
        c.alpha = alpha;
        SweepResult r;
        r.alpha = alpha;
        r.report = train(dataset, c);
        r.metrics = evaluate(r.report.params, dataset, test.features, test.labels);
        results.push_back(std::move(r));
    }
    return results;
}

void write_train_log(const std::filesystem::path& path, const TrainReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "epoch,l_d,l_t,total,val_metric\n";
    char buf[128];
    for (const auto& r : report.records) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.l_d, r.l_t,
                      r.total, r.val_metric);
        out << buf;
    }
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepResult>& results) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "alpha,ts,tr,h,zsl_acc\n";
    char buf[160];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.alpha, r.metrics.ts,
                      r.metrics.tr, r.metrics.h, r.metrics.zsl_acc);
        out << buf;
    }
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace tcn
