#include "tcn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "tcn/error.hpp"
#include "tcn/linalg.hpp"

namespace tcn {

namespace {

void check_targets(const Matrix& logits, const Matrix& targets) {
    if (!logits.same_shape(targets)) {
        throw Error(ErrorKind::DimensionMismatch, "bce: logits " + logits.shape_string() +
                                                      " vs targets " + targets.shape_string());
    }
    for (double t : targets.values()) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "bce: target outside [0, 1]");
        }
    }
}

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double row_divisor(const Matrix& m, LossReduction reduction) {
    if (reduction == LossReduction::Sum || m.rows() == 0) return 1.0;
    return static_cast<double>(m.rows());
}

}  // namespace

Matrix indicator_targets(const std::vector<ClassId>& labels,
                         const std::vector<ClassId>& source_classes) {
    Matrix m(labels.size(), source_classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = std::find(source_classes.begin(), source_classes.end(), labels[i]);
        if (it == source_classes.end()) {
            throw Error(ErrorKind::LabelOutOfRange,
                        "label " + std::to_string(labels[i]) + " is not a source class");
        }
        m(i, static_cast<std::size_t>(it - source_classes.begin())) = 1.0;
    }
    return m;
}

Matrix transfer_targets(const std::vector<ClassId>& labels, const SimilarityMatrix& sim) {
    Matrix s(labels.size(), sim.values.cols());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto src = sim.values.row(sim.row_of(labels[i]));
        std::copy(src.begin(), src.end(), s.row(i).begin());
    }
    return s;
}

BceResult bce_soft(const Matrix& logits, const Matrix& targets, LossReduction reduction) {
    check_targets(logits, targets);
    const double divisor = row_divisor(logits, reduction);
    BceResult r{0.0, Matrix(logits.rows(), logits.cols())};
    auto x = logits.values();
    auto t = targets.values();
    auto g = r.grad.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += softplus(x[i]) - t[i] * x[i];
        g[i] = (sigmoid(x[i]) - t[i]) / divisor;
    }
    r.loss = sum / divisor;
    return r;
}

double bce_probabilities(const Matrix& probs, const Matrix& targets, double clamp_eps,
                         LossReduction reduction) {
    check_targets(probs, targets);
    auto v = probs.values();
    auto t = targets.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double p = std::clamp(v[i], clamp_eps, 1.0 - clamp_eps);
        sum -= t[i] * std::log(p) + (1.0 - t[i]) * std::log(1.0 - p);
    }
    return sum / row_divisor(probs, reduction);
}

CombinedLoss combined_loss(const Matrix& logits_source, const Matrix& logits_target,
                           const Matrix& indicator, const Matrix& similarity_targets, double alpha,
                           LossReduction reduction) {
    if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
    if (logits_source.rows() != logits_target.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "source and target logits differ in batch size");
    }
    const BceResult disc = bce_soft(logits_source, indicator, reduction);
    const BceResult transfer = bce_soft(logits_target, similarity_targets, reduction);

    CombinedLoss out;
    out.breakdown = {disc.loss, transfer.loss, disc.loss + alpha * transfer.loss, alpha};
    const std::size_t b = logits_source.rows(), k = logits_source.cols(), l = logits_target.cols();
    out.grad = Matrix(b, k + l);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < k; ++j) out.grad(i, j) = disc.grad(i, j);
        for (std::size_t j = 0; j < l; ++j) out.grad(i, k + j) = alpha * transfer.grad(i, j);
    }
    return out;
}

}  // namespace tcn
