#pragma once

#include <vector>

#include "tcn/config.hpp"
#include "tcn/io.hpp"
#include "tcn/matrix.hpp"
#include "tcn/similarity.hpp"

namespace tcn {

struct LossBreakdown {
    double l_d = 0.0;    // discriminative term over source classes
    double l_t = 0.0;    // transfer term over target classes
    double total = 0.0;  // l_d + alpha·l_t
    double alpha = 0.0;
};

struct BceResult {
    double loss = 0.0;
    Matrix grad;  // d loss / d logits
};

struct CombinedLoss {
    LossBreakdown breakdown;
    Matrix grad;  // B × (K + L): source block, then target block
};

// m_ij = 1 iff labels[i] == source_classes[j].
Matrix indicator_targets(const std::vector<ClassId>& labels,
                         const std::vector<ClassId>& source_classes);

// Row i is the similarity row of labels[i].
Matrix transfer_targets(const std::vector<ClassId>& labels, const SimilarityMatrix& sim);

// Σ_cols −[t·log v + (1−t)·log(1−v)] with v = sigmoid(logit), reduced over
// rows by mean or sum. Evaluated as softplus(x) − t·x, so no probability is
// ever clamped; the gradient is (v − t) divided by the row count under Mean.
BceResult bce_soft(const Matrix& logits, const Matrix& targets,
                   LossReduction reduction = LossReduction::Mean);

// Same loss for callers holding probabilities instead of logits; v is
// clamped to [clamp_eps, 1 − clamp_eps] before the logarithms.
double bce_probabilities(const Matrix& probs, const Matrix& targets, double clamp_eps,
                         LossReduction reduction = LossReduction::Mean);

CombinedLoss combined_loss(const Matrix& logits_source, const Matrix& logits_target,
                           const Matrix& indicator, const Matrix& similarity_targets, double alpha,
                           LossReduction reduction = LossReduction::Mean);

}  // namespace tcn
