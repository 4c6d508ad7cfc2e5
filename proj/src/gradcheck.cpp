#include "tcn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tcn/linalg.hpp"
#include "tcn/loss.hpp"
#include "tcn/similarity.hpp"

namespace tcn {

double relative_error(double analytic, double numeric, double floor) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

namespace {

struct Problem {
    Matrix features;
    Matrix semantics;  // K + L rows: sources first
    Matrix indicator;
    Matrix transfer;
    std::size_t k = 0;
    std::size_t l = 0;
    double alpha = 0.0;
};

Matrix block(const Matrix& m, std::size_t first, std::size_t count) {
    Matrix out(m.rows(), count);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, first + j);
    return out;
}

struct Probe {
    double loss;
    std::vector<bool> pattern;  // sign of every leaky-ReLU input
};

Probe probe(const TcnParams& p, const Problem& prob) {
    const auto fwd = contrast_forward(p, prob.features, prob.semantics);
    const auto loss = combined_loss(block(fwd.trace.logits, 0, prob.k),
                                    block(fwd.trace.logits, prob.k, prob.l), prob.indicator,
                                    prob.transfer, prob.alpha);
    Probe out{loss.breakdown.total, {}};
    for (double v : fwd.trace.g_pre.values()) out.pattern.push_back(v > 0.0);
    for (double v : fwd.trace.h_pre.values()) out.pattern.push_back(v > 0.0);
    return out;
}

}  // namespace

GradcheckResult run_gradcheck(const GradcheckCase& c, double step) {
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t classes = c.source_classes + c.target_classes;

    TcnParams params =
        init_params(c.semantic_dim, c.feature_dim, c.hidden_g, c.hidden_h, 0.01, c.seed + 1);
    // Nonzero biases so their gradients are exercised away from init.
    for (Matrix* b : {&params.g_b1, &params.g_b2, &params.h_b1, &params.h_b2})
        for (double& v : b->values()) v = 0.1 * gauss(rng);

    Problem prob;
    prob.k = c.source_classes;
    prob.l = c.target_classes;
    prob.alpha = c.alpha;
    prob.features = Matrix(c.batch, c.feature_dim);
    for (double& v : prob.features.values()) v = gauss(rng);
    prob.semantics = Matrix(classes, c.semantic_dim);
    for (double& v : prob.semantics.values()) v = gauss(rng);

    std::vector<ClassId> sources, targets, labels;
    for (std::size_t i = 0; i < prob.k; ++i) sources.push_back(static_cast<ClassId>(i));
    for (std::size_t j = 0; j < prob.l; ++j) targets.push_back(static_cast<ClassId>(prob.k + j));
    std::uniform_int_distribution<std::size_t> pick(0, prob.k - 1);
    for (std::size_t i = 0; i < c.batch; ++i) labels.push_back(static_cast<ClassId>(pick(rng)));
    prob.indicator = indicator_targets(labels, sources);
    prob.transfer = transfer_targets(labels, class_similarity(prob.semantics, sources, targets, 1e-3));

    const auto fwd = contrast_forward(params, prob.features, prob.semantics);
    const auto loss = combined_loss(block(fwd.trace.logits, 0, prob.k),
                                    block(fwd.trace.logits, prob.k, prob.l), prob.indicator,
                                    prob.transfer, prob.alpha);
    const TcnGradients analytic = contrast_backward_logits(fwd.trace, loss.grad);
    const auto base_pattern = probe(params, prob).pattern;

    GradcheckResult result;
    auto slots = params.tensors();
    const auto grads = analytic.tensors();
    for (std::size_t t = 0; t < slots.size(); ++t) {
        auto values = slots[t]->values();
        const auto g = grads[t]->values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double original = values[i];
            double h = step;
            double numeric = 0.0;
            // A probe that crosses an activation kink differentiates a
            // different linear piece; shrink the step until both sides stay
            // on the base piece.
            for (int attempt = 0; attempt < 4; ++attempt) {
                values[i] = original + h;
                const Probe plus = probe(params, prob);
                values[i] = original - h;
                const Probe minus = probe(params, prob);
                values[i] = original;
                numeric = (plus.loss - minus.loss) / (2.0 * h);
                if (plus.pattern == base_pattern && minus.pattern == base_pattern) break;
                ++result.kink_retries;
                h *= 0.1;
            }
            const double err = relative_error(g[i], numeric);
            result.tensor_max_rel_error[t] = std::max(result.tensor_max_rel_error[t], err);
            result.max_rel_error = std::max(result.max_rel_error, err);
            ++result.entries_checked;
        }
    }
    return result;
}

GradcheckCase random_gradcheck_case(std::uint64_t seed, std::size_t index) {
    std::mt19937_64 rng(seed * 1000003ULL + index);
    auto draw = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    GradcheckCase c;
    c.semantic_dim = draw(2, 8);
    c.feature_dim = draw(2, 12);
    c.hidden_g = draw(2, 6);
    c.hidden_h = draw(2, 6);
    c.batch = draw(1, 4);
    c.source_classes = draw(2, 5);
    c.target_classes = draw(1, 3);
    c.alpha = index % 2 == 0 ? 0.0 : 0.1;
    c.seed = seed * 7919ULL + index;
    return c;
}

}  // namespace tcn
