#pragma once

#include <cstdint>
#include <vector>

#include "tcn/dataset.hpp"
#include "tcn/key_value.hpp"

namespace tcn {

struct SyntheticSpec {
    std::size_t source_classes = 8;   // K
    std::size_t target_classes = 4;   // L
    std::size_t semantic_dim = 16;    // d_a
    std::size_t feature_dim = 32;     // d_f
    std::size_t per_class_n = 50;     // training rows per source class
    std::size_t test_per_class = 20;  // held-out rows per class, all classes
    double noise_sigma = 0.1;
    // 1 makes every target semantic an exact mixture of source semantics;
    // lower values add an independent perturbation of scale (1 - purity).
    double purity = 1.0;
    std::size_t val_classes = 0;  // last source classes flagged as validation
    std::uint64_t seed = 1;

    void validate() const;
    void apply(const KeyValues& kv);
};

struct SyntheticData {
    Dataset dataset;
    Matrix test_features;
    std::vector<ClassId> test_labels;
    // L × K convex weights: row j holds target j's mixture over source classes
    // (both in split order).
    Matrix mixtures;
    // d_f × d_a map from semantics to class prototypes.
    Matrix projection;
    Matrix prototypes;  // (K+L) × d_f, one row per class id
};

// Source classes get ids 0..K-1 and targets K..K+L-1. Each source class
// appears in at least one target mixture whenever K <= 3L.
// When K <= d_a the source semantics are mutually orthogonal Gaussian draws
// (Gram-Schmidt, rescaled to norm sqrt(d_a)).
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace tcn
