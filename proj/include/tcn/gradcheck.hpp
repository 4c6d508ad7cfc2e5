#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tcn/config.hpp"
#include "tcn/network.hpp"

namespace tcn {

struct GradcheckCase {
    std::size_t semantic_dim = 5;
    std::size_t feature_dim = 7;
    std::size_t hidden_g = 4;
    std::size_t hidden_h = 4;
    std::size_t batch = 3;
    std::size_t source_classes = 3;
    std::size_t target_classes = 2;
    double alpha = 0.1;
    std::uint64_t seed = 1;
};

struct GradcheckResult {
    double max_rel_error = 0.0;
    std::array<double, 8> tensor_max_rel_error{};  // in TcnTensors::kNames order
    std::size_t entries_checked = 0;
    // Entries whose ±step probe crossed a leaky-ReLU kink and were re-probed
    // with a smaller step.
    std::size_t kink_retries = 0;
};

// |a − n| / max(|a|, |n|, floor): gradients below `floor` are compared in
// absolute terms, where central differences are dominated by rounding.
inline constexpr double kGradcheckFloor = 1e-6;
double relative_error(double analytic, double numeric, double floor = kGradcheckFloor);

// Builds a random tiny network, batch and similarity targets from the case's
// seed and compares the backward pass of the combined loss against central
// finite differences of the loss value.
GradcheckResult run_gradcheck(const GradcheckCase& c, double step = 1e-5);

// Cases with d_a ≤ 8, d_f ≤ 12, H ≤ 6, B ≤ 4, K ≤ 5, L ≤ 3 derived from a
// seed; alternates alpha between 0 and 0.1.
GradcheckCase random_gradcheck_case(std::uint64_t seed, std::size_t index);

}  // namespace tcn
