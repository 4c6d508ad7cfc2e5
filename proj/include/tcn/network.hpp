#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "tcn/matrix.hpp"

namespace tcn {

// The eight weight tensors of the network. Biases are 1×n rows.
//
//   g: semantics a [C×d_a] → leaky(a·g_w1 + g_b1)·g_w2 + g_b2   [C×d_f]
//   h: fused z   [·×d_f]  → leaky(z·h_w1 + h_b1)·h_w2 + h_b2   logit
struct TcnTensors {
    Matrix g_w1, g_b1, g_w2, g_b2;
    Matrix h_w1, h_b1, h_w2, h_b2;

    static constexpr std::array<std::string_view, 8> kNames = {
        "g_w1", "g_b1", "g_w2", "g_b2", "h_w1", "h_b1", "h_w2", "h_b2"};

    std::array<Matrix*, 8> tensors() noexcept {
        return {&g_w1, &g_b1, &g_w2, &g_b2, &h_w1, &h_b1, &h_w2, &h_b2};
    }
    std::array<const Matrix*, 8> tensors() const noexcept {
        return {&g_w1, &g_b1, &g_w2, &g_b2, &h_w1, &h_b1, &h_w2, &h_b2};
    }

    // Same shapes, all zeros.
    TcnTensors zeros_like() const;

    friend bool operator==(const TcnTensors&, const TcnTensors&) = default;
};

using TcnGradients = TcnTensors;

struct TcnParams : TcnTensors {
    double leaky_slope = 0.01;
    bool normalize_features = false;  // f = row L2-normalization instead of identity

    std::size_t semantic_dim() const noexcept { return g_w1.rows(); }
    std::size_t feature_dim() const noexcept { return g_w2.cols(); }
    std::size_t hidden_g() const noexcept { return g_w1.cols(); }
    std::size_t hidden_h() const noexcept { return h_w1.cols(); }

    // Throws DimensionMismatch / InvariantViolation on inconsistent tensors.
    void validate() const;

    friend bool operator==(const TcnParams&, const TcnParams&) = default;
};

// Weights uniform in ±sqrt(6 / fan_in), biases zero.
TcnParams init_params(std::size_t semantic_dim, std::size_t feature_dim, std::size_t hidden_g,
                      std::size_t hidden_h, double leaky_slope, std::uint64_t seed);

Matrix encode_semantics(const TcnParams& params, const Matrix& semantics);

// Image-side encoding f: identity, or row L2-normalization when enabled.
Matrix encode_features(const TcnParams& params, const Matrix& features);

// Everything the backward pass needs. Rows of the pair-level matrices are
// indexed i·C + j for image i and class j.
struct ForwardTrace {
    TcnParams params;  // snapshot of the weights used
    Matrix features;   // B × d_f, after f
    Matrix semantics;  // C × d_a
    Matrix g_pre, g_hidden, g_out;
    Matrix fused;      // B·C × d_f, z_ij = f_i ⊗ g(a_j)
    Matrix h_pre, h_hidden;
    Matrix logits;     // B × C, pre-sigmoid contrastive scores

    std::size_t batch() const noexcept { return features.rows(); }
    std::size_t classes() const noexcept { return semantics.rows(); }
};

struct ContrastOutput {
    Matrix scores;  // B × C contrastive values in (0, 1)
    ForwardTrace trace;
};

ContrastOutput contrast_forward(const TcnParams& params, const Matrix& features,
                                const Matrix& semantics);

// Logits only, evaluated in row chunks; no trace is kept.
Matrix contrast_logits(const TcnParams& params, const Matrix& features, const Matrix& semantics,
                       std::size_t chunk_rows = 256);

// Gradients for an upstream gradient with respect to the scores v.
TcnGradients contrast_backward(const ForwardTrace& trace, const Matrix& dloss_dscores);
// Same, with the upstream gradient taken with respect to the logits.
TcnGradients contrast_backward_logits(const ForwardTrace& trace, const Matrix& dloss_dlogits);

// Binary checkpoint: "TCNP", u64 tensor count, then per tensor a u64
// name length, the name bytes, u64 rows, u64 cols and f64 payload.
inline constexpr std::string_view kCheckpointMagic = "TCNP";
void save_checkpoint(const std::filesystem::path& path, const TcnParams& params);
TcnParams load_checkpoint(const std::filesystem::path& path);

}  // namespace tcn
