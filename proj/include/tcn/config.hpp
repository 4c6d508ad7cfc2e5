#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tcn/key_value.hpp"

namespace tcn {

enum class LossReduction {
    Mean,  // average over the images of a batch
    Sum,   // plain sum over images
};

struct TrainConfig {
    double alpha = 0.01;          // weight of the transfer loss
    double beta = 1e-3;           // ridge regularizer for class similarities
    std::size_t hidden_dim_g = 0;  // 0 selects min(1024, 4·d_a)
    std::size_t hidden_dim_h = 0;  // 0 selects min(1024, 4·d_a)
    double leaky_slope = 0.01;
    double learning_rate = 1e-4;
    std::size_t batch_size = 64;
    std::size_t epochs = 300;
    std::uint64_t seed = 42;
    double prob_clamp_eps = 1e-7;
    LossReduction reduction = LossReduction::Mean;
    bool normalize_features = false;  // L2-normalize each feature row before fusion
    double val_holdout_fraction = 0.2;

    void validate() const;

    // Overrides fields named in `kv`; unknown keys are rejected.
    void apply(const KeyValues& kv);

    // One key=value line per field, in a stable order.
    std::string to_key_values() const;
};

TrainConfig load_train_config(const std::filesystem::path& path);

std::size_t resolve_hidden_dim(std::size_t requested, std::size_t semantic_dim);

}  // namespace tcn
