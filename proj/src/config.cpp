#include "tcn/config.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tcn/error.hpp"

namespace tcn {

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
    const auto v = parse_integer(key, value);
    if (v < 0) throw Error(ErrorKind::InvalidArgument, key + " must be nonnegative");
    return static_cast<std::size_t>(v);
}

}  // namespace

void TrainConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be > 0");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) fail("leaky_slope must lie in (0, 1)");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("lr must be > 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (!(prob_clamp_eps > 0.0 && prob_clamp_eps < 0.5)) fail("prob_clamp_eps must lie in (0, 0.5)");
    if (!(val_holdout_fraction > 0.0 && val_holdout_fraction < 1.0)) {
        fail("val_holdout_fraction must lie in (0, 1)");
    }
}

void TrainConfig::apply(const KeyValues& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "alpha") alpha = parse_real(key, value);
        else if (key == "beta") beta = parse_real(key, value);
        else if (key == "hidden_dim_g") hidden_dim_g = parse_count(key, value);
        else if (key == "hidden_dim_h") hidden_dim_h = parse_count(key, value);
        else if (key == "leaky_slope") leaky_slope = parse_real(key, value);
        else if (key == "learning_rate" || key == "lr") learning_rate = parse_real(key, value);
        else if (key == "batch_size") batch_size = parse_count(key, value);
        else if (key == "epochs") epochs = parse_count(key, value);
        else if (key == "seed") seed = static_cast<std::uint64_t>(parse_integer(key, value));
        else if (key == "prob_clamp_eps") prob_clamp_eps = parse_real(key, value);
        else if (key == "normalize_features") normalize_features = parse_bool(key, value);
        else if (key == "val_holdout_fraction") val_holdout_fraction = parse_real(key, value);
        else if (key == "reduction") {
            if (value == "mean") reduction = LossReduction::Mean;
            else if (value == "sum") reduction = LossReduction::Sum;
            else throw Error(ErrorKind::Format, "reduction must be 'mean' or 'sum'");
        } else {
            throw Error(ErrorKind::Format, "unknown config key '" + key + "'");
        }
    }
}

std::string TrainConfig::to_key_values() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "alpha=" << alpha << '\n'
        << "beta=" << beta << '\n'
        << "hidden_dim_g=" << hidden_dim_g << '\n'
        << "hidden_dim_h=" << hidden_dim_h << '\n'
        << "leaky_slope=" << leaky_slope << '\n'
        << "learning_rate=" << learning_rate << '\n'
        << "batch_size=" << batch_size << '\n'
        << "epochs=" << epochs << '\n'
        << "seed=" << seed << '\n'
        << "prob_clamp_eps=" << prob_clamp_eps << '\n'
        << "reduction=" << (reduction == LossReduction::Mean ? "mean" : "sum") << '\n'
        << "normalize_features=" << (normalize_features ? "true" : "false") << '\n'
        << "val_holdout_fraction=" << val_holdout_fraction << '\n';
    return out.str();
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    TrainConfig config;
    config.apply(read_key_values(path));
    return config;
}

std::size_t resolve_hidden_dim(std::size_t requested, std::size_t semantic_dim) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::min<std::size_t>(1024, 4 * semantic_dim));
}

}  // namespace tcn
