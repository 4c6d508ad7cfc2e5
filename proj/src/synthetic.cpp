#include "tcn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tcn/error.hpp"
#include "tcn/linalg.hpp"

namespace tcn {

void SyntheticSpec::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
    if (source_classes < 2) fail("synthetic: need at least 2 source classes");
    if (target_classes < 1) fail("synthetic: need at least 1 target class");
    if (semantic_dim < 1) fail("synthetic: semantic_dim must be >= 1");
    if (feature_dim < semantic_dim) fail("synthetic: feature_dim must be >= semantic_dim");
    if (per_class_n < 1) fail("synthetic: per_class_n must be >= 1");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("synthetic: noise_sigma must be >= 0");
    if (!(purity >= 0.0 && purity <= 1.0)) fail("synthetic: purity must lie in [0, 1]");
    if (val_classes >= source_classes) fail("synthetic: val_classes must be < source_classes");
}

void SyntheticSpec::apply(const KeyValues& kv) {
    auto count = [](const std::string& key, const std::string& value) {
        const auto v = parse_integer(key, value);
        if (v < 0) throw Error(ErrorKind::InvalidArgument, key + " must be nonnegative");
        return static_cast<std::size_t>(v);
    };
    for (const auto& [key, value] : kv) {
        if (key == "K" || key == "source_classes") source_classes = count(key, value);
        else if (key == "L" || key == "target_classes") target_classes = count(key, value);
        else if (key == "d_a" || key == "semantic_dim") semantic_dim = count(key, value);
        else if (key == "d_f" || key == "feature_dim") feature_dim = count(key, value);
        else if (key == "per_class_n") per_class_n = count(key, value);
        else if (key == "test_per_class") test_per_class = count(key, value);
        else if (key == "noise_sigma") noise_sigma = parse_real(key, value);
        else if (key == "purity") purity = parse_real(key, value);
        else if (key == "val_classes") val_classes = count(key, value);
        else if (key == "seed") seed = static_cast<std::uint64_t>(parse_integer(key, value));
        else throw Error(ErrorKind::Format, "unknown synthetic spec key '" + key + "'");
    }
}

namespace {

// Picks 2–3 distinct sources per target by dealing a shuffled source list
// round-robin, so every source is used when K <= 3L. Supports are disjoint
// unless K < 2L, where short supports are topped up with random repeats.
std::vector<std::vector<std::size_t>> choose_supports(std::size_t k, std::size_t l,
                                                      std::mt19937_64& rng) {
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<std::size_t>> support(l);
    const std::size_t dealt = std::min(k, 3 * l);
    for (std::size_t i = 0; i < dealt; ++i) support[i % l].push_back(order[i]);

    std::uniform_int_distribution<std::size_t> any(0, k - 1);
    auto add_distinct = [&](std::vector<std::size_t>& s) {
        while (true) {
            const std::size_t pick = any(rng);
            if (std::find(s.begin(), s.end(), pick) == s.end()) {
                s.push_back(pick);
                return;
            }
        }
    };
    for (auto& s : support) {
        while (s.size() < 2) add_distinct(s);
    }
    return support;
}

// Gram-Schmidt over the first `count` rows, each rescaled to norm sqrt(d).
void orthogonalize_rows(Matrix& m, std::size_t count) {
    const double target = std::sqrt(static_cast<double>(m.cols()));
    for (std::size_t r = 0; r < count; ++r) {
        auto row = m.row(r);
        for (std::size_t q = 0; q < r; ++q) {
            const auto prev = m.row(q);
            double dot = 0.0;
            for (std::size_t t = 0; t < row.size(); ++t) dot += row[t] * prev[t];
            dot /= target * target;
            for (std::size_t t = 0; t < row.size(); ++t) row[t] -= dot * prev[t];
        }
        double norm = 0.0;
        for (double v : row) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : row) v *= target / norm;
    }
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t k = spec.source_classes;
    const std::size_t l = spec.target_classes;
    const std::size_t da = spec.semantic_dim;
    const std::size_t df = spec.feature_dim;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticData out;
    Dataset& d = out.dataset;
    d.semantics = Matrix(k + l, da);
    for (std::size_t c = 0; c < k; ++c)
        for (double& v : d.semantics.row(c)) v = gauss(rng);
    if (k <= da) orthogonalize_rows(d.semantics, k);

    out.mixtures = Matrix(l, k);
    const auto support = choose_supports(k, l, rng);
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    for (std::size_t j = 0; j < l; ++j) {
        double total = 0.0;
        for (std::size_t src : support[j]) total += (out.mixtures(j, src) = weight(rng));
        for (std::size_t src : support[j]) out.mixtures(j, src) /= total;

        auto row = d.semantics.row(k + j);
        for (std::size_t src : support[j]) {
            const auto a = d.semantics.row(src);
            for (std::size_t t = 0; t < da; ++t) row[t] += out.mixtures(j, src) * a[t];
        }
        const double perturb = 1.0 - spec.purity;
        for (double& v : row) {
            const double e = gauss(rng);
            v += perturb * e;
        }
    }

    out.projection = Matrix(df, da);
    const double w_scale = 1.0 / std::sqrt(static_cast<double>(da));
    for (double& v : out.projection.values()) v = gauss(rng) * w_scale;
    out.prototypes = matmul_nt(d.semantics, out.projection);

    auto emit = [&](std::size_t cls, std::size_t count, Matrix& feats, std::size_t& next,
                    std::vector<ClassId>& labels) {
        for (std::size_t n = 0; n < count; ++n, ++next) {
            auto dst = feats.row(next);
            const auto proto = out.prototypes.row(cls);
            for (std::size_t t = 0; t < df; ++t) {
                const double e = gauss(rng);
                dst[t] = proto[t] + spec.noise_sigma * e;
            }
            labels.push_back(static_cast<ClassId>(cls));
        }
    };

    d.features = Matrix(k * spec.per_class_n, df);
    std::size_t next = 0;
    for (std::size_t c = 0; c < k; ++c) emit(c, spec.per_class_n, d.features, next, d.labels);

    out.test_features = Matrix((k + l) * spec.test_per_class, df);
    next = 0;
    for (std::size_t c = 0; c < k + l; ++c) {
        emit(c, spec.test_per_class, out.test_features, next, out.test_labels);
    }

    for (std::size_t c = 0; c < k; ++c) d.source_classes.push_back(static_cast<ClassId>(c));
    for (std::size_t j = 0; j < l; ++j) d.target_classes.push_back(static_cast<ClassId>(k + j));
    for (std::size_t v = 0; v < spec.val_classes; ++v) {
        d.val_classes.push_back(static_cast<ClassId>(k - spec.val_classes + v));
    }
    validate(d);
    return out;
}

}  // namespace tcn
