#include "tcn/network.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "tcn/error.hpp"
#include "tcn/io.hpp"
#include "tcn/linalg.hpp"

namespace tcn {

TcnTensors TcnTensors::zeros_like() const {
    TcnTensors out;
    auto dst = out.tensors();
    auto src = tensors();
    for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] = Matrix(src[i]->rows(), src[i]->cols());
    return out;
}

void TcnParams::validate() const {
    auto expect = [](const Matrix& m, std::size_t r, std::size_t c, std::string_view name) {
        if (m.rows() != r || m.cols() != c) {
            throw Error(ErrorKind::DimensionMismatch,
                        std::string(name) + " is " + m.shape_string() + ", expected " +
                            std::to_string(r) + "x" + std::to_string(c));
        }
    };
    const std::size_t da = semantic_dim(), df = feature_dim(), hg = hidden_g(), hh = hidden_h();
    if (da == 0 || df == 0 || hg == 0 || hh == 0) {
        throw Error(ErrorKind::DimensionMismatch, "network dimensions must be >= 1");
    }
    expect(g_w1, da, hg, "g_w1");
    expect(g_b1, 1, hg, "g_b1");
    expect(g_w2, hg, df, "g_w2");
    expect(g_b2, 1, df, "g_b2");
    expect(h_w1, df, hh, "h_w1");
    expect(h_b1, 1, hh, "h_b1");
    expect(h_w2, hh, 1, "h_w2");
    expect(h_b2, 1, 1, "h_b2");
    for (const Matrix* t : tensors()) {
        if (!t->all_finite()) throw Error(ErrorKind::InvariantViolation, "non-finite parameter");
    }
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
        throw Error(ErrorKind::InvariantViolation, "leaky slope outside (0, 1)");
    }
}

TcnParams init_params(std::size_t semantic_dim, std::size_t feature_dim, std::size_t hidden_g,
                      std::size_t hidden_h, double leaky_slope, std::uint64_t seed) {
    if (semantic_dim == 0 || feature_dim == 0 || hidden_g == 0 || hidden_h == 0) {
        throw Error(ErrorKind::InvalidArgument, "init_params: all dimensions must be >= 1");
    }
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t fan_in, std::size_t fan_out) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(fan_in, fan_out);
        for (double& v : w.values()) v = dist(rng);
        return w;
    };
    TcnParams p;
    p.g_w1 = uniform(semantic_dim, hidden_g);
    p.g_b1 = Matrix(1, hidden_g);
    p.g_w2 = uniform(hidden_g, feature_dim);
    p.g_b2 = Matrix(1, feature_dim);
    p.h_w1 = uniform(feature_dim, hidden_h);
    p.h_b1 = Matrix(1, hidden_h);
    p.h_w2 = uniform(hidden_h, 1);
    p.h_b2 = Matrix(1, 1);
    p.leaky_slope = leaky_slope;
    return p;
}

namespace {

struct SemanticPass {
    Matrix pre, hidden, out;
};

SemanticPass run_semantic_branch(const TcnParams& p, const Matrix& semantics) {
    if (semantics.cols() != p.semantic_dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "semantics are " + semantics.shape_string() + " but the network expects d_a = " +
                        std::to_string(p.semantic_dim()));
    }
    SemanticPass s;
    s.pre = matmul(semantics, p.g_w1);
    add_row_broadcast(s.pre, p.g_b1);
    s.hidden = leaky_relu(s.pre, p.leaky_slope);
    s.out = matmul(s.hidden, p.g_w2);
    add_row_broadcast(s.out, p.g_b2);
    return s;
}

Matrix fuse(const Matrix& features, const Matrix& encoded) {
    const std::size_t b = features.rows(), c = encoded.rows(), df = features.cols();
    Matrix fused(b * c, df);
    for (std::size_t i = 0; i < b; ++i) {
        const double* f = features.row(i).data();
        for (std::size_t j = 0; j < c; ++j) {
            const double* g = encoded.row(j).data();
            double* z = fused.row(i * c + j).data();
            for (std::size_t t = 0; t < df; ++t) z[t] = f[t] * g[t];
        }
    }
    return fused;
}

}  // namespace

Matrix encode_semantics(const TcnParams& params, const Matrix& semantics) {
    return run_semantic_branch(params, semantics).out;
}

Matrix encode_features(const TcnParams& params, const Matrix& features) {
    if (features.cols() != params.feature_dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "features are " + features.shape_string() + " but the network expects d_f = " +
                        std::to_string(params.feature_dim()));
    }
    if (!params.normalize_features) return features;
    Matrix out = features;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        double norm = 0.0;
        for (double v : r) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (double& v : r) v /= norm;
    }
    return out;
}

ContrastOutput contrast_forward(const TcnParams& params, const Matrix& features,
                                const Matrix& semantics) {
    ContrastOutput out;
    ForwardTrace& t = out.trace;
    t.params = params;
    t.features = encode_features(params, features);
    t.semantics = semantics;
    auto g = run_semantic_branch(params, semantics);
    t.g_pre = std::move(g.pre);
    t.g_hidden = std::move(g.hidden);
    t.g_out = std::move(g.out);

    t.fused = fuse(t.features, t.g_out);
    t.h_pre = matmul(t.fused, params.h_w1);
    add_row_broadcast(t.h_pre, params.h_b1);
    t.h_hidden = leaky_relu(t.h_pre, params.leaky_slope);
    Matrix flat = matmul(t.h_hidden, params.h_w2);
    const double bias = params.h_b2(0, 0);
    for (double& v : flat.values()) v += bias;
    t.logits = Matrix(features.rows(), semantics.rows(), std::vector<double>(flat.data()));
    out.scores = sigmoid(t.logits);
    return out;
}

Matrix contrast_logits(const TcnParams& params, const Matrix& features, const Matrix& semantics,
                       std::size_t chunk_rows) {
    const Matrix encoded = encode_semantics(params, semantics);
    const Matrix feats = encode_features(params, features);
    Matrix logits(features.rows(), semantics.rows());
    chunk_rows = std::max<std::size_t>(1, chunk_rows);
    for (std::size_t start = 0; start < feats.rows(); start += chunk_rows) {
        const std::size_t n = std::min(chunk_rows, feats.rows() - start);
        Matrix chunk(n, feats.cols());
        for (std::size_t i = 0; i < n; ++i) {
            const auto src = feats.row(start + i);
            std::copy(src.begin(), src.end(), chunk.row(i).begin());
        }
        Matrix hidden = matmul(fuse(chunk, encoded), params.h_w1);
        add_row_broadcast(hidden, params.h_b1);
        hidden = leaky_relu(hidden, params.leaky_slope);
        const Matrix flat = matmul(hidden, params.h_w2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < semantics.rows(); ++j)
                logits(start + i, j) = flat(i * semantics.rows() + j, 0) + params.h_b2(0, 0);
    }
    return logits;
}

TcnGradients contrast_backward(const ForwardTrace& trace, const Matrix& dloss_dscores) {
    if (!dloss_dscores.same_shape(trace.logits)) {
        throw Error(ErrorKind::StaleTrace, "upstream gradient is " + dloss_dscores.shape_string() +
                                               " but the trace holds " +
                                               trace.logits.shape_string() + " scores");
    }
    // dv/dlogit = v(1 - v)
    Matrix dlogits = dloss_dscores;
    auto d = dlogits.values();
    auto x = trace.logits.values();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double v = sigmoid(x[i]);
        d[i] *= v * (1.0 - v);
    }
    return contrast_backward_logits(trace, dlogits);
}

TcnGradients contrast_backward_logits(const ForwardTrace& trace, const Matrix& dloss_dlogits) {
    const std::size_t b = trace.batch(), c = trace.classes();
    if (dloss_dlogits.rows() != b || dloss_dlogits.cols() != c) {
        throw Error(ErrorKind::StaleTrace, "upstream gradient is " + dloss_dlogits.shape_string() +
                                               " but the trace holds " + std::to_string(b) + "x" +
                                               std::to_string(c) + " logits");
    }
    if (trace.fused.rows() != b * c || trace.h_pre.rows() != b * c ||
        trace.g_out.rows() != c || trace.logits.rows() != b) {
        throw Error(ErrorKind::StaleTrace, "trace caches are inconsistent with each other");
    }
    const TcnParams& p = trace.params;
    TcnGradients grad;

    // Head h.
    const Matrix dflat(b * c, 1, std::vector<double>(dloss_dlogits.data()));
    grad.h_w2 = matmul_tn(trace.h_hidden, dflat);
    grad.h_b2 = column_sums(dflat);
    Matrix dh = matmul_nt(dflat, p.h_w2);
    dh = hadamard(dh, leaky_relu_derivative(trace.h_pre, p.leaky_slope));
    grad.h_w1 = matmul_tn(trace.fused, dh);
    grad.h_b1 = column_sums(dh);
    const Matrix dfused = matmul_nt(dh, p.h_w1);

    // Fusion: z_ij = f_i ⊗ g_j, so dg_j = Σ_i dz_ij ⊗ f_i.
    const std::size_t df = trace.features.cols();
    Matrix dg_out(c, df);
    for (std::size_t i = 0; i < b; ++i) {
        const double* f = trace.features.row(i).data();
        for (std::size_t j = 0; j < c; ++j) {
            const double* dz = dfused.row(i * c + j).data();
            double* dst = dg_out.row(j).data();
            for (std::size_t t = 0; t < df; ++t) dst[t] += dz[t] * f[t];
        }
    }

    // Semantic branch g.
    grad.g_w2 = matmul_tn(trace.g_hidden, dg_out);
    grad.g_b2 = column_sums(dg_out);
    Matrix dg = matmul_nt(dg_out, p.g_w2);
    dg = hadamard(dg, leaky_relu_derivative(trace.g_pre, p.leaky_slope));
    grad.g_w1 = matmul_tn(trace.semantics, dg);
    grad.g_b1 = column_sums(dg);
    return grad;
}

void save_checkpoint(const std::filesystem::path& path, const TcnParams& params) {
    params.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));

    auto write_tensor = [&](std::string_view name, const Matrix& m) {
        detail::write_u64(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::write_u64(out, m.rows());
        detail::write_u64(out, m.cols());
        for (double v : m.values()) detail::write_f64(out, v);
    };
    const auto tensors = params.tensors();
    detail::write_u64(out, tensors.size() + 2);
    for (std::size_t i = 0; i < tensors.size(); ++i) write_tensor(TcnTensors::kNames[i], *tensors[i]);
    write_tensor("leaky_slope", Matrix(1, 1, params.leaky_slope));
    write_tensor("normalize_features", Matrix(1, 1, params.normalize_features ? 1.0 : 0.0));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

TcnParams load_checkpoint(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::MissingFile, "checkpoint not found: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::string magic(kCheckpointMagic.size(), '\0');
    if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) ||
        magic != kCheckpointMagic) {
        throw Error(ErrorKind::Format, path.string() + ": not a TCNP checkpoint");
    }
    const auto file_size = std::filesystem::file_size(path);
    TcnParams p;
    auto slots = p.tensors();
    std::array<bool, 8> seen{};
    bool seen_slope = false;

    const auto count = detail::read_u64(in, path);
    for (std::uint64_t n = 0; n < count; ++n) {
        const auto name_len = detail::read_u64(in, path);
        if (name_len > 256) throw Error(ErrorKind::Format, path.string() + ": bad tensor name");
        std::string name(name_len, '\0');
        if (!in.read(name.data(), static_cast<std::streamsize>(name_len))) {
            throw Error(ErrorKind::Format, path.string() + ": truncated tensor name");
        }
        const auto rows = detail::read_u64(in, path);
        const auto cols = detail::read_u64(in, path);
        if (cols != 0 && rows > file_size / 8 / cols) {
            throw Error(ErrorKind::Format, path.string() + ": tensor '" + name + "' too large");
        }
        std::vector<double> data(rows * cols);
        for (double& v : data) v = detail::read_f64(in, path);
        Matrix m(rows, cols, std::move(data));

        if (name == "leaky_slope" && m.size() == 1) {
            p.leaky_slope = m(0, 0);
            seen_slope = true;
            continue;
        }
        if (name == "normalize_features" && m.size() == 1) {
            p.normalize_features = m(0, 0) != 0.0;
            continue;
        }
        bool matched = false;
        for (std::size_t i = 0; i < TcnTensors::kNames.size(); ++i) {
            if (name == TcnTensors::kNames[i]) {
                *slots[i] = std::move(m);
                seen[i] = matched = true;
                break;
            }
        }
        if (!matched) throw Error(ErrorKind::Format, path.string() + ": unknown tensor '" + name + "'");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::Format, path.string() + ": trailing bytes");
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorKind::Format,
                        path.string() + ": missing tensor " + std::string(TcnTensors::kNames[i]));
        }
    }
    if (!seen_slope) throw Error(ErrorKind::Format, path.string() + ": missing leaky_slope");
    p.validate();
    return p;
}

}  // namespace tcn
