#include "tcn/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "tcn/error.hpp"

namespace tcn {

namespace {

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                    b.shape_string());
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_error(op, a, b);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_error("matmul", a, b);
    Matrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* src = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) dst[j] += aik * src[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
    Matrix out(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* brow = b.row(k).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            double* dst = out.row(i).data();
            for (std::size_t j = 0; j < n; ++j) dst[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) shape_error("matmul_nt", a, b);
    Matrix out(a.rows(), b.rows());
    const std::size_t inner = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j).data();
            double acc = 0.0;
            for (std::size_t k = 0; k < inner; ++k) acc += arow[k] * brow[k];
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape("hadamard", a, b);
    Matrix out(a.rows(), a.cols());
    auto x = a.values();
    auto y = b.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape("add", a, b);
    Matrix out = a;
    auto o = out.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
    return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require_same_shape("subtract", a, b);
    Matrix out = a;
    auto o = out.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= y[i];
    return out;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out = a;
    for (double& v : out.values()) v *= factor;
    return out;
}

void add_row_broadcast(Matrix& x, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols()) shape_error("add_row_broadcast", x, bias);
    const double* b = bias.row(0).data();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double* r = x.row(i).data();
        for (std::size_t j = 0; j < x.cols(); ++j) r[j] += b[j];
    }
}

Matrix column_sums(const Matrix& x) {
    Matrix out(1, x.cols());
    double* o = out.row(0).data();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* r = x.row(i).data();
        for (std::size_t j = 0; j < x.cols(); ++j) o[j] += r[j];
    }
    return out;
}

Matrix leaky_relu(const Matrix& x, double slope) {
    Matrix out = x;
    for (double& v : out.values()) v = std::max(v, slope * v);
    return out;
}

Matrix leaky_relu_derivative(const Matrix& x, double slope) {
    Matrix out(x.rows(), x.cols());
    auto in = x.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = in[i] > 0.0 ? 1.0 : slope;
    return out;
}

double sigmoid(double x) noexcept {
    // Split by sign so exp never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& x) {
    Matrix out = x;
    for (double& v : out.values()) v = sigmoid(v);
    return out;
}

Matrix cholesky_solve(const Matrix& m, const Matrix& rhs) {
    if (m.rows() != m.cols() || rhs.rows() != m.rows()) shape_error("cholesky_solve", m, rhs);
    if (!m.all_finite() || !rhs.all_finite()) {
        throw Error(ErrorKind::SolverFailure, "cholesky_solve: non-finite input");
    }
    const std::size_t n = m.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) {
            throw Error(ErrorKind::SolverFailure,
                        "cholesky_solve: matrix is not positive definite at pivot " +
                            std::to_string(j));
        }
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }

    Matrix x = rhs;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        // L·y = b
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        // Lᵀ·x = y
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    if (!x.all_finite()) throw Error(ErrorKind::SolverFailure, "cholesky_solve: non-finite result");
    return x;
}

Matrix ridge_solve(const Matrix& a, const Matrix& b, double beta) {
    if (!(beta > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "ridge_solve: beta must be positive");
    }
    if (a.empty()) throw Error(ErrorKind::InvalidArgument, "ridge_solve: empty design matrix");
    if (b.rows() != a.rows() || b.cols() != 1) shape_error("ridge_solve", a, b);
    if (!a.all_finite() || !b.all_finite()) {
        throw Error(ErrorKind::SolverFailure, "ridge_solve: non-finite input");
    }
    Matrix gram = matmul_tn(a, a);
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += beta;
    return cholesky_solve(gram, matmul_tn(a, b));
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace tcn
