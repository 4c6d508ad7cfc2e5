#pragma once

#include "tcn/matrix.hpp"

namespace tcn {

Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ·b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a·bᵀ without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

// Adds a 1×cols bias to every row of x, in place.
void add_row_broadcast(Matrix& x, const Matrix& bias);
// 1×cols column sums.
Matrix column_sums(const Matrix& x);

Matrix leaky_relu(const Matrix& x, double slope);
// Derivative of leaky_relu evaluated at x (1 for x > 0, slope otherwise).
Matrix leaky_relu_derivative(const Matrix& x, double slope);
Matrix sigmoid(const Matrix& x);
double sigmoid(double x) noexcept;

// Solves the symmetric positive-definite system m·x = rhs by Cholesky
// factorization. rhs may hold several right-hand sides as columns.
Matrix cholesky_solve(const Matrix& m, const Matrix& rhs);

// argmin_s ‖b − A·s‖² + beta·‖s‖², via (AᵀA + beta·I)s = Aᵀb.
Matrix ridge_solve(const Matrix& a, const Matrix& b, double beta);

double max_abs(const Matrix& a);

}  // namespace tcn
