#pragma once

#include <span>
#include <vector>

namespace apm {

// Small dense kernels for the desk-scale matrices this library works with
// (dim <= 8). Row-major storage, index (i, j) -> i * dim + j.

/// Inverse via Gauss-Jordan with partial pivoting. Throws NumericError on a
/// singular input.
std::vector<double> mat_inverse(std::span<const double> a, int dim);

/// Determinant via LU with partial pivoting.
double mat_det(std::span<const double> a, int dim);

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending order.
std::vector<double> sym_eigenvalues(std::span<const double> a, int dim);

/// C = A * B for dim x dim matrices.
std::vector<double> mat_mul(std::span<const double> a, std::span<const double> b, int dim);

double mat_max_abs_diff(std::span<const double> a, std::span<const double> b);

} // namespace apm
