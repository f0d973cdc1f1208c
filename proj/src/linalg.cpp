#include "apm/linalg.hpp"

#include "apm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace apm {

std::vector<double> mat_inverse(std::span<const double> a, int dim) {
    const int d = dim;
    std::vector<double> m(a.begin(), a.end());
    std::vector<double> inv(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) inv[i * d + i] = 1.0;

    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(m[r * d + col]) > std::abs(m[pivot * d + col])) pivot = r;
        if (m[pivot * d + col] == 0.0) throw NumericError("singular matrix");
        if (pivot != col) {
            for (int c = 0; c < d; ++c) {
                std::swap(m[pivot * d + c], m[col * d + c]);
                std::swap(inv[pivot * d + c], inv[col * d + c]);
            }
        }
        const double diag = m[col * d + col];
        for (int c = 0; c < d; ++c) {
            m[col * d + c] /= diag;
            inv[col * d + c] /= diag;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = m[r * d + col];
            if (f == 0.0) continue;
            for (int c = 0; c < d; ++c) {
                m[r * d + c] -= f * m[col * d + c];
                inv[r * d + c] -= f * inv[col * d + c];
            }
        }
    }
    return inv;
}

double mat_det(std::span<const double> a, int dim) {
    const int d = dim;
    std::vector<double> m(a.begin(), a.end());
    double det = 1.0;
    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(m[r * d + col]) > std::abs(m[pivot * d + col])) pivot = r;
        if (m[pivot * d + col] == 0.0) return 0.0;
        if (pivot != col) {
            det = -det;
            for (int c = 0; c < d; ++c) std::swap(m[pivot * d + c], m[col * d + c]);
        }
        det *= m[col * d + col];
        for (int r = col + 1; r < d; ++r) {
            const double f = m[r * d + col] / m[col * d + col];
            if (f == 0.0) continue;
            for (int c = col; c < d; ++c) m[r * d + c] -= f * m[col * d + c];
        }
    }
    return det;
}

std::vector<double> sym_eigenvalues(std::span<const double> a, int dim) {
    const int d = dim;
    std::vector<double> m(a.begin(), a.end());
    // Cyclic Jacobi sweeps; quadratic convergence, ample for d <= 8.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += m[i * d + j] * m[i * d + j];
        if (off < 1e-300) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = m[p * d + q];
                if (apq == 0.0) continue;
                const double app = m[p * d + p];
                const double aqq = m[q * d + q];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double mkp = m[k * d + p];
                    const double mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < d; ++k) {
                    const double mpk = m[p * d + k];
                    const double mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) eig[static_cast<std::size_t>(i)] = m[i * d + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> mat_mul(std::span<const double> a, std::span<const double> b, int dim) {
    const int d = dim;
    std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const double aik = a[i * d + k];
            if (aik == 0.0) continue;
            for (int j = 0; j < d; ++j) c[i * d + j] += aik * b[k * d + j];
        }
    return c;
}

double mat_max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace apm
