#include "apm/tensor.hpp"

#include "apm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

namespace apm {

namespace {

std::size_t pow_dim(int dim, int rank) {
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) n *= static_cast<std::size_t>(dim);
    return n;
}

void check_shape(int dim, int rank) {
    if (dim < 1 || dim > kMaxDim)
        throw SpecError("tensor dim must be in 1.." + std::to_string(kMaxDim) +
                        ", got " + std::to_string(dim));
    if (rank < 0 || rank > kMaxRank)
        throw SpecError("tensor rank must be in 0.." + std::to_string(kMaxRank) +
                        ", got " + std::to_string(rank));
}

void check_slot(const TensorComponents& t, int slot) {
    if (slot < 0 || slot >= t.rank())
        throw SpecError("slot " + std::to_string(slot) + " out of range for rank " +
                        std::to_string(t.rank()));
}

} // namespace

MetricAtPoint::MetricAtPoint(int dim, std::vector<double> g) : dim_(dim), g_(std::move(g)) {
    check_shape(dim, 2);
    if (g_.size() != static_cast<std::size_t>(dim) * dim)
        throw SpecError("metric data length mismatch");
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (g_[static_cast<std::size_t>(i) * dim + j] != g_[static_cast<std::size_t>(j) * dim + i])
                throw NumericError("metric not exactly symmetric at (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")");
    const auto eig = sym_eigenvalues(g_, dim);
    min_eig_ = eig.front();
    if (!(min_eig_ > 0.0))
        throw NumericError("metric not positive definite: min eigenvalue " +
                           std::to_string(min_eig_));
    ginv_ = mat_inverse(g_, dim);
    // g * g_inv must reproduce the identity within 1e-12.
    const auto prod = mat_mul(g_, ginv_, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(prod[static_cast<std::size_t>(i) * dim + j] - want) > 1e-12)
                throw NumericError("metric inverse residual above 1e-12 (ill-conditioned g)");
        }
}

TensorComponents::TensorComponents(int dim, std::vector<Variance> variance)
    : dim_(dim), variance_(std::move(variance)),
      data_(pow_dim(dim, static_cast<int>(variance_.size())), 0.0) {
    check_shape(dim, rank());
}

TensorComponents::TensorComponents(int dim, std::vector<Variance> variance, std::vector<double> data)
    : dim_(dim), variance_(std::move(variance)), data_(std::move(data)) {
    check_shape(dim, rank());
    if (data_.size() != pow_dim(dim, rank())) throw SpecError("tensor data length mismatch");
}

TensorComponents TensorComponents::scalar(double value) {
    TensorComponents t(1, {});
    t.data_[0] = value;
    return t;
}

std::size_t TensorComponents::flat(std::span<const int> idx) const {
    std::size_t f = 0;
    for (std::size_t s = 0; s < idx.size(); ++s) f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[s]);
    return f;
}

double TensorComponents::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool TensorComponents::finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

TensorComponents contract(const TensorComponents& t, int slot_a, int slot_b,
                          const MetricAtPoint* metric) {
    check_slot(t, slot_a);
    check_slot(t, slot_b);
    if (slot_a == slot_b) throw SpecError("contraction slots must be distinct");
    if (slot_a > slot_b) std::swap(slot_a, slot_b);

    const bool like_variance = t.variance(slot_a) == t.variance(slot_b);
    if (like_variance && metric == nullptr)
        throw SpecError("metric required to contract two slots of equal variance");

    const int d = t.dim();
    const int r = t.rank();
    std::vector<Variance> out_var;
    for (int s = 0; s < r; ++s)
        if (s != slot_a && s != slot_b) out_var.push_back(t.variance(s));
    TensorComponents out(d, std::move(out_var));

    std::array<int, kMaxRank> idx{};
    std::array<int, kMaxRank> oidx{};
    const std::size_t out_count = out.data().size();
    for (std::size_t flat = 0; flat < out_count; ++flat) {
        std::size_t rem = flat;
        for (int s = out.rank() - 1; s >= 0; --s) {
            oidx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
            rem /= static_cast<std::size_t>(d);
        }
        // Scatter the free indices around the two contracted slots.
        int src = 0;
        for (int s = 0; s < r; ++s)
            if (s != slot_a && s != slot_b) idx[static_cast<std::size_t>(s)] = oidx[static_cast<std::size_t>(src++)];

        double sum = 0.0;
        if (!like_variance) {
            for (int m = 0; m < d; ++m) {
                idx[static_cast<std::size_t>(slot_a)] = m;
                idx[static_cast<std::size_t>(slot_b)] = m;
                sum += t.at(std::span<const int>(idx.data(), static_cast<std::size_t>(r)));
            }
        } else {
            const bool covariant = t.variance(slot_a) == Variance::Co;
            for (int m = 0; m < d; ++m) {
                idx[static_cast<std::size_t>(slot_a)] = m;
                for (int n = 0; n < d; ++n) {
                    const double w = covariant ? metric->ginv(m, n) : metric->g(m, n);
                    if (w == 0.0) continue;
                    idx[static_cast<std::size_t>(slot_b)] = n;
                    sum += w * t.at(std::span<const int>(idx.data(), static_cast<std::size_t>(r)));
                }
            }
        }
        out.data()[flat] = sum;
    }
    return out;
}

TensorComponents cyclic_sum_3(const TensorComponents& t, std::array<int, 3> slots) {
    if (t.rank() < 3) throw SpecError("cyclic sum needs rank >= 3");
    for (int s : slots) check_slot(t, s);
    if (slots[0] == slots[1] || slots[1] == slots[2] || slots[0] == slots[2])
        throw SpecError("cyclic sum slots must be distinct");

    const int d = t.dim();
    const int r = t.rank();
    TensorComponents out(d, t.variances());

    std::array<int, kMaxRank> idx{};
    std::array<int, kMaxRank> src{};
    const std::size_t count = out.data().size();
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rem = flat;
        for (int s = r - 1; s >= 0; --s) {
            idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
            rem /= static_cast<std::size_t>(d);
        }
        const int a = idx[static_cast<std::size_t>(slots[0])];
        const int b = idx[static_cast<std::size_t>(slots[1])];
        const int c = idx[static_cast<std::size_t>(slots[2])];
        src = idx;
        double sum = t.at(std::span<const int>(src.data(), static_cast<std::size_t>(r)));
        src[static_cast<std::size_t>(slots[0])] = b;
        src[static_cast<std::size_t>(slots[1])] = c;
        src[static_cast<std::size_t>(slots[2])] = a;
        sum += t.at(std::span<const int>(src.data(), static_cast<std::size_t>(r)));
        src[static_cast<std::size_t>(slots[0])] = c;
        src[static_cast<std::size_t>(slots[1])] = a;
        src[static_cast<std::size_t>(slots[2])] = b;
        sum += t.at(std::span<const int>(src.data(), static_cast<std::size_t>(r)));
        out.data()[flat] = sum;
    }
    return out;
}

TensorComponents raise_lower(const TensorComponents& t, int slot, const MetricAtPoint& metric) {
    check_slot(t, slot);
    const int d = t.dim();
    const int r = t.rank();
    const bool raising = t.variance(slot) == Variance::Co;

    std::vector<Variance> out_var = t.variances();
    out_var[static_cast<std::size_t>(slot)] = raising ? Variance::Contra : Variance::Co;
    TensorComponents out(d, std::move(out_var));

    std::array<int, kMaxRank> idx{};
    const std::size_t count = out.data().size();
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::size_t rem = flat;
        for (int s = r - 1; s >= 0; --s) {
            idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
            rem /= static_cast<std::size_t>(d);
        }
        const int i = idx[static_cast<std::size_t>(slot)];
        double sum = 0.0;
        for (int m = 0; m < d; ++m) {
            const double w = raising ? metric.ginv(i, m) : metric.g(i, m);
            if (w == 0.0) continue;
            idx[static_cast<std::size_t>(slot)] = m;
            sum += w * t.at(std::span<const int>(idx.data(), static_cast<std::size_t>(r)));
        }
        idx[static_cast<std::size_t>(slot)] = i;
        out.data()[flat] = sum;
    }
    return out;
}

} // namespace apm
