#pragma once

#include "apm/errors.hpp"

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace apm {

inline constexpr int kMaxRank = 5;
inline constexpr int kMaxDim = 8;

/// Per-slot variance label: Co = covariant (lower index),
/// Contra = contravariant (upper index).
enum class Variance : std::uint8_t { Co, Contra };

/// Symmetric positive-definite metric at a point, paired with its inverse.
/// Construction checks exact symmetry, positive definiteness, and that
/// g * g_inv reproduces the identity to 1e-12.
class MetricAtPoint {
public:
    MetricAtPoint(int dim, std::vector<double> g);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double g(int i, int j) const { return g_[static_cast<std::size_t>(i) * dim_ + j]; }
    [[nodiscard]] double ginv(int i, int j) const { return ginv_[static_cast<std::size_t>(i) * dim_ + j]; }
    [[nodiscard]] std::span<const double> g_data() const { return g_; }
    [[nodiscard]] std::span<const double> ginv_data() const { return ginv_; }
    [[nodiscard]] double min_eigenvalue() const { return min_eig_; }

private:
    int dim_;
    std::vector<double> g_;
    std::vector<double> ginv_;
    double min_eig_;
};

/// Dense component array of a tensor at a point: rank 0..5, dim <= 8,
/// row-major in slot order, one variance label per slot.
class TensorComponents {
public:
    TensorComponents(int dim, std::vector<Variance> variance);
    TensorComponents(int dim, std::vector<Variance> variance, std::vector<double> data);

    static TensorComponents scalar(double value);

    [[nodiscard]] int rank() const { return static_cast<int>(variance_.size()); }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] Variance variance(int slot) const { return variance_[static_cast<std::size_t>(slot)]; }
    [[nodiscard]] const std::vector<Variance>& variances() const { return variance_; }

    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] std::span<double> data() { return data_; }

    [[nodiscard]] double at(std::span<const int> idx) const { return data_[flat(idx)]; }
    double& at(std::span<const int> idx) { return data_[flat(idx)]; }

    template <class... I>
    [[nodiscard]] double operator()(I... i) const {
        const std::array<int, sizeof...(I)> idx{static_cast<int>(i)...};
        return at(std::span<const int>(idx));
    }
    template <class... I>
    double& operator()(I... i) {
        const std::array<int, sizeof...(I)> idx{static_cast<int>(i)...};
        return at(std::span<const int>(idx));
    }

    /// Largest absolute entry (0 for rank-0 empty... rank 0 holds 1 entry).
    [[nodiscard]] double max_abs() const;

    /// All entries finite?
    [[nodiscard]] bool finite() const;

private:
    [[nodiscard]] std::size_t flat(std::span<const int> idx) const;

    int dim_;
    std::vector<Variance> variance_;
    std::vector<double> data_;
};

/// Contract two slots. Mixed variance is a plain trace; two covariant slots
/// contract through g_inv, two contravariant slots through g (metric
/// required in both like-variance cases).
TensorComponents contract(const TensorComponents& t, int slot_a, int slot_b,
                          const MetricAtPoint* metric = nullptr);

/// Cyclic sum over three slots: out(a,b,c) = t(a,b,c) + t(b,c,a) + t(c,a,b)
/// with the remaining slots fixed. The three slots must share a variance.
TensorComponents cyclic_sum_3(const TensorComponents& t, std::array<int, 3> slots);

/// Flip one slot's variance through the metric. Raising uses g_inv,
/// lowering uses g.
TensorComponents raise_lower(const TensorComponents& t, int slot, const MetricAtPoint& metric);

} // namespace apm
