#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace apm {

/// Counter-based splittable generator (splitmix64 core). Every consumer of
/// randomness derives its own stream from one root seed, so results are
/// reproducible regardless of evaluation order or parallel scheduling.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : base_(seed), state_(mix_seed(seed)) {}

    /// Derive an independent stream; deterministic in (seed, stream).
    [[nodiscard]] SplitRng split(std::uint64_t stream) const {
        return SplitRng(mix_seed(base_ ^ (0xD2B74407B1CE6E93ULL * (stream + 1))));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Vector with components i.i.d. uniform on [-1, 1].
    std::vector<double> direction(int dim) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (auto& c : v) c = uniform(-1.0, 1.0);
        return v;
    }

    /// Point inside a per-coordinate box given as [lo, hi] pairs.
    std::vector<double> point_in_box(std::span<const std::array<double, 2>> box) {
        std::vector<double> p(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) p[i] = uniform(box[i][0], box[i][1]);
        return p;
    }

    [[nodiscard]] std::uint64_t seed() const { return base_; }

private:
    static std::uint64_t mix_seed(std::uint64_t s) {
        s = (s ^ (s >> 33)) * 0xFF51AFD7ED558CCDULL;
        s = (s ^ (s >> 33)) * 0xC4CEB9FE1A85EC53ULL;
        return s ^ (s >> 33);
    }

    std::uint64_t base_;
    std::uint64_t state_;
};

} // namespace apm
