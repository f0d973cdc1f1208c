#include "apm/rng.hpp"
#include "apm/tensor.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace apm;

namespace {

TensorComponents random_tensor(int dim, std::vector<Variance> var, SplitRng& rng) {
    TensorComponents t(dim, std::move(var));
    for (auto& v : t.data()) v = rng.uniform(-1.0, 1.0);
    return t;
}

MetricAtPoint random_metric(int dim, SplitRng& rng) {
    // A = B^T B + dim * I is comfortably positive definite.
    std::vector<double> b(static_cast<std::size_t>(dim) * dim);
    for (auto& v : b) v = rng.uniform(-1.0, 1.0);
    std::vector<double> g(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double s = (i == j) ? dim : 0.0;
            for (int k = 0; k < dim; ++k)
                s += b[static_cast<std::size_t>(k) * dim + i] * b[static_cast<std::size_t>(k) * dim + j];
            g[static_cast<std::size_t>(i) * dim + j] = s;
        }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            g[static_cast<std::size_t>(j) * dim + i] = g[static_cast<std::size_t>(i) * dim + j];
    return MetricAtPoint(dim, g);
}

} // namespace

TEST_CASE("trace of the identity (1,1) tensor is the dimension") {
    const int d = 4;
    TensorComponents delta(d, {Variance::Contra, Variance::Co});
    for (int i = 0; i < d; ++i) delta(i, i) = 1.0;
    const auto tr = contract(delta, 0, 1);
    CHECK(tr.rank() == 0);
    CHECK(tr.data()[0] == 4.0);
}

TEST_CASE("metric contracted with itself through the inverse gives the dimension") {
    const int d = 6;
    SplitRng rng(11);
    const MetricAtPoint m = random_metric(d, rng);
    TensorComponents g(d, {Variance::Co, Variance::Co});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = m.g(i, j);
    const auto tr = contract(g, 0, 1, &m);
    CHECK(tr.data()[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("like-variance contraction requires the metric") {
    TensorComponents g(4, {Variance::Co, Variance::Co});
    CHECK_THROWS_AS(contract(g, 0, 1), SpecError);
    CHECK_THROWS_AS(contract(g, 0, 7), SpecError);
    CHECK_THROWS_AS(contract(g, 1, 1), SpecError);
}

TEST_CASE("cyclic sum of the alternating rank-3 tensor in dim 3") {
    TensorComponents eps(3, {Variance::Co, Variance::Co, Variance::Co});
    eps(0, 1, 2) = 1.0;
    eps(1, 2, 0) = 1.0;
    eps(2, 0, 1) = 1.0;
    eps(0, 2, 1) = -1.0;
    eps(2, 1, 0) = -1.0;
    eps(1, 0, 2) = -1.0;
    const auto s = cyclic_sum_3(eps, {0, 1, 2});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(s(i, j, k) == 3.0 * eps(i, j, k));
}

TEST_CASE("cyclic sum against the six-permutation oracle for symmetric input") {
    const int d = 4;
    SplitRng rng(5);
    // Symmetric in the first two slots.
    TensorComponents t(d, {Variance::Co, Variance::Co, Variance::Co});
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                const double v = rng.uniform(-1.0, 1.0);
                t(i, j, k) = v;
                t(j, i, k) = v;
            }
    const auto s = cyclic_sum_3(t, {0, 1, 2});
    // For t symmetric in (0,1): cyclic sum + its (0,1)-swap = full 6-term
    // symmetrization; equivalently 2 * cyclic = sum over all 6 permutations.
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                const double all6 = t(i, j, k) + t(j, k, i) + t(k, i, j) + t(j, i, k) +
                                    t(k, j, i) + t(i, k, j);
                CHECK(s(i, j, k) + s(j, i, k) == doctest::Approx(all6).epsilon(1e-14));
            }
}

TEST_CASE("cyclic sum applied twice is three times one application") {
    const int d = 4;
    SplitRng rng(17);
    const auto t = random_tensor(d, {Variance::Co, Variance::Co, Variance::Co}, rng);
    const auto once = cyclic_sum_3(t, {0, 1, 2});
    const auto twice = cyclic_sum_3(once, {0, 1, 2});
    for (std::size_t i = 0; i < t.data().size(); ++i)
        CHECK(twice.data()[i] == doctest::Approx(3.0 * once.data()[i]).epsilon(1e-14));
}

TEST_CASE("cyclic sum is invariant under cyclic slot relabeling") {
    const int d = 3;
    SplitRng rng(23);
    const auto t = random_tensor(d, {Variance::Co, Variance::Co, Variance::Co}, rng);
    const auto a = cyclic_sum_3(t, {0, 1, 2});
    const auto b = cyclic_sum_3(t, {1, 2, 0});
    const auto c = cyclic_sum_3(t, {2, 0, 1});
    for (std::size_t i = 0; i < t.data().size(); ++i) {
        CHECK(a.data()[i] == b.data()[i]);
        CHECK(a.data()[i] == c.data()[i]);
    }
}

TEST_CASE("raise then lower restores the original") {
    const int d = 5;
    SplitRng rng(31);
    const MetricAtPoint m = random_metric(d, rng);
    const auto t = random_tensor(d, {Variance::Co, Variance::Co, Variance::Co}, rng);
    const auto up = raise_lower(t, 1, m);
    CHECK(up.variance(1) == Variance::Contra);
    const auto back = raise_lower(up, 1, m);
    for (std::size_t i = 0; i < t.data().size(); ++i)
        CHECK(std::abs(back.data()[i] - t.data()[i]) < 1e-13);
}

TEST_CASE("lowering the identity with g gives g") {
    const int d = 4;
    SplitRng rng(37);
    const MetricAtPoint m = random_metric(d, rng);
    TensorComponents delta(d, {Variance::Contra, Variance::Co});
    for (int i = 0; i < d; ++i) delta(i, i) = 1.0;
    const auto lowered = raise_lower(delta, 0, m);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) CHECK(lowered(i, j) == doctest::Approx(m.g(i, j)).epsilon(1e-14));
}

TEST_CASE("contraction commutes with raise/lower on disjoint slots") {
    const int d = 4;
    SplitRng rng(41);
    const MetricAtPoint m = random_metric(d, rng);
    const auto t =
        random_tensor(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Co}, rng);
    // Contract slots (0,1) through the metric, flip slot 3 before or after.
    const auto path1 = raise_lower(contract(t, 0, 1, &m), 1, m);
    const auto path2 = contract(raise_lower(t, 3, m), 0, 1, &m);
    for (std::size_t i = 0; i < path1.data().size(); ++i)
        CHECK(std::abs(path1.data()[i] - path2.data()[i]) < 1e-12);
}

TEST_CASE("metric construction rejects bad input") {
    CHECK_THROWS_AS(MetricAtPoint(2, std::vector<double>{1.0, 0.1, 0.2, 1.0}), NumericError);
    CHECK_THROWS_AS(MetricAtPoint(2, std::vector<double>{1.0, 2.0, 2.0, 1.0}), NumericError);
    CHECK_THROWS_AS(MetricAtPoint(2, std::vector<double>{-1.0, 0.0, 0.0, -1.0}), NumericError);
}
