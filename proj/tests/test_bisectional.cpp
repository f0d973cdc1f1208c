#include "apm/geometry.hpp"

#include "apm/rng.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace apm;

namespace {

std::vector<double> noneigen(const PointFrame& frame, SplitRng& rng) {
    for (;;) {
        auto x = rng.direction(frame.dim);
        const auto px = apply_p(frame, x);
        const double a = inner(frame, x, x), b = inner(frame, x, px);
        if (a * a - b * b > 1e-2) return x;
    }
}

} // namespace

TEST_CASE("bisectional curvature rejects structure eigenvectors by name") {
    const auto spec = fixtures::sphere_block();
    const auto frame = frame_at(spec, std::vector<double>{0.8, 0.1, 0.2, 0.3});
    const auto conn = levi_civita(frame);
    const auto curv = curvature_package(frame, conn);
    std::vector<double> eig{1, 0, 0, 0}; // P-eigenvector
    std::vector<double> ok{1, 1, 0, 0};
    try {
        bisectional(frame, curv, eig, ok);
        CHECK(false);
    } catch (const NumericError& err) {
        CHECK(std::string(err.what()).find("first argument") != std::string::npos);
    }
    try {
        bisectional(frame, curv, ok, eig);
        CHECK(false);
    } catch (const NumericError& err) {
        CHECK(std::string(err.what()).find("second argument") != std::string::npos);
    }
}

TEST_CASE("coinciding planes give the invariant plane's sectional curvature") {
    for (const auto& spec :
         {fixtures::sphere_block(), fixtures::warped_product(), fixtures::biinvariant_w3()}) {
        for (const auto& pt : sample_points(spec, 3, 808)) {
            const auto frame = frame_at(spec, pt);
            const auto conn = levi_civita(frame);
            const auto curv = curvature_package(frame, conn);
            SplitRng rng(21);
            for (int t = 0; t < 20; ++t) {
                const auto x = noneigen(frame, rng);
                const auto px = apply_p(frame, x);
                const double h = bisectional(frame, curv, x, x);
                const double k = sectional(frame, curv, x, px);
                CHECK(std::abs(h - k) < 1e-10 * std::max(1.0, std::abs(k)));
            }
        }
    }
}

TEST_CASE("bisectional curvature is symmetric in its two planes") {
    const auto spec = fixtures::biinvariant_w3();
    const auto frame = frame_at(spec, std::vector<double>{0, 0, 0, 0});
    const auto conn = levi_civita(frame);
    const auto curv = curvature_package(frame, conn);
    SplitRng rng(34);
    for (int t = 0; t < 20; ++t) {
        const auto x = noneigen(frame, rng);
        const auto y = noneigen(frame, rng);
        CHECK(bisectional(frame, curv, x, y) ==
              doctest::Approx(bisectional(frame, curv, y, x)).epsilon(1e-12));
    }
}

TEST_CASE("in-plane reparameterization keeps the value on the positive branch") {
    const auto spec = fixtures::sphere_block();
    const auto frame = frame_at(spec, std::vector<double>{0.9, 0.4, -0.2, 0.1});
    const auto conn = levi_civita(frame);
    const auto curv = curvature_package(frame, conn);
    SplitRng rng(55);
    for (int t = 0; t < 50; ++t) {
        const auto x = noneigen(frame, rng);
        const auto y = noneigen(frame, rng);
        const double h0 = bisectional(frame, curv, x, y);
        double l1, m1, l2, m2;
        do {
            l1 = rng.uniform(-1.5, 1.5);
            m1 = rng.uniform(-1.5, 1.5);
        } while (l1 * l1 - m1 * m1 < 0.3);
        do {
            l2 = rng.uniform(-1.5, 1.5);
            m2 = rng.uniform(-1.5, 1.5);
        } while (l2 * l2 - m2 * m2 < 0.3);
        const auto px = apply_p(frame, x);
        const auto py = apply_p(frame, y);
        std::vector<double> z(4), w(4);
        for (int i = 0; i < 4; ++i) {
            z[static_cast<std::size_t>(i)] = l1 * x[static_cast<std::size_t>(i)] +
                                             m1 * px[static_cast<std::size_t>(i)];
            w[static_cast<std::size_t>(i)] = l2 * y[static_cast<std::size_t>(i)] +
                                             m2 * py[static_cast<std::size_t>(i)];
        }
        const double h1 = bisectional(frame, curv, z, w);
        CHECK(std::abs(h1 - h0) < 1e-9 * std::max(1.0, std::abs(h0)));
    }
}
