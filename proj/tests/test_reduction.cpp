#include <doctest.h>

#include <cmath>
#include <random>

#include "relnet/reduction.hpp"
#include "testnets.hpp"

using namespace relnet;

TEST_CASE("ld_levels matches hand-computed floor log magnitudes") {
    CHECK(ld_levels({2.2, 0.0}) == 2);
    CHECK(ld_levels({2.5, 0.0}) == 2);
    CHECK(ld_levels({1.8, 0.0}) == 1);
    CHECK(ld_levels({1.5, 0.0}) == 1);
    CHECK(ld_levels({0.5, 0.0}) == 0);   // clamped
    CHECK(ld_levels({3.0, 4.0}) == 4);   // |h|^2 = 25
    CHECK(ld_levels({0.0, 0.0}) == 0);   // zero gain passes nothing
    CHECK(ld_levels({0.0, -2.0}) == 2);
    CHECK(ld_levels({1073741824.0, 0.0}) == 60);  // 2^30
}

TEST_CASE("floor_log2_abs2 is exact at and around powers of two") {
    CHECK(floor_log2_abs2({2.0, 0.0}) == 2);
    CHECK(floor_log2_abs2({std::nextafter(2.0, 0.0), 0.0}) == 1);
    CHECK(floor_log2_abs2({2.0, 2.0}) == 3);
    CHECK(floor_log2_abs2({1.0, 1e-200}) == 0);

    // a tiny imaginary part can push the sum across a power of two: the
    // aligned-integer carry test must see it even when the squares are more
    // than 20 binary orders apart
    const double just_under_one = 1.0 - std::ldexp(1.0, -53);
    CHECK(floor_log2_abs2({just_under_one, std::ldexp(1.0, -20)}) == 0);
    CHECK(floor_log2_abs2({just_under_one, std::ldexp(1.0, -27)}) == -1);

    CHECK_THROWS_AS(floor_log2_abs2({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("exact level computation agrees with the floating-point floor") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mag(-40.0, 40.0);
    for (int i = 0; i < 5000; ++i) {
        const ComplexGain h{std::exp2(mag(rng) / 2.0),
                            std::exp2(mag(rng) / 2.0)};
        const double s = h.real() * h.real() + h.imag() * h.imag();
        const double l = std::log2(s);
        if (std::fabs(l - std::round(l)) < 1e-12) continue;  // near a tie
        CHECK(floor_log2_abs2(h) == int(std::floor(l)));
    }
}

TEST_CASE("ld_reduce of the small mimo example") {
    const auto ld = ld_reduce(testnets::small_mimo());
    CHECK(ld.q == 2);
    REQUIRE(ld.edges.size() == 4);
    CHECK(ld.edges[0].levels == 2);
    CHECK(ld.edges[1].levels == 2);
    CHECK(ld.edges[2].levels == 1);
    CHECK(ld.edges[3].levels == 1);
    CHECK(ld.edges[0].from == 0);
    CHECK(ld.edges[0].to == 2);
}

TEST_CASE("ld_reduce collapses all-weak networks to nothing") {
    const auto net =
        make_network(3, {{0, 1, {0.9, 0.0}}, {1, 2, {0.5, 0.5}}});
    const auto ld = ld_reduce(net);
    CHECK(ld.q == 0);
    for (const auto& e : ld.edges) CHECK(e.levels == 0);
}

TEST_CASE("ld_reduce is blind to gain phase") {
    const auto base = testnets::two_layer({8, 0}, {-8, 0}, {8, 0}, {8, 0});
    // rotating any gain by a quarter turn keeps |h|^2 bit-exact
    auto rotated = base;
    for (auto& e : rotated.edges)
        e.gain = ComplexGain{-e.gain.imag(), e.gain.real()};
    auto negated = base;
    for (auto& e : negated.edges) e.gain = -e.gain;

    const auto a = ld_reduce(base);
    const auto b = ld_reduce(rotated);
    const auto c = ld_reduce(negated);
    CHECK(a.q == b.q);
    CHECK(a.q == c.q);
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].levels == b.edges[i].levels);
        CHECK(a.edges[i].levels == c.edges[i].levels);
    }
}

TEST_CASE("ds_reduce truncates gains toward zero and sizes the alphabet") {
    SUBCASE("mixed-sign complex gain") {
        const auto net = make_network(2, {{0, 1, {2.7, -3.9}}});
        const auto ds = ds_reduce(net);
        CHECK(ds.edges[0].qgain == GaussianInteger{2, -3});
        CHECK(ds.n == 1);  // floor log2 3.9 = 1
    }
    SUBCASE("sub-unity gain truncates to zero but keeps the edge") {
        const auto net = make_network(2, {{0, 1, {0.9, 0.4}}});
        const auto ds = ds_reduce(net);
        CHECK(ds.edges[0].qgain == GaussianInteger{0, 0});
        CHECK(ds.n == 1);  // clamped floor
    }
    SUBCASE("two-layer bank with gain magnitude 8") {
        const auto net = testnets::bank2x2({8, 0}, {-8, 0}, {8, 0}, {8, 0});
        const auto ds = ds_reduce(net);
        CHECK(ds.n == 3);
        CHECK(ds.edges[0].qgain == GaussianInteger{8, 0});
        CHECK(ds.edges[1].qgain == GaussianInteger{-8, 0});
        CHECK(ds.edges[2].qgain == GaussianInteger{8, 0});
        CHECK(ds.edges[3].qgain == GaussianInteger{8, 0});
    }
    SUBCASE("sign flips survive, unlike the linear deterministic map") {
        const auto plus = ds_reduce(make_network(2, {{0, 1, {8.0, 0.0}}}));
        const auto minus = ds_reduce(make_network(2, {{0, 1, {-8.0, 0.0}}}));
        CHECK(plus.edges[0].qgain == GaussianInteger{8, 0});
        CHECK(minus.edges[0].qgain == GaussianInteger{-8, 0});
        CHECK(!(plus.edges[0].qgain == minus.edges[0].qgain));
    }
}

TEST_CASE("ds_quantize_input keeps the leading fraction bits") {
    CHECK(ds_quantize_input(0.6875, 2).re_bits == 2);  // 0.1011 -> 0.10
    CHECK(ds_quantize_input(0.0, 5).re_bits == 0);
    // 1 - 2^-7 at four bits keeps 0.1111
    CHECK(ds_quantize_input(1.0 - std::ldexp(1.0, -7), 4).re_bits == 15);
    CHECK_THROWS_AS(ds_quantize_input(1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(ds_quantize_input(-0.1, 3), std::invalid_argument);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng);
        const int n = 1 + int(rng() % 12);
        const DSInput q = ds_quantize_input(x, n);
        const double v = std::ldexp(double(q.re_bits), -n);
        CHECK(v <= x);
        CHECK(x - v < std::ldexp(1.0, -n));
        CHECK(q.im_bits == 0);
    }
}

TEST_CASE("ds_transmit floors each link product exactly") {
    SUBCASE("single real link") {
        DiscreteSuperpositionNetwork ds{2, 2, {{0, 1, {5, 0}}}};
        const auto y = ds_transmit(ds, 1, {{0, {3, 0}}});  // 5 * 0.75
        CHECK(y == GaussianInteger{3, 0});
    }
    SUBCASE("negative gain floors toward minus infinity") {
        DiscreteSuperpositionNetwork ds{2, 1, {{0, 1, {-3, 0}}}};
        const auto y = ds_transmit(ds, 1, {{0, {1, 0}}});  // -3 * 0.5
        CHECK(y == GaussianInteger{-2, 0});
    }
    SUBCASE("two links sum after flooring") {
        DiscreteSuperpositionNetwork ds{3, 2, {{0, 2, {4, 0}}, {1, 2, {4, 0}}}};
        const auto y = ds_transmit(ds, 2, {{0, {1, 0}}, {1, {3, 0}}});
        CHECK(y == GaussianInteger{4, 0});
    }
    SUBCASE("complex product floors per component") {
        // (2 - 3i)(0.75 + 0.5i) = 3 - 1.25i
        DiscreteSuperpositionNetwork ds{2, 2, {{0, 1, {2, -3}}}};
        const auto y = ds_transmit(ds, 1, {{0, {3, 2}}});
        CHECK(y == GaussianInteger{3, -2});
    }
    SUBCASE("missing in-neighbor input is an error") {
        DiscreteSuperpositionNetwork ds{3, 2, {{0, 2, {4, 0}}, {1, 2, {4, 0}}}};
        CHECK_THROWS_AS(ds_transmit(ds, 2, {{0, {1, 0}}}),
                        std::invalid_argument);
        // inputs only needed for in-neighbors of the queried receiver
        DiscreteSuperpositionNetwork chain{3, 2,
                                           {{0, 1, {4, 0}}, {1, 2, {4, 0}}}};
        CHECK_NOTHROW(ds_transmit(chain, 1, {{0, {1, 0}}}));
    }
}

TEST_CASE("per-link truncation error stays inside a unit box") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 3000; ++i) {
        const int n = 1 + int(rng() % 10);
        const GaussianInteger g{std::int64_t(rng() % 2001) - 1000,
                                std::int64_t(rng() % 2001) - 1000};
        const std::int64_t xr = std::int64_t(rng() % (1ull << n));
        const std::int64_t xi = std::int64_t(rng() % (1ull << n));
        DiscreteSuperpositionNetwork ds{2, n, {{0, 1, g}}};
        const auto y = ds_transmit(ds, 1, {{0, {xr, xi}}});
        // exact product numerators over 2^n
        const std::int64_t pr = g.re * xr - g.im * xi;
        const std::int64_t pi = g.re * xi + g.im * xr;
        const std::int64_t sc = std::int64_t{1} << n;
        CHECK(pr - y.re * sc >= 0);
        CHECK(pr - y.re * sc < sc);
        CHECK(pi - y.im * sc >= 0);
        CHECK(pi - y.im * sc < sc);
    }
}
