#include <doctest.h>

#include <cmath>
#include <sstream>

#include "common.hpp"
#include "oracles.hpp"
#include "urnbound/decomposition.hpp"
#include "urnbound/error.hpp"

using namespace urnbound;

namespace {
const double kLambdas[] = {-0.9, -0.5, -0.1, 0.1, 0.25, 0.5, 0.75, 0.9};
}

TEST_CASE("products match direct multiplication") {
    for (double l : kLambdas) {
        for (std::size_t n : {0u, 1u, 7u, 200u}) {
            CHECK(growth_product(l, n) == doctest::Approx(oracle::growth(l, n)).epsilon(1e-13));
            const auto t = tail_products(l, n);
            for (std::size_t j = 0; j <= n; j += 1 + n / 10) {
                CHECK(t[j] == doctest::Approx(oracle::tail(l, j, n)).epsilon(1e-13));
                CHECK(tail_product(l, j, n) == doctest::Approx(oracle::tail(l, j, n)).epsilon(1e-13));
            }
        }
    }
    CHECK(growth_product(1.0, 10) == doctest::Approx(11.0));
    CHECK_THROWS_AS(tail_product(0.5, 5, 4), UrnError);
    CHECK_THROWS_AS(growth_product(-1.0, 3), UrnError);
}

TEST_CASE("D_n recurrence matches the direct sum") {
    for (double l : kLambdas) {
        const auto series = dn_exact_series(l, 300);
        for (std::size_t n : {0u, 1u, 10u, 300u}) {
            const double ref = oracle::dn(l, n);
            CHECK(series[n] == doctest::Approx(ref).epsilon(1e-12));
            CHECK(dn_exact(l, n) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("D_n asymptotic dominates and classifies") {
    CHECK(dn_asymptotic(-0.5, 10).regime == DnRegime::Negative);
    CHECK(dn_asymptotic(0.0, 10).regime == DnRegime::Zero);
    CHECK(dn_asymptotic(0.3, 10).regime == DnRegime::Subcritical);
    CHECK(dn_asymptotic(0.5, 10).regime == DnRegime::Critical);
    CHECK(dn_asymptotic(0.8, 10).regime == DnRegime::Supercritical);
    for (double l : kLambdas) {
        const auto series = dn_exact_series(l, 5000);
        for (std::size_t n : {1u, 17u, 1000u, 5000u}) CHECK(dn_asymptotic(l, n).value >= series[n]);
    }
}

TEST_CASE("euler ratio against lgamma") {
    for (double l : kLambdas) {
        for (std::size_t n : {10u, 1000u, 100000u}) {
            CHECK(euler_ratio(l, n) == doctest::Approx(oracle::euler_ratio(l, n)).epsilon(1e-9));
        }
    }
}

TEST_CASE("jordan weights: collapse vs definition") {
    for (double l : kLambdas) {
        const std::size_t n = 120;
        const auto k = jordan_weights(l, n);
        for (std::size_t i = 0; i <= n; i += 7) {
            const double ref = oracle::jordan_weight(l, i, n);
            CHECK(k[i] == doctest::Approx(ref).epsilon(1e-12));
            CHECK(jordan_weight(l, i, n) == doctest::Approx(ref).epsilon(1e-12));
            if (i >= 1) CHECK(k[i] <= jordan_weight_constant(l) * jordan_weight_bound(l, i, n) * (1 + 1e-12));
        }
        CHECK(k[n] == 0.0);
    }
    CHECK_THROWS_AS(jordan_weight(0.0, 1, 3), UrnError);
    CHECK_THROWS_AS(jordan_weight_bound(0.5, 0, 3), UrnError);
}

TEST_CASE("jordan zeroth coefficient against two oracles") {
    for (double l : kLambdas) {
        for (std::size_t n : {0u, 1u, 2u, 3u, 50u, 400u}) {
            CHECK(appendix_zeroth(l, n) == doctest::Approx(oracle::jordan_zeroth(l, n)).epsilon(1e-12));
            CHECK(appendix_zeroth(l, n) == doctest::Approx(oracle::jordan_zeroth_recurrence(l, n)).epsilon(1e-12));
        }
    }
    // λ = 0 is the harmonic number H_{n+1}.
    double h = 0.0;
    for (int k = 1; k <= 11; ++k) h += 1.0 / k;
    CHECK(jordan_zeroth_coefficient(0.0, 10) == doctest::Approx(h).epsilon(1e-14));
}

TEST_CASE("eigen expansion reconstructs the statistic") {
    const auto r = fixture::two_color();
    const auto s = decompose_spectrum(r);
    const auto& rv = s.right_vectors[0];
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto traj = simulate(make_initial({1.0, 0.0}), r, 2000, seed, {0, false});
        const auto e = martingale_decompose(traj, rv.vec, rv.lambda);
        CHECK(e.relative_residual() <= 1e-12);
        CHECK(e.direct == doctest::Approx(traj.final_counts().dot(rv.vec)).epsilon(1e-12));
        CHECK(e.weights.size() == 2000);
    }
    const auto traj = simulate(make_initial({1.0, 0.0}), r, 10, 1);
    CHECK_THROWS_AS(martingale_decompose(traj, Vector::Ones(2), 0.3), UrnError);

    std::ostringstream os;
    write_expansion_csv(os, martingale_decompose(traj, rv.vec, rv.lambda));
    CHECK(os.str().rfind("j,weight,increment,partial_sum\n", 0) == 0);
}

TEST_CASE("jordan expansion reconstructs the tail statistic") {
    const auto r = fixture::jordan();
    const auto pair = jordan_chain(r, 0.25);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto traj = simulate(make_initial({0.0, 0.5, 0.5}), r, 1000, seed, {0, false});
        const auto e = jordan_decompose(traj, pair.head, pair.tail, 0.25);
        CHECK(e.relative_residual() <= 1e-12);
        CHECK(e.zeroth_xi2 ==
              doctest::Approx(oracle::jordan_zeroth(0.25, 999) * traj.initial.counts.dot(pair.head)).epsilon(1e-12));
    }
    const auto traj = simulate(make_initial({1.0, 0.0, 0.0}), r, 10, 1);
    CHECK_THROWS_AS(jordan_decompose(traj, pair.tail, pair.head, 0.25), UrnError);
}

TEST_CASE("repeated zero eigenvalue") {
    // R = 1π + uvᵀ/6 with u = (1,-1,0), v = (1,1,-2): (uvᵀ)² = 0, so 0 is a 2-block.
    const auto r = validate_matrix({{0.5, 0.5, 0}, {1.0 / 6, 1.0 / 6, 2.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
    const auto pair = jordan_chain(r, 0.0);
    const auto traj = simulate(make_initial({1.0, 0.0, 0.0}), r, 500, 3, {0, false});
    const auto e = repeated_zero_decompose(traj, pair.head, pair.tail);
    CHECK(e.relative_residual() <= 1e-12);
    CHECK(e.nested_weights.empty());
}

TEST_CASE("martingale property along trajectories") {
    const auto r = fixture::jordan();
    const auto pair = jordan_chain(r, 0.25);
    const auto traj = simulate(make_initial({1.0, 0.0, 0.0}), r, 300, 8, {0, false});
    for (double m : increment_conditional_means(traj, pair.head, 0.25)) CHECK(std::abs(m) <= 1e-12);
    for (double m : dm_conditional_drifts(traj, pair.head, pair.tail, 0.25)) CHECK(std::abs(m) <= 1e-12);
    const auto series = dm_martingale(traj, pair.head, pair.tail, 0.25);
    CHECK(series.values.size() == 301);
    CHECK(series.normalizers[300] == doctest::Approx(oracle::growth(0.25, 300)).epsilon(1e-13));
}

TEST_CASE("analytic constant covers K(i,n) for every 1 <= i <= n <= 10^4") {
    for (double l : kLambdas) {
        const double c = jordan_weight_constant(l);
        double worst = 0.0;
        for (std::size_t n = 1; n <= 10000; n += (n < 200 ? 1 : 37)) {
            const auto k = jordan_weights(l, n);
            for (std::size_t i = 1; i <= n; ++i) worst = std::max(worst, k[i] / (c * jordan_weight_bound(l, i, n)));
        }
        CHECK(worst <= 1.0 + 1e-12);
    }
}
