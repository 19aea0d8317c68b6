#include <cmath>
#include <vector>

#include "doctest.h"

#include "ccikit/stats.hpp"
#include "test_util.hpp"

using namespace ccikit;

TEST_SUITE("stats") {

TEST_CASE("normal_cdf matches table values and is symmetric") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021049).epsilon(1e-8));
    CHECK(normal_cdf(-1.0) == doctest::Approx(0.1586552539).epsilon(1e-8));
    for (double x : {0.3, 1.7, 4.2}) CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0));
}

TEST_CASE("pearson_corr frozen value and exact extremes") {
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{1.0, 2.0, 4.0};
    CHECK(pearson_corr(x, y) == doctest::Approx(0.9819805061).epsilon(1e-9));

    std::vector<double> up{1.0, 2.0, 3.0, 4.0};
    std::vector<double> affine{3.0, 5.0, 7.0, 9.0};
    CHECK(pearson_corr(up, affine) == 1.0);  // clamped, never above 1
    std::vector<double> down{4.0, 3.0, 2.0, 1.0};
    CHECK(pearson_corr(up, down) == -1.0);

    std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
    CHECK_THROWS_AS(pearson_corr(up, flat), std::domain_error);
    CHECK_THROWS_AS(pearson_corr(x, up), std::invalid_argument);  // length mismatch
}

TEST_CASE("fisher_z frozen values") {
    CHECK(fisher_z(0.0) == 0.0);
    CHECK(fisher_z(0.5) == doctest::Approx(0.5493061443).epsilon(1e-10));
    CHECK(fisher_z(-0.9) == doctest::Approx(-1.4722194896).epsilon(1e-10));
    CHECK_THROWS_AS(fisher_z(1.0), std::domain_error);
    CHECK_THROWS_AS(fisher_z(-1.2), std::domain_error);
}

TEST_CASE("hawkins_tau2 on sign vectors is exactly one") {
    std::vector<double> x{-1.0, 1.0, -1.0, 1.0};
    std::vector<double> y{-1.0, -1.0, 1.0, 1.0};
    CHECK(hawkins_tau2(x, y) == 1.0);
}

TEST_CASE("hawkins_tau2 near one for independent standard normals") {
    testutil::Rng rng(11);
    const auto x = rng.normals(5000);
    const auto y = rng.normals(5000);
    const double t2 = hawkins_tau2(x, y);
    CHECK(t2 > 0.85);
    CHECK(t2 < 1.15);
}

TEST_CASE("hawkins_p matches the closed form") {
    // sqrt(400)*0.1 = 2 under tau2 = 1: p = 2*(1 - Phi(2)).
    CHECK(hawkins_p(0.1, 1.0, 400) == doctest::Approx(0.0455002639).epsilon(1e-7));
    CHECK(hawkins_p(0.0, 1.0, 100) == doctest::Approx(1.0));
    CHECK(hawkins_p(0.2, 1.0, 400) < hawkins_p(0.1, 1.0, 400));
    CHECK(hawkins_p(0.1, 4.0, 400) > hawkins_p(0.1, 1.0, 400));  // larger tau2, weaker evidence
    CHECK_THROWS_AS(hawkins_p(0.1, 0.0, 400), std::domain_error);
}

TEST_CASE("bh_fdr hand-worked example") {
    FdrDecision d = bh_fdr({0.001, 0.02, 0.04, 0.3}, 0.05);
    CHECK(d.reject);
    REQUIRE(d.cutoff.has_value());
    CHECK(*d.cutoff == 0.02);  // 0.04 misses 3/4*0.05 = 0.0375
}

TEST_CASE("bh_fdr edge behavior") {
    FdrDecision none = bh_fdr({0.9, 0.5, 0.7}, 0.05);
    CHECK_FALSE(none.reject);
    CHECK_FALSE(none.cutoff.has_value());

    FdrDecision all = bh_fdr({0.001, 0.002, 0.0001}, 0.05);
    CHECK(all.reject);
    CHECK(*all.cutoff == 0.002);

    // A large p-value can rescue smaller ones: step-up scans from the top.
    FdrDecision stepup = bh_fdr({0.01, 0.02, 0.03, 0.04}, 0.05);
    CHECK(stepup.reject);
    CHECK(*stepup.cutoff == 0.04);  // 0.04 <= 4/4*0.05

    CHECK_THROWS_AS(bh_fdr({}, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(bh_fdr({0.5}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(bh_fdr({1.5}, 0.05), std::invalid_argument);
}

TEST_CASE("kendall_tau frozen small case") {
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{2.0, 1.0, 3.0};
    CHECK(kendall_tau(x, y) == doctest::Approx(1.0 / 3.0));
    std::vector<double> rev{3.0, 2.0, 1.0};
    CHECK(kendall_tau(x, rev) == doctest::Approx(-1.0));
    CHECK(kendall_tau(x, x) == doctest::Approx(1.0));
}

TEST_CASE("kendall_tau rejects an all-tied vector") {
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> tied{5.0, 5.0, 5.0};
    CHECK_THROWS_WITH_AS(kendall_tau(x, tied), "all-tied vector", std::domain_error);
}

TEST_CASE("kendall_tau equals brute force on random data with ties") {
    testutil::Rng rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.index(40);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse grid forces plenty of ties.
            x[i] = static_cast<double>(rng.index(6));
            y[i] = static_cast<double>(rng.index(6));
        }
        double expected;
        try {
            expected = testutil::brute_kendall(x, y);
        } catch (const std::invalid_argument&) {
            CHECK_THROWS_AS(kendall_tau(x, y), std::domain_error);
            continue;
        }
        CHECK(kendall_tau(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

}  // TEST_SUITE
