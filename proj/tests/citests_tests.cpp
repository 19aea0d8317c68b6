#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccikit/citests.hpp"
#include "ccikit/dataset.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ccikit;

namespace {

Dataset make_data(std::vector<std::vector<double>> cols) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < cols.size(); ++i) names.push_back("v" + std::to_string(i));
    return Dataset(std::move(names), std::move(cols));
}

}  // namespace

TEST_SUITE_BEGIN("citests");

TEST_CASE("basis evaluation: powers and hermite recurrence") {
    CHECK(eval_basis({BasisFunction::Kind::power, 1}, 2.0) == doctest::Approx(2.0));
    CHECK(eval_basis({BasisFunction::Kind::power, 3}, 2.0) == doctest::Approx(8.0));
    CHECK(eval_basis({BasisFunction::Kind::power, 7}, -1.5) == doctest::Approx(-17.0859375));
    // H_1(x) = 2x, then the physicists' recurrence.
    CHECK(eval_basis({BasisFunction::Kind::hermite, 1}, 1.7) == doctest::Approx(3.4));
    CHECK(eval_basis({BasisFunction::Kind::hermite, 2}, 1.5) == doctest::Approx(7.0));
    CHECK(eval_basis({BasisFunction::Kind::hermite, 3}, 2.0) == doctest::Approx(40.0));
    CHECK(eval_basis({BasisFunction::Kind::hermite, 4}, 1.0) == doctest::Approx(-20.0));
    CHECK_THROWS_AS(eval_basis({BasisFunction::Kind::power, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_basis({BasisFunction::Kind::hermite, -2}, 1.0), std::invalid_argument);
}

TEST_CASE("basis factories") {
    const BasisSpec p = BasisSpec::power();
    REQUIRE(p.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(p.functions[i].kind == BasisFunction::Kind::power);
        CHECK(p.functions[i].degree == static_cast<int>(i) + 1);
    }
    const BasisSpec h = BasisSpec::hermite(3);
    REQUIRE(h.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(h.functions[i].kind == BasisFunction::Kind::hermite);
        CHECK(h.functions[i].degree == static_cast<int>(i) + 1);
    }
    CHECK_THROWS_WITH_AS(BasisSpec::power(0), "basis needs at least one function",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(BasisSpec::hermite(-1), "basis needs at least one function",
                         std::invalid_argument);
}

TEST_CASE("unconditional cci rejects bad arguments") {
    std::vector<double> x(30), y(30), shorty(29);
    testutil::Rng rng(7);
    for (auto* v : {&x, &y}) for (double& e : *v) e = rng.normal();
    for (double& e : shorty) e = rng.normal();
    const BasisSpec basis = BasisSpec::power();
    CHECK_THROWS_WITH_AS(independent_unconditional(x, shorty, 0.05, basis), "length mismatch",
                         std::invalid_argument);
    std::vector<double> tiny(19, 0.0), tiny2(19, 0.0);
    CHECK_THROWS_WITH_AS(independent_unconditional(tiny, tiny2, 0.05, basis),
                         "cci needs at least 20 samples", std::invalid_argument);
    CHECK_THROWS_WITH_AS(independent_unconditional(x, y, 0.05, BasisSpec{}), "empty basis",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(independent_unconditional(x, y, 0.0, basis), "alpha must be in (0, 1)",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(independent_unconditional(x, y, 1.0, basis), "alpha must be in (0, 1)",
                         std::invalid_argument);
    // Exactly 20 samples is accepted.
    std::vector<double> a(20), b(20);
    for (std::size_t i = 0; i < 20; ++i) {
        a[i] = static_cast<double>(i);
        b[i] = rng.normal();
    }
    CHECK_NOTHROW(independent_unconditional(a, b, 0.05, basis));
}

TEST_CASE("degenerate input yields the all-ones independent verdict") {
    std::vector<double> x(30, 3.25), y(30);
    std::iota(y.begin(), y.end(), 0.0);
    const auto d = independent_unconditional(x, y, 0.05, BasisSpec::power());
    CHECK(d.independent);
    CHECK(!d.p_value.has_value());
    REQUIRE(d.detail.size() == 49);
    for (double p : d.detail) CHECK(p == 1.0);
}

TEST_CASE("degenerate transformed columns contribute p = 1") {
    // x alternates -1, +1 so every even power is constant while odd powers
    // reproduce x itself; the linear pair still nails y = x.
    std::vector<double> x(40);
    for (std::size_t i = 0; i < 40; ++i) x[i] = (i % 2 == 0) ? -1.0 : 1.0;
    const std::vector<double> y = x;
    const auto d = independent_unconditional(x, y, 0.05, BasisSpec::power());
    REQUIRE(d.detail.size() == 49);
    CHECK(!d.independent);
    CHECK(d.detail[0] < 1e-8);          // (x^1, y^1)
    CHECK(d.detail[1 * 7 + 0] == 1.0);  // x^2 row
    CHECK(d.detail[3 * 7 + 0] == 1.0);  // x^4 row
    CHECK(d.detail[5 * 7 + 2] == 1.0);  // x^6 row
}

TEST_CASE("identical variables are declared dependent with a vanishing linear p") {
    testutil::Rng rng(11);
    std::vector<double> x = rng.normals(200);
    const auto d = independent_unconditional(x, x, 0.05, BasisSpec::power());
    CHECK(!d.independent);
    REQUIRE(d.detail.size() == 49);
    CHECK(d.detail[0] < 1e-12);
}

TEST_CASE("quadratic blind spot is detected as dependent") {
    int dependent = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testutil::Rng rng(900 + seed);
        std::vector<double> x(1000), y(1000);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.normal();
            y[i] = x[i] * x[i] + rng.normal();
        }
        CHECK(std::abs(testutil::corr_of(x, y)) < 0.2);
        if (!independent_unconditional(x, y, 0.01, BasisSpec::power()).independent) ++dependent;
    }
    CHECK(dependent >= 95);
}

TEST_CASE("independent gaussian copies are rarely declared dependent") {
    int independent = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testutil::Rng rng(5000 + seed);
        std::vector<double> x = rng.normals(500);
        std::vector<double> y = rng.normals(500);
        if (independent_unconditional(x, y, 0.01, BasisSpec::power()).independent) ++independent;
    }
    CHECK(independent >= 95);
}

TEST_CASE("hermite basis also flags the blind spot") {
    testutil::Rng rng(42);
    std::vector<double> x(600), y(600);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = x[i] * x[i] + rng.normal();
    }
    CHECK(!independent_unconditional(x, y, 0.01, BasisSpec::hermite()).independent);
}

TEST_CASE("verdict is invariant to the order of basis functions") {
    testutil::Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(150), y(150);
        const double slope = (rep % 2 == 0) ? 0.0 : 0.25;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.normal();
            y[i] = slope * x[i] * x[i] + rng.normal();
        }
        BasisSpec forward = BasisSpec::power();
        BasisSpec reversed = forward;
        std::reverse(reversed.functions.begin(), reversed.functions.end());
        const auto a = independent_unconditional(x, y, 0.05, forward);
        const auto b = independent_unconditional(x, y, 0.05, reversed);
        CHECK(a.independent == b.independent);
        auto pa = a.detail;
        auto pb = b.detail;
        std::sort(pa.begin(), pa.end());
        std::sort(pb.begin(), pb.end());
        CHECK(pa == pb);
    }
}

TEST_CASE("early exit implies the default-mode dependent verdict") {
    testutil::Rng rng(31);
    int exits = 0;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> x(120), y(120);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.normal();
            y[i] = 0.35 * x[i] + rng.normal();
        }
        const auto fast = independent_unconditional(x, y, 0.05, BasisSpec::power(), true);
        const auto full = independent_unconditional(x, y, 0.05, BasisSpec::power(), false);
        if (!fast.independent) {
            ++exits;
            CHECK(!full.independent);
            CHECK(fast.detail.size() <= full.detail.size());
        } else {
            // No early return means the full pair grid was evaluated.
            CHECK(fast.detail == full.detail);
            CHECK(fast.independent == full.independent);
        }
    }
    CHECK(exits > 0);  // the weak-signal design must trigger at least once
}

TEST_CASE("cci argument checks") {
    testutil::Rng rng(3);
    Dataset data = make_data({rng.normals(50), rng.normals(50), rng.normals(50)});
    const BasisSpec basis = BasisSpec::power();
    CHECK_THROWS_WITH_AS(cci(1, 1, {}, 0.05, basis, data), "x and y must differ",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(cci(0, 1, {1, 2}, 0.05, basis, data),
                         "x and y may not appear in z", std::invalid_argument);
    Dataset small = make_data({rng.normals(19), rng.normals(19)});
    CHECK_THROWS_WITH_AS(cci(0, 1, {}, 0.05, basis, small), "cci needs at least 20 samples",
                         std::invalid_argument);
}

TEST_CASE("cci with an empty conditioning set equals the unconditional core") {
    testutil::Rng rng(23);
    std::vector<double> x(80), y(80);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = 0.5 * x[i] + rng.normal();
    }
    Dataset data = make_data({x, y});
    const auto via_cci = cci(0, 1, {}, 0.05, BasisSpec::power(), data);
    const auto direct = independent_unconditional(x, y, 0.05, BasisSpec::power());
    CHECK(via_cci.independent == direct.independent);
    CHECK(via_cci.detail == direct.detail);
}

TEST_CASE("functional copies of the conditioning variable regress to exact zeros") {
    // Two tight clusters: every point's kernel window is exactly its own
    // cluster, so residuals of x = y = z on z vanish identically.
    std::vector<double> z;
    for (int i = 0; i < 15; ++i) z.push_back(0.0);
    for (int i = 0; i < 15; ++i) z.push_back(10.0);
    Dataset data = make_data({z, z, z});
    const auto d = cci(0, 1, {2}, 0.05, BasisSpec::power(), data);
    CHECK(d.independent);
    REQUIRE(d.detail.size() == 49);
    for (double p : d.detail) CHECK(p == 1.0);
}

TEST_CASE("log-cosh chain: conditioning on the middle node removes dependence") {
    int cond_independent = 0;
    int marg_dependent = 0;
    const int reps = 40;
    for (std::uint64_t seed = 0; seed < reps; ++seed) {
        testutil::Rng rng(7100 + seed);
        const std::size_t n = 600;
        std::vector<double> x(n), m(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(-3.0, 3.0);
            m[i] = std::log(std::cosh(x[i])) + rng.uniform(-1.0, 1.0);
            y[i] = std::log(std::cosh(m[i])) + rng.uniform(-1.0, 1.0);
        }
        Dataset data = make_data({x, m, y});
        if (cci(0, 2, {1}, 0.01, BasisSpec::power(), data).independent) ++cond_independent;
        if (!cci(0, 2, {}, 0.01, BasisSpec::power(), data).independent) ++marg_dependent;
    }
    CHECK(cond_independent >= 30);
    CHECK(marg_dependent >= 32);
}

TEST_CASE("partial correlation closed forms") {
    Eigen::MatrixXd c2(2, 2);
    c2 << 1.0, 0.62, 0.62, 1.0;
    CHECK(partial_correlation(c2, 0, 1, {}) == doctest::Approx(0.62).epsilon(1e-12));

    Eigen::MatrixXd c3 = Eigen::MatrixXd::Constant(3, 3, 0.5);
    c3.diagonal().setOnes();
    CHECK(partial_correlation(c3, 0, 1, {2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    CHECK(partial_correlation(id, 0, 3, {1, 2}) == doctest::Approx(0.0));
}

TEST_CASE("partial correlation rejects bad arguments and singular submatrices") {
    Eigen::MatrixXd c3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_WITH_AS(partial_correlation(c3, 0, 0, {}), "x and y must differ",
                         std::invalid_argument);
    CHECK_THROWS_AS(partial_correlation(c3, 0, 5, {}), std::out_of_range);
    CHECK_THROWS_AS(partial_correlation(c3, 0, 1, {7}), std::out_of_range);
    CHECK_THROWS_WITH_AS(partial_correlation(c3, 0, 1, {0}), "x and y may not appear in s",
                         std::invalid_argument);
    Eigen::MatrixXd rect(2, 3);
    rect.setZero();
    CHECK_THROWS_WITH_AS(partial_correlation(rect, 0, 1, {}),
                         "correlation matrix must be square", std::invalid_argument);

    Eigen::MatrixXd sing(3, 3);
    sing << 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_WITH_AS(partial_correlation(sing, 0, 2, {1}),
                         "rank-deficient conditioning set", std::runtime_error);
}

TEST_CASE("fisher z test nails a strong linear dependence") {
    testutil::Rng rng(101);
    const std::size_t n = 1000;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal();
        y[i] = 0.9 * x[i] + std::sqrt(1.0 - 0.81) * rng.normal();
    }
    Dataset data = make_data({x, y});
    const auto d = fisher_z_test(0, 1, {}, 0.01, data);
    CHECK(!d.independent);
    REQUIRE(d.p_value.has_value());
    CHECK(*d.p_value < 1e-6);
    CHECK(d.detail.empty());
}

TEST_CASE("fisher z test misses the quadratic blind spot") {
    testutil::Rng rng(55);
    const std::size_t n = 1000;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal();
        y[i] = x[i] * x[i] + rng.normal();
    }
    Dataset data = make_data({x, y});
    CHECK(fisher_z_test(0, 1, {}, 0.01, data).independent);
    // ... while the basis expansion sees right through it on the same data.
    CHECK(!cci(0, 1, {}, 0.01, BasisSpec::power(), data).independent);
}

TEST_CASE("fisher z test separates a common cause") {
    testutil::Rng rng(77);
    const std::size_t n = 2000;
    std::vector<double> z(n), x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = rng.normal();
        x[i] = z[i] + 0.5 * rng.normal();
        y[i] = z[i] + 0.5 * rng.normal();
    }
    Dataset data = make_data({x, y, z});
    CHECK(!fisher_z_test(0, 1, {}, 0.01, data).independent);
    CHECK(fisher_z_test(0, 1, {2}, 0.01, data).independent);
}

TEST_CASE("fisher z preconditions") {
    testutil::Rng rng(5);
    Dataset data = make_data({rng.normals(4), rng.normals(4), rng.normals(4)});
    CHECK_THROWS_WITH_AS(fisher_z_test(0, 1, {2}, 0.05, data),
                         "sample size must exceed conditioning size plus three",
                         std::invalid_argument);
    CHECK_NOTHROW(fisher_z_test(0, 1, {}, 0.05, data));
    CHECK_THROWS_WITH_AS(fisher_z_test(1, 1, {}, 0.05, data), "x and y must differ",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(fisher_z_test(0, 1, {0}, 0.05, data),
                         "x and y may not appear in the conditioning set", std::invalid_argument);
}

TEST_CASE("fisher z false positive rate is near alpha") {
    int rejected = 0;
    const int reps = 1000;
    for (std::uint64_t seed = 0; seed < reps; ++seed) {
        testutil::Rng rng(40000 + seed);
        Dataset data = make_data({rng.normals(200), rng.normals(200)});
        if (!fisher_z_test(0, 1, {}, 0.05, data).independent) ++rejected;
    }
    // Binomial(1000, 0.05): mean 50, sd ~6.9.
    CHECK(rejected > 15);
    CHECK(rejected < 90);
}

TEST_CASE("rank test is invariant under strictly monotone transforms") {
    testutil::Rng rng(202);
    const std::size_t n = 120;
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = rng.normal();
        x[i] = z[i] + rng.normal();
        y[i] = z[i] + rng.normal();
    }
    std::vector<double> ex(n), y3(n), az(n);
    for (std::size_t i = 0; i < n; ++i) {
        ex[i] = std::exp(x[i]);
        y3[i] = y[i] * y[i] * y[i];
        az[i] = std::atan(z[i]);
    }
    Dataset raw = make_data({x, y, z});
    Dataset warped = make_data({ex, y3, az});
    for (const std::vector<std::size_t>& s : {std::vector<std::size_t>{}, {2}}) {
        const auto a = rank_partial_test(0, 1, s, 0.05, raw);
        const auto b = rank_partial_test(0, 1, s, 0.05, warped);
        CHECK(a.independent == b.independent);
        REQUIRE(a.p_value.has_value());
        REQUIRE(b.p_value.has_value());
        // Kendall's tau only looks at orderings, so the p-values agree exactly.
        CHECK(*a.p_value == *b.p_value);
    }
}

TEST_CASE("rank test flags a monotone nonlinear dependence") {
    testutil::Rng rng(303);
    const std::size_t n = 300;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal();
        y[i] = std::exp(x[i]);
    }
    Dataset data = make_data({x, y});
    const auto d = rank_partial_test(0, 1, {}, 0.01, data);
    CHECK(!d.independent);
    CHECK(*d.p_value < 1e-10);
}

TEST_CASE("rank test regularizes an exactly singular tau matrix") {
    // y = x and z = -x give pairwise tau of exactly +-1, so the sin-transformed
    // matrix is rank one; the smallest epsilon nudge already succeeds and the
    // regularized partial correlation comes out at 1/(2 + eps).
    const std::size_t n = 30;
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i + 1);
        y[i] = x[i];
        z[i] = -x[i];
    }
    Dataset data = make_data({x, y, z});
    const auto d = rank_partial_test(0, 1, {2}, 0.05, data);
    REQUIRE(d.p_value.has_value());
    CHECK(*d.p_value == doctest::Approx(0.005095671572207).epsilon(1e-9));
    CHECK(!d.independent);
}

TEST_CASE("rank test false positive rate is controlled") {
    int rejected = 0;
    const int reps = 300;
    for (std::uint64_t seed = 0; seed < reps; ++seed) {
        testutil::Rng rng(60000 + seed);
        Dataset data = make_data({rng.normals(200), rng.normals(200)});
        if (!rank_partial_test(0, 1, {}, 0.01, data).independent) ++rejected;
    }
    CHECK(rejected <= 12);
}

TEST_CASE("rank test preconditions") {
    testutil::Rng rng(6);
    Dataset data = make_data({rng.normals(3), rng.normals(3)});
    CHECK_THROWS_WITH_AS(rank_partial_test(0, 1, {}, 0.05, data),
                         "sample size must exceed conditioning size plus three",
                         std::invalid_argument);
    std::vector<double> flat(30, 1.0);
    Dataset tied = make_data({flat, rng.normals(30)});
    CHECK_THROWS_AS(rank_partial_test(0, 1, {}, 0.05, tied), std::domain_error);
}

TEST_CASE("all tests are symmetric in x and y") {
    testutil::Rng rng(404);
    const std::size_t n = 120;
    std::vector<std::vector<double>> cols;
    for (int c = 0; c < 5; ++c) cols.push_back(rng.normals(n));
    for (std::size_t i = 0; i < n; ++i) cols[3][i] = 0.4 * cols[0][i] + cols[3][i];
    Dataset data = make_data(std::move(cols));

    const CciTest cci_test(0.05);
    const FisherZTest fz(0.05);
    const RankPartialTest rank(0.05);
    int checked = 0;
    for (std::uint64_t trial = 0; trial < 120; ++trial) {
        testutil::Rng pick(9000 + trial);
        std::vector<std::size_t> vars = {0, 1, 2, 3, 4};
        for (std::size_t i = 0; i < vars.size(); ++i)
            std::swap(vars[i], vars[i + pick.index(vars.size() - i)]);
        const std::size_t x = vars[0], y = vars[1];
        const std::vector<std::size_t> z(vars.begin() + 2, vars.begin() + 2 + pick.index(3));

        const auto c1 = cci_test.independent(x, y, z, data);
        const auto c2 = cci_test.independent(y, x, z, data);
        CHECK(c1.independent == c2.independent);
        auto d1 = c1.detail;
        auto d2 = c2.detail;
        std::sort(d1.begin(), d1.end());
        std::sort(d2.begin(), d2.end());
        CHECK(d1 == d2);

        const auto f1 = fz.independent(x, y, z, data);
        const auto f2 = fz.independent(y, x, z, data);
        CHECK(f1.independent == f2.independent);
        CHECK(*f1.p_value == doctest::Approx(*f2.p_value).epsilon(1e-9));

        const auto r1 = rank.independent(x, y, z, data);
        const auto r2 = rank.independent(y, x, z, data);
        CHECK(r1.independent == r2.independent);
        CHECK(*r1.p_value == doctest::Approx(*r2.p_value).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked == 120);
}

TEST_CASE("test wrappers delegate to the free functions") {
    testutil::Rng rng(505);
    std::vector<double> x(60), y(60);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = 0.6 * x[i] + rng.normal();
    }
    Dataset data = make_data({x, y});

    const CciTest c(0.05);
    CHECK(c.name() == "cci");
    const auto dc = c.independent(0, 1, {}, data);
    const auto fc = cci(0, 1, {}, 0.05, BasisSpec::power(), data);
    CHECK(dc.independent == fc.independent);
    CHECK(dc.detail == fc.detail);

    const FisherZTest f(0.05);
    CHECK(f.name() == "fisher-z");
    const auto df = f.independent(0, 1, {}, data);
    const auto ff = fisher_z_test(0, 1, {}, 0.05, data);
    CHECK(df.independent == ff.independent);
    CHECK(*df.p_value == *ff.p_value);

    const RankPartialTest r(0.05);
    CHECK(r.name() == "rank");
    const auto dr = r.independent(0, 1, {}, data);
    const auto fr = rank_partial_test(0, 1, {}, 0.05, data);
    CHECK(dr.independent == fr.independent);
    CHECK(*dr.p_value == *fr.p_value);
}

TEST_SUITE_END();
