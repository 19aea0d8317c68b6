#include "ccikit/citests.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ccikit/kernel.hpp"
#include "ccikit/stats.hpp"

namespace ccikit {

namespace {
constexpr double kCorrClamp = 1.0 - 1e-12;
constexpr std::size_t kMinCciSamples = 20;
}  // namespace

double eval_basis(const BasisFunction& f, double x) {
    if (f.degree < 1) throw std::invalid_argument("basis degree must be at least 1");
    if (f.kind == BasisFunction::Kind::power) {
        double out = x;
        for (int i = 1; i < f.degree; ++i) out *= x;
        return out;
    }
    // Physicists' Hermite recursion.
    double prev = 1.0;
    double cur = 2.0 * x;
    for (int n = 2; n <= f.degree; ++n) {
        const double next = 2.0 * x * cur - 2.0 * (n - 1) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

BasisSpec BasisSpec::power(int k) {
    if (k < 1) throw std::invalid_argument("basis needs at least one function");
    BasisSpec spec;
    for (int d = 1; d <= k; ++d) spec.functions.push_back({BasisFunction::Kind::power, d});
    return spec;
}

BasisSpec BasisSpec::hermite(int k) {
    if (k < 1) throw std::invalid_argument("basis needs at least one function");
    BasisSpec spec;
    for (int d = 1; d <= k; ++d) spec.functions.push_back({BasisFunction::Kind::hermite, d});
    return spec;
}

namespace {

// Standardized basis expansions of an already-standardized column; a column
// that comes out (numerically) constant is left empty to signal degeneracy.
std::vector<std::vector<double>> expand_standardized(std::span<const double> xs,
                                                     const BasisSpec& basis) {
    std::vector<std::vector<double>> out;
    out.reserve(basis.functions.size());
    for (const BasisFunction& f : basis.functions) {
        std::vector<double> col(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) col[i] = eval_basis(f, xs[i]);
        if (sample_std(col) == 0.0) {
            out.emplace_back();
        } else {
            out.push_back(standardize(col));
        }
    }
    return out;
}

IndependenceDecision all_ones_decision(std::size_t pair_count) {
    IndependenceDecision decision;
    decision.independent = true;
    decision.detail.assign(pair_count, 1.0);
    return decision;
}

}  // namespace

IndependenceDecision independent_unconditional(std::span<const double> x,
                                               std::span<const double> y, double alpha,
                                               const BasisSpec& basis, bool early_exit) {
    if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
    if (x.size() < kMinCciSamples)
        throw std::invalid_argument("cci needs at least 20 samples");
    if (basis.functions.empty()) throw std::invalid_argument("empty basis");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");

    const std::size_t m = basis.functions.size();
    const std::size_t pair_count = m * m;
    // A degenerate input makes every transformed column degenerate.
    if (sample_std(x) == 0.0 || sample_std(y) == 0.0) return all_ones_decision(pair_count);

    const auto fx = expand_standardized(standardize(x), basis);
    const auto gy = expand_standardized(standardize(y), basis);

    const std::size_t n = x.size();
    IndependenceDecision decision;
    decision.detail.reserve(pair_count);
    const double bonferroni = alpha / static_cast<double>(pair_count);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double p = 1.0;
            if (!fx[i].empty() && !gy[j].empty()) {
                double r = pearson_corr(fx[i], gy[j]);
                r = std::clamp(r, -kCorrClamp, kCorrClamp);
                const double z = fisher_z(r);
                const double tau2 = hawkins_tau2(fx[i], gy[j]);
                p = tau2 > 0.0 ? hawkins_p(z, tau2, n) : 1.0;
            }
            decision.detail.push_back(p);
            if (early_exit && p <= bonferroni) {
                decision.independent = false;
                return decision;
            }
        }
    }
    decision.independent = !bh_fdr(decision.detail, alpha).reject;
    return decision;
}

IndependenceDecision cci(std::size_t x, std::size_t y, const std::vector<std::size_t>& z,
                         double alpha, const BasisSpec& basis, const Dataset& data,
                         bool early_exit) {
    if (x == y) throw std::invalid_argument("x and y must differ");
    for (std::size_t v : z)
        if (v == x || v == y) throw std::invalid_argument("x and y may not appear in z");
    if (data.sample_count() < kMinCciSamples)
        throw std::invalid_argument("cci needs at least 20 samples");

    std::vector<std::span<const double>> zcols;
    zcols.reserve(z.size());
    for (std::size_t v : z) zcols.emplace_back(data.column(v));
    const std::vector<double> rx = residuals_auto(data.column(x), zcols);
    const std::vector<double> ry = residuals_auto(data.column(y), zcols);
    return independent_unconditional(rx, ry, alpha, basis, early_exit);
}

namespace {

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m, const char* failure_message) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw std::runtime_error(failure_message);
    return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

double partial_corr_impl(const Eigen::MatrixXd& sub) {
    const Eigen::MatrixXd omega = inverse_spd(sub, "rank-deficient conditioning set");
    const double rho = -omega(0, 1) / std::sqrt(omega(0, 0) * omega(1, 1));
    return std::clamp(rho, -1.0, 1.0);
}

// Shared referral of a (partial) correlation to N(0, 1) with the
// degrees-of-freedom factor sqrt(N - |z| - 3).
IndependenceDecision refer_partial(double rho, std::size_t n, std::size_t cond_size,
                                   double alpha) {
    rho = std::clamp(rho, -kCorrClamp, kCorrClamp);
    const double z = fisher_z(rho);
    const double dof = static_cast<double>(n) - static_cast<double>(cond_size) - 3.0;
    const double stat = std::sqrt(dof) * z;
    IndependenceDecision decision;
    decision.p_value = 2.0 * (1.0 - normal_cdf(std::abs(stat)));
    decision.independent = *decision.p_value > alpha;
    return decision;
}

void check_partial_preconditions(std::size_t x, std::size_t y, const std::vector<std::size_t>& s,
                                 const Dataset& data) {
    if (x == y) throw std::invalid_argument("x and y must differ");
    for (std::size_t v : s)
        if (v == x || v == y) throw std::invalid_argument("x and y may not appear in the conditioning set");
    if (data.sample_count() <= s.size() + 3)
        throw std::invalid_argument("sample size must exceed conditioning size plus three");
}

}  // namespace

double partial_correlation(const Eigen::MatrixXd& corr, std::size_t x, std::size_t y,
                           const std::vector<std::size_t>& s) {
    const auto v = static_cast<std::size_t>(corr.rows());
    if (corr.rows() != corr.cols()) throw std::invalid_argument("correlation matrix must be square");
    if (x >= v || y >= v) throw std::out_of_range("index out of range");
    if (x == y) throw std::invalid_argument("x and y must differ");
    std::vector<std::size_t> idx = {x, y};
    for (std::size_t si : s) {
        if (si >= v) throw std::out_of_range("index out of range");
        if (si == x || si == y) throw std::invalid_argument("x and y may not appear in s");
        idx.push_back(si);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            sub(a, b) = corr(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                             static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]));
    return partial_corr_impl(sub);
}

IndependenceDecision fisher_z_test(std::size_t x, std::size_t y,
                                   const std::vector<std::size_t>& z, double alpha,
                                   const Dataset& data) {
    check_partial_preconditions(x, y, z, data);
    std::vector<std::size_t> idx = {x, y};
    idx.insert(idx.end(), z.begin(), z.end());
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = a + 1; b < k; ++b) {
            const double r = pearson_corr(data.column(idx[static_cast<std::size_t>(a)]),
                                          data.column(idx[static_cast<std::size_t>(b)]));
            corr(a, b) = r;
            corr(b, a) = r;
        }
    std::vector<std::size_t> s(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) s[i] = 2 + i;
    const double rho = partial_correlation(corr, 0, 1, s);
    return refer_partial(rho, data.sample_count(), z.size(), alpha);
}

IndependenceDecision rank_partial_test(std::size_t x, std::size_t y,
                                       const std::vector<std::size_t>& s, double alpha,
                                       const Dataset& data) {
    check_partial_preconditions(x, y, s, data);
    std::vector<std::size_t> idx = {x, y};
    idx.insert(idx.end(), s.begin(), s.end());
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = a + 1; b < k; ++b) {
            const double tau = kendall_tau(data.column(idx[static_cast<std::size_t>(a)]),
                                           data.column(idx[static_cast<std::size_t>(b)]));
            const double rho = std::sin(std::numbers::pi_v<double> * tau / 2.0);
            psi(a, b) = rho;
            psi(b, a) = rho;
        }
    // Nudge toward positive definiteness if the Cholesky fails outright.
    double eps = 1e-10;
    Eigen::MatrixXd work = psi;
    while (true) {
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) break;
        if (eps > 1e-4)
            throw std::runtime_error("rank correlation matrix is not positive definite");
        work = psi + eps * Eigen::MatrixXd::Identity(k, k);
        eps *= 10.0;
    }
    std::vector<std::size_t> cond(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) cond[i] = 2 + i;
    const double rho = partial_correlation(work, 0, 1, cond);
    return refer_partial(rho, data.sample_count(), s.size(), alpha);
}

CciTest::CciTest(double alpha, BasisSpec basis, bool early_exit)
    : alpha_(alpha), basis_(std::move(basis)), early_exit_(early_exit) {}

IndependenceDecision CciTest::independent(std::size_t x, std::size_t y,
                                          const std::vector<std::size_t>& z,
                                          const Dataset& data) const {
    return cci(x, y, z, alpha_, basis_, data, early_exit_);
}

FisherZTest::FisherZTest(double alpha) : alpha_(alpha) {}

IndependenceDecision FisherZTest::independent(std::size_t x, std::size_t y,
                                              const std::vector<std::size_t>& z,
                                              const Dataset& data) const {
    return fisher_z_test(x, y, z, alpha_, data);
}

RankPartialTest::RankPartialTest(double alpha) : alpha_(alpha) {}

IndependenceDecision RankPartialTest::independent(std::size_t x, std::size_t y,
                                                  const std::vector<std::size_t>& z,
                                                  const Dataset& data) const {
    return rank_partial_test(x, y, z, alpha_, data);
}

}  // namespace ccikit
