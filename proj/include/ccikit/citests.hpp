#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccikit/dataset.hpp"

namespace ccikit {

/// One univariate transform of a basis.
struct BasisFunction {
    enum class Kind { power, hermite };
    Kind kind = Kind::power;
    int degree = 1;
};

double eval_basis(const BasisFunction& f, double x);

/// Ordered list of univariate transforms applied to each of x and y. The
/// constant function is excluded by construction (degrees start at 1).
struct BasisSpec {
    std::vector<BasisFunction> functions;

    /// x^1 .. x^k.
    static BasisSpec power(int k = 7);
    /// H_1 .. H_k with H_n(x) = 2x*H_{n-1}(x) - 2(n-1)*H_{n-2}(x), H_0 = 1, H_1 = 2x.
    static BasisSpec hermite(int k = 7);

    std::size_t size() const { return functions.size(); }
};

struct IndependenceDecision {
    bool independent = false;
    /// Scalar p-value where the test produces one; empty for the composite
    /// (FDR-aggregated) CCI verdict.
    std::optional<double> p_value;
    /// Per-basis-pair p-values, in (f, g) row-major order; empty for scalar tests.
    std::vector<double> detail;
};

/// Common conditional-independence-test interface consumed by the search.
/// Variables are column indices into the dataset. Implementations are
/// symmetric in x and y and safe for concurrent calls on a shared Dataset.
class CiTest {
public:
    virtual ~CiTest() = default;
    virtual IndependenceDecision independent(std::size_t x, std::size_t y,
                                             const std::vector<std::size_t>& z,
                                             const Dataset& data) const = 0;
    virtual std::string name() const = 0;
};

/// Unconditional CCI core: for every ordered pair (f, g) over basis x basis,
/// correlate f(x) with g(y), Fisher-transform, refer sqrt(N)*z to N(0, tau2),
/// and aggregate all |basis|^2 p-values with Benjamini-Hochberg at alpha.
/// Degenerate transformed columns contribute p = 1. With early_exit, returns
/// dependent at the first p below alpha / |basis|^2 (a Bonferroni-safe bound,
/// so default-mode dependence is implied); default off.
IndependenceDecision independent_unconditional(std::span<const double> x,
                                               std::span<const double> y, double alpha,
                                               const BasisSpec& basis, bool early_exit = false);

/// Conditional CCI: kernel residuals of x and y on z, standardized, then the
/// unconditional core. Requires at least 20 samples.
IndependenceDecision cci(std::size_t x, std::size_t y, const std::vector<std::size_t>& z,
                         double alpha, const BasisSpec& basis, const Dataset& data,
                         bool early_exit = false);

/// Partial correlation of x and y given s from a full correlation matrix:
/// -Omega_xy / sqrt(Omega_xx * Omega_yy) with Omega the inverse of the
/// submatrix over {x, y} union s. Throws on a rank-deficient submatrix.
double partial_correlation(const Eigen::MatrixXd& corr, std::size_t x, std::size_t y,
                           const std::vector<std::size_t>& s);

/// Gaussian partial-correlation test: Fisher Z of the sample partial
/// correlation referred to N(0, 1) with the sqrt(N - |z| - 3) factor.
IndependenceDecision fisher_z_test(std::size_t x, std::size_t y,
                                   const std::vector<std::size_t>& z, double alpha,
                                   const Dataset& data);

/// Rank partial-correlation test: Kendall tau mapped through
/// rho = sin(pi*tau/2), then the same referral as fisher_z_test. The tau
/// matrix is nudged by eps*I (decades from 1e-10 to 1e-4) if not positive
/// definite.
IndependenceDecision rank_partial_test(std::size_t x, std::size_t y,
                                       const std::vector<std::size_t>& s, double alpha,
                                       const Dataset& data);

class CciTest final : public CiTest {
public:
    explicit CciTest(double alpha, BasisSpec basis = BasisSpec::power(), bool early_exit = false);
    IndependenceDecision independent(std::size_t x, std::size_t y,
                                     const std::vector<std::size_t>& z,
                                     const Dataset& data) const override;
    std::string name() const override { return "cci"; }

private:
    double alpha_;
    BasisSpec basis_;
    bool early_exit_;
};

class FisherZTest final : public CiTest {
public:
    explicit FisherZTest(double alpha);
    IndependenceDecision independent(std::size_t x, std::size_t y,
                                     const std::vector<std::size_t>& z,
                                     const Dataset& data) const override;
    std::string name() const override { return "fisher-z"; }

private:
    double alpha_;
};

class RankPartialTest final : public CiTest {
public:
    explicit RankPartialTest(double alpha);
    IndependenceDecision independent(std::size_t x, std::size_t y,
                                     const std::vector<std::size_t>& z,
                                     const Dataset& data) const override;
    std::string name() const override { return "rank"; }

private:
    double alpha_;
};

}  // namespace ccikit
