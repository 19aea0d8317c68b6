#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ccikit {

/// Standard normal CDF.
double normal_cdf(double x);

/// Sample Pearson correlation, clamped into [-1, 1]. Throws if either input is constant.
double pearson_corr(std::span<const double> x, std::span<const double> y);

/// 0.5 * ln((1+r)/(1-r)); requires |r| < 1.
double fisher_z(double r);

/// Mean of squared products of two standardized vectors: (1/N) sum xs_i^2 ys_i^2.
double hawkins_tau2(std::span<const double> xs, std::span<const double> ys);

/// Two-sided p-value of sqrt(n)*z under N(0, tau2).
double hawkins_p(double z, double tau2, std::size_t n);

struct FdrDecision {
    bool reject = false;
    std::optional<double> cutoff;  // largest significant p-value; empty when nothing is significant
};

/// Benjamini-Hochberg step-up over the given p-values at level alpha.
FdrDecision bh_fdr(const std::vector<double>& ps, double alpha);

/// Tie-corrected Kendall tau-b in O(N log N). Throws if either vector is all ties.
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace ccikit
