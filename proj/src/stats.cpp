#include "ccikit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace ccikit {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double pearson_corr(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
    if (x.size() < 2) throw std::invalid_argument("correlation needs at least two samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::domain_error("zero variance in correlation input");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double fisher_z(double r) {
    if (!(std::abs(r) < 1.0)) throw std::domain_error("fisher_z requires |r| < 1");
    return std::atanh(r);
}

double hawkins_tau2(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("tau2 needs at least two samples");
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        // (x*y)^2 rather than x*x*y*y keeps the statistic bit-symmetric in
        // its arguments.
        const double prod = xs[i] * ys[i];
        sum += prod * prod;
    }
    return sum / static_cast<double>(xs.size());
}

double hawkins_p(double z, double tau2, std::size_t n) {
    if (tau2 <= 0.0) throw std::domain_error("tau2 must be positive");
    if (n < 2) throw std::invalid_argument("sample size too small");
    const double stat = std::abs(std::sqrt(static_cast<double>(n)) * z) / std::sqrt(tau2);
    return 2.0 * (1.0 - normal_cdf(stat));
}

FdrDecision bh_fdr(const std::vector<double>& ps, double alpha) {
    if (ps.empty()) throw std::invalid_argument("empty p-value list");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    for (double p : ps)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-value outside [0, 1]");
    std::vector<double> sorted(ps);
    std::sort(sorted.begin(), sorted.end());
    const double m = static_cast<double>(sorted.size());
    FdrDecision decision;
    for (std::size_t i = sorted.size(); i-- > 0;) {
        if (sorted[i] <= static_cast<double>(i + 1) * alpha / m) {
            decision.reject = true;
            decision.cutoff = sorted[i];
            break;
        }
    }
    return decision;
}

namespace {

// Counts pairs i < j with y[i] > y[j] by merge sort; equal values are not inversions.
std::uint64_t count_inversions(std::vector<double>& y, std::vector<double>& scratch,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = count_inversions(y, scratch, lo, mid) + count_inversions(y, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (y[j] < y[i]) {
            count += mid - i;
            scratch[k++] = y[j++];
        } else {
            scratch[k++] = y[i++];
        }
    }
    while (i < mid) scratch[k++] = y[i++];
    while (j < hi) scratch[k++] = y[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              y.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

std::uint64_t tied_pairs(const std::vector<double>& sorted_keys) {
    std::uint64_t total = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= sorted_keys.size(); ++i) {
        if (i < sorted_keys.size() && sorted_keys[i] == sorted_keys[i - 1]) {
            ++run;
        } else {
            total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("kendall_tau needs at least two samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Tie bookkeeping: pairs tied in x (n1), in y (n2), and in both (n3).
    std::uint64_t n1 = 0, n3 = 0;
    {
        std::size_t run_x = 1, run_xy = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            const bool same_x = i < n && x[order[i]] == x[order[i - 1]];
            const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
            if (same_x) ++run_x;
            if (same_xy) {
                ++run_xy;
            } else {
                n3 += static_cast<std::uint64_t>(run_xy) * (run_xy - 1) / 2;
                run_xy = 1;
            }
            if (!same_x) {
                n1 += static_cast<std::uint64_t>(run_x) * (run_x - 1) / 2;
                run_x = 1;
            }
        }
    }

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    std::vector<double> sorted_y(ys);
    std::sort(sorted_y.begin(), sorted_y.end());
    const std::uint64_t n2 = tied_pairs(sorted_y);

    std::vector<double> scratch(n);
    const std::uint64_t discordant = count_inversions(ys, scratch, 0, n);

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (n0 == n1 || n0 == n2) throw std::domain_error("all-tied vector");

    const double s = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                     static_cast<double>(n3) - 2.0 * static_cast<double>(discordant);
    return s / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

}  // namespace ccikit
