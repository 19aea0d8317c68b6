#include "ccikit/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccikit/dataset.hpp"

namespace ccikit {

Bandwidth bandwidth(std::span<const double> z) {
    if (z.size() < 2) throw std::invalid_argument("bandwidth needs at least two samples");
    const double factor = std::pow((4.0 / 3.0) / static_cast<double>(z.size()), 0.2);
    const double m = mad(z);
    if (m > 0.0) return Bandwidth{1.4826 * m * factor};
    const double s = sample_std(z);
    if (s > 0.0) return Bandwidth{s * factor};
    return Bandwidth{std::numeric_limits<double>::epsilon()};
}

Bandwidth combine_bandwidths(std::span<const Bandwidth> widths, std::size_t m) {
    if (widths.empty()) throw std::invalid_argument("no bandwidths to combine");
    if (m != widths.size()) throw std::invalid_argument("dimension count mismatch");
    double max_h = 0.0;
    for (const Bandwidth& w : widths) max_h = std::max(max_h, w.h);
    return Bandwidth{max_h * std::sqrt(static_cast<double>(m))};
}

std::vector<double> residuals(std::span<const double> x,
                              const std::vector<std::span<const double>>& z, Bandwidth width) {
    const std::size_t n = x.size();
    if (z.empty()) return std::vector<double>(x.begin(), x.end());
    for (const auto& col : z)
        if (col.size() != n) throw std::invalid_argument("conditioning column length mismatch");
    if (!(width.h > 0.0)) throw std::invalid_argument("bandwidth must be positive");

    const double h2 = width.h * width.h;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        double weight = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double dist2 = 0.0;
            for (const auto& col : z) {
                const double d = col[i] - col[j];
                dist2 += d * d;
            }
            if (dist2 <= h2) {
                sum += x[j];
                weight += 1.0;
            }
        }
        out[i] = x[i] - sum / weight;  // weight >= 1: j == i always qualifies
    }
    return out;
}

std::vector<double> residuals_auto(std::span<const double> x,
                                   const std::vector<std::span<const double>>& z) {
    if (z.empty()) return std::vector<double>(x.begin(), x.end());
    std::vector<Bandwidth> widths;
    widths.reserve(z.size());
    for (const auto& col : z) widths.push_back(bandwidth(col));
    return residuals(x, z, combine_bandwidths(widths, z.size()));
}

}  // namespace ccikit
