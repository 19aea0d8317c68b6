#pragma once

#include <span>
#include <vector>

namespace ccikit {

/// Uniform-kernel radius, in the units of the conditioning coordinates.
struct Bandwidth {
    double h = 0.0;
};

/// MAD-based width h = 1.4826 * mad(z) * ((4/3)/N)^0.2, with a std-based
/// fallback when the MAD is zero and a tiny positive floor when both are.
Bandwidth bandwidth(std::span<const double> z);

/// Width for an m-dimensional conditioning set: max of the per-dimension widths times sqrt(m).
Bandwidth combine_bandwidths(std::span<const Bandwidth> widths, std::size_t m);

/// Nadaraya-Watson residuals of x regressed on the conditioning columns z
/// under a uniform kernel of the given radius. Distances are Euclidean over
/// the raw z-coordinates. With an empty z, returns x unchanged.
std::vector<double> residuals(std::span<const double> x,
                              const std::vector<std::span<const double>>& z,
                              Bandwidth width);

/// Residuals with the width derived from z itself: per-column bandwidths
/// combined via combine_bandwidths.
std::vector<double> residuals_auto(std::span<const double> x,
                                   const std::vector<std::span<const double>>& z);

}  // namespace ccikit
