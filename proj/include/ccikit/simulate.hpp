#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccikit/dataset.hpp"
#include "ccikit/graph.hpp"

namespace ccikit {

enum class NoiseKind { gaussian, uniform };

/// Salt XORed into a dataset seed to derive the SEM parameter stream when the
/// base seed already drove DAG structure generation; reusing one stream would
/// tie the first coefficient draw to the last edge draw.
inline constexpr std::uint64_t kSemStreamSalt = 0x9E3779B97F4A7C15ull;

/// One node's structural equation: parents (node indices), one coefficient
/// per parent, the connection-function type, and the noise scale (standard
/// deviation for Gaussian noise; half-width 1 is implied for uniform noise).
struct NodeEquation {
    std::vector<std::size_t> parents;
    std::vector<double> coefficients;
    int connection_type = 1;
    double noise_scale = 1.0;
};

struct Sem {
    Dag dag;
    std::vector<NodeEquation> equations;  // one per node, node-index order
    NoiseKind noise = NoiseKind::gaussian;
};

/// Systematic part of a child value: the connection function applied to one
/// row of parent values, before (additive) noise. For the multiplicative
/// type 12 this is the inner sum that the noise later multiplies.
double connection_value(const NodeEquation& eq, std::span<const double> parent_values);

/// Human-readable one-line description of a connection type, e.g.
/// "13: sum of a_i*log(cosh(parent_i)) + e".
std::string connection_description(int type_index);

/// Nodes v1..vn in a fixed order; each forward edge vi -> vj (i < j) kept
/// independently with probability edge_prob.
Dag random_dag_ordered(std::size_t n, double edge_prob, std::uint64_t seed);

/// Exactly m forward edges sampled uniformly without replacement over a
/// fixed order. Throws if m exceeds n*(n-1)/2.
Dag random_dag_fixed_edges(std::size_t n, std::size_t m, std::uint64_t seed);

/// Linear SEM: coefficients U(-2, 2), noise Normal(0, std) with std U(0.1, 0.6),
/// rows sampled i.i.d. in topological order. Same seed, same bits.
std::pair<Dataset, Sem> simulate_linear_gaussian(const Dag& dag, std::size_t n_samples,
                                                 std::uint64_t seed);

/// Generalized SEM: coefficients U(-1, 1), noise U(-1, 1), child values per
/// the connection catalog (type 14 picks a type in 1..13 per node).
std::pair<Dataset, Sem> simulate_generalized(const Dag& dag, int type_index,
                                             std::size_t n_samples, std::uint64_t seed);

/// Sparse log-cosh benchmark generator: random_dag_fixed_edges(n_nodes,
/// n_edges) driven through the type-13 SEM.
std::pair<Dataset, Dag> simulate_table1(std::uint64_t seed, std::size_t n_nodes = 200,
                                        std::size_t n_edges = 200,
                                        std::size_t n_samples = 2000);

}  // namespace ccikit
