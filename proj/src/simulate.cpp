#include "ccikit/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ccikit {

namespace {

// Deterministic variate generation on top of the mt19937_64 bit stream.
// Distribution adapters from the standard library are implementation-defined,
// so uniforms and normals are derived from raw 53-bit draws directly: the
// same seed yields the same dataset on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the sine twin is discarded so every
    // call consumes exactly two 64-bit draws.
    double normal() {
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, bound) for modest bounds.
    std::size_t index(std::size_t bound) {
        const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(bound));
        return idx < bound ? idx : bound - 1;
    }

private:
    std::mt19937_64 engine_;
};

std::vector<std::string> node_names(std::size_t n) {
    std::size_t width = 1;
    for (std::size_t power = 10; power <= n; power *= 10) ++width;
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        std::string digits = std::to_string(i);
        names.push_back("X" + std::string(width - digits.size(), '0') + std::move(digits));
    }
    return names;
}

double softplus(double s) { return s > 30.0 ? s : std::log1p(std::exp(s)); }

double sum_term(const NodeEquation& eq, std::span<const double> parent_values) {
    double s = 0.0;
    for (std::size_t i = 0; i < eq.coefficients.size(); ++i)
        s += eq.coefficients[i] * parent_values[i];
    return s;
}

// Forward-samples one dataset from fully drawn equations. Noise draws are
// consumed row by row, within a row in topological node order.
std::pair<Dataset, Sem> sample(const Dag& dag, std::vector<NodeEquation> equations,
                               NoiseKind noise, std::size_t n_samples, Rng& rng) {
    const Graph& g = dag.graph();
    const std::size_t n = g.node_count();
    const std::vector<std::size_t> topo = dag.topological_order();

    std::vector<std::vector<double>> columns(n, std::vector<double>(n_samples));
    std::vector<double> parent_values;
    for (std::size_t row = 0; row < n_samples; ++row) {
        for (std::size_t v : topo) {
            const NodeEquation& eq = equations[v];
            const double e = noise == NoiseKind::gaussian ? eq.noise_scale * rng.normal()
                                                          : rng.uniform(-1.0, 1.0);
            double value;
            if (eq.parents.empty()) {
                value = e;  // source nodes are pure noise for every catalog type
            } else {
                parent_values.resize(eq.parents.size());
                for (std::size_t i = 0; i < eq.parents.size(); ++i)
                    parent_values[i] = columns[eq.parents[i]][row];
                const double base = connection_value(eq, parent_values);
                value = eq.connection_type == 12 ? base * e : base + e;
            }
            columns[v][row] = value;
        }
    }

    Dataset data(g.nodes(), std::move(columns));
    Sem sem{dag, std::move(equations), noise};
    return {std::move(data), std::move(sem)};
}

}  // namespace

double connection_value(const NodeEquation& eq, std::span<const double> parent_values) {
    if (eq.parents.size() != eq.coefficients.size())
        throw std::invalid_argument("equation parent/coefficient size mismatch");
    if (parent_values.size() != eq.parents.size())
        throw std::invalid_argument("wrong number of parent values");
    if (eq.parents.empty()) return 0.0;
    switch (eq.connection_type) {
        case 1:
            return sum_term(eq, parent_values);
        case 2: {
            const double s = sum_term(eq, parent_values);
            return s * s * s;
        }
        case 3: {
            const double s = sum_term(eq, parent_values);
            return s * s;
        }
        case 4:
            return std::tanh(sum_term(eq, parent_values));
        case 5:
            return 1.0 / (1.0 + std::abs(sum_term(eq, parent_values)));
        case 6: {
            const double s = sum_term(eq, parent_values);
            return (s < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(s));
        }
        case 7:
            return softplus(sum_term(eq, parent_values));
        case 8:
            return std::sin(sum_term(eq, parent_values));
        case 9:
            return std::exp(-std::abs(sum_term(eq, parent_values)));
        case 10:
            return std::abs(sum_term(eq, parent_values)) > 0.5 ? 1.0 : -1.0;
        case 11: {
            const double s = sum_term(eq, parent_values);
            return s / (1.0 + std::abs(s));
        }
        case 12:
            return sum_term(eq, parent_values);  // caller multiplies by the noise draw
        case 13: {
            double total = 0.0;
            for (std::size_t i = 0; i < eq.coefficients.size(); ++i)
                total += eq.coefficients[i] * std::log(std::cosh(parent_values[i]));
            return total;
        }
        default:
            throw std::invalid_argument("unknown connection type " +
                                        std::to_string(eq.connection_type));
    }
}

std::string connection_description(int type_index) {
    switch (type_index) {
        case 1: return "1: linear sum of a_i*parent_i + e";
        case 2: return "2: cubic (sum a_i*parent_i)^3 + e";
        case 3: return "3: square (sum a_i*parent_i)^2 + e";
        case 4: return "4: tanh(sum a_i*parent_i) + e";
        case 5: return "5: reciprocal 1/(1+|sum a_i*parent_i|) + e";
        case 6: return "6: signed root sign(s)*sqrt(|s|), s = sum a_i*parent_i, + e";
        case 7: return "7: soft-plus log(1+exp(sum a_i*parent_i)) + e";
        case 8: return "8: sine sin(sum a_i*parent_i) + e";
        case 9: return "9: exponential decay exp(-|sum a_i*parent_i|) + e";
        case 10: return "10: step (|sum a_i*parent_i| > 0.5 ? 1 : -1) + e";
        case 11: return "11: saturating s/(1+|s|), s = sum a_i*parent_i, + e";
        case 12: return "12: multiplicative noise (sum a_i*parent_i) * e";
        case 13: return "13: sum of a_i*log(cosh(parent_i)) + e";
        case 14: return "14: per-node random mix of types 1-13";
        default:
            throw std::invalid_argument("unknown connection type " + std::to_string(type_index));
    }
}

Dag random_dag_ordered(std::size_t n, double edge_prob, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("node count must be at least 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
        throw std::invalid_argument("edge probability must lie in [0, 1]");
    Rng rng(seed);
    Graph g(node_names(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < edge_prob) g.add_directed(i, j);
    return Dag(std::move(g));
}

Dag random_dag_fixed_edges(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("node count must be at least 1");
    const std::size_t max_edges = n * (n - 1) / 2;
    if (m > max_edges) {
        std::ostringstream msg;
        msg << "edge count exceeds maximum " << max_edges;
        throw std::invalid_argument(msg.str());
    }
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    pool.reserve(max_edges);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pool.emplace_back(i, j);

    Rng rng(seed);
    for (std::size_t k = 0; k < m; ++k)  // partial Fisher-Yates: first m slots
        std::swap(pool[k], pool[k + rng.index(pool.size() - k)]);

    Graph g(node_names(n));
    for (std::size_t k = 0; k < m; ++k) g.add_directed(pool[k].first, pool[k].second);
    return Dag(std::move(g));
}

std::pair<Dataset, Sem> simulate_linear_gaussian(const Dag& dag, std::size_t n_samples,
                                                 std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("sample count must be at least 1");
    const Graph& g = dag.graph();
    const std::size_t n = g.node_count();
    Rng rng(seed);

    // Stream order: edge coefficients in node-index order (parents ascending),
    // then one noise std per node, then the per-sample noise draws.
    std::vector<NodeEquation> equations(n);
    for (std::size_t v = 0; v < n; ++v) {
        equations[v].parents = g.parents_of(v);
        for (std::size_t i = 0; i < equations[v].parents.size(); ++i)
            equations[v].coefficients.push_back(rng.uniform(-2.0, 2.0));
    }
    for (std::size_t v = 0; v < n; ++v) equations[v].noise_scale = rng.uniform(0.1, 0.6);

    return sample(dag, std::move(equations), NoiseKind::gaussian, n_samples, rng);
}

std::pair<Dataset, Sem> simulate_generalized(const Dag& dag, int type_index,
                                             std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("sample count must be at least 1");
    if (type_index < 1 || type_index > 14)
        throw std::invalid_argument("connection type must lie in 1..14");
    const Graph& g = dag.graph();
    const std::size_t n = g.node_count();
    Rng rng(seed);

    // Stream order: per-node type picks (only for the mixed type 14), then
    // edge coefficients in node-index order, then the per-sample noise draws.
    std::vector<NodeEquation> equations(n);
    for (std::size_t v = 0; v < n; ++v)
        equations[v].connection_type =
            type_index == 14 ? static_cast<int>(rng.index(13)) + 1 : type_index;
    for (std::size_t v = 0; v < n; ++v) {
        equations[v].parents = g.parents_of(v);
        for (std::size_t i = 0; i < equations[v].parents.size(); ++i)
            equations[v].coefficients.push_back(rng.uniform(-1.0, 1.0));
    }

    return sample(dag, std::move(equations), NoiseKind::uniform, n_samples, rng);
}

std::pair<Dataset, Dag> simulate_table1(std::uint64_t seed, std::size_t n_nodes,
                                        std::size_t n_edges, std::size_t n_samples) {
    Dag dag = random_dag_fixed_edges(n_nodes, n_edges, seed);
    auto [data, sem] = simulate_generalized(dag, 13, n_samples, seed ^ kSemStreamSalt);
    return {std::move(data), std::move(sem.dag)};
}

}  // namespace ccikit
