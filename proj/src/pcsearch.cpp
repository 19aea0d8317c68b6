#include "ccikit/pcsearch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ccikit {

namespace {

// Lexicographic size-d combinations of a sorted candidate list.
class Combinations {
public:
    Combinations(const std::vector<std::size_t>& pool, std::size_t d)
        : pool_(pool), positions_(d), done_(d > pool.size()) {
        for (std::size_t i = 0; i < d; ++i) positions_[i] = i;
    }

    bool next(std::vector<std::size_t>& out) {
        if (done_) return false;
        out.resize(positions_.size());
        for (std::size_t i = 0; i < positions_.size(); ++i) out[i] = pool_[positions_[i]];
        advance();
        return true;
    }

private:
    void advance() {
        const std::size_t d = positions_.size();
        if (d == 0) {
            done_ = true;
            return;
        }
        std::size_t i = d;
        while (i-- > 0) {
            if (positions_[i] + (d - i) < pool_.size()) {
                ++positions_[i];
                for (std::size_t j = i + 1; j < d; ++j) positions_[j] = positions_[j - 1] + 1;
                return;
            }
        }
        done_ = true;
    }

    const std::vector<std::size_t>& pool_;
    std::vector<std::size_t> positions_;
    bool done_ = false;
};

bool sorted_subset(const std::vector<std::size_t>& sub, const std::vector<std::size_t>& super) {
    std::size_t j = 0;
    for (std::size_t value : sub) {
        while (j < super.size() && super[j] < value) ++j;
        if (j == super.size() || super[j] != value) return false;
        ++j;
    }
    return true;
}

std::vector<std::size_t> adjacency_minus(const Graph& g, std::size_t v, std::size_t except) {
    std::vector<std::size_t> adj = g.adjacent_to(v);
    adj.erase(std::remove(adj.begin(), adj.end(), except), adj.end());
    return adj;
}

struct PairDecision {
    bool removed = false;
    std::vector<std::size_t> sepset;
    std::size_t tests = 0;
};

struct SearchContext {
    const CiTest* test = nullptr;
    const Dataset* data = nullptr;
    const std::vector<std::string>* names = nullptr;
    std::vector<std::size_t> columns;  // search index -> dataset column
};

bool run_test(const SearchContext& ctx, std::size_t x, std::size_t y,
              const std::vector<std::size_t>& subset) {
    std::vector<std::size_t> z(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) z[i] = ctx.columns[subset[i]];
    try {
        return ctx.test->independent(ctx.columns[x], ctx.columns[y], z, *ctx.data).independent;
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "test failed for (" << (*ctx.names)[x] << ", " << (*ctx.names)[y] << " |";
        for (std::size_t i = 0; i < subset.size(); ++i)
            msg << (i ? ", " : " ") << (*ctx.names)[subset[i]];
        msg << "): " << e.what();
        throw std::runtime_error(msg.str());
    }
}

// Decides one unordered pair: subsets of adj(x)\{y} first, then subsets of
// adj(y)\{x} that were not already covered by the first phase.
PairDecision decide_pair(const SearchContext& ctx, std::size_t x, std::size_t y,
                         const std::vector<std::size_t>& adjx,
                         const std::vector<std::size_t>& adjy, std::size_t depth) {
    PairDecision decision;
    std::vector<std::size_t> subset;
    Combinations first(adjx, depth);
    while (first.next(subset)) {
        ++decision.tests;
        if (run_test(ctx, x, y, subset)) {
            decision.removed = true;
            decision.sepset = subset;
            return decision;
        }
    }
    Combinations second(adjy, depth);
    while (second.next(subset)) {
        if (sorted_subset(subset, adjx)) continue;
        ++decision.tests;
        if (run_test(ctx, x, y, subset)) {
            decision.removed = true;
            decision.sepset = subset;
            return decision;
        }
    }
    return decision;
}

}  // namespace

AdjacencyResult adjacency_search(const std::vector<std::string>& vars, const SearchConfig& config,
                                 const Dataset& data) {
    if (config.test == nullptr) throw std::invalid_argument("search needs a test");
    if (vars.size() < 2) throw std::invalid_argument("search needs at least two variables");
    if (config.threads == 0) throw std::invalid_argument("threads must be at least 1");
    if (config.threads > 1 && !config.stable)
        throw std::invalid_argument("parallel search requires stable mode");

    std::vector<std::string> names(vars);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        throw std::invalid_argument("duplicate variable in search list");

    SearchContext ctx;
    ctx.test = config.test;
    ctx.data = &data;
    ctx.names = &names;
    ctx.columns.reserve(names.size());
    for (const std::string& name : names) ctx.columns.push_back(data.index_of(name));

    const std::size_t n = names.size();
    Graph g(names);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) g.add_undirected(a, b);

    AdjacencyResult result{std::move(g), {}, 0, 0};

    for (std::size_t depth = 0;; ++depth) {
        if (config.max_depth && depth > *config.max_depth) break;
        const Graph frozen = result.skeleton;

        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!frozen.adjacent(a, b)) continue;
                if (adjacency_minus(frozen, a, b).size() >= depth ||
                    adjacency_minus(frozen, b, a).size() >= depth)
                    pairs.emplace_back(a, b);
            }
        }
        if (pairs.empty()) break;
        result.depth_reached = depth;

        if (!config.stable) {
            for (auto [a, b] : pairs) {
                if (!result.skeleton.adjacent(a, b)) continue;
                PairDecision decision =
                    decide_pair(ctx, a, b, adjacency_minus(result.skeleton, a, b),
                                adjacency_minus(result.skeleton, b, a), depth);
                result.test_calls += decision.tests;
                if (decision.removed) {
                    result.skeleton.remove_edge(a, b);
                    result.sepsets[{a, b}] = std::move(decision.sepset);
                }
            }
            continue;
        }

        std::vector<PairDecision> decisions(pairs.size());
        auto decide_slot = [&](std::size_t slot) {
            auto [a, b] = pairs[slot];
            decisions[slot] = decide_pair(ctx, a, b, adjacency_minus(frozen, a, b),
                                          adjacency_minus(frozen, b, a), depth);
        };

        const std::size_t workers = std::min(config.threads, pairs.size());
        if (workers <= 1) {
            for (std::size_t slot = 0; slot < pairs.size(); ++slot) decide_slot(slot);
        } else {
            std::vector<std::exception_ptr> errors(pairs.size());
            std::atomic<std::size_t> cursor{0};
            auto worker = [&]() {
                while (true) {
                    const std::size_t slot = cursor.fetch_add(1);
                    if (slot >= pairs.size()) break;
                    try {
                        decide_slot(slot);
                    } catch (...) {
                        errors[slot] = std::current_exception();
                    }
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
            for (const std::exception_ptr& error : errors)
                if (error) std::rethrow_exception(error);
        }

        for (std::size_t slot = 0; slot < pairs.size(); ++slot) {
            result.test_calls += decisions[slot].tests;
            if (decisions[slot].removed) {
                auto [a, b] = pairs[slot];
                result.skeleton.remove_edge(a, b);
                result.sepsets[{a, b}] = std::move(decisions[slot].sepset);
            }
        }
    }
    return result;
}

PcResult pc(const std::vector<std::string>& vars, const SearchConfig& config,
            const Dataset& data) {
    AdjacencyResult ar = adjacency_search(vars, config, data);
    Pattern pattern = ar.skeleton;
    const std::size_t n = pattern.node_count();
    for (std::size_t k = 0; k < n; ++k) {
        const auto adj = ar.skeleton.adjacent_to(k);
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (std::size_t j = i + 1; j < adj.size(); ++j) {
                const std::size_t x = adj[i];
                const std::size_t y = adj[j];
                if (ar.skeleton.adjacent(x, y)) continue;
                const auto it = ar.sepsets.find({std::min(x, y), std::max(x, y)});
                if (it == ar.sepsets.end()) continue;
                const auto& sepset = it->second;
                if (std::find(sepset.begin(), sepset.end(), k) == sepset.end()) {
                    if (!pattern.has_directed(x, k)) pattern.orient(x, k);
                    if (!pattern.has_directed(y, k)) pattern.orient(y, k);
                }
            }
        }
    }
    pattern = apply_meek_rules(pattern);
    return {std::move(pattern), std::move(ar.sepsets), ar.test_calls, ar.depth_reached};
}

namespace {

class DSeparationOracle final : public CiTest {
public:
    explicit DSeparationOracle(Dag dag) : dag_(std::move(dag)) {}

    IndependenceDecision independent(std::size_t x, std::size_t y,
                                     const std::vector<std::size_t>& z,
                                     const Dataset& data) const override {
        const Graph& g = dag_.graph();
        const std::size_t dx = g.index_of(data.variables().at(x));
        const std::size_t dy = g.index_of(data.variables().at(y));
        std::vector<std::size_t> dz;
        dz.reserve(z.size());
        for (std::size_t v : z) dz.push_back(g.index_of(data.variables().at(v)));
        IndependenceDecision decision;
        decision.independent = d_separated(dag_, dx, dy, dz);
        decision.p_value = decision.independent ? 1.0 : 0.0;
        return decision;
    }

    std::string name() const override { return "oracle"; }

private:
    Dag dag_;
};

}  // namespace

std::unique_ptr<CiTest> oracle_test(const Dag& dag) {
    return std::make_unique<DSeparationOracle>(dag);
}

}  // namespace ccikit
