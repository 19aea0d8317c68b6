#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccikit/citests.hpp"
#include "ccikit/dataset.hpp"
#include "ccikit/graph.hpp"

namespace ccikit {

/// Conditioning set that justified removing an edge, keyed by the unordered
/// pair (stored with first < second). Indices refer to the search's
/// lexicographically ordered variable list.
using SepsetMap = std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>;

struct SearchConfig {
    const CiTest* test = nullptr;
    std::optional<std::size_t> max_depth;  // empty = unlimited
    bool stable = false;
    std::size_t threads = 1;  // > 1 requires stable
};

struct AdjacencyResult {
    Graph skeleton;
    SepsetMap sepsets;
    std::size_t test_calls = 0;
    std::size_t depth_reached = 0;
};

/// Classic PC edge removal over the named variables (all must exist in
/// data). The variable order is canonicalized to lexicographic before the
/// search, so the caller's ordering never matters. At depth d the size-d
/// subsets of adj(x)\{y} and adj(y)\{x} are tried in lexicographic order;
/// the first separating subset removes the edge. With config.stable,
/// adjacencies are frozen per depth, making edge decisions within a depth
/// independent of each other and of thread count.
AdjacencyResult adjacency_search(const std::vector<std::string>& vars, const SearchConfig& config,
                                 const Dataset& data);

struct PcResult {
    Pattern pattern;
    SepsetMap sepsets;
    std::size_t test_calls = 0;
    std::size_t depth_reached = 0;
};

/// Full PC: adjacency search, collider orientation (x -> y <- z for each
/// unshielded triple with y not in sepset{x, z}), then the orientation rules.
PcResult pc(const std::vector<std::string>& vars, const SearchConfig& config,
            const Dataset& data);

/// CiTest answering from d-separation on the given DAG; p-value 1 when
/// separated, 0 otherwise. Dataset columns must match the DAG's nodes by name.
std::unique_ptr<CiTest> oracle_test(const Dag& dag);

}  // namespace ccikit
