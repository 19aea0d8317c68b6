#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ccikit {

/// Mixed graph over named nodes: at most one edge per unordered pair, each
/// either directed or undirected. No self-loops. Value type; copying is the
/// intended way to derive modified graphs.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::vector<std::string> nodes);

    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    bool has_node(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;

    void add_directed(std::size_t from, std::size_t to);
    void add_undirected(std::size_t a, std::size_t b);
    void remove_edge(std::size_t a, std::size_t b);
    /// Replaces whatever edge exists between the two nodes with from -> to.
    void orient(std::size_t from, std::size_t to);

    bool adjacent(std::size_t a, std::size_t b) const;
    bool has_directed(std::size_t from, std::size_t to) const;
    bool has_undirected(std::size_t a, std::size_t b) const;

    std::vector<std::size_t> adjacent_to(std::size_t v) const;
    std::vector<std::size_t> parents_of(std::size_t v) const;
    std::vector<std::size_t> children_of(std::size_t v) const;
    std::vector<std::size_t> undirected_neighbors(std::size_t v) const;

    std::size_t edge_count() const;
    bool fully_directed() const;
    bool has_directed_cycle() const;

    /// Canonical text form: a `nodes:` header listing every node in order,
    /// then one `A -> B` or `A --- B` line per edge, sorted lexicographically.
    std::string to_edge_list() const;
    static Graph parse_edge_list(const std::string& text);

    bool operator==(const Graph& other) const;

private:
    std::size_t cell(std::size_t a, std::size_t b) const { return a * nodes_.size() + b; }

    std::vector<std::string> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    // n*n marks: 1 at (i,j) means i->j, 2 at both (i,j) and (j,i) means i---j.
    std::vector<std::uint8_t> cells_;
};

/// A Graph restricted to directed edges with no directed cycle; validated at
/// construction.
class Dag {
public:
    explicit Dag(Graph g);

    const Graph& graph() const { return g_; }
    std::size_t node_count() const { return g_.node_count(); }
    const std::vector<std::string>& nodes() const { return g_.nodes(); }
    std::vector<std::size_t> parents_of(std::size_t v) const { return g_.parents_of(v); }
    std::vector<std::size_t> children_of(std::size_t v) const { return g_.children_of(v); }

    /// Indices in an order where every edge points forward.
    std::vector<std::size_t> topological_order() const;

private:
    Graph g_;
};

/// Partially directed graph standing for a Markov equivalence class.
using Pattern = Graph;

/// Standard d-separation: every path from x to y is blocked by z, where a
/// path is blocked iff it contains a noncollider in z or a collider that is
/// neither in z nor has a descendant in z.
bool d_separated(const Dag& g, std::size_t x, std::size_t y, const std::vector<std::size_t>& z);
bool d_separated(const Dag& g, std::string_view x, std::string_view y,
                 const std::vector<std::string>& z);

/// CPDAG of g's equivalence class: skeleton plus unshielded colliders as in
/// g, closed under the orientation rules.
Pattern pattern_from_dag(const Dag& g);

/// Fixed point of the four orientation rules; never introduces a new
/// unshielded collider or a directed cycle.
Pattern apply_meek_rules(const Pattern& p);

/// Same adjacencies, every edge undirected.
Graph skeleton(const Graph& g);

}  // namespace ccikit
