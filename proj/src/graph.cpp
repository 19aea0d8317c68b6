#include "ccikit/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace ccikit {

namespace {
constexpr std::uint8_t kNone = 0;
constexpr std::uint8_t kTail = 1;  // at (i, j): i -> j
constexpr std::uint8_t kUndirected = 2;
}  // namespace

Graph::Graph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].empty()) throw std::invalid_argument("empty node name");
        if (!index_.emplace(nodes_[i], i).second)
            throw std::invalid_argument("duplicate node name: " + nodes_[i]);
    }
    cells_.assign(nodes_.size() * nodes_.size(), kNone);
}

bool Graph::has_node(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

std::size_t Graph::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw std::out_of_range("unknown node: " + std::string(name));
    return it->second;
}

namespace {
void check_pair(std::size_t a, std::size_t b, std::size_t n) {
    if (a >= n || b >= n) throw std::out_of_range("node index out of range");
    if (a == b) throw std::invalid_argument("self-loops are not allowed");
}
}  // namespace

void Graph::add_directed(std::size_t from, std::size_t to) {
    check_pair(from, to, nodes_.size());
    if (adjacent(from, to))
        throw std::invalid_argument("edge already exists between " + nodes_[from] + " and " +
                                    nodes_[to]);
    cells_[cell(from, to)] = kTail;
}

void Graph::add_undirected(std::size_t a, std::size_t b) {
    check_pair(a, b, nodes_.size());
    if (adjacent(a, b))
        throw std::invalid_argument("edge already exists between " + nodes_[a] + " and " +
                                    nodes_[b]);
    cells_[cell(a, b)] = kUndirected;
    cells_[cell(b, a)] = kUndirected;
}

void Graph::remove_edge(std::size_t a, std::size_t b) {
    check_pair(a, b, nodes_.size());
    cells_[cell(a, b)] = kNone;
    cells_[cell(b, a)] = kNone;
}

void Graph::orient(std::size_t from, std::size_t to) {
    check_pair(from, to, nodes_.size());
    if (!adjacent(from, to))
        throw std::logic_error("cannot orient a missing edge between " + nodes_[from] + " and " +
                               nodes_[to]);
    cells_[cell(from, to)] = kTail;
    cells_[cell(to, from)] = kNone;
}

bool Graph::adjacent(std::size_t a, std::size_t b) const {
    return cells_[cell(a, b)] != kNone || cells_[cell(b, a)] != kNone;
}

bool Graph::has_directed(std::size_t from, std::size_t to) const {
    return cells_[cell(from, to)] == kTail;
}

bool Graph::has_undirected(std::size_t a, std::size_t b) const {
    return cells_[cell(a, b)] == kUndirected;
}

std::vector<std::size_t> Graph::adjacent_to(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < nodes_.size(); ++u)
        if (u != v && adjacent(v, u)) out.push_back(u);
    return out;
}

std::vector<std::size_t> Graph::parents_of(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < nodes_.size(); ++u)
        if (has_directed(u, v)) out.push_back(u);
    return out;
}

std::vector<std::size_t> Graph::children_of(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < nodes_.size(); ++u)
        if (has_directed(v, u)) out.push_back(u);
    return out;
}

std::vector<std::size_t> Graph::undirected_neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < nodes_.size(); ++u)
        if (u != v && has_undirected(v, u)) out.push_back(u);
    return out;
}

std::size_t Graph::edge_count() const {
    std::size_t count = 0;
    for (std::size_t a = 0; a < nodes_.size(); ++a)
        for (std::size_t b = a + 1; b < nodes_.size(); ++b)
            if (adjacent(a, b)) ++count;
    return count;
}

bool Graph::fully_directed() const {
    for (std::uint8_t c : cells_)
        if (c == kUndirected) return false;
    return true;
}

bool Graph::has_directed_cycle() const {
    // Kahn's algorithm over the directed part only.
    const std::size_t n = nodes_.size();
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t v = 0; v < n; ++v) indegree[v] = parents_of(v).size();
    std::deque<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        std::size_t v = ready.front();
        ready.pop_front();
        ++seen;
        for (std::size_t c : children_of(v))
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return seen != n;
}

std::string Graph::to_edge_list() const {
    std::vector<std::string> lines;
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes_.size(); ++b) {
            if (has_directed(a, b)) {
                lines.push_back(nodes_[a] + " -> " + nodes_[b]);
            } else if (has_directed(b, a)) {
                lines.push_back(nodes_[b] + " -> " + nodes_[a]);
            } else if (has_undirected(a, b)) {
                const std::string& lo = std::min(nodes_[a], nodes_[b]);
                const std::string& hi = std::max(nodes_[a], nodes_[b]);
                lines.push_back(lo + " --- " + hi);
            }
        }
    }
    std::sort(lines.begin(), lines.end());
    std::string out = "nodes:";
    for (const std::string& name : nodes_) out += " " + name;
    out += "\n";
    for (const std::string& line : lines) out += line + "\n";
    return out;
}

Graph Graph::parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool have_nodes = false;
    Graph g;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;  // blank line
        if (!have_nodes) {
            if (first != "nodes:")
                throw std::runtime_error("edge list must start with a 'nodes:' header");
            std::vector<std::string> names;
            std::string name;
            while (fields >> name) names.push_back(name);
            g = Graph(std::move(names));
            have_nodes = true;
            continue;
        }
        std::string op, second, extra;
        if (!(fields >> op >> second) || (fields >> extra))
            throw std::runtime_error("malformed edge line: " + line);
        const std::size_t a = g.index_of(first);
        const std::size_t b = g.index_of(second);
        if (op == "->")
            g.add_directed(a, b);
        else if (op == "---")
            g.add_undirected(a, b);
        else
            throw std::runtime_error("unknown edge kind '" + op + "' in line: " + line);
    }
    if (!have_nodes) throw std::runtime_error("edge list must start with a 'nodes:' header");
    return g;
}

bool Graph::operator==(const Graph& other) const {
    return nodes_ == other.nodes_ && cells_ == other.cells_;
}

Dag::Dag(Graph g) : g_(std::move(g)) {
    if (!g_.fully_directed()) throw std::invalid_argument("DAG cannot contain undirected edges");
    if (g_.has_directed_cycle()) throw std::invalid_argument("cyclic input");
}

std::vector<std::size_t> Dag::topological_order() const {
    const std::size_t n = g_.node_count();
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t v = 0; v < n; ++v) indegree[v] = g_.parents_of(v).size();
    std::vector<bool> placed(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    // Smallest ready index first, for a deterministic order.
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!placed[v] && indegree[v] == 0) {
                pick = v;
                break;
            }
        }
        if (pick == n) throw std::logic_error("cycle in validated DAG");
        placed[pick] = true;
        order.push_back(pick);
        for (std::size_t c : g_.children_of(pick)) --indegree[c];
    }
    return order;
}

bool d_separated(const Dag& g, std::size_t x, std::size_t y, const std::vector<std::size_t>& z) {
    const Graph& graph = g.graph();
    const std::size_t n = graph.node_count();
    if (x >= n || y >= n) throw std::out_of_range("node index out of range");
    if (x == y) throw std::invalid_argument("x and y must differ");
    std::vector<bool> in_z(n, false);
    for (std::size_t v : z) {
        if (v >= n) throw std::out_of_range("node index out of range");
        if (v == x || v == y) throw std::invalid_argument("x and y may not appear in z");
        in_z[v] = true;
    }

    // Phase 1: z and its ancestors.
    std::vector<bool> anc(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < n; ++v)
        if (in_z[v]) {
            anc[v] = true;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t p : graph.parents_of(v))
            if (!anc[p]) {
                anc[p] = true;
                queue.push_back(p);
            }
    }

    // Phase 2: traverse (node, arrival direction) states; direction 0 means
    // the trail arrived from a child (moving up), 1 from a parent (moving down).
    std::vector<std::uint8_t> visited(2 * n, 0);
    std::deque<std::pair<std::size_t, int>> frontier;
    frontier.emplace_back(x, 0);
    while (!frontier.empty()) {
        auto [v, dir] = frontier.front();
        frontier.pop_front();
        auto& seen = visited[2 * v + static_cast<std::size_t>(dir)];
        if (seen) continue;
        seen = 1;
        if (v == y) return false;
        if (dir == 0 && !in_z[v]) {
            for (std::size_t p : graph.parents_of(v)) frontier.emplace_back(p, 0);
            for (std::size_t c : graph.children_of(v)) frontier.emplace_back(c, 1);
        } else if (dir == 1) {
            if (!in_z[v])
                for (std::size_t c : graph.children_of(v)) frontier.emplace_back(c, 1);
            if (anc[v])
                for (std::size_t p : graph.parents_of(v)) frontier.emplace_back(p, 0);
        }
    }
    return true;
}

bool d_separated(const Dag& g, std::string_view x, std::string_view y,
                 const std::vector<std::string>& z) {
    const Graph& graph = g.graph();
    std::vector<std::size_t> zi;
    zi.reserve(z.size());
    for (const std::string& name : z) zi.push_back(graph.index_of(name));
    return d_separated(g, graph.index_of(x), graph.index_of(y), zi);
}

namespace {

// One pass of the orientation rules; returns true when something was oriented.
bool meek_pass(Pattern& p) {
    const std::size_t n = p.node_count();
    bool changed = false;

    // R1: a -> b --- c with a, c nonadjacent compels b -> c.
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t a : p.parents_of(b)) {
            for (std::size_t c : p.undirected_neighbors(b)) {
                if (c != a && !p.adjacent(a, c)) {
                    p.orient(b, c);
                    changed = true;
                }
            }
        }
    }

    // R2: a -> b -> c with a --- c compels a -> c.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t c : p.undirected_neighbors(a)) {
            for (std::size_t b : p.children_of(a)) {
                if (p.has_directed(b, c)) {
                    p.orient(a, c);
                    changed = true;
                    break;
                }
            }
        }
    }

    // R3: a --- b with a --- c -> b and a --- d -> b, c and d nonadjacent,
    // compels a -> b.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b : p.undirected_neighbors(a)) {
            const auto candidates = p.undirected_neighbors(a);
            bool oriented = false;
            for (std::size_t i = 0; i < candidates.size() && !oriented; ++i) {
                const std::size_t c = candidates[i];
                if (c == b || !p.has_directed(c, b)) continue;
                for (std::size_t j = i + 1; j < candidates.size(); ++j) {
                    const std::size_t d = candidates[j];
                    if (d == b || !p.has_directed(d, b)) continue;
                    if (!p.adjacent(c, d)) {
                        p.orient(a, b);
                        changed = true;
                        oriented = true;
                        break;
                    }
                }
            }
        }
    }

    // R4: a --- b with a --- c, c -> d, d -> b, c and b nonadjacent, and a
    // adjacent to d compels a -> b.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b : p.undirected_neighbors(a)) {
            bool oriented = false;
            for (std::size_t c : p.undirected_neighbors(a)) {
                if (c == b || p.adjacent(c, b)) continue;
                for (std::size_t d : p.children_of(c)) {
                    if (p.has_directed(d, b) && p.adjacent(a, d)) {
                        p.orient(a, b);
                        changed = true;
                        oriented = true;
                        break;
                    }
                }
                if (oriented) break;
            }
        }
    }

    return changed;
}

}  // namespace

Pattern apply_meek_rules(const Pattern& p) {
    Pattern out = p;
    while (meek_pass(out)) {
    }
    return out;
}

Pattern pattern_from_dag(const Dag& g) {
    const Graph& dag = g.graph();
    Pattern p = skeleton(dag);
    const std::size_t n = dag.node_count();
    for (std::size_t k = 0; k < n; ++k) {
        const auto parents = dag.parents_of(k);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            for (std::size_t j = i + 1; j < parents.size(); ++j) {
                if (!dag.adjacent(parents[i], parents[j])) {
                    if (!p.has_directed(parents[i], k)) p.orient(parents[i], k);
                    if (!p.has_directed(parents[j], k)) p.orient(parents[j], k);
                }
            }
        }
    }
    return apply_meek_rules(p);
}

Graph skeleton(const Graph& g) {
    Graph out(g.nodes());
    const std::size_t n = g.node_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (g.adjacent(a, b)) out.add_undirected(a, b);
    return out;
}

}  // namespace ccikit
