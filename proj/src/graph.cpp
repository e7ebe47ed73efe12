#include "treecascade/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "treecascade/error.hpp"
#include "treecascade/random.hpp"

namespace treecascade {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

std::string edge_str(const Edge& e) {
    std::ostringstream os;
    os << "{" << e.u << "," << e.v << "}";
    return os.str();
}

void require_same_order(const WeightedGraph& g, const Tree& t) {
    if (g.vertex_count() != t.vertex_count()) {
        throw InvalidInputError("tree has " + std::to_string(t.vertex_count()) +
                                " vertices but graph has " + std::to_string(g.vertex_count()));
    }
}

// Lightest tree edge along a vertex path.
double min_weight_on_path(const WeightedGraph& g, const std::vector<Vertex>& path) {
    double lightest = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        lightest = std::min(lightest, g.weight(path[s], path[s + 1]));
    }
    return lightest;
}

}  // namespace

const char* const kCanonicalEdgeOrder = "weight descending, then min vertex ascending, then max vertex ascending";

Edge::Edge(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {
    if (a == b) throw InvalidInputError("self-loop at vertex " + std::to_string(a));
}

Tree::Tree(std::size_t d, std::vector<Edge> edges) : d_(d), edges_(std::move(edges)), adjacency_(d) {
    if (d == 0) throw InvalidInputError("tree needs at least one vertex");
    if (edges_.size() != d - 1) {
        throw InvalidInputError("tree on " + std::to_string(d) + " vertices needs " + std::to_string(d - 1) +
                                " edges, got " + std::to_string(edges_.size()));
    }
    std::sort(edges_.begin(), edges_.end());
    DisjointSets components(d);
    for (const Edge& e : edges_) {
        if (e.v >= d) throw InvalidInputError("edge " + edge_str(e) + " has a vertex out of range");
        if (!components.unite(e.u, e.v)) throw InvalidInputError("edge " + edge_str(e) + " closes a cycle");
        adjacency_[e.u].push_back(e.v);
        adjacency_[e.v].push_back(e.u);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool Tree::has_edge(Vertex a, Vertex b) const {
    if (a == b || a >= d_ || b >= d_) return false;
    return std::binary_search(edges_.begin(), edges_.end(), Edge(a, b));
}

std::vector<Vertex> Tree::path(Vertex from, Vertex to) const {
    if (from >= d_ || to >= d_) throw InvalidInputError("path endpoint out of range");
    constexpr Vertex kUnseen = static_cast<Vertex>(-1);
    std::vector<Vertex> previous(d_, kUnseen);
    std::deque<Vertex> frontier{from};
    previous[from] = from;
    while (!frontier.empty()) {
        const Vertex cur = frontier.front();
        frontier.pop_front();
        if (cur == to) break;
        for (Vertex next : adjacency_[cur]) {
            if (previous[next] == kUnseen) {
                previous[next] = cur;
                frontier.push_back(next);
            }
        }
    }
    std::vector<Vertex> out{to};
    while (out.back() != from) out.push_back(previous[out.back()]);
    std::reverse(out.begin(), out.end());
    return out;
}

RootedTree::RootedTree(Tree tree, Vertex root)
    : tree_(std::move(tree)), root_(root), parent_(tree_.vertex_count()), depth_(tree_.vertex_count(), 0) {
    const std::size_t d = tree_.vertex_count();
    if (root >= d) {
        throw InvalidInputError("root " + std::to_string(root) + " out of range for " + std::to_string(d) +
                                " vertices");
    }
    std::vector<bool> seen(d, false);
    order_.reserve(d);
    order_.push_back(root);
    seen[root] = true;
    for (std::size_t head = 0; head < order_.size(); ++head) {
        const Vertex cur = order_[head];
        for (Vertex next : tree_.neighbors(cur)) {
            if (seen[next]) continue;
            seen[next] = true;
            parent_[next] = cur;
            depth_[next] = depth_[cur] + 1;
            order_.push_back(next);
        }
    }
}

std::optional<Vertex> RootedTree::parent(Vertex i) const { return parent_.at(i); }

bool RootedTree::is_ancestor(Vertex a, Vertex i) const {
    if (depth_.at(a) > depth_.at(i)) return false;
    while (depth_[i] > depth_[a]) i = *parent_[i];
    return i == a;
}

std::vector<Vertex> RootedTree::ancestors(Vertex i) const {
    std::vector<Vertex> out{i};
    while (parent_.at(out.back())) out.push_back(*parent_[out.back()]);
    return out;
}

WeightedGraph::WeightedGraph(std::size_t d) : d_(d), upper_(d * (d > 0 ? d - 1 : 0) / 2, 0.0) {
    if (d == 0) throw InvalidInputError("graph needs at least one vertex");
}

WeightedGraph WeightedGraph::from_matrix(const Eigen::MatrixXd& weights) {
    if (weights.rows() != weights.cols()) throw InvalidInputError("weight matrix must be square");
    const auto d = static_cast<std::size_t>(weights.rows());
    WeightedGraph g(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            if (weights(ii, jj) != weights(jj, ii)) {
                throw InvalidInputError("weight matrix is not symmetric at (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
            }
            g.set_weight(i, j, weights(ii, jj));
        }
    }
    return g;
}

std::size_t WeightedGraph::index(Vertex i, Vertex j) const {
    if (i == j || i >= d_ || j >= d_) {
        throw InvalidInputError("no edge {" + std::to_string(i) + "," + std::to_string(j) + "} in graph on " +
                                std::to_string(d_) + " vertices");
    }
    if (i > j) std::swap(i, j);
    // Row-major upper triangle without the diagonal.
    return i * (2 * d_ - i - 1) / 2 + (j - i - 1);
}

double WeightedGraph::weight(Vertex i, Vertex j) const { return upper_[index(i, j)]; }

void WeightedGraph::set_weight(Vertex i, Vertex j, double w) {
    if (!std::isfinite(w)) {
        throw InvalidInputError("non-finite weight on edge {" + std::to_string(i) + "," + std::to_string(j) + "}");
    }
    upper_[index(i, j)] = w;
}

WeightedGraph WeightedGraph::transformed(const std::function<double(double)>& f) const {
    WeightedGraph out(d_);
    for (std::size_t i = 0; i < d_; ++i) {
        for (std::size_t j = i + 1; j < d_; ++j) out.set_weight(i, j, f(weight(i, j)));
    }
    return out;
}

bool canonical_edge_less(const WeightedGraph& g, const Edge& a, const Edge& b) {
    const double wa = g.weight(a.u, a.v);
    const double wb = g.weight(b.u, b.v);
    if (wa != wb) return wa > wb;
    return a < b;
}

double tree_weight(const WeightedGraph& g, const Tree& t) {
    require_same_order(g, t);
    double total = 0.0;
    for (const Edge& e : t.edges()) total += g.weight(e.u, e.v);
    return total;
}

MstResult maximum_spanning_tree(const WeightedGraph& g) {
    const std::size_t d = g.vertex_count();
    std::vector<Edge> candidates;
    candidates.reserve(d * (d - 1) / 2);
    for (Vertex i = 0; i < d; ++i) {
        for (Vertex j = i + 1; j < d; ++j) candidates.emplace_back(i, j);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&g](const Edge& a, const Edge& b) { return canonical_edge_less(g, a, b); });

    DisjointSets forest(d);
    std::vector<Edge> chosen;
    chosen.reserve(d - 1);
    for (const Edge& e : candidates) {
        if (chosen.size() + 1 == d) break;
        if (forest.unite(e.u, e.v)) chosen.push_back(e);
    }

    MstResult result{Tree(d, std::move(chosen)), 0.0, true, kCanonicalEdgeOrder};
    result.total_weight = tree_weight(g, result.tree);
    result.is_unique = mst_is_unique(g, result.tree);
    return result;
}

bool mst_is_unique(const WeightedGraph& g, const Tree& t) {
    require_same_order(g, t);
    const std::size_t d = g.vertex_count();
    bool unique = true;
    for (Vertex i = 0; i < d; ++i) {
        for (Vertex j = i + 1; j < d; ++j) {
            if (t.has_edge(i, j)) continue;
            const double lightest = min_weight_on_path(g, t.path(i, j));
            const double w = g.weight(i, j);
            if (w > lightest) {
                throw InvalidInputError("tree is not a maximum spanning tree: swapping in edge " +
                                        edge_str(Edge(i, j)) + " increases the weight");
            }
            if (w == lightest) unique = false;
        }
    }
    return unique;
}

bool check_strict_triangle_condition(const WeightedGraph& g, const Tree& t) {
    require_same_order(g, t);
    const std::size_t d = g.vertex_count();
    for (Vertex i = 0; i < d; ++i) {
        for (Vertex j = 0; j < d; ++j) {
            if (i == j || t.has_edge(i, j)) continue;
            const Vertex k = t.path(i, j)[1];
            if (!(g.weight(i, j) < std::min(g.weight(i, k), g.weight(k, j)))) return false;
        }
    }
    return true;
}

Tree prufer_decode(std::size_t d, const std::vector<Vertex>& sequence) {
    if (d == 0) throw InvalidInputError("tree needs at least one vertex");
    if (d == 1) return Tree(1, {});
    if (sequence.size() != d - 2) {
        throw InvalidInputError("Prufer sequence for " + std::to_string(d) + " vertices must have length " +
                                std::to_string(d - 2));
    }
    std::vector<std::size_t> degree(d, 1);
    for (Vertex s : sequence) {
        if (s >= d) throw InvalidInputError("Prufer entry " + std::to_string(s) + " out of range");
        ++degree[s];
    }
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> leaves;
    for (Vertex v = 0; v < d; ++v) {
        if (degree[v] == 1) leaves.push(v);
    }
    std::vector<Edge> edges;
    edges.reserve(d - 1);
    for (Vertex s : sequence) {
        const Vertex leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(leaf, s);
        if (--degree[s] == 1) leaves.push(s);
    }
    const Vertex a = leaves.top();
    leaves.pop();
    edges.emplace_back(a, leaves.top());
    return Tree(d, std::move(edges));
}

void for_each_spanning_tree(std::size_t d, const std::function<void(const Tree&)>& visit) {
    if (d == 0) throw InvalidInputError("tree needs at least one vertex");
    if (d > kMaxEnumerationVertices) {
        throw SizeLimitError("spanning-tree enumeration is limited to " + std::to_string(kMaxEnumerationVertices) +
                             " vertices, got " + std::to_string(d));
    }
    if (d <= 2) {
        visit(prufer_decode(d, {}));
        return;
    }
    std::vector<Vertex> sequence(d - 2, 0);
    while (true) {
        visit(prufer_decode(d, sequence));
        std::size_t pos = 0;
        while (pos < sequence.size() && ++sequence[pos] == d) sequence[pos++] = 0;
        if (pos == sequence.size()) break;
    }
}

std::vector<Tree> enumerate_spanning_trees(std::size_t d) {
    std::vector<Tree> out;
    for_each_spanning_tree(d, [&out](const Tree& t) { out.push_back(t); });
    return out;
}

Tree random_tree(std::size_t d, Rng& rng) {
    if (d <= 2) return prufer_decode(d, {});
    std::vector<Vertex> sequence(d - 2);
    for (auto& s : sequence) s = rng.uniform_index(d);
    return prufer_decode(d, sequence);
}

RootedTree root_tree(const Tree& t, Vertex r) { return RootedTree(t, r); }

Vertex lca(const RootedTree& rt, Vertex i, Vertex j) {
    const std::size_t d = rt.vertex_count();
    if (i >= d || j >= d) throw InvalidInputError("lca vertex out of range");
    while (rt.depth(i) > rt.depth(j)) i = *rt.parent(i);
    while (rt.depth(j) > rt.depth(i)) j = *rt.parent(j);
    while (i != j) {
        i = *rt.parent(i);
        j = *rt.parent(j);
    }
    return i;
}

Partition cluster_by_edge_deletion(const Tree& t, const std::vector<double>& edge_weights, std::size_t k) {
    const std::size_t d = t.vertex_count();
    if (k < 1 || k > d) {
        throw InvalidInputError("cluster count " + std::to_string(k) + " must lie in [1, " + std::to_string(d) + "]");
    }
    if (edge_weights.size() != t.edges().size()) {
        throw InvalidInputError("expected one weight per tree edge");
    }
    std::vector<std::size_t> order(t.edges().size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (edge_weights[a] != edge_weights[b]) return edge_weights[a] > edge_weights[b];
        return t.edges()[a] < t.edges()[b];
    });
    // Keep the heaviest d-k edges; the k-1 at the tail of the canonical order are deleted.
    DisjointSets components(d);
    for (std::size_t s = 0; s + (k - 1) < order.size(); ++s) {
        const Edge& e = t.edges()[order[s]];
        components.unite(e.u, e.v);
    }
    Partition clusters;
    std::vector<std::size_t> slot(d, static_cast<std::size_t>(-1));
    for (Vertex v = 0; v < d; ++v) {
        const std::size_t rep = components.find(v);
        if (slot[rep] == static_cast<std::size_t>(-1)) {
            slot[rep] = clusters.size();
            clusters.emplace_back();
        }
        clusters[slot[rep]].push_back(v);
    }
    return clusters;
}

Partition cluster_by_edge_deletion(const WeightedGraph& g, const Tree& t, std::size_t k) {
    require_same_order(g, t);
    std::vector<double> weights;
    weights.reserve(t.edges().size());
    for (const Edge& e : t.edges()) weights.push_back(g.weight(e.u, e.v));
    return cluster_by_edge_deletion(t, weights, k);
}

}  // namespace treecascade
