#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace treecascade {

using Vertex = std::size_t;

class Rng;

/// Undirected edge stored with u < v.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    Edge() = default;
    Edge(Vertex a, Vertex b);

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Tree on vertices {0..d-1}. Edges are kept sorted, so two trees with the
/// same edge set compare equal.
class Tree {
public:
    /// The single-vertex tree.
    Tree() : Tree(1, {}) {}

    /// Throws InvalidInputError unless the edges form a spanning tree on d vertices.
    Tree(std::size_t d, std::vector<Edge> edges);

    std::size_t vertex_count() const { return d_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
    bool has_edge(Vertex a, Vertex b) const;

    /// Vertices on the unique path from `from` to `to`, both ends included.
    std::vector<Vertex> path(Vertex from, Vertex to) const;

    friend bool operator==(const Tree& a, const Tree& b) {
        return a.d_ == b.d_ && a.edges_ == b.edges_;
    }

private:
    std::size_t d_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
};

/// Tree with a distinguished root; every edge is oriented toward the root.
class RootedTree {
public:
    RootedTree(Tree tree, Vertex root);

    const Tree& tree() const { return tree_; }
    Vertex root() const { return root_; }
    std::size_t vertex_count() const { return tree_.vertex_count(); }

    /// pa(i); empty for the root.
    std::optional<Vertex> parent(Vertex i) const;
    std::size_t depth(Vertex i) const { return depth_.at(i); }

    /// Vertices in breadth-first order from the root; parents precede children.
    const std::vector<Vertex>& topological_order() const { return order_; }

    /// True if `a` lies on the directed path from the root to `i` (a vertex is
    /// its own ancestor).
    bool is_ancestor(Vertex a, Vertex i) const;

    /// anc(i): i, pa(i), pa(pa(i)), ..., root.
    std::vector<Vertex> ancestors(Vertex i) const;

    friend bool operator==(const RootedTree& a, const RootedTree& b) {
        return a.root_ == b.root_ && a.tree_ == b.tree_;
    }

private:
    Tree tree_;
    Vertex root_;
    std::vector<std::optional<Vertex>> parent_;
    std::vector<std::size_t> depth_;
    std::vector<Vertex> order_;
};

/// Complete undirected graph with finite real weights, stored once per pair.
class WeightedGraph {
public:
    /// All weights zero.
    explicit WeightedGraph(std::size_t d);

    /// Uses the upper triangle of `weights`; throws if not square, not
    /// symmetric, or non-finite.
    static WeightedGraph from_matrix(const Eigen::MatrixXd& weights);

    std::size_t vertex_count() const { return d_; }
    double weight(Vertex i, Vertex j) const;
    void set_weight(Vertex i, Vertex j, double w);

    /// Elementwise image of the weights under `f`.
    WeightedGraph transformed(const std::function<double(double)>& f) const;

private:
    std::size_t index(Vertex i, Vertex j) const;

    std::size_t d_;
    std::vector<double> upper_;
};

struct MstResult {
    Tree tree;
    double total_weight = 0.0;
    bool is_unique = true;
    std::string edge_order_used;
};

/// Human-readable description of the canonical Kruskal edge order.
extern const char* const kCanonicalEdgeOrder;

/// Strict weak order of edges used by Kruskal: weight descending, then min
/// vertex ascending, then max vertex ascending.
bool canonical_edge_less(const WeightedGraph& g, const Edge& a, const Edge& b);

double tree_weight(const WeightedGraph& g, const Tree& t);

/// Kruskal over the complete graph in canonical edge order.
MstResult maximum_spanning_tree(const WeightedGraph& g);

/// Exact cycle-property test: t is the unique maximum spanning tree iff every
/// non-tree edge is strictly lighter than every tree edge on the path it closes.
/// Throws InvalidInputError if t is not a maximum spanning tree of g.
bool mst_is_unique(const WeightedGraph& g, const Tree& t);

/// For every nonadjacent pair i, j with k the neighbour of i on the tree path
/// to j, checks W_ij < min(W_ik, W_kj). Sufficient for t to be the unique MST.
bool check_strict_triangle_condition(const WeightedGraph& g, const Tree& t);

inline constexpr std::size_t kMaxEnumerationVertices = 8;

/// Tree encoded by a Prufer sequence of length d - 2 over {0..d-1}.
Tree prufer_decode(std::size_t d, const std::vector<Vertex>& sequence);

/// Calls `visit` once per labeled spanning tree of K_d (d^(d-2) trees).
/// Throws SizeLimitError for d > 8.
void for_each_spanning_tree(std::size_t d, const std::function<void(const Tree&)>& visit);

std::vector<Tree> enumerate_spanning_trees(std::size_t d);

/// Uniformly random labeled tree.
Tree random_tree(std::size_t d, Rng& rng);

RootedTree root_tree(const Tree& t, Vertex r);

/// Deepest common ancestor of i and j.
Vertex lca(const RootedTree& rt, Vertex i, Vertex j);

using Partition = std::vector<std::vector<Vertex>>;

/// Deletes the k-1 lightest tree edges and returns the components, each sorted,
/// ordered by their smallest vertex. `edge_weights` is aligned with t.edges().
Partition cluster_by_edge_deletion(const Tree& t, const std::vector<double>& edge_weights, std::size_t k);
Partition cluster_by_edge_deletion(const WeightedGraph& g, const Tree& t, std::size_t k);

}  // namespace treecascade
