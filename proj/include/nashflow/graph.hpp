#pragma once

// Undirected, unweighted communication graphs and their Laplacians.
//
// Nodes are 0-based internally. Edge-list files and configs use 1-based
// labels; the conversion happens in read_edge_list / parse_edge_list only.

#include "nashflow/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace nashflow {

using Edge = std::pair<int, int>;

class CommGraph {
public:
    /// Throws std::invalid_argument on self-loops or out-of-range endpoints.
    /// Duplicate edges (in either orientation) are collapsed.
    CommGraph(int n_nodes, std::vector<Edge> edges);

    [[nodiscard]] int n_nodes() const noexcept { return n_nodes_; }
    /// Sorted, each edge stored as (lo, hi) with lo < hi.
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<int>& neighbors(int node) const { return adjacency_.at(node); }
    [[nodiscard]] int degree(int node) const { return static_cast<int>(adjacency_.at(node).size()); }
    [[nodiscard]] int max_degree() const noexcept;
    [[nodiscard]] bool is_connected() const;

    friend bool operator==(const CommGraph&, const CommGraph&) = default;

private:
    int n_nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
};

struct LaplacianInfo {
    Matrix matrix;
    /// Ascending eigenvalues of `matrix`.
    Vector spectrum;
    double lambda2 = 0.0;
    double lambdaN = 0.0;
    int d_star = 0;
    /// Neighbour lists, kept for blockwise application.
    std::vector<std::vector<int>> neighbors;

    [[nodiscard]] int n_nodes() const noexcept { return static_cast<int>(neighbors.size()); }
};

/// Off-diagonal Frobenius tolerance for the Jacobi sweeps.
inline constexpr double kJacobiTolerance = 1e-10;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
[[nodiscard]] Vector symmetric_eigenvalues(const Matrix& symmetric, double tol = kJacobiTolerance,
                                           int max_sweeps = 100);

[[nodiscard]] LaplacianInfo build_laplacian(const CommGraph& g);

[[nodiscard]] CommGraph make_path(int n);
[[nodiscard]] CommGraph make_cycle(int n);
[[nodiscard]] CommGraph make_complete(int n);

/// Erdos-Renyi G(n, p), resampled until connected.
/// Throws std::runtime_error once `max_retries` samples have all been disconnected.
[[nodiscard]] CommGraph make_random_connected(int n, double edge_prob, std::uint64_t seed,
                                              int max_retries = 1000);

/// Parses "i j" pairs (1-based), one per line; '#' starts a comment.
/// When `n_nodes` is 0 the node count is the largest label seen.
[[nodiscard]] CommGraph parse_edge_list(std::string_view text, int n_nodes = 0);
[[nodiscard]] CommGraph read_edge_list(const std::filesystem::path& path, int n_nodes = 0);

/// (L ⊗ I_n) x computed block by block; x holds n_nodes blocks of length `block`.
[[nodiscard]] Vector augmented_laplacian_apply(const LaplacianInfo& L, const Vector& x, Index block);

}  // namespace nashflow
