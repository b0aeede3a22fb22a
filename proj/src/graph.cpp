#include "nashflow/graph.hpp"

#include "nashflow/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nashflow {

CommGraph::CommGraph(int n_nodes, std::vector<Edge> edges) : n_nodes_(n_nodes) {
    if (n_nodes <= 0) {
        throw std::invalid_argument("CommGraph: graph must have at least one node");
    }
    for (auto& [a, b] : edges) {
        if (a == b) {
            throw std::invalid_argument("CommGraph: self-loop at node " + std::to_string(a + 1));
        }
        if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes) {
            throw std::invalid_argument("CommGraph: edge (" + std::to_string(a + 1) + ", " +
                                        std::to_string(b + 1) + ") outside node range [1, " +
                                        std::to_string(n_nodes) + "]");
        }
        if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adjacency_.assign(static_cast<std::size_t>(n_nodes_), {});
    for (const auto& [a, b] : edges_) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

int CommGraph::max_degree() const noexcept {
    std::size_t d = 0;
    for (const auto& adj : adjacency_) d = std::max(d, adj.size());
    return static_cast<int>(d);
}

bool CommGraph::is_connected() const {
    std::vector<char> seen(static_cast<std::size_t>(n_nodes_), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : adjacency_[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n_nodes_;
}

Vector symmetric_eigenvalues(const Matrix& symmetric, double tol, int max_sweeps) {
    if (symmetric.rows() != symmetric.cols()) {
        throw DimensionError("symmetric_eigenvalues: matrix is not square");
    }
    Matrix a = symmetric;
    const Index n = a.rows();
    const double scale = std::max(1.0, a.norm());

    auto off_norm = [&] {
        double s = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    Vector eig = a.diagonal();
    std::sort(eig.data(), eig.data() + eig.size());
    return eig;
}

LaplacianInfo build_laplacian(const CommGraph& g) {
    const int n = g.n_nodes();
    LaplacianInfo info;
    info.matrix = Matrix::Zero(n, n);
    info.neighbors.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        info.neighbors[i] = g.neighbors(i);
        info.matrix(i, i) = g.degree(i);
        for (int j : g.neighbors(i)) info.matrix(i, j) = -1.0;
    }
    info.spectrum = symmetric_eigenvalues(info.matrix);
    // Round-off leaves the zero eigenvalue at ~1e-16 either side.
    for (auto& ev : info.spectrum) {
        if (std::abs(ev) < 1e-12) ev = 0.0;
    }
    info.lambda2 = n >= 2 ? info.spectrum(1) : 0.0;
    info.lambdaN = info.spectrum(n - 1);
    info.d_star = g.max_degree();
    return info;
}

CommGraph make_path(int n) {
    if (n < 2) throw std::invalid_argument("make_path: need n >= 2");
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return CommGraph(n, std::move(edges));
}

CommGraph make_cycle(int n) {
    if (n < 2) throw std::invalid_argument("make_cycle: need n >= 2");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return CommGraph(n, std::move(edges));
}

CommGraph make_complete(int n) {
    if (n < 2) throw std::invalid_argument("make_complete: need n >= 2");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return CommGraph(n, std::move(edges));
}

CommGraph make_random_connected(int n, double edge_prob, std::uint64_t seed, int max_retries) {
    if (n < 2) throw std::invalid_argument("make_random_connected: need n >= 2");
    if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
        throw std::invalid_argument("make_random_connected: edge_prob must lie in (0, 1]");
    }
    Rng rng(seed);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (uniform01(rng) < edge_prob) edges.emplace_back(i, j);
        CommGraph g(n, std::move(edges));
        if (g.is_connected()) return g;
    }
    throw std::runtime_error("make_random_connected: no connected sample in " + std::to_string(max_retries) +
                             " attempts (n = " + std::to_string(n) + ", p = " + std::to_string(edge_prob) + ")");
}

CommGraph parse_edge_list(std::string_view text, int n_nodes) {
    std::vector<Edge> edges;
    int max_label = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        long long a = 0;
        long long b = 0;
        if (!(fields >> a)) continue;  // blank or comment-only
        std::string trailing;
        if (!(fields >> b) || (fields >> trailing)) {
            throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": expected two node labels");
        }
        if (a < 1 || b < 1 || a > 1'000'000 || b > 1'000'000) {
            throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                        ": node labels are 1-based positive integers");
        }
        if (n_nodes > 0 && std::max(a, b) > n_nodes) {
            throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": node label " +
                                        std::to_string(std::max(a, b)) + " exceeds the node count " +
                                        std::to_string(n_nodes));
        }
        max_label = std::max<int>(max_label, static_cast<int>(std::max(a, b)));
        edges.emplace_back(static_cast<int>(a) - 1, static_cast<int>(b) - 1);
    }
    const int n = n_nodes > 0 ? n_nodes : max_label;
    if (n == 0) throw std::invalid_argument("edge list: no edges and no node count given");
    return CommGraph(n, std::move(edges));
}

CommGraph read_edge_list(const std::filesystem::path& path, int n_nodes) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), n_nodes);
}

Vector augmented_laplacian_apply(const LaplacianInfo& L, const Vector& x, Index block) {
    const Index n_nodes = L.n_nodes();
    require_dim(x.size(), n_nodes * block, "augmented_laplacian_apply");
    Vector out(x.size());
    for (Index i = 0; i < n_nodes; ++i) {
        auto oi = out.segment(i * block, block);
        const auto& nbrs = L.neighbors[static_cast<std::size_t>(i)];
        oi = static_cast<double>(nbrs.size()) * x.segment(i * block, block);
        for (int j : nbrs) oi -= x.segment(j * block, block);
    }
    return out;
}

}  // namespace nashflow
