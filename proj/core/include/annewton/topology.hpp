#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "annewton/scalar.hpp"

namespace annewton {

/// Undirected simple graph on agents 0..n-1.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Throws InvalidGraph on self-loops, duplicate edges, or out-of-range
  /// indices. Edges are stored normalized (i < j) and sorted.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }
  std::size_t max_degree() const noexcept;
  bool has_edge(std::size_t i, std::size_t j) const;

  /// Combinatorial Laplacian L = diag(deg) - A.
  Mat<double> laplacian() const;

  static Graph complete(std::size_t n);
  static Graph path(std::size_t n);
  static Graph ring(std::size_t n);
  static Graph star(std::size_t n);
  /// G(n, p) resampled until connected (at most 1000 draws, then a path is
  /// overlaid so the result is always connected).
  static Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// A graph together with a validated consensus matrix. Immutable.
class ConsensusNetwork {
 public:
  const Graph& graph() const noexcept { return graph_; }
  const Mat<double>& W() const noexcept { return W_; }
  std::size_t size() const noexcept { return graph_.size(); }
  /// Smallest / largest diagonal entry of W.
  double delta() const noexcept { return delta_; }
  double Delta() const noexcept { return Delta_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return graph_.neighbors(i); }

  /// Checks every consensus-matrix requirement explicitly and throws the
  /// matching ErrorCode on the first violation.
  static ConsensusNetwork validate(const Mat<double>& W, const Graph& graph);

 private:
  ConsensusNetwork(Graph graph, Mat<double> W, double delta, double Delta)
      : graph_(std::move(graph)), W_(std::move(W)), delta_(delta), Delta_(Delta) {}

  Graph graph_;
  Mat<double> W_;
  double delta_;
  double Delta_;
};

inline constexpr double kMatrixTolerance = 1e-12;
inline constexpr double kConnectivityGap = 1e-10;

/// W = I - kappa * L.
ConsensusNetwork laplacian_weights(const Graph& graph, double kappa);

/// W_ij = 1 / (1 + max(deg i, deg j)) on edges, W_ii = 1 - sum_j W_ij.
ConsensusNetwork metropolis_weights(const Graph& graph);

/// Second-smallest eigenvalue of a symmetric PSD matrix (e.g. I - W or L).
double algebraic_connectivity(const Mat<double>& laplacian_like);

// Text formats ---------------------------------------------------------------

/// Edge list: a header line `n <count>` followed by one `i j` pair per line.
/// Blank lines and lines starting with '#' are ignored.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& graph);

/// n rows of comma-separated reals.
Mat<double> read_matrix_csv(std::istream& in);
Mat<double> read_matrix_csv_file(const std::string& path);
void write_matrix_csv(std::ostream& out, const Mat<double>& m);

/// Derives the graph from the off-diagonal nonzeros of W (W_ij > 0 or
/// W_ji > 0 counts as an edge).
Graph graph_from_weights(const Mat<double>& W);

}  // namespace annewton
