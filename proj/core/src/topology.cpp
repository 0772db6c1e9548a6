#include "annewton/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "annewton/error.hpp"
#include "annewton/rng.hpp"

namespace annewton {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), adjacency_(n) {
  if (n < 2) throw Error(ErrorCode::InvalidGraph, fmt::format("need at least 2 agents, got {}", n));
  for (auto& [i, j] : edges) {
    if (i >= n || j >= n)
      throw Error(ErrorCode::InvalidGraph, fmt::format("edge ({}, {}) out of range for n = {}", i, j, n));
    if (i == j) throw Error(ErrorCode::InvalidGraph, fmt::format("self-loop at {}", i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end())
    throw Error(ErrorCode::InvalidGraph, fmt::format("duplicate edge ({}, {})", dup->first, dup->second));
  edges_ = std::move(edges);
  for (const auto& [i, j] : edges_) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (const auto& adj : adjacency_) best = std::max(best, adj.size());
  return best;
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  const auto& adj = adjacency_.at(i);
  return std::binary_search(adj.begin(), adj.end(), j);
}

Mat<double> Graph::laplacian() const {
  Mat<double> L = Mat<double>::Zero(n_, n_);
  for (const auto& [i, j] : edges_) {
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
    L(i, i) += 1.0;
    L(j, j) += 1.0;
  }
  return L;
}

Graph Graph::complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph Graph::path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph Graph::ring(std::size_t n) {
  if (n < 3) return path(n);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

Graph Graph::star(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return Graph(n, std::move(e));
}

Graph Graph::erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform01() < p) e.emplace_back(i, j);
    Graph g(n, std::move(e));
    if (algebraic_connectivity(g.laplacian()) > kConnectivityGap) return g;
  }
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j)
      if (rng.uniform01() < p) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

double algebraic_connectivity(const Mat<double>& laplacian_like) {
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(laplacian_like, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

ConsensusNetwork ConsensusNetwork::validate(const Mat<double>& W, const Graph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.size());
  if (W.rows() != n || W.cols() != n)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("W is {}x{} but the graph has {} agents", W.rows(), W.cols(), n));
  if (!W.allFinite()) throw Error(ErrorCode::WeightOutOfRange, "W contains non-finite entries");

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(W(i, j) - W(j, i)) > kMatrixTolerance)
        throw Error(ErrorCode::NotSymmetric,
                    fmt::format("W({0},{1}) = {2} but W({1},{0}) = {3}", i, j, W(i, j), W(j, i)));

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (W(i, j) < 0.0)
        throw Error(ErrorCode::NegativeEntry, fmt::format("W({},{}) = {} < 0", i, j, W(i, j)));

  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = W.row(i).sum();
    if (std::abs(s - 1.0) > kMatrixTolerance)
      throw Error(ErrorCode::NotRowStochastic, fmt::format("row {} sums to {:.17g}, expected 1", i, s));
  }

  double lo = W(0, 0), hi = W(0, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = W(i, i);
    if (!(d > 0.0 && d < 1.0))
      throw Error(ErrorCode::DiagonalOutOfRange, fmt::format("W({0},{0}) = {1} is not in (0, 1)", i, d));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool edge = graph.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (edge != (W(i, j) > 0.0))
        throw Error(ErrorCode::SparsityMismatch,
                    edge ? fmt::format("edge ({},{}) has zero weight", i, j)
                         : fmt::format("W({},{}) = {} but ({},{}) is not an edge", i, j, W(i, j), i, j));
      if (W(i, j) >= 1.0)
        throw Error(ErrorCode::WeightOutOfRange, fmt::format("W({},{}) = {} is not < 1", i, j, W(i, j)));
    }

  const Mat<double> I_minus_W = Mat<double>::Identity(n, n) - W;
  const double gap = algebraic_connectivity(0.5 * (I_minus_W + I_minus_W.transpose()));
  if (!(gap > kConnectivityGap))
    throw Error(ErrorCode::DisconnectedGraph,
                fmt::format("second eigenvalue of I - W is {:.3g}; null space of I - W is not span{{1}}", gap));

  return ConsensusNetwork(graph, W, lo, hi);
}

ConsensusNetwork laplacian_weights(const Graph& graph, double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::WeightOutOfRange, fmt::format("kappa = {} must be positive", kappa));
  const Mat<double> L = graph.laplacian();
  if (!(algebraic_connectivity(L) > kConnectivityGap))
    throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");
  const auto n = static_cast<Eigen::Index>(graph.size());
  const Mat<double> W = Mat<double>::Identity(n, n) - kappa * L;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(W(i, i) > 0.0 && W(i, i) < 1.0))
      throw Error(ErrorCode::WeightOutOfRange,
                  fmt::format("kappa = {0} gives W({1},{1}) = {2}; need kappa < 1 / max degree = {3}", kappa, i,
                              W(i, i), 1.0 / static_cast<double>(graph.max_degree())));
  return ConsensusNetwork::validate(W, graph);
}

ConsensusNetwork metropolis_weights(const Graph& graph) {
  if (!(algebraic_connectivity(graph.laplacian()) > kConnectivityGap))
    throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");
  const auto n = static_cast<Eigen::Index>(graph.size());
  Mat<double> W = Mat<double>::Zero(n, n);
  for (const auto& [i, j] : graph.edges()) {
    const double w = 1.0 / (1.0 + static_cast<double>(std::max(graph.degree(i), graph.degree(j))));
    W(i, j) = w;
    W(j, i) = w;
  }
  for (Eigen::Index i = 0; i < n; ++i) W(i, i) = 1.0 - W.row(i).sum();
  return ConsensusNetwork::validate(W, graph);
}

namespace {

bool skip_line(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  return in;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n;
  std::vector<Graph::Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream ss(line);
    if (!n) {
      std::string tag;
      std::size_t count = 0;
      if (!(ss >> tag >> count) || tag != "n")
        throw Error(ErrorCode::ConfigParse, fmt::format("line {}: expected header 'n <count>'", line_no));
      n = count;
      continue;
    }
    long long i = -1, j = -1;
    if (!(ss >> i >> j) || i < 0 || j < 0)
      throw Error(ErrorCode::ConfigParse, fmt::format("line {}: expected 'i j' with non-negative indices", line_no));
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  if (!n) throw Error(ErrorCode::ConfigParse, "edge list has no 'n <count>' header");
  return Graph(*n, std::move(edges));
}

Graph read_edge_list_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "n " << graph.size() << '\n';
  for (const auto& [i, j] : graph.edges()) out << i << ' ' << j << '\n';
}

Mat<double> read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigParse, fmt::format("line {}: '{}' is not a number", line_no, cell));
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw Error(ErrorCode::ConfigParse, "matrix CSV is empty");
  Mat<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("row {} has {} entries, expected {} (matrix must be square)", i, rows[i].size(), n));
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Mat<double> read_matrix_csv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Mat<double>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt::format("{:.17g}", m(i, j));
    out << '\n';
  }
}

Graph graph_from_weights(const Mat<double>& W) {
  std::vector<Graph::Edge> edges;
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = i + 1; j < W.cols(); ++j)
      if (W(i, j) > 0.0 || W(j, i) > 0.0) edges.emplace_back(i, j);
  return Graph(static_cast<std::size_t>(W.rows()), std::move(edges));
}

}  // namespace annewton
