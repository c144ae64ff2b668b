// Graph construction and stratification.
//
// A network is an undirected, connected graph with a distinguished reference
// vertex. BFS from the reference partitions the vertices into strata; when
// every stratum looks the same from each of its vertices (constant counts of
// neighbours one layer down, sideways, and one layer up) the adjacency matrix
// closes into a three-term recursion on the normalized stratum vectors
//
//   A phi_i = beta_{i+1} phi_{i+1} + alpha_i phi_i + beta_i phi_{i-1},
//
// with alpha_i the within-stratum degree and beta_{i+1}^2 = b_i * c_{i+1}
// (an exact integer product). Those coefficients drive everything else in
// the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drsn/errors.hpp"

namespace drsn {

struct FullGraph {
  // Hard cap on the vertex count accepted by the builders.
  static constexpr int vertex_cap = 1 << 20;

  int n = 0;
  std::vector<std::vector<int>> adj; // sorted neighbour lists
  int reference = 0;
  int target = -1; // antipodal vertex when known, else -1

  long long edge_count() const {
    long long s = 0;
    for (const auto& row : adj) s += static_cast<long long>(row.size());
    return s / 2;
  }
};

namespace detail {

inline void check_vertex_count(long long n, const char* what) {
  if (n > FullGraph::vertex_cap)
    throw SizeLimit(std::string(what) + ": vertex count " + std::to_string(n) +
                    " exceeds cap " + std::to_string(FullGraph::vertex_cap));
}

} // namespace detail

// Even cycle C_{2m}; reference 0, antipode m. m >= 2 keeps the antipode
// distinct from the neighbours of the reference.
inline FullGraph build_cycle(int m) {
  if (m < 2) throw InvalidParameter("build_cycle: need m >= 2, got " + std::to_string(m));
  const long long n = 2LL * m;
  detail::check_vertex_count(n, "build_cycle");
  FullGraph g;
  g.n = static_cast<int>(n);
  g.adj.resize(g.n);
  for (int v = 0; v < g.n; ++v) {
    int prev = (v + g.n - 1) % g.n;
    int next = (v + 1) % g.n;
    g.adj[v] = {std::min(prev, next), std::max(prev, next)};
  }
  g.reference = 0;
  g.target = m;
  return g;
}

// Binary hypercube H(d,2) on bit strings of length d; vertices adjacent when
// they differ in one bit. Reference 0...0, antipode 1...1.
inline FullGraph build_hypercube(int d) {
  if (d < 1) throw InvalidParameter("build_hypercube: need d >= 1, got " + std::to_string(d));
  if (d > 20)
    throw SizeLimit("build_hypercube: d = " + std::to_string(d) + " gives 2^" +
                    std::to_string(d) + " vertices, cap is 2^20");
  const int n = 1 << d;
  FullGraph g;
  g.n = n;
  g.adj.resize(n);
  for (int v = 0; v < n; ++v) {
    g.adj[v].reserve(d);
    for (int b = 0; b < d; ++b) g.adj[v].push_back(v ^ (1 << b));
    std::sort(g.adj[v].begin(), g.adj[v].end());
  }
  g.reference = 0;
  g.target = n - 1;
  return g;
}

// Crown graph S_m: complete bipartite K_{m,m} minus a perfect matching.
// Left vertices 0..m-1, right vertices m..2m-1, with i adjacent to m+j for
// j != i. Reference 0; its antipode is the removed partner m (distance 3).
// m = 2 would disconnect the graph, hence m >= 3.
inline FullGraph build_crown(int m) {
  if (m < 3) throw InvalidParameter("build_crown: need m >= 3 (m = 2 is disconnected), got " + std::to_string(m));
  const long long n = 2LL * m;
  detail::check_vertex_count(n, "build_crown");
  FullGraph g;
  g.n = static_cast<int>(n);
  g.adj.resize(g.n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      g.adj[i].push_back(m + j);
      g.adj[m + i].push_back(j);
    }
  }
  for (auto& row : g.adj) std::sort(row.begin(), row.end());
  g.reference = 0;
  g.target = m;
  return g;
}

// Custom graph from adjacency lists. The input is treated as an undirected
// edge description: entries are symmetrized and deduplicated. Self loops are
// rejected; the antipode is left for stratify() to determine.
inline FullGraph make_custom(const std::vector<std::vector<int>>& adjacency, int reference = 0) {
  const long long n = static_cast<long long>(adjacency.size());
  if (n == 0) throw InvalidParameter("make_custom: empty adjacency list");
  detail::check_vertex_count(n, "make_custom");
  if (reference < 0 || reference >= n)
    throw InvalidParameter("make_custom: reference vertex " + std::to_string(reference) + " out of range");
  FullGraph g;
  g.n = static_cast<int>(n);
  g.adj.resize(g.n);
  for (int u = 0; u < g.n; ++u) {
    for (int v : adjacency[u]) {
      if (v < 0 || v >= g.n)
        throw InvalidParameter("make_custom: neighbour " + std::to_string(v) + " of vertex " +
                               std::to_string(u) + " out of range");
      if (v == u) throw InvalidParameter("make_custom: self loop at vertex " + std::to_string(u));
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
  }
  for (auto& row : g.adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  g.reference = reference;
  return g;
}

// y = A x for the sparse adjacency.
inline Eigen::VectorXd apply_adjacency(const FullGraph& g, const Eigen::VectorXd& x) {
  if (x.size() != g.n) throw InvalidParameter("apply_adjacency: vector length mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(g.n);
  for (int u = 0; u < g.n; ++u) {
    double s = 0.0;
    for (int v : g.adj[u]) s += x[v];
    y[u] = s;
  }
  return y;
}

// BFS layers around the reference vertex.
struct Stratification {
  int diameter = 0;                     // index of the last stratum
  std::vector<std::vector<int>> strata; // strata[i] = vertices at distance i
  std::vector<long long> kappa;         // stratum sizes
  std::vector<int> dist;                // distance from the reference, per vertex
  int target = -1;                      // the vertex forming the last stratum
};

// Coefficients of the three-term recursion, indexed by stratum number
// (beta[0] and beta_sq[0] are unused placeholders so that beta[i] really is
// beta_i).
struct JacobiParams {
  int d = 0;
  std::vector<double> alpha;       // size d+1
  std::vector<double> beta;        // size d+1, beta[i] = sqrt(b_{i-1} c_i) for i >= 1
  std::vector<long long> beta_sq;  // exact integer products b_{i-1} c_i
  std::vector<long long> kappa;    // stratum sizes, size d+1
};

struct StratifyResult {
  Stratification strata;
  JacobiParams jacobi;
};

// Normalized indicator of stratum i: (1/sqrt(kappa_i)) sum over its vertices.
inline Eigen::VectorXd stratum_vector(const Stratification& s, int i, int n) {
  if (i < 0 || i > s.diameter) throw InvalidParameter("stratum_vector: stratum index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  const double w = 1.0 / std::sqrt(static_cast<double>(s.kappa[i]));
  for (int u : s.strata[i]) v[u] = w;
  return v;
}

// Stratify the graph around its reference vertex and extract the recursion
// coefficients. Requires the graph to be connected, each stratum to be
// regular seen from every one of its vertices, and the farthest stratum to
// be a single vertex (the state-transfer target).
inline StratifyResult stratify(const FullGraph& g) {
  if (g.n <= 0) throw InvalidParameter("stratify: empty graph");
  if (g.reference < 0 || g.reference >= g.n)
    throw InvalidParameter("stratify: reference vertex out of range");

  Stratification s;
  s.dist.assign(g.n, -1);
  std::queue<int> q;
  s.dist[g.reference] = 0;
  q.push(g.reference);
  int reached = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    ++reached;
    for (int v : g.adj[u]) {
      if (s.dist[v] < 0) {
        s.dist[v] = s.dist[u] + 1;
        q.push(v);
      }
    }
  }
  if (reached != g.n)
    throw UnsupportedTopology("stratify: graph is not connected (" + std::to_string(reached) +
                              " of " + std::to_string(g.n) + " vertices reachable from the reference)");

  s.diameter = *std::max_element(s.dist.begin(), s.dist.end());
  s.strata.assign(s.diameter + 1, {});
  for (int v = 0; v < g.n; ++v) s.strata[s.dist[v]].push_back(v);
  s.kappa.resize(s.diameter + 1);
  for (int i = 0; i <= s.diameter; ++i) s.kappa[i] = static_cast<long long>(s.strata[i].size());

  if (s.kappa[s.diameter] != 1)
    throw UnsupportedTopology("stratify: farthest stratum has " +
                              std::to_string(s.kappa[s.diameter]) +
                              " vertices; a unique antipodal target is required");
  s.target = s.strata[s.diameter][0];

  // Per-stratum neighbour counts: down (c), sideways (a), up (b). They must
  // be identical for every vertex of the stratum or the recursion does not
  // close.
  const int d = s.diameter;
  std::vector<long long> a(d + 1), b(d + 1, 0), c(d + 1, 0);
  for (int i = 0; i <= d; ++i) {
    long long a0 = -1, b0 = -1, c0 = -1;
    for (int u : s.strata[i]) {
      long long cu = 0, au = 0, bu = 0;
      for (int v : g.adj[u]) {
        const int dv = s.dist[v];
        if (dv == i - 1) ++cu;
        else if (dv == i) ++au;
        else ++bu;
      }
      if (a0 < 0) {
        a0 = au; b0 = bu; c0 = cu;
      } else if (au != a0 || bu != b0 || cu != c0) {
        throw NotStratifiable("stratify: stratum " + std::to_string(i) +
                              " is not regular: vertex " + std::to_string(u) +
                              " sees (down,side,up) = (" + std::to_string(cu) + "," +
                              std::to_string(au) + "," + std::to_string(bu) +
                              "), expected (" + std::to_string(c0) + "," +
                              std::to_string(a0) + "," + std::to_string(b0) + ")");
      }
    }
    a[i] = a0; b[i] = b0; c[i] = c0;
  }

  JacobiParams jp;
  jp.d = d;
  jp.alpha.resize(d + 1);
  jp.beta.assign(d + 1, 0.0);
  jp.beta_sq.assign(d + 1, 0);
  jp.kappa = s.kappa;
  for (int i = 0; i <= d; ++i) jp.alpha[i] = static_cast<double>(a[i]);
  for (int i = 1; i <= d; ++i) {
    jp.beta_sq[i] = b[i - 1] * c[i];
    if (jp.beta_sq[i] <= 0)
      throw NotStratifiable("stratify: vanishing coupling between strata " +
                            std::to_string(i - 1) + " and " + std::to_string(i));
    jp.beta[i] = std::sqrt(static_cast<double>(jp.beta_sq[i]));
  }
  return {std::move(s), jp};
}

// Dense all-pairs distance table with the distance-i indicator matrices as
// views. Cost is one BFS per vertex and n^2 bytes of storage, so it is kept
// behind a cap; the closed-form pipeline never needs it (only the dense
// oracle and the intersection-number check do).
struct DistanceMatrices {
  static constexpr int default_cap = 8192;

  int n = 0;
  int diameter = 0;
  std::vector<std::uint8_t> table; // row-major distances

  int distance(int u, int v) const { return table[static_cast<std::size_t>(u) * n + v]; }
  // Entry (u,v) of the distance-i indicator A_i.
  bool indicator(int i, int u, int v) const { return distance(u, v) == i; }
};

inline DistanceMatrices all_pairs_distances(const FullGraph& g, int cap = DistanceMatrices::default_cap) {
  if (g.n > cap)
    throw SizeLimit("all_pairs_distances: " + std::to_string(g.n) +
                    " vertices exceeds dense cap " + std::to_string(cap));
  DistanceMatrices dm;
  dm.n = g.n;
  dm.table.assign(static_cast<std::size_t>(g.n) * g.n, 0);
  std::vector<int> dist(g.n);
  std::vector<int> frontier;
  for (int src = 0; src < g.n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    frontier.assign(1, src);
    int level = 0;
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int u : frontier) {
        for (int v : g.adj[u]) {
          if (dist[v] < 0) {
            dist[v] = level + 1;
            next.push_back(v);
          }
        }
      }
      frontier = std::move(next);
      ++level;
    }
    for (int v = 0; v < g.n; ++v) {
      if (dist[v] < 0)
        throw UnsupportedTopology("all_pairs_distances: graph is not connected");
      if (dist[v] > 255) throw SizeLimit("all_pairs_distances: diameter exceeds distance table range");
      dm.table[static_cast<std::size_t>(src) * g.n + v] = static_cast<std::uint8_t>(dist[v]);
      dm.diameter = std::max(dm.diameter, dist[v]);
    }
  }
  return dm;
}

// Intersection-number audit: a graph is distance-regular when the number of
// vertices at distance i from u and j from v depends only on (i, j) and the
// distance between u and v. Reports the table p[k][i][j] and the first
// violation found, if any.
struct IntersectionReport {
  bool consistent = true;
  int diameter = 0;
  std::vector<std::vector<std::vector<long long>>> p; // p[k][i][j]

  // first violation, valid when !consistent
  int at_u = -1, at_v = -1, at_i = -1, at_j = -1;
  long long expected = 0, found = 0;

  std::string message() const {
    if (consistent) return "distance-regular: intersection numbers consistent";
    return "not distance-regular: pair (" + std::to_string(at_u) + "," + std::to_string(at_v) +
           ") has " + std::to_string(found) + " common vertices at distances (" +
           std::to_string(at_i) + "," + std::to_string(at_j) + "), expected " +
           std::to_string(expected);
  }
};

inline IntersectionReport check_distance_regularity(const FullGraph& g, int cap = 512) {
  if (g.n > cap)
    throw SizeLimit("check_distance_regularity: " + std::to_string(g.n) +
                    " vertices exceeds cap " + std::to_string(cap) +
                    " for the cubic intersection-number scan");
  const DistanceMatrices dm = all_pairs_distances(g, cap);
  const int d = dm.diameter;

  IntersectionReport rep;
  rep.diameter = d;
  rep.p.assign(d + 1, std::vector<std::vector<long long>>(d + 1, std::vector<long long>(d + 1, -1)));

  std::vector<std::vector<long long>> cnt(d + 1, std::vector<long long>(d + 1));
  for (int u = 0; u < g.n; ++u) {
    for (int v = 0; v < g.n; ++v) {
      const int k = dm.distance(u, v);
      for (auto& row : cnt) std::fill(row.begin(), row.end(), 0);
      for (int w = 0; w < g.n; ++w) ++cnt[dm.distance(u, w)][dm.distance(w, v)];
      for (int i = 0; i <= d; ++i) {
        for (int j = 0; j <= d; ++j) {
          long long& ref = rep.p[k][i][j];
          if (ref < 0) {
            ref = cnt[i][j];
          } else if (ref != cnt[i][j]) {
            rep.consistent = false;
            rep.at_u = u; rep.at_v = v; rep.at_i = i; rep.at_j = j;
            rep.expected = ref; rep.found = cnt[i][j];
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

} // namespace drsn
