#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "drsn/graph.hpp"

using namespace drsn;

TEST_CASE("cycle builder", "[graph]") {
  const FullGraph g = build_cycle(3); // C_6
  REQUIRE(g.n == 6);
  REQUIRE(g.reference == 0);
  REQUIRE(g.target == 3);
  for (int v = 0; v < g.n; ++v) {
    REQUIRE(g.adj[v].size() == 2);
    const int prev = (v + 5) % 6, next = (v + 1) % 6;
    REQUIRE(std::count(g.adj[v].begin(), g.adj[v].end(), prev) == 1);
    REQUIRE(std::count(g.adj[v].begin(), g.adj[v].end(), next) == 1);
  }
  REQUIRE(g.edge_count() == 6);

  SECTION("parameter domain") {
    REQUIRE_THROWS_AS(build_cycle(1), InvalidParameter);
    REQUIRE_THROWS_AS(build_cycle(0), InvalidParameter);
    REQUIRE_THROWS_AS(build_cycle((1 << 19) + 1), SizeLimit);
  }
  SECTION("largest admissible cycle") {
    const FullGraph big = build_cycle(1 << 19);
    REQUIRE(big.n == (1 << 20));
    REQUIRE(big.adj[0].size() == 2);
  }
}

TEST_CASE("hypercube builder", "[graph]") {
  const FullGraph g = build_hypercube(3);
  REQUIRE(g.n == 8);
  REQUIRE(g.target == 7);
  for (int v = 0; v < g.n; ++v) {
    REQUIRE(g.adj[v].size() == 3);
    for (int u : g.adj[v]) {
      const int diff = u ^ v;
      REQUIRE((diff & (diff - 1)) == 0); // single-bit difference
    }
  }
  REQUIRE_THROWS_AS(build_hypercube(0), InvalidParameter);
  REQUIRE_THROWS_AS(build_hypercube(21), SizeLimit);
}

TEST_CASE("crown builder", "[graph]") {
  const FullGraph g = build_crown(3);
  REQUIRE(g.n == 6);
  REQUIRE(g.target == 3);
  REQUIRE(g.adj[0] == std::vector<int>({4, 5})); // the matched partner 3 is absent
  REQUIRE(g.adj[3] == std::vector<int>({1, 2}));
  for (int v = 0; v < g.n; ++v) REQUIRE(g.adj[v].size() == 2);

  const FullGraph g5 = build_crown(5);
  REQUIRE(g5.n == 10);
  for (int v = 0; v < g5.n; ++v) REQUIRE(g5.adj[v].size() == 4);

  REQUIRE_THROWS_AS(build_crown(2), InvalidParameter);
}

TEST_CASE("custom graphs symmetrize and validate", "[graph]") {
  // one-directional input becomes an undirected triangle with a tail
  const FullGraph g = make_custom({{1}, {2}, {0}, {0}}, 0);
  REQUIRE(g.adj[0] == std::vector<int>({1, 2, 3}));
  REQUIRE(g.adj[3] == std::vector<int>({0}));

  REQUIRE_THROWS_AS(make_custom({{1}, {0, 5}}, 0), InvalidParameter); // out of range
  REQUIRE_THROWS_AS(make_custom({{0}}, 0), InvalidParameter);        // self loop
  REQUIRE_THROWS_AS(make_custom({{1}, {0}}, 7), InvalidParameter);   // bad reference
  REQUIRE_THROWS_AS(make_custom({}, 0), InvalidParameter);
}

TEST_CASE("stratification of the canonical families", "[graph]") {
  SECTION("C_4") {
    const StratifyResult sr = stratify(build_cycle(2));
    REQUIRE(sr.strata.diameter == 2);
    REQUIRE(sr.strata.kappa == std::vector<long long>({1, 2, 1}));
    REQUIRE(sr.strata.target == 2);
    REQUIRE(sr.jacobi.alpha == std::vector<double>({0.0, 0.0, 0.0}));
    REQUIRE(sr.jacobi.beta_sq == std::vector<long long>({0, 2, 2}));
  }
  SECTION("C_6") {
    const StratifyResult sr = stratify(build_cycle(3));
    REQUIRE(sr.strata.kappa == std::vector<long long>({1, 2, 2, 1}));
    REQUIRE(sr.jacobi.beta_sq == std::vector<long long>({0, 2, 1, 2}));
  }
  SECTION("H(4,2)") {
    const StratifyResult sr = stratify(build_hypercube(4));
    REQUIRE(sr.strata.diameter == 4);
    REQUIRE(sr.strata.kappa == std::vector<long long>({1, 4, 6, 4, 1}));
    // beta_i^2 = i (d - i + 1)
    REQUIRE(sr.jacobi.beta_sq == std::vector<long long>({0, 4, 6, 6, 4}));
    REQUIRE(sr.strata.target == 15);
  }
  SECTION("crown m=5") {
    const StratifyResult sr = stratify(build_crown(5));
    REQUIRE(sr.strata.diameter == 3);
    REQUIRE(sr.strata.kappa == std::vector<long long>({1, 4, 4, 1}));
    REQUIRE(sr.jacobi.beta_sq == std::vector<long long>({0, 4, 9, 4}));
    REQUIRE(sr.jacobi.alpha == std::vector<double>({0.0, 0.0, 0.0, 0.0}));
  }
  SECTION("stratum sizes always account for every vertex") {
    for (int m : {2, 3, 5, 8}) {
      const StratifyResult sr = stratify(build_cycle(m));
      const long long total =
          std::accumulate(sr.strata.kappa.begin(), sr.strata.kappa.end(), 0LL);
      REQUIRE(total == 2 * m);
    }
  }
  SECTION("large hypercube stratifies with binomial strata") {
    const StratifyResult sr = stratify(build_hypercube(16));
    REQUIRE(sr.strata.diameter == 16);
    REQUIRE(sr.strata.kappa[8] == 12870); // C(16,8)
  }
}

TEST_CASE("stratify rejects unusable graphs", "[graph]") {
  SECTION("disconnected") {
    REQUIRE_THROWS_AS(stratify(make_custom({{1}, {0}, {3}, {2}}, 0)), UnsupportedTopology);
  }
  SECTION("no unique antipode") {
    // path of three vertices seen from the middle
    REQUIRE_THROWS_AS(stratify(make_custom({{1}, {0, 2}, {1}}, 1)), UnsupportedTopology);
  }
  SECTION("stratum not regular") {
    // 0-1, 0-2, 1-3, 2-3, 1-5, 5-3, 3-4: vertex 1 sees two vertices upward,
    // vertex 2 only one, both in stratum 1
    const FullGraph g = make_custom({{1, 2}, {3, 5}, {3}, {4, 5}, {}, {}}, 0);
    REQUIRE_THROWS_AS(stratify(g), NotStratifiable);
  }
}

TEST_CASE("stratum vectors are the normalized layer indicators", "[graph]") {
  const FullGraph g = build_crown(4);
  const StratifyResult sr = stratify(g);
  for (int i = 0; i <= sr.strata.diameter; ++i) {
    const Eigen::VectorXd phi = stratum_vector(sr.strata, i, g.n);
    REQUIRE(std::abs(phi.norm() - 1.0) < 1e-14);
    // support exactly on stratum i
    for (int v = 0; v < g.n; ++v) {
      const bool in_stratum = sr.strata.dist[v] == i;
      REQUIRE((phi[v] != 0.0) == in_stratum);
    }
  }
  REQUIRE_THROWS_AS(stratum_vector(sr.strata, 9, g.n), InvalidParameter);
}

TEST_CASE("adjacency application matches neighbour sums", "[graph]") {
  const FullGraph g = build_hypercube(3);
  std::mt19937 rng(991);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd x(g.n);
  for (int v = 0; v < g.n; ++v) x[v] = uni(rng);
  const Eigen::VectorXd y = apply_adjacency(g, x);
  for (int v = 0; v < g.n; ++v) {
    double s = 0.0;
    for (int u : g.adj[v]) s += x[u];
    REQUIRE(std::abs(y[v] - s) < 1e-15);
  }
  REQUIRE_THROWS_AS(apply_adjacency(g, Eigen::VectorXd::Zero(3)), InvalidParameter);
}

TEST_CASE("all-pairs distances", "[graph]") {
  const FullGraph g = build_cycle(3);
  const DistanceMatrices dm = all_pairs_distances(g);
  REQUIRE(dm.diameter == 3);
  REQUIRE(dm.distance(0, 3) == 3);
  REQUIRE(dm.distance(1, 5) == 2);
  REQUIRE(dm.indicator(2, 1, 5));
  REQUIRE_FALSE(dm.indicator(1, 1, 5));
  for (int u = 0; u < g.n; ++u)
    for (int v = 0; v < g.n; ++v) REQUIRE(dm.distance(u, v) == dm.distance(v, u));

  REQUIRE_THROWS_AS(all_pairs_distances(g, 4), SizeLimit);
  REQUIRE_THROWS_AS(all_pairs_distances(make_custom({{1}, {0}, {3}, {2}}, 0)),
                    UnsupportedTopology);
}

TEST_CASE("distance-regularity audit", "[graph]") {
  SECTION("regular families pass") {
    REQUIRE(check_distance_regularity(build_cycle(3)).consistent);
    REQUIRE(check_distance_regularity(build_hypercube(4)).consistent);
    REQUIRE(check_distance_regularity(build_crown(4)).consistent);
    // odd cycle through the custom path
    const FullGraph c5 = make_custom({{1, 4}, {0, 2}, {1, 3}, {2, 4}, {3, 0}}, 0);
    REQUIRE(check_distance_regularity(c5).consistent);
  }
  SECTION("intersection numbers have the expected values") {
    const IntersectionReport cyc = check_distance_regularity(build_cycle(2));
    REQUIRE(cyc.consistent);
    REQUIRE(cyc.p[1][1][1] == 0); // adjacent vertices in C_4 share no neighbour
    const IntersectionReport hyp = check_distance_regularity(build_hypercube(3));
    REQUIRE(hyp.p[2][1][1] == 2); // distance-2 pairs share two neighbours
    REQUIRE(hyp.p[0][1][1] == 3); // valency on the diagonal
  }
  SECTION("a path is stratifiable from its end but not distance-regular") {
    const FullGraph p3 = make_custom({{1}, {0, 2}, {1}}, 0);
    REQUIRE_NOTHROW(stratify(p3));
    const IntersectionReport rep = check_distance_regularity(p3);
    REQUIRE_FALSE(rep.consistent);
    REQUIRE(rep.message().find("not distance-regular") != std::string::npos);
  }
  SECTION("size cap") {
    REQUIRE_THROWS_AS(check_distance_regularity(build_cycle(300)), SizeLimit);
  }
}
