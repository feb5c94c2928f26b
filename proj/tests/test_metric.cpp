#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lrp/metric.hpp"
#include "lrp/rng.hpp"
#include "oracles.hpp"

using namespace lrp;

namespace {

Params free_params(int d, double s, double beta, bool force_nn = false) {
  return Params{d, s, beta, Norm::euclidean, Boundary::free, force_nn};
}

Configuration nn_chain(Coord length, std::vector<std::pair<Point, Point>> extra = {}) {
  const Box box = make_box({0}, length);
  for (Coord i = 0; i + 1 < length; ++i) extra.push_back({{i}, {i + 1}});
  return Configuration::from_coordinate_edges(free_params(1, 3, 0, true), box, 0, extra, {});
}

}  // namespace

TEST_CASE("nearest neighbour chain distances are exact") {
  const auto c = nn_chain(32);
  for (Coord x : {1, 5, 31}) {
    const auto res = chemical_distance(c, {0}, {x}, true);
    REQUIRE(res.reachable());
    CHECK(*res.value == x);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->length() == std::size_t(x));
    CHECK(is_valid_path(c, *res.witness));
  }
  CHECK(*chemical_distance(c, {4}, {4}).value == 0);
}

TEST_CASE("a single long edge becomes a shortcut") {
  const auto c = nn_chain(32, {{{0}, {10}}});
  CHECK(*chemical_distance(c, {0}, {10}).value == 1);
  CHECK(*chemical_distance(c, {0}, {11}).value == 2);
}

TEST_CASE("unreachable endpoints are reported as such") {
  const Box box = make_box({0}, 8);
  const auto c = Configuration::from_coordinate_edges(free_params(1, 3, 0), box, 0,
                                                      {{{0}, {1}}, {{5}, {6}}}, {});
  const auto res = chemical_distance(c, {0}, {6});
  CHECK(!res.reachable());
  CHECK(!res.value.has_value());
  CHECK_THROWS_AS(chemical_distance(c, {0}, {99}), std::invalid_argument);
}

TEST_CASE("distances match the dense oracle on random configurations") {
  int checked = 0;
  for (int it = 0; it < 40; ++it) {
    const bool two_d = it % 2 == 1;
    const double beta = it % 4 < 2 ? 0.2 : 1.0;
    const int d = two_d ? 2 : 1;
    const Coord L = two_d ? 6 + (it % 7) : 16 + 3 * (it % 16);
    const Coord halo = it % 3;
    const auto config = sample_configuration(free_params(d, two_d ? 4.0 : 2.5, beta),
                                             make_box(Point(d, 0), L), halo,
                                             derive_seed(555, it), SamplerBackend::skip);
    const auto oracle = oracles::dense_distances(config);
    const Graph graph(config);
    const Indexer& idx = config.indexer();
    for (Coord src = 0; src < idx.size(); ++src) {
      if (!config.in_box(idx.point_of(src))) continue;
      const auto dist = graph.bfs_distances(src);
      for (Coord dst = 0; dst < idx.size(); ++dst) {
        if (!config.in_box(idx.point_of(dst))) continue;
        CHECK(dist[dst] == oracle[src][dst]);
        ++checked;
      }
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("path stats reduce to hop count and endpoint displacement") {
  const Params p = free_params(1, 3, 1);
  CHECK(path_stats(p, Path{{{5}}}).hops == 0);
  CHECK(path_stats(p, Path{{{5}}}).displacement == 0.0);
  const auto st = path_stats(p, Path{{{0}, {1}, {2}}});
  CHECK(st.hops == 2);
  CHECK(st.displacement == 2.0);

  oracles::TestRng rng(21);
  const Params p2 = free_params(2, 3, 1);
  for (int it = 0; it < 50; ++it) {
    Path path;
    for (int i = 0; i < 6; ++i) path.vertices.push_back({rng.uniform(-9, 9), rng.uniform(-9, 9)});
    const auto stats = path_stats(p2, path);
    CHECK(stats.hops == 5);
    Point delta{path.vertices.back()[0] - path.vertices.front()[0],
                path.vertices.back()[1] - path.vertices.front()[1]};
    CHECK(stats.displacement == doctest::Approx(norm_value(delta, p2.norm)));
  }
}

TEST_CASE("restricted distance sees only the region's vertices") {
  // 0 and 2 connect only through vertex 8; regions excluding 8 disconnect them.
  const Box box = make_box({0}, 10);
  const auto c = Configuration::from_coordinate_edges(free_params(1, 3, 0), box, 0,
                                                      {{{0}, {8}}, {{8}, {2}}}, {});
  CHECK(*restricted_distance(c, {0}, {2}, rect_of(box)).value == 2);
  CHECK(*restricted_distance(c, {0}, {2}, Rect{{0}, {9}}).value == 2);
  const auto cut = restricted_distance(c, {0}, {2}, Rect{{0}, {8}});
  CHECK(!cut.reachable());
  CHECK(*chemical_distance(c, {0}, {2}).value == 2);
  CHECK_THROWS_AS(restricted_distance(c, {0}, {9}, Rect{{0}, {4}}), std::invalid_argument);
}

TEST_CASE("restricted distance equals the oracle on induced subgraphs") {
  oracles::TestRng rng(31);
  for (int it = 0; it < 25; ++it) {
    const auto config = sample_configuration(free_params(1, 2, 0.9, true), make_box({0}, 24), 0,
                                             derive_seed(77, it), SamplerBackend::skip);
    const Coord lo = rng.uniform(0, 10), hi = rng.uniform(lo + 2, 23);
    const Rect region{{lo}, {hi - lo + 1}};
    // Oracle: drop edges leaving the region, then run the dense solver.
    std::vector<std::pair<Point, Point>> kept;
    for (const auto& [u, v] : config.edges()) {
      const Point x = config.point_of(u), y = config.point_of(v);
      if (region.contains(x) && region.contains(y)) kept.push_back({x, y});
    }
    const auto induced = Configuration::from_coordinate_edges(config.params(), config.box(), 0, kept, {});
    const auto oracle = oracles::dense_distances(induced);
    for (int rep = 0; rep < 10; ++rep) {
      const Point a{rng.uniform(lo, hi)}, b{rng.uniform(lo, hi)};
      const auto got = restricted_distance(config, a, b, region);
      const int want = oracle[induced.id_of(a)][induced.id_of(b)];
      if (want == oracles::kUnreachable) {
        CHECK(!got.reachable());
      } else {
        CHECK(*got.value == want);
      }
    }
  }
}

TEST_CASE("triangle inequality and edge monotonicity hold on samples") {
  oracles::TestRng rng(41);
  for (int it = 0; it < 15; ++it) {
    const auto config = sample_configuration(free_params(1, 2.2, 0.7, true), make_box({0}, 40), 0,
                                             derive_seed(99, it), SamplerBackend::skip);
    const Graph g(config);
    for (int rep = 0; rep < 20; ++rep) {
      const Coord x = rng.uniform(0, 39), y = rng.uniform(0, 39), z = rng.uniform(0, 39);
      const auto dx = g.bfs_distances(config.id_of({x}));
      CHECK(dx[config.id_of({z})] <= dx[config.id_of({y})] +
                                         *chemical_distance(config, {y}, {z}).value);
    }
    // Superset edge set: distances never increase.
    std::vector<std::pair<Point, Point>> edges;
    for (const auto& [u, v] : config.edges()) edges.push_back({config.point_of(u), config.point_of(v)});
    edges.push_back({{rng.uniform(0, 19)}, {rng.uniform(20, 39)}});
    const auto bigger = Configuration::from_coordinate_edges(config.params(), config.box(), 0, edges, {});
    for (int rep = 0; rep < 10; ++rep) {
      const Coord a = rng.uniform(0, 39), b = rng.uniform(0, 39);
      CHECK(*chemical_distance(bigger, {a}, {b}).value <= *chemical_distance(config, {a}, {b}).value);
    }
  }
}

TEST_CASE("witnesses verify against the configuration") {
  for (int it = 0; it < 10; ++it) {
    const auto config = sample_configuration(free_params(2, 3.5, 1.2, true), make_box({0, 0}, 9), 1,
                                             derive_seed(123, it), SamplerBackend::skip);
    oracles::TestRng rng(it);
    for (int rep = 0; rep < 10; ++rep) {
      const Point a{rng.uniform(0, 8), rng.uniform(0, 8)};
      const Point b{rng.uniform(0, 8), rng.uniform(0, 8)};
      const auto res = chemical_distance(config, a, b, true);
      REQUIRE(res.reachable());
      REQUIRE(res.witness.has_value());
      CHECK(is_valid_path(config, *res.witness));
      CHECK(std::int64_t(res.witness->length()) == *res.value);
      CHECK(res.witness->vertices.front() == a);
      CHECK(res.witness->vertices.back() == b);
    }
  }
}
