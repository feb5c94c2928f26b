#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "lrp/lattice.hpp"
#include "oracles.hpp"

using namespace lrp;

TEST_CASE("connection probability matches the clamped kernel") {
  Params p1{1, 3.0, 1.0, Norm::euclidean, Boundary::free, false};
  CHECK(connection_probability(p1, {2}) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(connection_probability(p1, {1}) == doctest::Approx(1.0));
  CHECK(connection_probability(p1, {-2}) == connection_probability(p1, {2}));

  Params p2{2, 5.0, 2.0, Norm::euclidean, Boundary::free, false};
  CHECK(connection_probability(p2, {3, 4}) == doctest::Approx(0.00064).epsilon(1e-12));

  CHECK_THROWS_AS(connection_probability(p1, {0}), std::domain_error);
  CHECK_THROWS_AS(connection_probability(p2, {0, 0}), std::domain_error);
}

TEST_CASE("forced nearest neighbour bonds and beta = 0") {
  Params p{2, 3.0, 0.0, Norm::euclidean, Boundary::free, true};
  CHECK(connection_probability(p, {1, 0}) == 1.0);
  CHECK(connection_probability(p, {0, -1}) == 1.0);
  CHECK(connection_probability(p, {1, 1}) == 0.0);
  p.force_nn = false;
  CHECK(connection_probability(p, {1, 0}) == 0.0);
}

TEST_CASE("probability is non-increasing in the displacement norm") {
  Params p{2, 2.5, 0.7, Norm::euclidean, Boundary::free, false};
  oracles::TestRng rng(7);
  for (int it = 0; it < 200; ++it) {
    Point a{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    Point b{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    if ((a[0] == 0 && a[1] == 0) || (b[0] == 0 && b[1] == 0)) continue;
    const double na = norm_value(a, p.norm), nb = norm_value(b, p.norm);
    if (na <= nb) {
      CHECK(connection_probability(p, a) >= connection_probability(p, b));
    }
    Point neg{-a[0], -a[1]};
    CHECK(connection_probability(p, a) == connection_probability(p, neg));
  }
}

TEST_CASE("block sides follow A_k = M (k!)^2") {
  BlockHierarchy h(10);
  CHECK(h.block_side(0) == 10);
  CHECK(h.block_side(1) == 10);
  CHECK(h.block_side(4) == 5760);
  for (int k = 2; k <= 8; ++k) {
    CHECK(h.block_side(k) == h.block_side(k - 1) * Coord(k) * Coord(k));
  }
  CHECK_THROWS_AS(h.block_side(40), std::overflow_error);
  CHECK_THROWS_AS(BlockHierarchy(0), std::invalid_argument);
}

TEST_CASE("children tile the block exactly") {
  BlockHierarchy h(10);
  SUBCASE("d=1 level 2") {
    auto kids = h.children_of(Block{2, {0}});
    REQUIRE(kids.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(kids[i].corner == Point{10 * i});
      CHECK(kids[i].level == 1);
    }
  }
  SUBCASE("d=1 level 1 has a single child") {
    auto kids = h.children_of(Block{1, {0}});
    REQUIRE(kids.size() == 1);
    CHECK(kids[0].corner == Point{0});
  }
  SUBCASE("d=2 level 2 has 16 children") {
    CHECK(h.children_of(Block{2, {0, 0}}).size() == 16);
  }
  SUBCASE("level 0 is an error") {
    CHECK_THROWS_AS(h.children_of(Block{0, {0}}), std::domain_error);
  }
}

TEST_CASE("children volumes sum to the block volume, levels <= 6, d <= 3") {
  BlockHierarchy h(2);
  for (int d = 1; d <= 3; ++d) {
    for (int level = 1; level <= 6; ++level) {
      Block blk{level, Point(d, 0)};
      auto kids = h.children_of(blk);
      const Coord child_side = h.block_side(level - 1);
      __int128 total = 0;
      std::set<Point> corners;
      for (const Block& c : kids) {
        __int128 vol = 1;
        for (int i = 0; i < d; ++i) vol *= child_side;
        total += vol;
        corners.insert(c.corner);
      }
      __int128 expect = 1;
      for (int i = 0; i < d; ++i) expect *= h.block_side(level);
      CHECK(total == expect);
      CHECK(corners.size() == kids.size());  // disjoint by construction
    }
  }
  // Point-level cover check at a scale small enough to enumerate.
  BlockHierarchy h2(2, make_box(Point(2, 0), 8));
  auto kids = h2.children_of(Block{2, {0, 0}});
  std::set<Point> covered;
  for (const Block& c : kids) {
    for (Coord x = c.corner[0]; x < c.corner[0] + 2; ++x) {
      for (Coord y = c.corner[1]; y < c.corner[1] + 2; ++y) {
        CHECK(covered.insert(Point{x, y}).second);
      }
    }
  }
  CHECK(covered.size() == 64);
}

TEST_CASE("shifted copies enumerate the 3^d translates, original first") {
  SUBCASE("d=1") {
    auto copies = shifted_copies(Block{0, {0}}, 5);
    REQUIRE(copies.size() == 3);
    CHECK(copies[0].corner == Point{0});
    CHECK(copies[1].corner == Point{5});
    CHECK(copies[2].corner == Point{-5});
  }
  SUBCASE("d=2 gives 9 distinct copies with step-multiple offsets") {
    auto copies = shifted_copies(Block{1, {3, -4}}, 7);
    REQUIRE(copies.size() == 9);
    std::set<Point> seen;
    for (const auto& c : copies) {
      CHECK(seen.insert(c.corner).second);
      CHECK((c.corner[0] - 3) % 7 == 0);
      CHECK((c.corner[1] + 4) % 7 == 0);
    }
  }
  SUBCASE("half base scale with M=10") {
    BlockHierarchy h(10);
    auto copies = shifted_copies(Block{0, {0}}, h.half_side(0));
    CHECK(copies[1].corner == Point{5});
    CHECK(copies[2].corner == Point{-5});
  }
  CHECK_THROWS_AS(shifted_copies(Block{0, {0}}, 0), std::invalid_argument);
}

TEST_CASE("half_side rejects odd scales") {
  BlockHierarchy h(7);
  CHECK_THROWS_AS(h.half_side(0), std::invalid_argument);
  CHECK(h.half_side(2) == 14);  // A_2 = 4M is even regardless
}

TEST_CASE("params JSON round trip is strict") {
  Params p{2, 2.25, 0.5, Norm::sup, Boundary::torus, true};
  const auto j = params_to_json(p);
  CHECK(params_from_json(j) == p);

  auto extra = j;
  extra["bogus"] = 1;
  CHECK_THROWS_AS(params_from_json(extra), std::invalid_argument);

  auto missing = j;
  missing.erase("beta");
  CHECK_THROWS_AS(params_from_json(missing), std::invalid_argument);

  auto bad = j;
  bad["s"] = -1.0;
  CHECK_THROWS_AS(params_from_json(bad), std::invalid_argument);
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS((Params{0, 1.0, 1.0, Norm::euclidean, Boundary::free, false}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((Params{1, 0.0, 1.0, Norm::euclidean, Boundary::free, false}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((Params{1, 1.0, -0.5, Norm::euclidean, Boundary::free, false}).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW((Params{1, 1.0, 0.0, Norm::euclidean, Boundary::free, false}).validate());
}

TEST_CASE("box construction and rect containment") {
  CHECK_THROWS_AS(make_box({}, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_box({0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_box(Point(3, 0), Coord(1) << 40), std::overflow_error);
  const Box b = make_box({-2, -2}, 5);
  const Rect r = rect_of(b);
  CHECK(r.contains(Point{-2, 2}));
  CHECK(!r.contains(Point{3, 0}));
  CHECK(r.volume() == 25);
  CHECK(expand(b, 2).side == 9);
}

TEST_CASE("indexer ids are lexicographic in the coordinates") {
  Indexer idx(Rect{{-1, 5}, {3, 4}});
  CHECK(idx.size() == 12);
  Point prev;
  for (Coord id = 0; id < idx.size(); ++id) {
    Point p = idx.point_of(id);
    CHECK(idx.id_of(p) == id);
    if (id > 0) CHECK(prev < p);
    prev = p;
  }
}

TEST_CASE("exact norm comparison agrees with floating point away from ties") {
  oracles::TestRng rng(11);
  for (int it = 0; it < 500; ++it) {
    Point delta{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Coord num = rng.uniform(0, 120);
    const Coord den = rng.uniform(1, 10);
    for (Norm norm : {Norm::euclidean, Norm::sup, Norm::l1}) {
      const double v = norm_value(delta, norm);
      const double frac = double(num) / double(den);
      const int cmp = compare_norm_to_fraction(delta, norm, num, den);
      if (std::abs(v - frac) > 1e-9) {
        CHECK(cmp == (v < frac ? -1 : 1));
      }
    }
  }
}

TEST_CASE("centered blocks sit on the aligned grid nearest the block") {
  BlockHierarchy h(8);
  // Level-1 block [0,8): centre 3.5; level-2 grid sides 32.
  Block q{1, {0}};
  CHECK(centered_block(h, q, 2).corner == Point{0});
  // Block [24,32): centre 27.5; candidates corner 0 (centre 15.5) and 32
  // (centre 47.5); 0 is nearer.
  CHECK(centered_block(h, Block{1, {24}}, 2).corner == Point{0});
  // Block [28,36) centre 31.5: exact tie between grid centres 15.5 and 47.5
  // breaks toward the lower corner.
  CHECK(centered_block(h, Block{1, {28}}, 2).corner == Point{0});
  CHECK(centered_block(h, Block{1, {32}}, 2).corner == Point{32});
  CHECK_THROWS_AS(centered_block(h, q, 1), std::invalid_argument);
}
