// Lattice geometry, connection kernel, and the multiscale block hierarchy.
// Everything here is pure and deterministic; randomness lives in sampler.hpp.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace lrp {

using Coord = std::int64_t;
using Point = std::vector<Coord>;

enum class Norm { euclidean, sup, l1 };
enum class Boundary { free, torus };

std::string to_string(Norm n);
std::string to_string(Boundary b);
Norm norm_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);

/// Model parameters. p_k = min(1, beta * ||k||^-s), with forced nearest
/// neighbour bonds optionally open regardless of beta.
struct Params {
  int d = 1;
  double s = 1.0;
  double beta = 1.0;
  Norm norm = Norm::euclidean;
  Boundary boundary = Boundary::free;
  bool force_nn = false;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const Params&) const = default;
};

// Strict JSON round trip: exactly the field names d, s, beta, norm,
// boundary, force_nn; unknown fields rejected.
nlohmann::json params_to_json(const Params& p);
Params params_from_json(const nlohmann::json& j);

/// Cube of lattice sites lo + [0, side)^d.
struct Box {
  Point lo;
  Coord side = 1;

  int dim() const { return static_cast<int>(lo.size()); }
  bool operator==(const Box&) const = default;
};

Box make_box(Point lo, Coord side);  // checks side >= 1 and that side^d fits

/// Axis-aligned lattice rectangle, the general region type used by queries.
struct Rect {
  Point lo;
  Point size;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& p) const;
  bool contains(const Rect& other) const;
  Coord volume() const;
  bool operator==(const Rect&) const = default;
};

using RegionQuery = Rect;

Rect rect_of(const Box& b);
Rect expand(const Rect& r, Coord margin);
Box expand(const Box& b, Coord margin);

/// Row-major linear indexing of a Rect, first coordinate most significant,
/// so increasing id order equals lexicographic order of the points.
class Indexer {
 public:
  Indexer() = default;
  explicit Indexer(Rect r);

  Coord size() const { return total_; }
  Coord id_of(const Point& p) const;
  void point_of(Coord id, Point& out) const;
  Point point_of(Coord id) const;
  const Rect& rect() const { return rect_; }

 private:
  Rect rect_;
  std::vector<Coord> stride_;
  Coord total_ = 0;
};

double norm_value(const Point& delta, Norm norm);
Coord l1_norm(const Point& delta);

/// Sign of ||delta|| - num/den, evaluated exactly in integer arithmetic
/// (squared comparison for the euclidean norm). Requires num, den >= 0,
/// den >= 1.
int compare_norm_to_fraction(const Point& delta, Norm norm, Coord num, Coord den);

/// min(1, beta * ||k||^-s); 1 for forced nearest-neighbour displacements.
/// Zero displacement is a domain error.
double connection_probability(const Params& params, const Point& k);

/// Block of side A_level with the given corner: corner + [0, A_level)^d.
struct Block {
  int level = 0;
  Point corner;

  bool operator==(const Block&) const = default;
};

Rect rect_of(const Block& b, Coord side);

/// A_n = M * (n!)^2 with C_0 = M and C_n = n^2. Integer-exact with overflow
/// detection; asymptotic reasoning about huge A_n belongs to certificates.
class BlockHierarchy {
 public:
  explicit BlockHierarchy(Coord M);
  BlockHierarchy(Coord M, const Box& box);

  Coord base_scale() const { return M_; }
  int levels() const { return levels_; }

  Coord block_side(int level) const;       // M*(level!)^2, throws on overflow
  Coord children_per_axis(int level) const;  // C_level = level^2 for level>0
  std::vector<Block> children_of(const Block& block) const;
  Rect rect_of(const Block& block) const;
  int max_level_within(Coord side) const;

  // Half of A_level, used as the shift step of Definition-2.1-style copies.
  // Throws if A_level is odd (only possible for odd M at levels 0 and 1).
  Coord half_side(int level) const;

 private:
  Coord M_ = 1;
  int levels_ = 0;
};

/// The 3^d translates {block + j*step : j in {0,+1,-1}^d}; the j = 0 entry
/// comes first, then the remaining offsets in odometer order (0, +1, -1 per
/// axis).
std::vector<Block> shifted_copies(const Block& block, Coord step);
std::vector<Point> shift_offsets(int d);  // the j vectors, same order

}  // namespace lrp
