#include "lrp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrp {

namespace {

using i128 = __int128;

Coord checked_mul(Coord a, Coord b, const char* what) {
  i128 r = static_cast<i128>(a) * static_cast<i128>(b);
  if (r > std::numeric_limits<Coord>::max() || r < std::numeric_limits<Coord>::min()) {
    throw std::overflow_error(std::string(what) + ": integer overflow");
  }
  return static_cast<Coord>(r);
}

}  // namespace

std::string to_string(Norm n) {
  switch (n) {
    case Norm::euclidean: return "euclidean";
    case Norm::sup: return "sup";
    case Norm::l1: return "l1";
  }
  throw std::logic_error("bad norm enum");
}

std::string to_string(Boundary b) {
  return b == Boundary::free ? "free" : "torus";
}

Norm norm_from_string(const std::string& s) {
  if (s == "euclidean") return Norm::euclidean;
  if (s == "sup") return Norm::sup;
  if (s == "l1") return Norm::l1;
  throw std::invalid_argument("unknown norm: " + s);
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "free") return Boundary::free;
  if (s == "torus") return Boundary::torus;
  throw std::invalid_argument("unknown boundary: " + s);
}

void Params::validate() const {
  if (d < 1) throw std::invalid_argument("Params: d must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("Params: s must be > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("Params: beta must be >= 0");
}

nlohmann::json params_to_json(const Params& p) {
  return nlohmann::json{{"d", p.d},
                        {"s", p.s},
                        {"beta", p.beta},
                        {"norm", to_string(p.norm)},
                        {"boundary", to_string(p.boundary)},
                        {"force_nn", p.force_nn}};
}

Params params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("Params JSON: expected object");
  static const char* known[] = {"d", "s", "beta", "norm", "boundary", "force_nn"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("Params JSON: unknown field '" + key + "'");
  }
  for (const char* k : known) {
    if (!j.contains(k)) throw std::invalid_argument(std::string("Params JSON: missing field '") + k + "'");
  }
  Params p;
  p.d = j.at("d").get<int>();
  p.s = j.at("s").get<double>();
  p.beta = j.at("beta").get<double>();
  p.norm = norm_from_string(j.at("norm").get<std::string>());
  p.boundary = boundary_from_string(j.at("boundary").get<std::string>());
  p.force_nn = j.at("force_nn").get<bool>();
  p.validate();
  return p;
}

Box make_box(Point lo, Coord side) {
  if (lo.empty()) throw std::invalid_argument("Box: empty corner");
  if (side < 1) throw std::invalid_argument("Box: side must be >= 1");
  i128 vol = 1;
  for (size_t i = 0; i < lo.size(); ++i) {
    vol *= side;
    if (vol > (i128(1) << 62)) throw std::overflow_error("Box: volume exceeds address range");
  }
  return Box{std::move(lo), side};
}

bool Rect::contains(const Point& p) const {
  for (size_t i = 0; i < lo.size(); ++i) {
    if (p[i] < lo[i] || p[i] >= lo[i] + size[i]) return false;
  }
  return true;
}

bool Rect::contains(const Rect& other) const {
  for (size_t i = 0; i < lo.size(); ++i) {
    if (other.lo[i] < lo[i] || other.lo[i] + other.size[i] > lo[i] + size[i]) return false;
  }
  return true;
}

Coord Rect::volume() const {
  i128 v = 1;
  for (Coord s : size) {
    if (s <= 0) return 0;
    v *= s;
    if (v > (i128(1) << 62)) throw std::overflow_error("Rect: volume overflow");
  }
  return static_cast<Coord>(v);
}

Rect rect_of(const Box& b) {
  return Rect{b.lo, Point(b.lo.size(), b.side)};
}

Rect expand(const Rect& r, Coord margin) {
  Rect out = r;
  for (size_t i = 0; i < out.lo.size(); ++i) {
    out.lo[i] -= margin;
    out.size[i] += 2 * margin;
  }
  return out;
}

Box expand(const Box& b, Coord margin) {
  Box out = b;
  for (auto& c : out.lo) c -= margin;
  out.side += 2 * margin;
  return out;
}

Indexer::Indexer(Rect r) : rect_(std::move(r)) {
  const int d = rect_.dim();
  stride_.assign(d, 1);
  for (int i = d - 2; i >= 0; --i) {
    stride_[i] = checked_mul(stride_[i + 1], rect_.size[i + 1], "Indexer");
  }
  total_ = checked_mul(stride_[0], rect_.size[0], "Indexer");
}

Coord Indexer::id_of(const Point& p) const {
  Coord id = 0;
  for (size_t i = 0; i < stride_.size(); ++i) {
    id += (p[i] - rect_.lo[i]) * stride_[i];
  }
  return id;
}

void Indexer::point_of(Coord id, Point& out) const {
  out.resize(stride_.size());
  for (size_t i = 0; i < stride_.size(); ++i) {
    out[i] = rect_.lo[i] + id / stride_[i];
    id %= stride_[i];
  }
}

Point Indexer::point_of(Coord id) const {
  Point p;
  point_of(id, p);
  return p;
}

double norm_value(const Point& delta, Norm norm) {
  switch (norm) {
    case Norm::euclidean: {
      double sq = 0;
      for (Coord c : delta) sq += double(c) * double(c);
      return std::sqrt(sq);
    }
    case Norm::sup: {
      Coord m = 0;
      for (Coord c : delta) m = std::max(m, std::abs(c));
      return double(m);
    }
    case Norm::l1:
      return double(l1_norm(delta));
  }
  throw std::logic_error("bad norm enum");
}

Coord l1_norm(const Point& delta) {
  Coord t = 0;
  for (Coord c : delta) t += std::abs(c);
  return t;
}

int compare_norm_to_fraction(const Point& delta, Norm norm, Coord num, Coord den) {
  if (den < 1 || num < 0) throw std::invalid_argument("compare_norm_to_fraction: bad fraction");
  if (norm == Norm::euclidean) {
    // ||delta|| vs num/den  <=>  den^2*||delta||^2 vs num^2, all exact.
    i128 sq = 0;
    for (Coord c : delta) sq += i128(c) * i128(c);
    i128 lhs = i128(den) * i128(den) * sq;
    i128 rhs = i128(num) * i128(num);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  Coord v = 0;
  if (norm == Norm::sup) {
    for (Coord c : delta) v = std::max(v, std::abs(c));
  } else {
    v = l1_norm(delta);
  }
  i128 lhs = i128(den) * i128(v);
  i128 rhs = i128(num);
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

double connection_probability(const Params& params, const Point& k) {
  if (static_cast<int>(k.size()) != params.d) {
    throw std::invalid_argument("connection_probability: displacement dimension mismatch");
  }
  bool zero = true;
  for (Coord c : k) zero = zero && c == 0;
  if (zero) throw std::domain_error("connection_probability: zero displacement");
  if (params.force_nn && l1_norm(k) == 1) return 1.0;
  if (params.beta == 0.0) return 0.0;
  const double r = norm_value(k, params.norm);
  return std::min(1.0, params.beta * std::pow(r, -params.s));
}

Rect rect_of(const Block& b, Coord side) {
  return Rect{b.corner, Point(b.corner.size(), side)};
}

BlockHierarchy::BlockHierarchy(Coord M) : M_(M) {
  if (M < 1) throw std::invalid_argument("BlockHierarchy: M must be >= 1");
  // Largest level whose side is still representable.
  int k = 0;
  while (true) {
    try {
      block_side(k + 1);
    } catch (const std::overflow_error&) {
      break;
    }
    ++k;
  }
  levels_ = k;
}

BlockHierarchy::BlockHierarchy(Coord M, const Box& box) : BlockHierarchy(M) {
  levels_ = std::min(levels_, max_level_within(box.side));
}

Coord BlockHierarchy::block_side(int level) const {
  if (level < 0) throw std::domain_error("block_side: negative level");
  Coord a = M_;
  for (int i = 2; i <= level; ++i) {
    a = checked_mul(a, checked_mul(Coord(i), Coord(i), "block_side"), "block_side");
  }
  return a;  // A_0 = A_1 = M since C_1 = 1
}

Coord BlockHierarchy::children_per_axis(int level) const {
  if (level < 0) throw std::domain_error("children_per_axis: negative level");
  if (level == 0) return M_;
  return Coord(level) * Coord(level);
}

std::vector<Block> BlockHierarchy::children_of(const Block& block) const {
  if (block.level < 1) throw std::domain_error("children_of: level-0 blocks have no children");
  const int d = static_cast<int>(block.corner.size());
  const Coord c = children_per_axis(block.level);
  const Coord child_side = block_side(block.level - 1);
  std::vector<Block> out;
  out.reserve(static_cast<size_t>(std::pow(double(c), d)));
  Point h(d, 0);
  while (true) {
    Block child{block.level - 1, block.corner};
    for (int i = 0; i < d; ++i) child.corner[i] += h[i] * child_side;
    out.push_back(std::move(child));
    int axis = d - 1;
    while (axis >= 0 && ++h[axis] == c) h[axis--] = 0;
    if (axis < 0) break;
  }
  return out;
}

Rect BlockHierarchy::rect_of(const Block& block) const {
  return lrp::rect_of(block, block_side(block.level));
}

int BlockHierarchy::max_level_within(Coord side) const {
  int k = 0;
  while (k < levels_ && block_side(k + 1) <= side) ++k;
  return k;
}

Coord BlockHierarchy::half_side(int level) const {
  Coord a = block_side(level);
  if (a % 2 != 0) {
    throw std::invalid_argument("half_side: A_" + std::to_string(level) +
                                " = " + std::to_string(a) + " is odd; use an even base scale");
  }
  return a / 2;
}

std::vector<Point> shift_offsets(int d) {
  static const Coord vals[3] = {0, 1, -1};
  std::vector<Point> out;
  out.reserve(static_cast<size_t>(std::pow(3.0, d)));
  std::vector<int> idx(d, 0);
  while (true) {
    Point j(d);
    for (int i = 0; i < d; ++i) j[i] = vals[idx[i]];
    out.push_back(std::move(j));
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] == 3) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return out;
}

std::vector<Block> shifted_copies(const Block& block, Coord step) {
  if (step < 1) throw std::invalid_argument("shifted_copies: step must be >= 1");
  const int d = static_cast<int>(block.corner.size());
  std::vector<Block> out;
  for (const Point& j : shift_offsets(d)) {
    Block b = block;
    for (int i = 0; i < d; ++i) b.corner[i] += j[i] * step;
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace lrp
