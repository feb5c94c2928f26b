#include "lrp/renorm.hpp"

#include <algorithm>
#include <cmath>

namespace lrp {

std::string to_string(BlockStatus::Reason r) {
  switch (r) {
    case BlockStatus::Reason::none: return "NONE";
    case BlockStatus::Reason::long_edge: return "LONG_EDGE";
    case BlockStatus::Reason::two_bad_children: return "TWO_BAD_CHILDREN";
    case BlockStatus::Reason::shifted_fail: return "SHIFTED_FAIL";
  }
  throw std::logic_error("bad reason enum");
}

nlohmann::json status_to_json(const BlockStatus& st) {
  nlohmann::json reason{{"type", to_string(st.reason)}};
  auto edge_json = [](const std::pair<Point, Point>& e) {
    return nlohmann::json{{"x", e.first}, {"y", e.second}};
  };
  auto children_json = [](const std::vector<Block>& blocks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Block& b : blocks) arr.push_back(b.corner);
    return arr;
  };
  if (st.reason == BlockStatus::Reason::long_edge) {
    reason["edge"] = edge_json(*st.edge);
  } else if (st.reason == BlockStatus::Reason::two_bad_children) {
    reason["children"] = children_json(st.bad_children);
  } else if (st.reason == BlockStatus::Reason::shifted_fail) {
    reason["shift"] = *st.shift;
    nlohmann::json sub{{"type", to_string(st.sub_reason)}};
    if (st.sub_reason == BlockStatus::Reason::long_edge) {
      sub["edge"] = edge_json(*st.edge);
    } else if (st.sub_reason == BlockStatus::Reason::two_bad_children) {
      sub["children"] = children_json(st.bad_children);
    }
    reason["sub"] = sub;
  }
  return nlohmann::json{{"level", st.level},
                        {"corner", st.corner},
                        {"verdict", st.verdict == Verdict::GOOD ? "GOOD" : "BAD"},
                        {"reason", reason}};
}

HaloError::HaloError(int level_, Coord required_margin_, const std::string& what)
    : std::invalid_argument(what), level(level_), required_margin(required_margin_) {}

BlockClassifier::BlockClassifier(const Configuration& config, BlockHierarchy hierarchy)
    : config_(config), hier_(std::move(hierarchy)) {}

Coord BlockClassifier::required_margin(int level) const {
  Coord m = 0;
  for (int i = 0; i < level; ++i) m += hier_.half_side(i);
  return m;
}

void BlockClassifier::check_bounds(const Block& block) const {
  if (static_cast<int>(block.corner.size()) != config_.params().d) {
    throw std::invalid_argument("classify: block dimension mismatch");
  }
  if (block.level < 0) throw std::domain_error("classify: negative level");
  const Rect brect = rect_of(config_.box());
  const Rect blk = hier_.rect_of(block);
  if (!brect.contains(blk)) {
    throw std::invalid_argument("classify: block not contained in the sampled box");
  }
  const Coord margin = required_margin(block.level);
  if (!config_.indexer().rect().contains(expand(blk, margin))) {
    throw HaloError(block.level, margin,
                    "classify: level " + std::to_string(block.level) +
                        " needs a halo of " + std::to_string(margin) +
                        " beyond the block, but box+halo does not cover it");
  }
}

bool BlockClassifier::find_long_edge(const Rect& region, Coord threshold_side,
                                     const std::vector<Rect>& restrictions,
                                     std::pair<Point, Point>& witness) const {
  const Norm norm = config_.params().norm;
  Point pu, pv, delta(region.dim());
  for (const Edge& e : config_.edges()) {
    config_.indexer().point_of(e.first, pu);
    config_.indexer().point_of(e.second, pv);
    if (!region.contains(pu) || !region.contains(pv)) continue;
    bool kept = true;
    for (const Rect& r : restrictions) {
      if (!r.contains(pu) && !r.contains(pv)) {
        kept = false;
        break;
      }
    }
    if (!kept) continue;
    for (int i = 0; i < region.dim(); ++i) delta[i] = pv[i] - pu[i];
    if (compare_norm_to_fraction(delta, norm, threshold_side, 100) > 0) {
      witness = {pu, pv};
      return true;
    }
  }
  return false;
}

BlockStatus BlockClassifier::classify_impl(const Block& block, const std::vector<Rect>& restrictions) {
  Key key;
  key.reserve(2 + block.corner.size() + restrictions.size() * 2 * block.corner.size());
  key.push_back(block.level);
  key.insert(key.end(), block.corner.begin(), block.corner.end());
  key.push_back(static_cast<Coord>(restrictions.size()));
  for (const Rect& r : restrictions) {
    key.insert(key.end(), r.lo.begin(), r.lo.end());
    key.insert(key.end(), r.size.begin(), r.size.end());
  }
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  BlockStatus st;
  st.level = block.level;
  st.corner = block.corner;
  const Rect blk = hier_.rect_of(block);

  // Clause (1) / (2a): no edge longer than A_{max(k-1,0)}/100 inside the block.
  const Coord threshold = hier_.block_side(std::max(block.level - 1, 0));
  std::pair<Point, Point> witness;
  if (find_long_edge(blk, threshold, restrictions, witness)) {
    st.verdict = Verdict::BAD;
    st.reason = BlockStatus::Reason::long_edge;
    st.edge = witness;
    memo_.emplace(std::move(key), st);
    return st;
  }

  if (block.level >= 1) {
    // Clause (2b): all but at most one child good.
    std::vector<Block> bad;
    for (const Block& child : hier_.children_of(block)) {
      if (classify_impl(child, restrictions).verdict == Verdict::BAD) bad.push_back(child);
      if (bad.size() >= 2) break;
    }
    if (bad.size() >= 2) {
      st.verdict = Verdict::BAD;
      st.reason = BlockStatus::Reason::two_bad_children;
      st.bad_children = std::move(bad);
      memo_.emplace(std::move(key), st);
      return st;
    }

    // Clause (2c), evaluated under the configuration that keeps exactly the
    // edges touching this block: every half-shifted copy must satisfy (a)
    // and (b) there. Goodness is antitone in the edge set, so this single
    // restricted evaluation decides the existential over configurations.
    std::vector<Rect> inner = restrictions;
    inner.push_back(blk);
    const Coord step = hier_.half_side(block.level - 1);
    const auto offsets = shift_offsets(block.corner.size());
    const auto copies = shifted_copies(block, step);
    for (size_t c = 0; c < copies.size(); ++c) {
      const Rect copy_rect = hier_.rect_of(copies[c]);
      if (find_long_edge(copy_rect, threshold, inner, witness)) {
        st.verdict = Verdict::BAD;
        st.reason = BlockStatus::Reason::shifted_fail;
        st.shift = offsets[c];
        st.sub_reason = BlockStatus::Reason::long_edge;
        st.edge = witness;
        memo_.emplace(std::move(key), st);
        return st;
      }
      std::vector<Block> copy_bad;
      for (const Block& child : hier_.children_of(copies[c])) {
        if (classify_impl(child, inner).verdict == Verdict::BAD) copy_bad.push_back(child);
        if (copy_bad.size() >= 2) break;
      }
      if (copy_bad.size() >= 2) {
        st.verdict = Verdict::BAD;
        st.reason = BlockStatus::Reason::shifted_fail;
        st.shift = offsets[c];
        st.sub_reason = BlockStatus::Reason::two_bad_children;
        st.bad_children = std::move(copy_bad);
        memo_.emplace(std::move(key), st);
        return st;
      }
    }
  }

  memo_.emplace(std::move(key), st);
  return st;
}

BlockStatus BlockClassifier::classify(const Block& block) {
  check_bounds(block);
  return classify_impl(block, {});
}

std::vector<Block> BlockClassifier::decomposition_bad_blocks(const Block& block) {
  check_bounds(block);
  if (block.level < 1) return {};
  std::vector<Block> bad;
  for (const Block& child : hier_.children_of(block)) {
    if (classify_impl(child, {}).verdict == Verdict::BAD) bad.push_back(child);
  }
  const std::vector<Rect> restr{hier_.rect_of(block)};
  const Coord step = hier_.half_side(block.level - 1);
  for (const Block& copy : shifted_copies(block, step)) {
    for (const Block& child : hier_.children_of(copy)) {
      if (classify_impl(child, restr).verdict == Verdict::BAD) bad.push_back(child);
    }
  }
  std::sort(bad.begin(), bad.end(), [](const Block& a, const Block& b) {
    return std::tie(a.level, a.corner) < std::tie(b.level, b.corner);
  });
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

BlockStatus classify_block(const Configuration& config, const BlockHierarchy& hierarchy,
                           const Block& block) {
  BlockClassifier cls(config, hierarchy);
  return cls.classify(block);
}

double max_edge_length_in(const Configuration& config, const Rect& region) {
  if (!config.indexer().rect().contains(region)) {
    throw std::invalid_argument("max_edge_length_in: region outside box+halo");
  }
  double best = 0.0;
  Point pu, pv, delta(region.dim());
  for (const Edge& e : config.edges()) {
    config.indexer().point_of(e.first, pu);
    config.indexer().point_of(e.second, pv);
    if (!region.contains(pu) || !region.contains(pv)) continue;
    for (int i = 0; i < region.dim(); ++i) delta[i] = pv[i] - pu[i];
    best = std::max(best, norm_value(delta, config.params().norm));
  }
  return best;
}

Decomposition decompose_with_blocks(const Path& path, const std::vector<Block>& bad_blocks,
                                    const BlockHierarchy& hierarchy, Norm norm,
                                    Coord child_side) {
  Decomposition dec;
  dec.bad_blocks = bad_blocks;
  const std::size_t l = path.vertices.size();
  if (l == 0) throw std::invalid_argument("decompose: empty path");

  std::vector<Rect> rects;
  rects.reserve(bad_blocks.size());
  for (const Block& b : bad_blocks) rects.push_back(hierarchy.rect_of(b));

  auto first_containing = [&](std::size_t i) -> std::optional<std::size_t> {
    for (std::size_t b = 0; b < rects.size(); ++b) {
      if (rects[b].contains(path.vertices[i])) return b;
    }
    return std::nullopt;
  };

  auto push_gamma = [&](std::size_t begin, std::size_t end_incl) {
    if (begin > end_incl || end_incl >= l) return;
    dec.gamma.push_back({begin, end_incl});
  };

  std::size_t pos = 0;        // search start for the next a_i
  std::size_t gamma_from = 0; // first vertex of the pending gamma
  while (pos < l) {
    std::optional<std::size_t> a, b;
    for (std::size_t j = pos; j < l; ++j) {
      if (auto blk = first_containing(j)) {
        a = j;
        b = blk;
        break;
      }
    }
    if (!a) break;
    std::size_t z = *a;
    for (std::size_t j = l; j-- > *a + 1;) {
      if (rects[*b].contains(path.vertices[j])) {
        z = j;
        break;
      }
    }
    if (*a > 0) push_gamma(gamma_from, *a - 1);
    const std::size_t nu_begin = *a == 0 ? 0 : *a - 1;
    const std::size_t nu_end = std::min(z + 1, l - 1);
    dec.nu.push_back({nu_begin, nu_end});
    gamma_from = z + 1;
    pos = z + 1;
  }
  if (gamma_from < l) push_gamma(gamma_from, l - 1);

  Point delta;
  for (std::size_t g = 0; g < dec.gamma.size(); ++g) {
    const Point& u = path.vertices[dec.gamma[g].begin];
    const Point& v = path.vertices[dec.gamma[g].end];
    delta.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) delta[i] = v[i] - u[i];
    if (compare_norm_to_fraction(delta, norm, child_side, 2) > 0) dec.U.push_back(g);
  }
  return dec;
}

Decomposition decompose_path(const Configuration& config, const BlockHierarchy& hierarchy,
                             const Block& block, const Path& path) {
  if (block.level < 1) throw std::domain_error("decompose_path: block level must be >= 1");
  if (!is_valid_path(config, path)) {
    throw std::invalid_argument("decompose_path: path is not a valid open-edge path");
  }
  const Rect blk = hierarchy.rect_of(block);
  for (const Point& v : path.vertices) {
    if (!blk.contains(v)) throw std::invalid_argument("decompose_path: path exits the block");
  }
  BlockClassifier cls(config, hierarchy);
  const BlockStatus st = cls.classify(block);
  const std::vector<Block> bad = cls.decomposition_bad_blocks(block);
  Decomposition dec = decompose_with_blocks(path, bad, hierarchy, config.params().norm,
                                            hierarchy.block_side(block.level - 1));
  if (st.good()) {
    const std::size_t limit =
        static_cast<std::size_t>(std::pow(3.0, config.params().d)) + 1;
    if (dec.gamma.size() > limit || dec.nu.size() > limit) {
      throw std::logic_error("decompose_path: segment count exceeds 3^d + 1 in a good block");
    }
  }
  return dec;
}

std::vector<std::size_t> select_waypoints(const Path& path, Norm norm, Coord scale) {
  const std::size_t l = path.vertices.size();
  if (l == 0) throw std::invalid_argument("select_waypoints: empty path");
  Point delta(path.vertices.front().size());
  auto diff = [&](std::size_t i, std::size_t j) -> const Point& {
    for (std::size_t c = 0; c < delta.size(); ++c) {
      delta[c] = path.vertices[j][c] - path.vertices[i][c];
    }
    return delta;
  };
  for (std::size_t i = 0; i + 1 < l; ++i) {
    if (compare_norm_to_fraction(diff(i, i + 1), norm, scale, 100) >= 0) {
      throw std::invalid_argument("select_waypoints: path step of length >= scale/100 at index " +
                                  std::to_string(i));
    }
  }
  std::vector<std::size_t> waypoints{0};
  std::size_t cur = 0;
  while (true) {
    bool suffix_ok = true;
    std::size_t next = 0;
    bool found_next = false;
    for (std::size_t j = cur + 1; j < l; ++j) {
      const Point& dd = diff(cur, j);
      if (!found_next && compare_norm_to_fraction(dd, norm, scale, 4) > 0) {
        next = j;
        found_next = true;
      }
      if (compare_norm_to_fraction(dd, norm, scale, 2) >= 0) {
        suffix_ok = false;
        if (found_next) break;
      }
    }
    if (suffix_ok) break;
    waypoints.push_back(next);
    cur = next;
  }
  return waypoints;
}

Block centered_block(const BlockHierarchy& hierarchy, const Block& block, int level) {
  if (level <= block.level) {
    throw std::invalid_argument("centered_block: level must exceed the block's level");
  }
  const Coord a_k = hierarchy.block_side(block.level);
  const Coord a_j = hierarchy.block_side(level);
  auto floordiv = [](Coord a, Coord b) {
    Coord q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
  };
  Block out{level, Point(block.corner.size())};
  for (std::size_t i = 0; i < block.corner.size(); ++i) {
    // Minimize |2*A_j*c - N| with N = 2q + A_k - A_j; ties toward lower c.
    const Coord n = 2 * block.corner[i] + a_k - a_j;
    const Coord c0 = floordiv(n, 2 * a_j);
    const Coord lo_err = std::abs(2 * a_j * c0 - n);
    const Coord hi_err = std::abs(2 * a_j * (c0 + 1) - n);
    out.corner[i] = (hi_err < lo_err ? c0 + 1 : c0) * a_j;
  }
  return out;
}

EnvironmentReport environment_is_good(const Configuration& config, const BlockHierarchy& hierarchy,
                                      const Block& block, int max_level) {
  if (max_level > hierarchy.levels()) {
    throw std::invalid_argument("environment_is_good: max_level exceeds hierarchy levels");
  }
  BlockClassifier cls(config, hierarchy);
  const Coord step = hierarchy.half_side(block.level);
  for (const Block& copy : shifted_copies(block, step)) {
    if (!cls.classify(copy).good()) return {false, {{block.level, copy}}};
  }
  for (int j = block.level + 1; j <= max_level; ++j) {
    const Block cb = centered_block(hierarchy, block, j);
    if (!cls.classify(cb).good()) return {false, {{j, cb}}};
  }
  return {true, std::nullopt};
}

double lower_bound_constant(double kappa, std::int64_t k_from, std::int64_t k_to, double c_prime) {
  if (!(kappa >= 2.0)) throw std::invalid_argument("lower_bound_constant: kappa must be >= 2");
  if (!(double(k_from) * double(k_from) > kappa)) {
    throw std::invalid_argument("lower_bound_constant: need k_from^2 > kappa");
  }
  long double acc = c_prime;
  for (std::int64_t h = k_from; h <= k_to; ++h) {
    const long double factor = 1.0L - static_cast<long double>(kappa) / (static_cast<long double>(h) * h);
    if (factor <= 0.0L) throw std::domain_error("lower_bound_constant: nonpositive factor");
    acc *= factor;
  }
  return static_cast<double>(acc);
}

}  // namespace lrp
