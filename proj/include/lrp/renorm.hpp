// Good-block classification, bad-block path decomposition, waypoint selection,
// and the shifted/centered-block environment test.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lrp/metric.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

enum class Verdict { GOOD, BAD };

/// Verdict plus the single witnessing reason when BAD.
struct BlockStatus {
  enum class Reason { none, long_edge, two_bad_children, shifted_fail };

  Verdict verdict = Verdict::GOOD;
  int level = 0;
  Point corner;
  Reason reason = Reason::none;

  // long_edge payload (also reused as the sub-payload of shifted_fail).
  std::optional<std::pair<Point, Point>> edge;
  // two_bad_children payload.
  std::vector<Block> bad_children;
  // shifted_fail payload: the offending shift j and which clause failed there.
  std::optional<Point> shift;
  Reason sub_reason = Reason::none;

  bool good() const { return verdict == Verdict::GOOD; }
};

std::string to_string(BlockStatus::Reason r);
nlohmann::json status_to_json(const BlockStatus& st);

/// Raised when the configuration's halo cannot cover the recursive
/// classification of a block; carries the margin that would be needed.
class HaloError : public std::invalid_argument {
 public:
  HaloError(int level, Coord required_margin, const std::string& what);
  int level;
  Coord required_margin;
};

/// Classifier with a per-instance memo cache. Instances are cheap; create one
/// per configuration (and per thread when running concurrently).
class BlockClassifier {
 public:
  BlockClassifier(const Configuration& config, BlockHierarchy hierarchy);

  BlockStatus classify(const Block& block);

  /// Margin beyond a level-k block that classification can inspect:
  /// sum_{i<k} A_i/2, accumulated over the nested half-shifts.
  Coord required_margin(int level) const;

  /// Bad blocks of the Lemma-3.1 decomposition: the bad children of the block
  /// itself plus, for each half-shifted copy, its bad children under the
  /// configuration restricted to edges touching the block. Deduplicated,
  /// sorted by (level, corner).
  std::vector<Block> decomposition_bad_blocks(const Block& block);

  const BlockHierarchy& hierarchy() const { return hier_; }

 private:
  using Key = std::vector<Coord>;

  BlockStatus classify_impl(const Block& block, const std::vector<Rect>& restrictions);
  void check_bounds(const Block& block) const;
  bool find_long_edge(const Rect& region, Coord threshold_side,
                      const std::vector<Rect>& restrictions,
                      std::pair<Point, Point>& witness) const;

  const Configuration& config_;
  BlockHierarchy hier_;
  std::map<Key, BlockStatus> memo_;
};

BlockStatus classify_block(const Configuration& config, const BlockHierarchy& hierarchy,
                           const Block& block);

/// Maximum ||x-y|| over open edges with both endpoints in the region, under
/// the configuration's norm; 0 when the region spans no edge.
double max_edge_length_in(const Configuration& config, const Rect& region);

/// Inclusive index range [begin, end] into a path's vertex list.
struct PathSegment {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin + 1; }
  bool operator==(const PathSegment&) const = default;
};

struct Decomposition {
  std::vector<PathSegment> gamma;  // bad-block-avoiding stretches
  std::vector<PathSegment> nu;     // bad-block-crossing stretches
  std::vector<Block> bad_blocks;
  std::vector<std::size_t> U;      // gamma indices with D(gamma_i) > A_{k-1}/2
};

/// Index construction of the Lemma 3.1 proof, on an explicit bad-block list.
Decomposition decompose_with_blocks(const Path& path, const std::vector<Block>& bad_blocks,
                                    const BlockHierarchy& hierarchy, Norm norm,
                                    Coord child_side);

Decomposition decompose_path(const Configuration& config, const BlockHierarchy& hierarchy,
                             const Block& block, const Path& path);

/// Greedy waypoint selection: start at the first vertex, hop to the first
/// vertex farther than scale/4 from the current waypoint, stop once the
/// remaining suffix stays within scale/2. Requires every step of the path to
/// be shorter than scale/100.
std::vector<std::size_t> select_waypoints(const Path& path, Norm norm, Coord scale);

struct EnvironmentReport {
  bool ok = true;
  std::optional<std::pair<int, Block>> first_failure;
};

/// Checks the 3^d half-A_k-shifted copies of the block and the centered
/// blocks at every level in (k, max_level]. The centered level-j block is the
/// grid-aligned one whose center is nearest the block's center, ties toward
/// lower coordinates.
EnvironmentReport environment_is_good(const Configuration& config, const BlockHierarchy& hierarchy,
                                      const Block& block, int max_level);

Block centered_block(const BlockHierarchy& hierarchy, const Block& block, int level);

/// C' * prod_{h=k_from}^{k_to} (1 - kappa/h^2). Empty product for
/// k_to < k_from. Requires kappa >= 2 and k_from^2 > kappa.
double lower_bound_constant(double kappa, std::int64_t k_from, std::int64_t k_to, double c_prime);

}  // namespace lrp
