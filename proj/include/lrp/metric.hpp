// Chemical distance and path bookkeeping on a sampled configuration.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrp/sampler.hpp"

namespace lrp {

struct Path {
  std::vector<Point> vertices;

  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
};

struct PathStats {
  std::int64_t hops = 0;       // L(path)
  double displacement = 0.0;   // D(path) = ||last - first|| under params.norm
};

/// Finite distance with optional witness, or UNREACHABLE (empty value).
struct DistanceResult {
  std::optional<std::int64_t> value;
  std::optional<Path> witness;

  bool reachable() const { return value.has_value(); }
};

/// CSR adjacency over a configuration's box+halo vertices. Build once, query
/// many times; all queries are const and safe to run concurrently.
class Graph {
 public:
  explicit Graph(const Configuration& config);

  Coord vertex_count() const { return Coord(offsets_.size()) - 1; }

  /// BFS layers from source over the whole graph. -1 marks unreachable.
  std::vector<std::int32_t> bfs_distances(Coord source) const;

  DistanceResult distance(Coord source, Coord target, bool want_witness) const;

  /// BFS restricted to vertices inside `allowed`.
  DistanceResult restricted(Coord source, Coord target, const Rect& allowed,
                            const Configuration& config) const;

 private:
  std::vector<Coord> offsets_;
  std::vector<Coord> neighbors_;
  const Indexer* index_;
};

DistanceResult chemical_distance(const Configuration& config, const Point& x, const Point& y,
                                 bool want_witness = false);

DistanceResult restricted_distance(const Configuration& config, const Point& x, const Point& y,
                                   const Rect& region);

PathStats path_stats(const Params& params, const Path& path);

/// True when consecutive vertices are distinct open edges of the configuration
/// and every vertex lies in box+halo.
bool is_valid_path(const Configuration& config, const Path& path);

}  // namespace lrp
