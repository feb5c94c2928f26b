#include "lrp/metric.hpp"

#include <algorithm>
#include <stdexcept>

namespace lrp {

Graph::Graph(const Configuration& config) : index_(&config.indexer()) {
  const Coord n = index_->size();
  offsets_.assign(static_cast<size_t>(n) + 1, 0);
  for (const Edge& e : config.edges()) {
    ++offsets_[static_cast<size_t>(e.first) + 1];
    ++offsets_[static_cast<size_t>(e.second) + 1];
  }
  for (size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  neighbors_.assign(static_cast<size_t>(offsets_.back()), 0);
  std::vector<Coord> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : config.edges()) {
    neighbors_[static_cast<size_t>(cursor[static_cast<size_t>(e.first)]++)] = e.second;
    neighbors_[static_cast<size_t>(cursor[static_cast<size_t>(e.second)]++)] = e.first;
  }
}

std::vector<std::int32_t> Graph::bfs_distances(Coord source) const {
  const Coord n = vertex_count();
  std::vector<std::int32_t> dist(static_cast<size_t>(n), -1);
  std::vector<Coord> queue;
  queue.reserve(static_cast<size_t>(n));
  dist[static_cast<size_t>(source)] = 0;
  queue.push_back(source);
  for (size_t head = 0; head < queue.size(); ++head) {
    const Coord u = queue[head];
    const std::int32_t du = dist[static_cast<size_t>(u)];
    for (Coord i = offsets_[static_cast<size_t>(u)]; i < offsets_[static_cast<size_t>(u) + 1]; ++i) {
      const Coord v = neighbors_[static_cast<size_t>(i)];
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = du + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

namespace {

Path reconstruct(const Indexer& idx, const std::vector<Coord>& parent, Coord target) {
  Path path;
  for (Coord v = target; v != -1; v = parent[static_cast<size_t>(v)]) {
    path.vertices.push_back(idx.point_of(v));
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

}  // namespace

DistanceResult Graph::distance(Coord source, Coord target, bool want_witness) const {
  const Coord n = vertex_count();
  std::vector<std::int32_t> dist(static_cast<size_t>(n), -1);
  std::vector<Coord> parent;
  if (want_witness) parent.assign(static_cast<size_t>(n), -1);
  std::vector<Coord> queue;
  dist[static_cast<size_t>(source)] = 0;
  queue.push_back(source);
  for (size_t head = 0; head < queue.size(); ++head) {
    const Coord u = queue[head];
    if (u == target) break;
    const std::int32_t du = dist[static_cast<size_t>(u)];
    for (Coord i = offsets_[static_cast<size_t>(u)]; i < offsets_[static_cast<size_t>(u) + 1]; ++i) {
      const Coord v = neighbors_[static_cast<size_t>(i)];
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = du + 1;
        if (want_witness) parent[static_cast<size_t>(v)] = u;
        queue.push_back(v);
      }
    }
  }
  DistanceResult res;
  const std::int32_t dv = dist[static_cast<size_t>(target)];
  if (dv >= 0) {
    res.value = dv;
    if (want_witness) res.witness = reconstruct(*index_, parent, target);
  }
  return res;
}

DistanceResult Graph::restricted(Coord source, Coord target, const Rect& allowed,
                                 const Configuration& config) const {
  const Coord n = vertex_count();
  std::vector<std::int32_t> dist(static_cast<size_t>(n), -1);
  std::vector<Coord> queue;
  Point scratch;
  dist[static_cast<size_t>(source)] = 0;
  queue.push_back(source);
  for (size_t head = 0; head < queue.size(); ++head) {
    const Coord u = queue[head];
    if (u == target) break;
    const std::int32_t du = dist[static_cast<size_t>(u)];
    for (Coord i = offsets_[static_cast<size_t>(u)]; i < offsets_[static_cast<size_t>(u) + 1]; ++i) {
      const Coord v = neighbors_[static_cast<size_t>(i)];
      if (dist[static_cast<size_t>(v)] >= 0) continue;
      config.indexer().point_of(v, scratch);
      if (!allowed.contains(scratch)) continue;
      dist[static_cast<size_t>(v)] = du + 1;
      queue.push_back(v);
    }
  }
  DistanceResult res;
  const std::int32_t dv = dist[static_cast<size_t>(target)];
  if (dv >= 0) res.value = dv;
  return res;
}

DistanceResult chemical_distance(const Configuration& config, const Point& x, const Point& y,
                                 bool want_witness) {
  if (!config.in_box(x) || !config.in_box(y)) {
    throw std::invalid_argument("chemical_distance: endpoints must lie in the box");
  }
  Graph g(config);
  return g.distance(config.id_of(x), config.id_of(y), want_witness);
}

DistanceResult restricted_distance(const Configuration& config, const Point& x, const Point& y,
                                   const Rect& region) {
  if (!region.contains(x) || !region.contains(y)) {
    throw std::invalid_argument("restricted_distance: endpoints must lie in the region");
  }
  if (!config.indexer().rect().contains(x) || !config.indexer().rect().contains(y)) {
    throw std::invalid_argument("restricted_distance: endpoints outside box+halo");
  }
  Graph g(config);
  return g.restricted(config.id_of(x), config.id_of(y), region, config);
}

PathStats path_stats(const Params& params, const Path& path) {
  if (path.vertices.empty()) throw std::invalid_argument("path_stats: empty path");
  PathStats st;
  st.hops = static_cast<std::int64_t>(path.vertices.size()) - 1;
  Point delta(path.vertices.front().size());
  for (size_t i = 0; i < delta.size(); ++i) {
    delta[i] = path.vertices.back()[i] - path.vertices.front()[i];
  }
  st.displacement = norm_value(delta, params.norm);
  return st;
}

bool is_valid_path(const Configuration& config, const Path& path) {
  if (path.vertices.empty()) return false;
  const Rect er = config.indexer().rect();
  for (const Point& v : path.vertices) {
    if (!er.contains(v)) return false;
  }
  for (size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const Coord u = config.id_of(path.vertices[i]);
    const Coord v = config.id_of(path.vertices[i + 1]);
    if (u == v || !config.has_edge(u, v)) return false;
  }
  return true;
}

}  // namespace lrp
