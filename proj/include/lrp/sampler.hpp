// Configuration sampling: materializes the open edges with at least one
// endpoint in the box, over box+halo, in O(#edges + #displacement classes).
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "lrp/lattice.hpp"

namespace lrp {

enum class SamplerBackend { skip, hash };

std::string to_string(SamplerBackend b);
SamplerBackend backend_from_string(const std::string& s);

struct Provenance {
  std::uint64_t seed = 0;
  SamplerBackend backend = SamplerBackend::skip;
  int format_version = 1;

  bool operator==(const Provenance&) const = default;
};

/// Open edge as a pair of vertex ids local to the expanded box, first < second.
using Edge = std::pair<Coord, Coord>;

class BudgetError : public std::runtime_error {
 public:
  BudgetError(double estimate, std::uint64_t budget);
  double estimate;
  std::uint64_t budget;
};

class BundleError : public std::runtime_error {
 public:
  enum class Code { malformed_header, version_mismatch, checksum_mismatch, malformed_payload, io };
  BundleError(Code code, const std::string& what);
  Code code;
};

struct SampleOptions {
  std::uint64_t max_edges = 100'000'000;  // refusal threshold on E[#edges]
};

/// A sampled edge configuration on box+halo. Immutable; edge iteration is in
/// canonical order (lexicographic by endpoint coordinates).
class Configuration {
 public:
  Configuration(Params params, Box box, Coord halo, std::vector<Edge> edges, Provenance prov);

  // Edges given as absolute coordinate pairs, any order; used by tests and
  // the bundle loader.
  static Configuration from_coordinate_edges(Params params, Box box, Coord halo,
                                             const std::vector<std::pair<Point, Point>>& edges,
                                             Provenance prov);

  const Params& params() const { return params_; }
  const Box& box() const { return box_; }
  Coord halo() const { return halo_; }
  const Box& expanded_box() const { return ebox_; }
  const Indexer& indexer() const { return index_; }
  const Provenance& provenance() const { return prov_; }

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(Coord u, Coord v) const;

  Coord id_of(const Point& p) const { return index_.id_of(p); }
  Point point_of(Coord id) const { return index_.point_of(id); }
  bool in_box(const Point& p) const { return rect_of(box_).contains(p); }

  /// All open edges with at least one endpoint in the region, canonical order.
  std::vector<Edge> edges_touching(const RegionQuery& region) const;

  bool operator==(const Configuration& other) const;

 private:
  Params params_;
  Box box_;
  Coord halo_ = 0;
  Box ebox_;
  Indexer index_;
  std::vector<Edge> edges_;
  Provenance prov_;
};

/// Expected number of materialized edges; the budget check runs before any
/// sampling happens.
double expected_edge_count(const Params& params, const Box& box, Coord halo);

Configuration sample_configuration(const Params& params, const Box& box, Coord halo,
                                   std::uint64_t seed, SamplerBackend backend,
                                   const SampleOptions& options = {});

// Bundle file: one JSON header line, then one "x1 .. xd y1 .. yd" line per
// edge in canonical order. The header carries a CRC32 of the payload bytes.
void save_bundle(const Configuration& config, const std::filesystem::path& path);
Configuration load_bundle(const std::filesystem::path& path);

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

}  // namespace lrp
