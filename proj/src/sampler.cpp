#include "lrp/sampler.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "lrp/rng.hpp"

namespace lrp {

namespace {

constexpr Coord kMaxClassPositions = Coord(1) << 52;  // exact in double

std::uint64_t class_key(const Point& k) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (Coord c : k) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

// Per-axis range of base points x with x and x+k both inside the cube.
struct ClassRange {
  Rect rect;
  Coord count = 0;
};

ClassRange base_range(const Box& ebox, const Point& k) {
  ClassRange r;
  const int d = ebox.dim();
  r.rect.lo.resize(d);
  r.rect.size.resize(d);
  r.count = 1;
  for (int i = 0; i < d; ++i) {
    r.rect.lo[i] = ebox.lo[i] + std::max<Coord>(0, -k[i]);
    Coord m = ebox.side - std::abs(k[i]);
    r.rect.size[i] = m;
    if (m <= 0) {
      r.count = 0;
      return r;
    }
    r.count *= m;
  }
  return r;
}

// Walks every displacement class once. Free boundary: displacements with the
// first nonzero coordinate positive. Torus: residues r with r lexicographically
// smaller than L-r (classes with r = L-r are flagged self-paired and deduped
// by vertex id order at emission).
template <typename Fn>
void for_each_class(const Params& params, const Box& ebox, Fn&& fn) {
  const int d = params.d;
  if (params.boundary == Boundary::free) {
    const Coord hi = ebox.side - 1;
    Point k(d, -hi);
    while (true) {
      int nz = 0;
      while (nz < d && k[nz] == 0) ++nz;
      if (nz < d && k[nz] > 0) fn(k, k, false);
      int axis = d - 1;
      while (axis >= 0 && ++k[axis] > hi) k[axis--] = -hi;
      if (axis < 0) break;
    }
  } else {
    const Coord L = ebox.side;
    Point r(d, 0);
    Point reduced(d, 0);
    while (true) {
      bool zero = true, self = true;
      int cmp = 0;  // r vs L-r (componentwise complement), lexicographic
      for (int i = 0; i < d && cmp == 0; ++i) {
        Coord comp = r[i] == 0 ? 0 : L - r[i];
        cmp = r[i] < comp ? -1 : (r[i] > comp ? 1 : 0);
      }
      for (int i = 0; i < d; ++i) {
        zero = zero && r[i] == 0;
        Coord comp = r[i] == 0 ? 0 : L - r[i];
        self = self && r[i] == comp;
        reduced[i] = std::min(r[i], comp == 0 ? r[i] : comp);
      }
      if (!zero && (cmp < 0 || self)) fn(r, reduced, self);
      int axis = d - 1;
      while (axis >= 0 && ++r[axis] == L) r[axis--] = 0;
      if (axis < 0) break;
    }
  }
}

}  // namespace

std::string to_string(SamplerBackend b) {
  return b == SamplerBackend::skip ? "skip" : "hash";
}

SamplerBackend backend_from_string(const std::string& s) {
  if (s == "skip") return SamplerBackend::skip;
  if (s == "hash") return SamplerBackend::hash;
  throw std::invalid_argument("unknown sampler backend: " + s);
}

BudgetError::BudgetError(double estimate_, std::uint64_t budget_)
    : std::runtime_error("sampling refused: expected ~" + std::to_string(estimate_) +
                         " edges exceeds budget of " + std::to_string(budget_)),
      estimate(estimate_),
      budget(budget_) {}

BundleError::BundleError(Code code_, const std::string& what)
    : std::runtime_error(what), code(code_) {}

Configuration::Configuration(Params params, Box box, Coord halo, std::vector<Edge> edges,
                             Provenance prov)
    : params_(std::move(params)),
      box_(std::move(box)),
      halo_(halo),
      ebox_(expand(box_, halo)),
      index_(rect_of(ebox_)),
      edges_(std::move(edges)),
      prov_(prov) {
  params_.validate();
  if (halo_ < 0) throw std::invalid_argument("Configuration: negative halo");
  if (static_cast<int>(box_.lo.size()) != params_.d) {
    throw std::invalid_argument("Configuration: box dimension mismatch");
  }
  if (params_.boundary == Boundary::torus && halo_ != 0) {
    throw std::invalid_argument("Configuration: torus boundary requires halo = 0");
  }
  const Coord n = index_.size();
  const Rect brect = rect_of(box_);
  Point pu, pv;
  for (size_t i = 0; i < edges_.size(); ++i) {
    const auto& [u, v] = edges_[i];
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("Configuration: edge endpoint outside box+halo");
    if (u == v) throw std::invalid_argument("Configuration: self loop");
    if (u > v) throw std::invalid_argument("Configuration: edge endpoints not ordered");
    if (i > 0 && !(edges_[i - 1] < edges_[i])) {
      throw std::invalid_argument("Configuration: edges not in canonical order or duplicated");
    }
    index_.point_of(u, pu);
    index_.point_of(v, pv);
    if (!brect.contains(pu) && !brect.contains(pv)) {
      throw std::invalid_argument("Configuration: edge with no endpoint in box");
    }
  }
}

Configuration Configuration::from_coordinate_edges(Params params, Box box, Coord halo,
                                                   const std::vector<std::pair<Point, Point>>& edges,
                                                   Provenance prov) {
  Indexer idx(rect_of(expand(box, halo)));
  const Rect er = idx.rect();
  std::vector<Edge> local;
  local.reserve(edges.size());
  for (const auto& [x, y] : edges) {
    if (!er.contains(x) || !er.contains(y)) {
      throw std::invalid_argument("edge endpoint outside box+halo");
    }
    Coord u = idx.id_of(x), v = idx.id_of(y);
    if (u > v) std::swap(u, v);
    local.emplace_back(u, v);
  }
  std::sort(local.begin(), local.end());
  local.erase(std::unique(local.begin(), local.end()), local.end());
  return Configuration(std::move(params), std::move(box), halo, std::move(local), prov);
}

bool Configuration::has_edge(Coord u, Coord v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

std::vector<Edge> Configuration::edges_touching(const RegionQuery& region) const {
  if (!index_.rect().contains(region)) {
    throw std::invalid_argument("edges_touching: region outside box+halo");
  }
  std::vector<Edge> out;
  Point pu, pv;
  for (const Edge& e : edges_) {
    index_.point_of(e.first, pu);
    index_.point_of(e.second, pv);
    if (region.contains(pu) || region.contains(pv)) out.push_back(e);
  }
  return out;
}

bool Configuration::operator==(const Configuration& other) const {
  return params_ == other.params_ && box_ == other.box_ && halo_ == other.halo_ &&
         edges_ == other.edges_ && prov_ == other.prov_;
}

double expected_edge_count(const Params& params, const Box& box, Coord halo) {
  params.validate();
  const Box ebox = expand(box, halo);
  double total = 0;
  for_each_class(params, ebox, [&](const Point& k, const Point& reduced, bool self) {
    double p = connection_probability(params, reduced);
    double count;
    if (params.boundary == Boundary::free) {
      count = double(base_range(ebox, k).count);
    } else {
      count = double(Indexer(rect_of(box)).size());
      if (self) count /= 2;
    }
    total += p * count;
  });
  return total;
}

Configuration sample_configuration(const Params& params, const Box& box, Coord halo,
                                   std::uint64_t seed, SamplerBackend backend,
                                   const SampleOptions& options) {
  params.validate();
  if (static_cast<int>(box.lo.size()) != params.d) {
    throw std::invalid_argument("sample_configuration: box dimension mismatch");
  }
  if (halo < 0) throw std::invalid_argument("sample_configuration: negative halo");
  make_box(box.lo, box.side);  // re-run volume checks
  const double estimate = expected_edge_count(params, box, halo);
  if (estimate > double(options.max_edges)) throw BudgetError(estimate, options.max_edges);

  const Box ebox = expand(box, halo);
  const Indexer eidx(rect_of(ebox));
  const Rect brect = rect_of(box);
  const bool torus = params.boundary == Boundary::torus;
  const Coord L = box.side;

  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(estimate * 1.1) + 16);

  Point x(params.d), y(params.d);
  Indexer base_idx;

  auto emit = [&](Coord pos, const Point& k, bool self) {
    base_idx.point_of(pos, x);
    for (int i = 0; i < params.d; ++i) {
      y[i] = x[i] + k[i];
      if (torus && y[i] >= box.lo[i] + L) y[i] -= L;
    }
    if (!torus && !brect.contains(x) && !brect.contains(y)) return;
    Coord u = eidx.id_of(x);
    Coord v = eidx.id_of(y);
    if (u > v) {
      if (self) return;  // self-paired torus class: each pair appears twice
      std::swap(u, v);
    }
    edges.emplace_back(u, v);
  };

  for_each_class(params, ebox, [&](const Point& k, const Point& reduced, bool self) {
    const double p = connection_probability(params, reduced);
    if (p <= 0.0) return;
    Coord count;
    if (torus) {
      base_idx = Indexer(rect_of(box));
      count = base_idx.size();
    } else {
      ClassRange r = base_range(ebox, k);
      if (r.count == 0) return;
      base_idx = Indexer(r.rect);
      count = r.count;
    }
    if (count > kMaxClassPositions) {
      throw std::overflow_error("sample_configuration: class too large for gap sampling");
    }
    if (p >= 1.0) {
      for (Coord pos = 0; pos < count; ++pos) emit(pos, k, self);
      return;
    }
    if (backend == SamplerBackend::hash) {
      for (Coord pos = 0; pos < count; ++pos) {
        base_idx.point_of(pos, x);
        for (int i = 0; i < params.d; ++i) {
          y[i] = x[i] + k[i];
          if (torus && y[i] >= box.lo[i] + L) y[i] -= L;
        }
        bool swap_pts = false;
        for (int i = 0; i < params.d; ++i) {
          if (x[i] != y[i]) {
            swap_pts = y[i] < x[i];
            break;
          }
        }
        const std::uint64_t h = swap_pts ? hash_pair(seed, y, x) : hash_pair(seed, x, y);
        if (unit_from_hash(h) < p) emit(pos, k, self);
      }
      return;
    }
    // skip backend: geometric gaps over the class's canonical pair order.
    SplitMix64 rng(derive_seed(seed, class_key(k)));
    const double logq = std::log1p(-p);
    double pos = -1.0;
    while (true) {
      const double g = std::floor(std::log(rng.next_unit_pos()) / logq);
      pos += 1.0 + g;
      if (!(pos < double(count))) break;
      emit(Coord(pos), k, self);
    }
  });

  std::sort(edges.begin(), edges.end());
  return Configuration(params, box, halo, std::move(edges),
                       Provenance{seed, backend, 1});
}

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int b = 0; b < 8; ++b) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ p[i]) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

namespace {

constexpr int kBundleFormatVersion = 1;

}  // namespace

void save_bundle(const Configuration& config, const std::filesystem::path& path) {
  std::string payload;
  payload.reserve(config.edge_count() * 16);
  Point pu, pv;
  for (const Edge& e : config.edges()) {
    config.indexer().point_of(e.first, pu);
    config.indexer().point_of(e.second, pv);
    for (Coord c : pu) {
      payload += std::to_string(c);
      payload += ' ';
    }
    for (size_t i = 0; i < pv.size(); ++i) {
      payload += std::to_string(pv[i]);
      payload += (i + 1 == pv.size()) ? '\n' : ' ';
    }
  }
  nlohmann::json header{
      {"params", params_to_json(config.params())},
      {"box", {{"lo", config.box().lo}, {"side", config.box().side}}},
      {"halo", config.halo()},
      {"seed", config.provenance().seed},
      {"backend", to_string(config.provenance().backend)},
      {"edge_count", config.edge_count()},
      {"format_version", kBundleFormatVersion},
      {"crc32", crc32(payload.data(), payload.size())},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BundleError(BundleError::Code::io, "cannot open for writing: " + path.string());
  out << header.dump() << '\n' << payload;
  if (!out) throw BundleError(BundleError::Code::io, "write failed: " + path.string());
}

Configuration load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError(BundleError::Code::io, "cannot open: " + path.string());
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto nl = contents.find('\n');
  if (nl == std::string::npos) {
    throw BundleError(BundleError::Code::malformed_header, "bundle has no header line");
  }
  nlohmann::json header;
  Params params;
  Box box;
  Coord halo = 0;
  std::uint64_t seed = 0;
  SamplerBackend backend{};
  std::uint64_t edge_count = 0;
  std::uint32_t crc = 0;
  int version = -1;
  try {
    header = nlohmann::json::parse(contents.substr(0, nl));
    version = header.at("format_version").get<int>();
  } catch (const std::exception& e) {
    throw BundleError(BundleError::Code::malformed_header, std::string("bad bundle header: ") + e.what());
  }
  if (version != kBundleFormatVersion) {
    throw BundleError(BundleError::Code::version_mismatch,
                      "unsupported bundle format_version " + std::to_string(version));
  }
  try {
    params = params_from_json(header.at("params"));
    box.lo = header.at("box").at("lo").get<Point>();
    box.side = header.at("box").at("side").get<Coord>();
    halo = header.at("halo").get<Coord>();
    seed = header.at("seed").get<std::uint64_t>();
    backend = backend_from_string(header.at("backend").get<std::string>());
    edge_count = header.at("edge_count").get<std::uint64_t>();
    crc = header.at("crc32").get<std::uint32_t>();
  } catch (const BundleError&) {
    throw;
  } catch (const std::exception& e) {
    throw BundleError(BundleError::Code::malformed_header, std::string("bad bundle header: ") + e.what());
  }

  const std::string payload = contents.substr(nl + 1);
  if (crc32(payload.data(), payload.size()) != crc) {
    throw BundleError(BundleError::Code::checksum_mismatch, "bundle payload checksum mismatch");
  }

  std::vector<std::pair<Point, Point>> coord_edges;
  coord_edges.reserve(edge_count);
  const char* p = payload.data();
  const char* end = p + payload.size();
  const int d = params.d;
  while (p < end) {
    Point x(d), y(d);
    for (int i = 0; i < 2 * d; ++i) {
      char* next = nullptr;
      errno = 0;
      long long v = std::strtoll(p, &next, 10);
      if (next == p || errno != 0) {
        throw BundleError(BundleError::Code::malformed_payload, "bad edge record");
      }
      (i < d ? x[i] : y[i - d]) = v;
      p = next;
    }
    if (p < end && *p == '\n') ++p;
    coord_edges.emplace_back(std::move(x), std::move(y));
  }
  if (coord_edges.size() != edge_count) {
    throw BundleError(BundleError::Code::malformed_payload,
                      "edge_count mismatch: header says " + std::to_string(edge_count) +
                          ", payload has " + std::to_string(coord_edges.size()));
  }
  try {
    return Configuration::from_coordinate_edges(params, box, halo, coord_edges,
                                                Provenance{seed, backend, version});
  } catch (const std::exception& e) {
    throw BundleError(BundleError::Code::malformed_payload, std::string("bad bundle payload: ") + e.what());
  }
}

}  // namespace lrp
