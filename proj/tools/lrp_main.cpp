// Command-line front end: sampling, distances, block classification, the
// constants certificate, the probability recursion, and the scaling
// experiments. Exit codes: 0 ok, 2 usage, 3 budget, 4 data/format.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lrp/harness.hpp"
#include "lrp/metric.hpp"
#include "lrp/renorm.hpp"

namespace {

using namespace lrp;

Point parse_point(const std::string& text, int d) {
  Point p;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) p.push_back(std::stoll(tok));
  if (static_cast<int>(p.size()) != d) {
    throw std::invalid_argument("expected " + std::to_string(d) + " comma-separated coordinates, got '" +
                                text + "'");
  }
  return p;
}

std::vector<double> parse_direction(const std::string& text, int d) {
  std::vector<double> v;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (static_cast<int>(v.size()) != d) {
    throw std::invalid_argument("direction needs " + std::to_string(d) + " components");
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0)) throw std::invalid_argument("direction must be nonzero");
  for (double& x : v) x /= norm;
  return v;
}

// Accepts comma-separated entries; each entry is an integer, a power "2^k",
// or a power range "2^a..2^b".
std::vector<Coord> parse_distances(const std::string& text) {
  std::vector<Coord> out;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    const auto range = tok.find("..");
    if (range != std::string::npos) {
      const std::string a = tok.substr(0, range), b = tok.substr(range + 2);
      if (a.rfind("2^", 0) != 0 || b.rfind("2^", 0) != 0) {
        throw std::invalid_argument("distance ranges must look like 2^a..2^b");
      }
      const int lo = std::stoi(a.substr(2)), hi = std::stoi(b.substr(2));
      if (lo > hi || hi > 62) throw std::invalid_argument("bad power range: " + tok);
      for (int e = lo; e <= hi; ++e) out.push_back(Coord(1) << e);
    } else if (tok.rfind("2^", 0) == 0) {
      out.push_back(Coord(1) << std::stoi(tok.substr(2)));
    } else if (!tok.empty()) {
      out.push_back(std::stoll(tok));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw std::invalid_argument("no distances given");
  return out;
}

void print_certificate_table(const Certificate& cert, std::ostream& os) {
  auto row = [&](const char* name, const InequalityResult& r) {
    os << name << "  ok=" << (r.ok ? "yes" : "no ") << "  log_margin=" << r.log_margin
       << "  witness=" << r.witness << '\n';
  };
  os << "lnM = " << cert.lnM << " (slack " << cert.slack << ")\n";
  row("ineq3", cert.ineq3);
  row("ineq4", cert.ineq4);
  row("ineq5", cert.ineq5);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-range percolation simulation and verification toolkit"};
  app.require_subcommand(1);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "sample a configuration and write a bundle");
  struct {
    int d = 1;
    double s = 3.0, beta = 1.0;
    Coord box = 64, halo = 0;
    std::uint64_t seed = 0;
    std::string backend = "skip", norm = "euclidean", boundary = "free", out;
    bool force_nn = false;
    std::uint64_t max_edges = 100'000'000;
  } sa;
  sample->add_option("--d", sa.d)->required();
  sample->add_option("--s", sa.s)->required();
  sample->add_option("--beta", sa.beta)->required();
  sample->add_option("--box", sa.box, "box side length (corner at the origin)")->required();
  sample->add_option("--halo", sa.halo);
  sample->add_option("--seed", sa.seed)->required();
  sample->add_option("--backend", sa.backend)->check(CLI::IsMember({"skip", "hash"}));
  sample->add_option("--norm", sa.norm)->check(CLI::IsMember({"euclidean", "sup", "l1"}));
  sample->add_option("--boundary", sa.boundary)->check(CLI::IsMember({"free", "torus"}));
  sample->add_flag("--force-nn", sa.force_nn);
  sample->add_option("--max-edges", sa.max_edges);
  sample->add_option("--out", sa.out, "bundle output path")->required();

  // ---- dist ----
  auto* dist = app.add_subcommand("dist", "chemical distance between two box vertices");
  struct {
    std::string bundle, from, to;
    bool witness = false;
  } di;
  dist->add_option("--bundle", di.bundle)->required();
  dist->add_option("--from", di.from)->required();
  dist->add_option("--to", di.to)->required();
  dist->add_flag("--witness", di.witness);

  // ---- classify ----
  auto* classify = app.add_subcommand("classify", "good/bad verdict for one block");
  struct {
    std::string bundle, corner;
    Coord M = 100;
    int level = 0;
  } cl;
  classify->add_option("--bundle", cl.bundle)->required();
  classify->add_option("--M", cl.M)->required();
  classify->add_option("--level", cl.level)->required();
  classify->add_option("--corner", cl.corner)->required();

  // ---- verify-constants ----
  auto* verify = app.add_subcommand("verify-constants", "certificate for the constant inequalities");
  struct {
    int d = 1;
    double s = 3.0, sprime = 2.5, beta = 1.0, lnM = 0.0;
    bool find_min = false;
    std::int64_t kmax = 1000;
  } vc;
  verify->add_option("--d", vc.d)->required();
  verify->add_option("--s", vc.s)->required();
  verify->add_option("--sprime", vc.sprime)->required();
  verify->add_option("--beta", vc.beta)->required();
  auto* lnm_opt = verify->add_option("--lnM", vc.lnM, "check at this lnM");
  verify->add_flag("--find-min", vc.find_min, "bisect for the smallest passing lnM");
  verify->add_option("--kmax", vc.kmax);

  // ---- recursion ----
  auto* recursion = app.add_subcommand("recursion", "good-block probability recursion table");
  struct {
    int d = 1;
    std::int64_t kmax = 200;
  } re;
  recursion->add_option("--d", re.d)->required();
  recursion->add_option("--kmax", re.kmax)->required();

  // ---- experiment ----
  auto* experiment = app.add_subcommand("experiment", "distance-ratio experiment along a direction");
  struct {
    int d = 1;
    double s = 3.0, beta = 1.0;
    std::string direction = "1", distances = "2^9..2^13", norm = "euclidean", out;
    std::int64_t trials = 100;
    std::uint64_t seed = 0;
    bool force_nn = false;
    Coord margin = 16;
    std::uint64_t max_edges = 100'000'000;
  } ex;
  experiment->add_option("--d", ex.d)->required();
  experiment->add_option("--s", ex.s)->required();
  experiment->add_option("--beta", ex.beta)->required();
  experiment->add_option("--direction", ex.direction)->required();
  experiment->add_option("--distances", ex.distances)->required();
  experiment->add_option("--trials", ex.trials)->required();
  experiment->add_option("--seed", ex.seed)->required();
  experiment->add_flag("--force-nn", ex.force_nn);
  experiment->add_option("--norm", ex.norm)->check(CLI::IsMember({"euclidean", "sup", "l1"}));
  experiment->add_option("--margin", ex.margin);
  experiment->add_option("--max-edges", ex.max_edges);
  experiment->add_option("--out", ex.out, "CSV output path, or - for stdout")->required();

  // ---- pk ----
  auto* pk = app.add_subcommand("pk", "empirical bad-block frequency per level");
  struct {
    int d = 1;
    double s = 3.0, beta = 0.1;
    Coord M = 100;
    int level = 0;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
  } pkc;
  pk->add_option("--d", pkc.d)->required();
  pk->add_option("--s", pkc.s)->required();
  pk->add_option("--beta", pkc.beta)->required();
  pk->add_option("--M", pkc.M)->required();
  pk->add_option("--level", pkc.level)->required();
  pk->add_option("--trials", pkc.trials)->required();
  pk->add_option("--seed", pkc.seed)->required();

  try {
    app.parse(argc, argv);

    if (*sample) {
      Params params{sa.d, sa.s, sa.beta, norm_from_string(sa.norm),
                    boundary_from_string(sa.boundary), sa.force_nn};
      const Box box = make_box(Point(sa.d, 0), sa.box);
      SampleOptions opts;
      opts.max_edges = sa.max_edges;
      const Configuration config =
          sample_configuration(params, box, sa.halo, sa.seed, backend_from_string(sa.backend), opts);
      save_bundle(config, sa.out);
      std::cout << nlohmann::json{{"edges", config.edge_count()}, {"out", sa.out}}.dump() << '\n';
    } else if (*dist) {
      const Configuration config = load_bundle(di.bundle);
      const int d = config.params().d;
      const DistanceResult res =
          chemical_distance(config, parse_point(di.from, d), parse_point(di.to, d), di.witness);
      nlohmann::json j{{"reachable", res.reachable()}};
      j["distance"] = res.value ? nlohmann::json(*res.value) : nlohmann::json(nullptr);
      if (res.witness) {
        nlohmann::json w = nlohmann::json::array();
        for (const Point& v : res.witness->vertices) w.push_back(v);
        j["witness"] = w;
      }
      std::cout << j.dump() << '\n';
    } else if (*classify) {
      const Configuration config = load_bundle(cl.bundle);
      const BlockHierarchy hier(cl.M);
      const Block block{cl.level, parse_point(cl.corner, config.params().d)};
      std::cout << status_to_json(classify_block(config, hier, block)).dump() << '\n';
    } else if (*verify) {
      if (vc.find_min == (lnm_opt->count() > 0)) {
        throw CLI::ValidationError("verify-constants", "give exactly one of --lnM or --find-min");
      }
      const double lnM = vc.find_min ? find_min_lnM(vc.d, vc.s, vc.sprime, vc.beta, vc.kmax) : vc.lnM;
      const ConstantsSpec spec{vc.d, vc.s, vc.sprime, vc.beta, lnM};
      const Certificate cert = check_inequalities(spec, vc.kmax, vc.kmax);
      print_certificate_table(cert, std::cerr);
      std::cout << certificate_to_json(cert, spec).dump() << '\n';
    } else if (*recursion) {
      const RecursionTable table = iterate_recursion(re.d, re.kmax);
      std::cout << "k,ln_pk_bound,inductive_bound,ok\n";
      char buf[128];
      for (const RecursionRow& row : table.rows) {
        std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%s\n", static_cast<long long>(row.k),
                      row.ln_pk, row.ln_bound, row.ok ? "true" : "false");
        std::cout << buf;
      }
      std::cerr << "sum_pk = " << table.sum_pk
                << (table.inductive_ok ? " (inductive bound holds)" : " (INDUCTIVE BOUND FAILS)")
                << '\n';
    } else if (*experiment) {
      ExperimentPlan plan;
      plan.params = Params{ex.d, ex.s, ex.beta, norm_from_string(ex.norm), Boundary::free, ex.force_nn};
      plan.direction = parse_direction(ex.direction, ex.d);
      plan.distances = parse_distances(ex.distances);
      plan.trials = ex.trials;
      plan.seed = ex.seed;
      plan.margin = ex.margin;
      SampleOptions opts;
      opts.max_edges = ex.max_edges;
      const ExperimentResult result = run_ratio_experiment(plan, opts);
      const std::string csv = result_to_csv(result);
      if (ex.out == "-") {
        std::cout << csv;
      } else {
        std::ofstream out(ex.out, std::ios::binary);
        if (!out) throw BundleError(BundleError::Code::io, "cannot open " + ex.out);
        out << csv;
      }
      std::cerr << result_metadata(result).dump() << '\n';
    } else if (*pk) {
      Params params{pkc.d, pkc.s, pkc.beta, Norm::euclidean, Boundary::free, false};
      std::cout << goodness_to_csv(
          estimate_block_goodness(params, pkc.M, pkc.level, pkc.trials, pkc.seed));
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const lrp::BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const lrp::BundleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
