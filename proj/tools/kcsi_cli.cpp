#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "kcsi/cocycle.hpp"
#include "kcsi/enumerate.hpp"
#include "kcsi/faces.hpp"
#include "kcsi/integration.hpp"
#include "kcsi/invariants.hpp"
#include "kcsi/knot_io.hpp"

using nlohmann::json;
using namespace kcsi;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kCap = 3,
  kNumeric = 4,
  kCache = 5,
};

struct Failure : std::runtime_error {
  Failure(int c, const std::string& m) : std::runtime_error(m), code(c) {}
  int code;
};

struct Options {
  std::uint64_t seed = 1;
  std::int64_t samples = 1'000'000;
  int strata = 16;
  int threads = 0;
  std::string vol = "uniform";
  std::string bounds = "5,4";
  std::string knot = "trefoil_plus";
  double height = 0.3;
  std::string graph = "i=3 f=2 edges=14,15,24,35,45";
  int witness = 0;
  std::string cache = "kcsi_cocycle.json";
  std::string out;
};

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::pair<int, int> parse_bounds(const std::string& text) {
  int s = 0, t = 0;
  char comma = 0, extra = 0;
  std::istringstream in(text);
  if (!(in >> s >> comma >> t) || comma != ',' || (in >> extra) || s < 0 || t < 0) {
    throw Failure(kUsage, "--bounds must be 's,t' with non-negative integers, got '" + text + "'");
  }
  return {s, t};
}

KnotInput knot_input(const Options& o) {
  try {
    return load_knot(o.knot, o.height);
  } catch (const KnotParseError& e) {
    throw Failure(kParse, e.what());
  } catch (const DiagramError& e) {
    throw Failure(kParse, e.what());
  } catch (const KnotError& e) {
    throw Failure(kParse, e.what());
  }
}

json face_rows(const Graph& g, bool principal_too, std::ostream& out) {
  json rows = json::array();
  for (const FaceSpec& f : enumerate_faces(g)) {
    const FaceVerdict v = classify_face(f);
    if (!principal_too && v.status == FaceStatus::Principal) continue;
    out << "  " << g.to_string() << "  " << subset_string(f.subset) << "  " << to_string(v) << "\n";
    rows.push_back({{"graph", g.to_string()},
                    {"subset", subset_string(f.subset)},
                    {"status", to_string(v.status)},
                    {"rule", to_string(v.rule)}});
  }
  return rows;
}

json cmd_cocycle(const Options& o) {
  const auto [s, t] = parse_bounds(o.bounds);
  CocycleSolution sol;
  try {
    sol = solve_cocycle(s, t);
  } catch (const CapExceeded& e) {
    throw Failure(kCap, e.what());
  }
  std::cout << "bounds " << s << "," << t << " order " << sol.order << "\n";
  std::cout << "basis size " << sol.basis_size << "\n";
  std::cout << "kernel dimension " << sol.kernel_dimension << "\n";
  std::cout << "nontrivalent kernel elements " << sol.nontrivalent_kernel_elements << "\n";
  std::cout << "exact kernel elements " << sol.exact_kernel_elements << "\n";
  json res{{"basis_size", sol.basis_size},
           {"kernel_dimension", sol.kernel_dimension},
           {"nontrivalent_kernel_elements", sol.nontrivalent_kernel_elements},
           {"exact_kernel_elements", sol.exact_kernel_elements},
           {"found", sol.found}};
  if (!sol.found) {
    std::cout << "no non-exact class within these bounds\n";
    return res;
  }
  std::cout << "representative (" << sol.representative.size() << " graphs):\n";
  json terms = json::array();
  for (const auto& [g, c] : sol.representative.terms()) {
    std::cout << "  " << c.get_str() << "  " << g.to_string() << "\n";
    terms.push_back({{"coefficient", c.get_str()}, {"graph", g.to_string()}});
  }
  res["representative"] = terms;
  std::cout << "non-principal faces:\n";
  json faces = json::array();
  int nonzero = 0;
  for (const auto& [g, c] : sol.representative.terms()) {
    for (auto& row : face_rows(g, false, std::cout)) {
      nonzero += row["status"] == to_string(FaceStatus::PotentiallyNonzero);
      faces.push_back(row);
    }
  }
  std::cout << "potentially nonzero faces " << nonzero << "\n";
  res["faces"] = faces;
  res["potentially_nonzero"] = nonzero;
  std::ofstream(o.cache) << cocycle_to_json(sol) << "\n";
  std::cout << "cached to " << o.cache << "\n";
  return res;
}

json cmd_v2(const Options& o) {
  const KnotInput in = knot_input(o);
  std::int64_t pair = 0, oracle = 0;
  ConwayPolynomial p;
  try {
    pair = v2_pair_count(in.diagram);
    p = conway(in.diagram);
    oracle = v2_oracle(in.diagram);
  } catch (const SkeinCapExceeded& e) {
    throw Failure(kCap, e.what());
  }
  std::cout << "knot " << in.name << " crossings " << in.diagram.num_crossings() << "\n";
  std::cout << "v2_pair_count " << pair << "\n";
  std::cout << "v2_oracle " << oracle << "\n";
  std::cout << "conway " << p.to_string() << "\n";
  return {{"knot", in.name},
          {"crossings", in.diagram.num_crossings()},
          {"v2_pair_count", pair},
          {"v2_oracle", oracle},
          {"conway", p.to_string()}};
}

GraphChain cached_cocycle(const Options& o) {
  if (!std::filesystem::exists(o.cache)) {
    std::cerr << "no cocycle cache at " << o.cache << ", solving\n";
    const CocycleSolution sol = solve_cocycle(5, 4);
    if (!sol.found) throw Failure(kNumeric, "no cocycle found");
    std::ofstream(o.cache) << cocycle_to_json(sol) << "\n";
    return sol.representative;
  }
  std::ifstream f(o.cache);
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return cocycle_from_json(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw Failure(kCache, std::string("unreadable cocycle cache: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw Failure(kCache, std::string("refusing cocycle cache ") + o.cache + ": " + e.what());
  }
}

json cmd_pair(const Options& o) {
  const KnotInput in = knot_input(o);
  if (!in.curve) throw Failure(kParse, "pair needs a curve (points:), not a Gauss code");
  const GraphChain gamma = cached_cocycle(o);
  const SphereVolumeForm vol = SphereVolumeForm::parse(o.vol);
  SamplerConfig cfg;
  cfg.seed = o.seed;
  cfg.samples = o.samples;
  cfg.strata = o.strata;
  cfg.threads = o.threads;
  MCEstimate e;
  try {
    e = pair_gramain(*in.curve, gamma, vol, cfg);
  } catch (const IntegrationError& err) {
    throw Failure(kNumeric, err.what());
  }
  if (!std::isfinite(e.value) || !std::isfinite(e.std_error)) throw Failure(kNumeric, "non-finite estimate");
  const std::int64_t v2 = v2_oracle(in.diagram);
  std::cout << "knot " << in.name << " vol " << vol.to_string() << " seed " << o.seed << " samples " << e.samples
            << "\n";
  json terms = json::array();
  for (const GraphEstimate& t : e.terms) {
    std::cout << "  " << t.coefficient.get_str() << "  " << t.graph.to_string() << "  " << fixed(t.value) << " +- "
              << fixed(t.std_error) << "  n=" << t.samples << "\n";
    terms.push_back({{"graph", t.graph.to_string()},
                     {"coefficient", t.coefficient.get_str()},
                     {"value", t.value},
                     {"std_error", t.std_error},
                     {"samples", t.samples}});
  }
  std::cout << "estimate " << fixed(e.value) << " +- " << fixed(e.std_error) << "\n";
  std::cout << "rejected " << e.rejected << " (" << fixed(e.rejection_rate, 8) << ")\n";
  std::cout << "v2 " << v2 << "  deviation " << fixed((e.value - v2) / e.std_error, 2) << " sigma\n";
  if (e.rejection_rate > 0.01) throw Failure(kNumeric, "rejection rate above 1%");
  return {{"knot", in.name},
          {"estimate", e.value},
          {"std_error", e.std_error},
          {"samples", e.samples},
          {"rejected", e.rejected},
          {"v2", v2},
          {"terms", terms}};
}

json cmd_faces(const Options& o) {
  Graph g;
  try {
    g = Graph::parse(o.graph);
  } catch (const GraphError& e) {
    throw Failure(kParse, e.what());
  }
  std::cout << "faces of " << g.to_string() << ":\n";
  json rows = face_rows(g, true, std::cout);
  if (o.witness > 0) {
    const KnotInput in = knot_input(o);
    if (!in.curve) throw Failure(kParse, "the witness needs a curve");
    const SphereVolumeForm vol = SphereVolumeForm::parse(o.vol);
    std::cout << "witness on " << in.name << ", " << o.witness << " trials:\n";
    for (auto& row : rows) {
      if (row["status"] == to_string(FaceStatus::Principal)) continue;
      FaceSpec f;
      f.parent = g;
      for (const FaceSpec& c : enumerate_faces(g)) {
        if (subset_string(c.subset) == row["subset"]) f = c;
      }
      std::cout << "  " << row["subset"].get<std::string>() << "  ";
      try {
        const WitnessReport w = face_symmetry_witness(*in.curve, f, vol, o.witness, o.seed);
        std::cout << to_string(w.rule) << " max violation " << w.max_violation << " used " << w.used << "/"
                  << w.trials << "\n";
        row["witness"] = {{"rule", to_string(w.rule)}, {"max_violation", w.max_violation}, {"used", w.used}};
      } catch (const FaceError& e) {
        std::cout << "no witness: " << e.what() << "\n";
      }
    }
  }
  return {{"graph", g.to_string()}, {"faces", rows}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Configuration-space integrals of graph cocycles on long knots"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--out", o.out, "Write the run manifest and outputs as JSON");
  app.add_option("--cache", o.cache, "Cocycle cache file")->capture_default_str();

  auto* cocycle = app.add_subcommand("cocycle", "Solve for the degree-1 cocycle and classify its faces");
  cocycle->add_option("--bounds", o.bounds, "Bounds s,t on interval and free vertices")->capture_default_str();

  auto* v2 = app.add_subcommand("v2", "Combinatorial v2 and Conway polynomial of a knot");
  auto* pair = app.add_subcommand("pair", "Monte Carlo pairing with the Gramain cycle");
  auto* faces = app.add_subcommand("faces", "Boundary faces of a graph with their verdicts");
  for (auto* sub : {v2, pair, faces}) {
    sub->add_option("--knot", o.knot, "Standard knot name or knot file")->capture_default_str();
    sub->add_option("--height", o.height, "Over-arc height of standard knots")->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
  auto vol_check = CLI::Validator(
      [](std::string& s) {
        try {
          SphereVolumeForm::parse(s);
        } catch (const std::invalid_argument& e) {
          return std::string(e.what());
        }
        return std::string();
      },
      "uniform|bump:<width>");
  for (auto* sub : {pair, faces}) {
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--vol", o.vol, "Volume form: uniform or bump:<width>")->capture_default_str()->check(vol_check);
  }
  pair->add_option("--samples", o.samples, "Total samples")->capture_default_str()->check(CLI::PositiveNumber);
  pair->add_option("--strata", o.strata, "Strata over the rotation angle")->capture_default_str()
      ->check(CLI::PositiveNumber);
  pair->add_option("--threads", o.threads, "Worker threads (0: all cores); does not change results")
      ->capture_default_str();
  faces->add_option("--graph", o.graph, "Graph as 'i=<s> f=<t> edges=<..>'")->capture_default_str();
  faces->add_option("--witness", o.witness, "Trials of the numerical face witness (0: off)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  json outputs;
  std::string command;
  int code = kOk;
  std::string error;
  try {
    if (*cocycle) {
      command = "cocycle";
      outputs = cmd_cocycle(o);
    } else if (*v2) {
      command = "v2";
      outputs = cmd_v2(o);
    } else if (*pair) {
      command = "pair";
      outputs = cmd_pair(o);
    } else {
      command = "faces";
      outputs = cmd_faces(o);
    }
  } catch (const Failure& f) {
    code = f.code;
    error = f.what();
  } catch (const CapExceeded& e) {
    code = kCap;
    error = e.what();
  } catch (const IntegrationError& e) {
    code = kNumeric;
    error = e.what();
  } catch (const std::exception& e) {
    code = kNumeric;
    error = e.what();
  }
  if (code != kOk) std::cerr << "error: " << error << "\n";

  if (!o.out.empty()) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest{{"command", command},
                  {"config",
                   {{"seed", o.seed},
                    {"samples", o.samples},
                    {"strata", o.strata},
                    {"vol", o.vol},
                    {"bounds", o.bounds},
                    {"knot", o.knot},
                    {"height", o.height},
                    {"graph", o.graph},
                    {"witness", o.witness},
                    {"cache", o.cache}}},
                  {"seed", o.seed},
                  {"versions", {{"code", kCodeVersion}, {"cocycle_schema", kCocycleSchema}}},
                  {"wall_time_s", wall},
                  {"exit_code", code},
                  {"outputs", outputs}};
    if (code != kOk) manifest["error"] = error;
    std::ofstream(o.out) << manifest.dump(2) << "\n";
  }
  return code;
}
