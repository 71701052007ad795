// Command-line front end: every checker and experiment, JSON in and out.
// Exit codes: 0 pass, 2 checked and negative, 1 error.
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "terracini/families.hpp"
#include "terracini/json_io.hpp"
#include "terracini/random.hpp"
#include "terracini/version.hpp"

using namespace terracini;
using io::json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  int jobs = 1;
  std::string out;
  std::string format = "json";
  std::string manifest;
};

std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// "-" reads stdin; an existing path reads the file; anything else is inline.
std::string resolve_text(const std::string& arg) {
  if (arg == "-") return read_all(std::cin);
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream f(arg);
    return read_all(f);
  }
  return arg;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::usage, "malformed JSON for " + what + ": " + e.what());
  }
}

// Built-in names stay strings; everything else must be JSON.
json resolve_json(const std::string& arg, const std::string& what) {
  const std::string text = resolve_text(arg);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) fail(ErrorKind::usage, "empty input for " + what);
  const char c = text[first];
  if (c == '{' || c == '[' || c == '"') return parse_json(text, what);
  return json(text.substr(first, text.find_last_not_of(" \t\r\n") - first + 1));
}

Vec parse_csv_vec(const std::string& s) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      fail(ErrorKind::usage, "bad number list: " + s);
    }
  }
  return Eigen::Map<Vec>(v.data(), v.size());
}

SparsePoly poly_arg(const std::string& arg) {
  std::string text = resolve_text(arg);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return parse_poly(text);
}

std::uint64_t need_seed(const Globals& g) {
  if (!g.seed) fail(ErrorKind::usage, "this command is stochastic and needs --seed");
  return *g.seed;
}

// The result of one command: payload plus the pass/negative verdict.
struct Outcome {
  json payload;
  bool negative = false;
};

void emit(const Globals& g, const json& payload) {
  const std::string text =
      g.format == "csv" ? io::to_csv(payload) : payload.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.out);
    if (!f) fail(ErrorKind::usage, "cannot write " + g.out);
    f << text;
  }
}

// ---- terracini --------------------------------------------------------------

struct TerraciniArgs {
  std::string cone;
  std::string rays;
  int random_rays = 0;
  std::string mode = "auto";
};

Outcome cmd_terracini(const TerraciniArgs& a, const Globals& g) {
  ConeModel c = io::cone_from_json(resolve_json(a.cone, "cone"));
  std::vector<Vec> rays;
  if (!a.rays.empty()) {
    rays = io::points_from_json(resolve_json(a.rays, "rays"));
    // Veronese rays may be given as points z instead of moment vectors.
    if (c.kind == ConeKind::veronese)
      for (Vec& r : rays)
        if (r.size() == c.n) r = veronese_phi(c.n, c.two_d, r);
  } else {
    if (a.random_rays < 1) fail(ErrorKind::usage, "give --rays or --random-rays");
    Rng rng(need_seed(g));
    for (int i = 0; i < a.random_rays; ++i) rays.push_back(sample_extreme_ray(c, rng));
  }
  std::string mode = a.mode;
  if (mode == "auto") mode = c.kind == ConeKind::veronese ? "dual" : "primal";
  TerraciniVerdict v = mode == "dual" ? is_k_terracini_dual(c, rays)
                                      : is_k_terracini_primal(c, rays, c.kind != ConeKind::linear_image);
  json rj = json::array();
  for (const Vec& r : rays) rj.push_back(io::to_json(r));
  json out = io::to_json(v);
  out["cone"] = io::cone_to_json(c);
  out["rays"] = rj;
  return {out, !v.passed};
}

// ---- neighborly -------------------------------------------------------------

struct NeighborlyArgs {
  std::string cone;
  int k = 1;
  long long max_subsets = 1000000;
  bool sample = false;
};

Outcome cmd_neighborly(const NeighborlyArgs& a, const Globals& g) {
  ConeModel c = io::cone_from_json(resolve_json(a.cone, "cone"));
  NeighborlyOptions opt;
  opt.max_subsets = a.max_subsets;
  opt.allow_sampling = a.sample;
  opt.jobs = g.jobs;
  if (a.sample) opt.seed = need_seed(g);
  NeighborlinessVerdict v = is_k_neighborly_polyhedral(c, a.k, opt);
  return {io::to_json(v), !v.passed};
}

// ---- hyperbolic -------------------------------------------------------------

struct HyperbolicArgs {
  std::string poly;
  std::string e;
  std::string x;
  std::string etilde;
};

Vec e_or_ones(const HyperbolicArgs& a, const SparsePoly& p) {
  return a.e.empty() ? families::ones(p.num_vars()) : parse_csv_vec(a.e);
}

Outcome cmd_hyperbolic(const std::string& sub, const HyperbolicArgs& a) {
  const SparsePoly p = poly_arg(a.poly);
  const Vec e = e_or_ones(a, p);
  auto need_x = [&] {
    if (a.x.empty()) fail(ErrorKind::usage, "--x is required");
    return parse_csv_vec(a.x);
  };
  const Vec et = a.etilde.empty() ? e : parse_csv_vec(a.etilde);
  if (sub == "eig") return {io::to_json(hyperbolic_eigenvalues(p, e, need_x())), false};
  if (sub == "localize") {
    Localization l = localize(p, need_x());
    return {{{"poly", l.poly.to_string()}, {"mult", l.mult}}, false};
  }
  if (sub == "derivative") {
    SparsePoly q = derivative_relaxation(p, e, et);
    return {{{"poly", q.to_string()}, {"degree", q.degree()}}, false};
  }
  if (sub == "lineality") return {io::to_json(lineality_space(p, e)), false};
  if (sub == "mult3") {
    const bool ok = verify_mult3(p, e, et, need_x());
    return {{{"passed", ok}}, !ok};
  }
  fail(ErrorKind::usage, "unknown hyperbolic command: " + sub);
}

// ---- recover ----------------------------------------------------------------

struct RecoverArgs {
  std::string config;
  int d = 0;
  int n = 0;
  int k = 1;
  int trials = 0;
  int maps = 20;
  int plants = 20;
};

Outcome cmd_recover(const std::string& sub, RecoverArgs a, const Globals& g) {
  std::uint64_t seed = 0;
  if (!a.config.empty()) {
    json c = parse_json(resolve_text(a.config), "config");
    try {
      a.d = c.value("d", a.d);
      a.n = c.value("n", a.n);
      a.k = c.value("k", a.k);
      a.trials = c.value("trials", a.trials);
      a.maps = c.value("maps", a.maps);
      a.plants = c.value("plants", a.plants);
      if (c.contains("seed")) seed = c.at("seed").get<std::uint64_t>();
      if (c.contains("kind") && c.at("kind").get<std::string>() != sub &&
          (sub == "lp" || sub == "sdp"))
        fail(ErrorKind::usage, "config kind does not match the command");
    } catch (const json::exception& e) {
      fail(ErrorKind::usage, std::string("malformed config: ") + e.what());
    }
    if (g.seed) seed = *g.seed;
  } else {
    seed = need_seed(g);
  }
  if (sub == "lp" || sub == "sdp") {
    RecoveryConfig cfg{sub == "lp" ? RecoveryKind::lp : RecoveryKind::sdp,
                       a.d, a.n, a.k, a.trials, seed, g.jobs};
    if (g.tol) cfg.tolerance = *g.tol;
    return {io::to_json(recovery_experiment(cfg)), false};
  }
  if (sub == "dt-study")
    return {io::to_json(dt_equivalence_study(a.d, a.n, a.k, a.maps, a.plants, seed, g.jobs)), false};
  if (sub == "sdp-study")
    return {io::to_json(sdp_equivalence_study(a.d, a.n, a.k, a.maps, a.plants, seed, g.jobs)), false};
  if (sub == "most-tc-study")
    return {io::to_json(most_tc_study(a.d, a.n, a.k, a.maps, a.plants, seed, g.jobs)), false};
  fail(ErrorKind::usage, "unknown recover command: " + sub);
}

// ---- veronese ---------------------------------------------------------------

struct VeroneseArgs {
  std::string points;
  int n = 0;
  int deg = 0;  // 2d
  int d = 0;
  int samples = 1000;
  double radius = 0.5;
};

Outcome cmd_veronese(const std::string& sub, const VeroneseArgs& a, const Globals& g) {
  if (a.points.empty()) fail(ErrorKind::usage, "--points is required");
  const std::vector<Vec> pts = io::points_from_json(resolve_json(a.points, "points"));
  const int n = a.n ? a.n : (pts.empty() ? 0 : static_cast<int>(pts[0].size()));
  const int half = a.d ? a.d : a.deg / 2;
  if (sub == "certificate") {
    std::vector<Vec> unit;
    for (const Vec& p : pts) unit.push_back(p.normalized());
    return {io::to_json(kw_certificate_veronese(unit, half)), false};
  }
  if (sub == "growth")
    return {io::to_json(estimate_growth_constant(pts, half, n, a.samples, a.radius, need_seed(g))),
            false};
  if (sub == "regularity") {
    if (pts.size() != 1) fail(ErrorKind::usage, "regularity takes one point");
    const Vec z0 = pts[0].normalized();
    const Vec ell = kw_certificate_veronese({z0}, half).coefficients;
    return {io::to_json(estimate_regularity(z0, ell, n, 2 * half, a.samples, a.radius,
                                            need_seed(g))),
            false};
  }
  if (sub == "double-vanish") {
    const int two_d = 2 * half;
    const int dim = double_vanishing_dimension(pts, n, two_d);
    const int sos = sos_vanishing_span(pts, n, two_d).dim();
    return {{{"dim", dim}, {"sos_span_dim", sos}, {"n", n}, {"deg", two_d},
             {"points", pts.size()}},
            false};
  }
  fail(ErrorKind::usage, "unknown veronese command: " + sub);
}

// Options that were given, as {"recover.lp.d": "30", ...}.
json given_options(const std::string& config_text) {
  json out = json::object();
  std::stringstream in(config_text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line[0] == '[') continue;
    std::string value = line.substr(eq + 1);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out[line.substr(0, eq)] = value;
  }
  return out;
}

void write_manifest(const Globals& g, const std::vector<std::string>& argv,
                    const std::string& config, double seconds) {
  std::string path = g.manifest;
  if (path.empty() && !g.out.empty()) path = g.out + ".manifest.json";
  if (path.empty()) return;
  json m{{"command", argv},
         {"config", given_options(config)},
         {"version", kVersion},
         {"wall_time_seconds", seconds},
         {"outputs", g.out.empty() ? json::array() : json::array({g.out})}};
  m["seed"] = g.seed ? json(*g.seed) : json(nullptr);
  std::ofstream f(path);
  f << m.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> args(argv, argv + argc);
  Globals g;
  CLI::App app{"Terracini convexity, neighborliness, hyperbolic polynomial and recovery tools"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.add_option("--seed", g.seed, "seed for stochastic commands");
  app.add_option("--tol", g.tol, "recovery tolerance override");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--manifest", g.manifest, "run manifest path (default <out>.manifest.json)");

  TerraciniArgs ta;
  auto* t = app.add_subcommand("terracini", "Terracini convexity verdict for a ray collection");
  t->add_option("--cone", ta.cone, "built-in name, JSON, file or -")->required();
  t->add_option("--rays", ta.rays, "JSON array of rays, file or -");
  t->add_option("--random-rays", ta.random_rays, "sample this many extreme rays");
  t->add_option("--mode", ta.mode)->check(CLI::IsMember({"auto", "primal", "dual"}));

  NeighborlyArgs na;
  auto* nb = app.add_subcommand("neighborly", "k-neighborliness of a polyhedral cone");
  nb->add_option("--cone", na.cone)->required();
  nb->add_option("--k", na.k)->required();
  nb->add_option("--max-subsets", na.max_subsets);
  nb->add_flag("--sample", na.sample, "sample subsets above the cap");

  HyperbolicArgs ha;
  std::string hsub;
  auto* hy = app.add_subcommand("hyperbolic", "hyperbolic polynomial tools");
  hy->require_subcommand(1);
  for (const char* name : {"eig", "localize", "derivative", "lineality", "mult3"}) {
    auto* s = hy->add_subcommand(name);
    s->add_option("--poly", ha.poly, "polynomial text, file or -")->required();
    s->add_option("--e", ha.e, "hyperbolicity direction, comma separated");
    s->add_option("--x", ha.x, "point, comma separated");
    s->add_option("--etilde", ha.etilde, "derivative direction");
    s->callback([&hsub, name] { hsub = name; });
  }

  RecoverArgs ra;
  std::string rsub;
  auto* rc = app.add_subcommand("recover", "exact recovery experiments");
  rc->require_subcommand(1);
  for (const char* name : {"lp", "sdp", "dt-study", "sdp-study", "most-tc-study"}) {
    auto* s = rc->add_subcommand(name);
    s->add_option("--config", ra.config, "JSON config, file or -");
    s->add_option("--d", ra.d);
    s->add_option("--n", ra.n);
    s->add_option("--k", ra.k);
    s->add_option("--trials", ra.trials);
    s->add_option("--maps", ra.maps);
    s->add_option("--plants", ra.plants);
    s->callback([&rsub, name] { rsub = name; });
  }

  VeroneseArgs va;
  std::string vsub;
  auto* ve = app.add_subcommand("veronese", "moment cone tools");
  ve->require_subcommand(1);
  for (const char* name : {"certificate", "growth", "regularity", "double-vanish"}) {
    auto* s = ve->add_subcommand(name);
    s->add_option("--points", va.points, "JSON points, dataset name, file or -")->required();
    s->add_option("--n", va.n);
    s->add_option("--deg", va.deg, "form degree 2d");
    s->add_option("--d", va.d, "half degree d");
    s->add_option("--samples", va.samples);
    s->add_option("--radius", va.radius, "epsilon (growth) or delta (regularity)");
    s->callback([&vsub, name] { vsub = name; });
  }

  auto report_error = [&](ErrorKind kind, const std::string& detail) {
    std::cout << io::error_json(kind, detail).dump(2) << "\n";
    return 1;
  };
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(ErrorKind::usage, e.what());
  }

  try {
    Outcome o;
    if (*t) o = cmd_terracini(ta, g);
    else if (*nb) o = cmd_neighborly(na, g);
    else if (*hy) o = cmd_hyperbolic(hsub, ha);
    else if (*rc) o = cmd_recover(rsub, ra, g);
    else o = cmd_veronese(vsub, va, g);
    emit(g, o.payload);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(g, args, app.config_to_str(false, false), secs);
    return o.negative ? 2 : 0;
  } catch (const Error& e) {
    return report_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return report_error(ErrorKind::numerical, e.what());
  }
}
