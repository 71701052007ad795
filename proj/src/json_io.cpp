#include "terracini/json_io.hpp"

#include <cmath>
#include <sstream>

#include "terracini/families.hpp"

namespace terracini::io {

namespace {

// JSON has no infinities; they are written as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) fail(ErrorKind::usage, "bad integer in " + what + ": " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

}  // namespace

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorKind::usage, "expected an array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorKind::usage, "expected an array of numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::usage, "expected a nonempty array of rows");
  const std::size_t cols = j[0].size();
  Mat m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    Vec r = vec_from_json(j[i]);
    if (static_cast<std::size_t>(r.size()) != cols) fail(ErrorKind::usage, "ragged matrix rows");
    m.row(i) = r.transpose();
  }
  return m;
}

ConeModel builtin_cone(const std::string& name) {
  const auto parts = split(name, ':');
  if (parts.empty()) fail(ErrorKind::usage, "empty cone name");
  const std::string& head = parts[0];
  auto arity = [&](std::size_t n) {
    if (parts.size() != n + 1)
      fail(ErrorKind::usage, "cone " + head + " takes " + std::to_string(n) + " parameter(s)");
  };
  if (head == "square-cone") {
    arity(0);
    return square_cone();
  }
  if (head == "psd") {
    arity(1);
    return ConeModel::psd(parse_int(parts[1], name));
  }
  if (head == "orthant") {
    arity(1);
    return ConeModel::orthant_cone(parse_int(parts[1], name));
  }
  if (head == "veronese") {
    arity(2);
    return ConeModel::veronese(parse_int(parts[1], name), parse_int(parts[2], name));
  }
  if (head == "esym") {
    arity(2);
    const int d = parse_int(parts[1], name), l = parse_int(parts[2], name);
    require(d >= 1 && l >= 1 && l <= d, "esym needs 1 <= l <= d");
    return ConeModel::hyperbolicity(families::elementary_symmetric(d, l), families::ones(d));
  }
  if (head == "hankel-det") {
    arity(1);
    const int d = parse_int(parts[1], name);
    require(d >= 1, "hankel-det needs d >= 1");
    return ConeModel::hyperbolicity(families::hankel_det(d), families::hankel_direction(d));
  }
  fail(ErrorKind::usage, "unknown built-in cone: " + name);
}

ConeModel cone_from_json(const json& j) {
  if (j.is_string()) return builtin_cone(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind")) fail(ErrorKind::usage, "cone needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "polyhedral") return ConeModel::polyhedral(mat_from_json(j.at("generators")).transpose());
    if (kind == "orthant") return ConeModel::orthant_cone(j.at("d").get<int>());
    if (kind == "psd") return ConeModel::psd(j.at("d").get<int>());
    if (kind == "veronese") return ConeModel::veronese(j.at("n").get<int>(), j.at("two_d").get<int>());
    if (kind == "hyperbolicity")
      return ConeModel::hyperbolicity(parse_poly(j.at("poly").get<std::string>()),
                                      vec_from_json(j.at("e")));
    if (kind == "linear_image")
      return ConeModel::linear_image(cone_from_json(j.at("base")), mat_from_json(j.at("map")));
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("malformed cone: ") + e.what());
  }
  fail(ErrorKind::usage, "unknown cone kind: " + kind);
}

json cone_to_json(const ConeModel& c) {
  json j;
  j["kind"] = to_string(c.kind);
  switch (c.kind) {
    case ConeKind::polyhedral:
      if (c.orthant) {
        j["kind"] = "orthant";
        j["d"] = c.generators.rows();
      } else {
        j["generators"] = to_json(Mat(c.generators.transpose()));
      }
      break;
    case ConeKind::psd: j["d"] = c.side; break;
    case ConeKind::veronese:
      j["n"] = c.n;
      j["two_d"] = c.two_d;
      break;
    case ConeKind::hyperbolicity:
      j["poly"] = c.poly.to_string();
      j["e"] = to_json(c.e);
      break;
    case ConeKind::linear_image:
      j["base"] = cone_to_json(*c.base);
      j["map"] = to_json(c.map);
      break;
  }
  return j;
}

std::vector<Vec> points_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "blekherman-s") return blekherman_s();
    fail(ErrorKind::usage, "unknown point set: " + j.get<std::string>());
  }
  if (!j.is_array()) fail(ErrorKind::usage, "points must be an array of arrays");
  std::vector<Vec> out;
  for (const json& p : j) out.push_back(vec_from_json(p));
  return out;
}

json to_json(const TerraciniVerdict& v) {
  json j{{"passed", v.passed},
         {"mode", to_string(v.mode)},
         {"dim_lhs", v.dim_lhs},
         {"dim_rhs", v.dim_rhs},
         {"distance", number(v.distance)}};
  if (v.certificate) {
    j["certificate"] = to_json(*v.certificate);
    j["certificate_residual"] = number(v.certificate_residual);
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

json to_json(const NeighborlinessVerdict& v) {
  json w = json::array();
  for (const auto& [subset, l] : v.witnesses)
    w.push_back({{"subset", subset}, {"functional", to_json(l)}});
  json j{{"k", v.k},
         {"passed", v.passed},
         {"sampled", v.sampled},
         {"subsets_checked", v.subsets_checked},
         {"extreme_indices", v.extreme_indices},
         {"witnesses", w}};
  j["failing_subset"] = v.failing_subset ? json(*v.failing_subset) : json(nullptr);
  return j;
}

json to_json(const HyperbolicSpectrum& s) {
  json e = json::array();
  for (double x : s.eigenvalues) e.push_back(number(x));
  return {{"eigenvalues", e}, {"rank", s.rank}, {"mult", s.mult}};
}

json to_json(const Subspace& s) {
  json b = json::array();
  for (int i = 0; i < s.dim(); ++i) b.push_back(to_json(Vec(s.basis().col(i))));
  return {{"dim", s.dim()}, {"ambient", s.ambient_dim()}, {"basis", b}};
}

json to_json(const TangentDerivativeReport& r) {
  return {{"passed", r.passed},
          {"mult", r.mult},
          {"symbolic_equal", r.symbolic_equal},
          {"coefficient_gap", number(r.coefficient_gap)},
          {"directions", r.directions},
          {"membership_agreements", r.membership_agreements},
          {"lineality_checked", r.lineality_checked},
          {"lineality_equal", r.lineality_equal}};
}

json to_json(const RecoveryTrial& t) {
  json j{{"kind", to_string(t.kind)},
         {"k", t.k},
         {"status", to_string(t.status)},
         {"valid", t.valid},
         {"recovered", t.recovered},
         {"error", number(t.error)},
         {"perturbed_error", number(t.perturbed_error)},
         {"planted", to_json(t.planted)}};
  j["unique_preimage"] = t.unique_preimage ? json(*t.unique_preimage) : json(nullptr);
  if (t.face_check) j["face_check"] = to_json(*t.face_check);
  if (t.face_error) j["face_error"] = true;
  return j;
}

namespace {

json config_json(const RecoveryConfig& c) {
  return {{"kind", to_string(c.kind)}, {"d", c.d}, {"n", c.n},
          {"k", c.k},                  {"trials", c.trials}, {"seed", c.seed}};
}

json matrix2(const int m[2][2]) {
  return {{"recovered_and_unique", m[1][1]},
          {"recovered_not_unique", m[1][0]},
          {"unique_not_recovered", m[0][1]},
          {"neither", m[0][0]}};
}

}  // namespace

json to_json(const RecoveryReport& r) {
  json trials = json::array();
  for (const RecoveryTrial& t : r.trials) trials.push_back(to_json(t));
  return {{"config", config_json(r.config)},
          {"summary", {{"valid", r.valid}, {"recovered", r.recovered}, {"rate", number(r.rate())}}},
          {"trials", trials}};
}

json to_json(const StudyReport& r) {
  json maps = json::array();
  for (const MapRecord& m : r.maps)
    maps.push_back({{"index", m.index},
                    {"surjective", m.surjective},
                    {"null_interior", m.null_interior},
                    {"plants_valid", m.plants_valid},
                    {"plants_recovered", m.plants_recovered},
                    {"face_checks", m.face_checks},
                    {"face_passes", m.face_passes},
                    {"perturbed_face_checks", m.perturbed_face_checks},
                    {"perturbed_face_passes", m.perturbed_face_passes}});
  json trials = json::array();
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    json t = to_json(r.trials[i]);
    t["map"] = r.trial_map[i];
    trials.push_back(t);
  }
  json cfg = config_json(r.config);
  cfg["maps"] = r.maps.size();
  cfg["plants_per_map"] = r.plants_per_map;
  return {{"config", cfg},
          {"summary",
           {{"gated_out", r.gated_out},
            {"dimension_flag", r.dimension_flag},
            {"agreement", matrix2(r.agreement)},
            {"agreement_gated", matrix2(r.agreement_gated)},
            {"agreement_rate", number(r.agreement_rate(false))},
            {"agreement_rate_gated", number(r.agreement_rate(true))},
            {"face_checks", r.face_checks},
            {"face_passes", r.face_passes},
            {"joint_success", r.joint_success},
            {"joint_total", r.joint_total},
            {"joint_rate", number(r.joint_rate())}}},
          {"maps", maps},
          {"trials", trials}};
}

json to_json(const GrowthCertificate& g) {
  return {{"mu", number(g.mu)},
          {"epsilon", number(g.epsilon)},
          {"nu", number(g.nu)},
          {"delta", number(g.delta)},
          {"num_samples", g.num_samples},
          {"min_ratio_observed", number(g.min_ratio_observed)},
          {"analytic_bound", number(g.analytic_bound)},
          {"vacuous", g.vacuous}};
}

json to_json(const KwCertificate& k) {
  return {{"form", k.form.to_string()}, {"coefficients", to_json(k.coefficients)}};
}

json error_json(ErrorKind kind, const std::string& detail) {
  return {{"error", {{"kind", to_string(kind)}, {"detail", detail}}}};
}

namespace {

void flatten(const json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    return;
  }
  if (j.is_array()) {
    bool scalars = true;
    for (const json& x : j) scalars = scalars && x.is_primitive();
    if (scalars) {
      out << path << ',';
      for (std::size_t i = 0; i < j.size(); ++i) out << (i ? ";" : "") << j[i].dump();
      out << '\n';
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), out);
    return;
  }
  out << path << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
}

}  // namespace

std::string to_csv(const json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten(j, "", out);
  return out.str();
}

}  // namespace terracini::io
