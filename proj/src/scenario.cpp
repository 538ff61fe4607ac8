#include "ecs/scenario.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>

#include "ecs/suites.hpp"

namespace ecs {

using nlohmann::json;

namespace {

// Bad scenario content: exit 2.
struct ScenarioError : Error {
  using Error::Error;
};

const std::vector<double> kDefaultQs{0.25, 0.5, 2.0, 4.0};

Matrix parse_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ScenarioError(std::string(what) + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ScenarioError(std::string(what) + ": rows of unequal length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Vector parse_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ScenarioError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ScenarioError("c: expected a number or an [re, im] pair");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Interval parse_interval(const json& j) {
  Interval I;
  if (j.is_null()) return I;
  if (!j.is_array() || j.size() != 2) throw ScenarioError("interval: expected [lo, hi] with null for infinite ends");
  if (!j[0].is_null()) I.lo = j[0].get<double>();
  if (!j[1].is_null()) I.hi = j[1].get<double>();
  if (!(I.lo < I.hi)) throw ScenarioError("interval: lo must be below hi");
  return I;
}

PseudoEuclideanSpace parse_gram(const json& j, int m) {
  if (j.is_array()) return PseudoEuclideanSpace(parse_matrix(j, "gram"));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") return PseudoEuclideanSpace::euclidean(m);
  if (kind == "diagonal") {
    const int pp = j.at("p_plus").get<int>(), pm = j.at("p_minus").get<int>();
    if (pp + pm != m) throw ScenarioError("gram: p_plus + p_minus must equal n - 2");
    return PseudoEuclideanSpace::diagonal(pp, pm);
  }
  if (kind == "antidiagonal") return PseudoEuclideanSpace::antidiagonal(m, j.value("epsilon", 1.0));
  throw ScenarioError("gram: unknown kind '" + kind + "'");
}

Matrix parse_A(const json& j, int m) {
  if (j.is_string()) {
    if (j.get<std::string>() != "shift") throw ScenarioError("A: the only named operator is \"shift\"");
    Matrix a = Matrix::Zero(m, m);
    for (int k = 1; k < m; ++k) a(k - 1, k) = 1.0;
    return a;
  }
  if (j.is_object()) return parse_vector(j.at("diagonal"), "A.diagonal").asDiagonal();
  return parse_matrix(j, "A");
}

ProfileF parse_f(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "homogeneous") return ProfileF::homogeneous(parse_complex(j.at("c")));
  if (kind == "polynomial")
    return ProfileF::polynomial(j.at("coeffs").get<std::vector<double>>(), parse_interval(j.value("interval", json())));
  if (kind == "sum_of_powers") {
    std::vector<std::pair<double, double>> terms;
    for (const auto& t : j.at("terms")) terms.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    return ProfileF::sum_of_powers(std::move(terms), parse_interval(j.value("interval", json())));
  }
  throw ScenarioError("f: unknown kind '" + kind + "'");
}

ModelManifold parse_model(const json& j) {
  if (!j.is_object()) throw ScenarioError("model: expected an object");
  if (j.contains("homogeneous")) {
    const auto& h = j.at("homogeneous");
    return HomogeneousModel::standard(h.at("m").get<int>(), parse_complex(h.at("c")), h.value("epsilon", 1.0)).base();
  }
  const int n = j.at("n").get<int>();
  if (n < 4) throw ScenarioError("model: n must be at least 4");
  const int m = n - 2;
  return ModelManifold::create(n, parse_gram(j.at("gram"), m), parse_A(j.at("A"), m), parse_f(j.at("f")));
}

std::uint64_t task_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 step so that tasks draw independent streams
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Record {
  std::string name;
  std::string anchor;
  double residual;
  double tolerance;
};

struct TaskOutput {
  std::vector<Record> records;
  json data = json::object();
  std::vector<std::vector<double>> rows;  // optional sample table
  std::vector<std::string> row_header;
};

struct TaskContext {
  const ModelManifold& model;
  const json& params;
  std::uint64_t seed;
};

int param_int(const json& p, const char* key, int dflt) {
  const int v = p.value(key, dflt);
  if (v < 0) throw ScenarioError(std::string(key) + " must be non-negative");
  return v;
}

HomogeneousModel require_homogeneous(const ModelManifold& model, const char* task) {
  try {
    return HomogeneousModel::from_model(model);
  } catch (const PreconditionError& e) {
    throw ScenarioError(std::string(task) + " needs a standard homogeneous model: " + e.what());
  }
}

std::vector<double> param_qs(const json& p) {
  if (!p.contains("qs")) return kDefaultQs;
  auto qs = p.at("qs").get<std::vector<double>>();
  for (double q : qs)
    if (!(q > 0.0)) throw ScenarioError("qs: every q must be positive");
  return qs;
}

void add_isometry_records(TaskOutput& out, const ModelManifold& model, int elements, int points, int triples,
                          std::uint64_t seed) {
  const auto iso = suites::isometry(model, elements, points, triples, seed);
  out.records.push_back({"isometry_pullback", "phi* g = g for (sigma, r, u) acting as in the group law",
                         iso.pullback, 1e-8});
  out.records.push_back({"isometry_compose_action", "(sigma,r,u)(s',r',u') = (ss', r + r'/q - Omega(u, s u'), u + s u')",
                         iso.compose_action, 1e-8});
  out.records.push_back({"isometry_inverse_law", "inverse (q^-1, -q r, -sigma^-1 u)", iso.inverse_law, 1e-9});
  const auto sym = suites::symplectic(model, kDefaultQs, seed + 1);
  out.records.push_back({"omega_t_independence", "Omega(u, w) = <u', w> - <u, w'> is constant in t",
                         sym.omega_drift, 1e-9});
  out.records.push_back({"sigma_omega_scaling", "sigma* Omega = q^-1 Omega", sym.sigma_pullback, 1e-9});
  out.records.push_back({"det_sigma", "det sigma = q^(2-n)", sym.det_rel, 1e-7});
}

TaskOutput task_verify_model(const TaskContext& c) {
  TaskOutput out;
  const int points = param_int(c.params, "points", 20);
  const auto cs = suites::curvature(c.model, points, c.seed);
  out.records.push_back({"parallel_weyl", "nabla W = 0", cs.nabla_weyl, 1e-9});
  out.records.push_back({"weyl_nonzero", "W != 0", cs.min_weyl > 0.0 ? 0.0 : 1.0, 0.0});
  if (c.model.f().kind() != ProfileF::Kind::polynomial || c.model.f().jet(0.0)[1] != 0.0 ||
      c.model.f().jet(1.0)[1] != 0.0) {
    const double frac = points ? 1.0 - static_cast<double>(cs.nonsymmetric) / points : 0.0;
    out.records.push_back({"nabla_R_nonzero", "nabla R != 0 when f is nonconstant (fraction of points without)", frac,
                           0.1});
  }
  out.records.push_back({"ricci_profile", "Ric = (2-n) f(t) dt (x) dt", cs.ricci, 1e-9});
  out.records.push_back({"christoffel_pattern", "G_ij^. = G_in^. = G_nn^. = 0", cs.pattern, 1e-13});
  out.records.push_back({"curvature_identities", "algebraic and differential Bianchi identities, trace-free W",
                         cs.symmetries, 1e-10});
  out.records.push_back({"null_parallel_ds", "d/ds null and parallel, dt = g(w, .)", cs.olszak, 1e-12});
  const auto td = suites::tidal(c.model, param_int(c.params, "tidal_points", 20), c.seed + 1);
  out.records.push_back({"weyl_tidal_is_A", "W(u, .)u on D^perp/D equals A", std::max(td.rel_err, td.variation),
                         1e-8});
  const int elements = param_int(c.params, "elements", 10);
  add_isometry_records(out, c.model, elements, 5, elements, c.seed + 2);
  return out;
}

TaskOutput task_isometry_check(const TaskContext& c) {
  TaskOutput out;
  add_isometry_records(out, c.model, param_int(c.params, "elements", 50), param_int(c.params, "points", 20),
                       param_int(c.params, "triples", 50), c.seed);
  return out;
}

TaskOutput task_spectra(const TaskContext& c) {
  TaskOutput out;
  const auto hm = require_homogeneous(c.model, "spectra");
  const auto split = generator_B(hm);
  const auto qs = param_qs(c.params);
  const auto s = suites::spectral(hm, split, qs);
  out.records.push_back({"sigma_q_spectrum", "spectrum(sigma_q) = q^(m + 1/2 - 2j -+ c)", s.sigma_rel, 1e-6});
  out.records.push_back({"B_spectrum", "spectrum(B) = m + 1/2 - 2j -+ c", s.B_abs, 1e-6});
  out.records.push_back({"exp_log_q_B", "sigma_q = exp((log q) B)", s.exp_residual, 1e-6});
  out.records.push_back({"dim_E0", "dim E0 = 1 iff 2c = +-(2m - 4j + 1)",
                         static_cast<double>(std::abs(s.dim_E0 - s.predicted_dim_E0)), 0.0});
  if (qs.size() > 1 || (qs.size() == 1 && qs[0] != 1.0)) {
    out.records.push_back({"sigma_minus_one_on_Eplus", "sigma_q - 1 is invertible on E+ (reciprocal smallest sv)",
                           1.0 / s.min_singular, 1e8});
    out.records.push_back({"sigma_minus_one_on_E0", "sigma_q = 1 on E0", s.E0_norm, 1e-9});
  }
  json spec = json::array();
  for (Eigen::Index i = 0; i < split.spectrum.computed.size(); ++i) spec.push_back(complex_json(split.spectrum.computed(i)));
  out.data["B_spectrum"] = spec;
  out.data["dim_E0"] = split.dim_E0;
  return out;
}

TaskOutput task_tcp_check(const TaskContext& c) {
  TaskOutput out;
  const auto hm = require_homogeneous(c.model, "tcp-check");
  const auto split = generator_B(hm);
  const auto s = suites::tcp(hm, split, param_int(c.params, "roundtrips", 200), param_int(c.params, "triples", 200),
                             param_int(c.params, "pairs", 500), c.seed);
  out.records.push_back({"J_roundtrip", "J: R x E+ x (0,inf) x E0 -> G0 and its inverse", s.j_roundtrip, 1e-8});
  out.records.push_back({"commute_agreement", "commutation criterion against the direct commutator",
                         static_cast<double>(s.report.disagreements), 0.0});
  out.records.push_back({"transitive_commutation", "x ~ y and y ~ z imply x ~ z",
                         static_cast<double>(s.report.counterexamples), 0.0});
  out.records.push_back({"class_separation", "elements of different classes K_(a,z) do not commute",
                         static_cast<double>(s.report.class_violations), 0.0});
  const auto cj = suites::conjugation(hm, param_int(c.params, "conjugations", 20), c.seed + 7);
  out.records.push_back({"conjugation_spectrum", "spectrum(C_(q,r,u)) = {q^-1} u spectrum(sigma_q)", cj.max_err, 1e-6});
  out.data["pairs"] = s.report.pairs;
  out.data["commuting_pairs"] = s.report.commuting_pairs;
  out.data["triples"] = s.report.triples;
  return out;
}

TaskOutput task_geodesic(const TaskContext& c) {
  TaskOutput out;
  const auto& p = c.params;
  if (p.contains("x0") || p.contains("v0")) {
    const Vector x0 = parse_vector(p.at("x0"), "x0");
    const Vector v0 = parse_vector(p.at("v0"), "v0");
    if (x0.size() != c.model.n() || v0.size() != c.model.n()) throw ScenarioError("geodesic: x0, v0 need n entries");
    if (!c.model.interval().contains(x0(kT))) throw ScenarioError("geodesic: x0 lies outside the chart domain");
    const double tau = p.value("tau", 1.0);
    const auto r = geodesic(c.model, ChartPoint::from_flat(x0), v0, tau);
    if (r.terminated == Termination::tolerance_failure) throw IntegrationError(r.message);
    const auto a = t_affinity(r);
    out.records.push_back({"energy_drift", "g(x', x') is constant along geodesics", r.energy_drift, 1e-8});
    out.records.push_back({"t_affinity", "t is an affine function of the geodesic parameter",
                           a.t_range > 0 ? a.max_deviation / a.t_range : a.max_deviation, 1e-8});
    out.records.push_back({"geodesic_equation", "x'' + G(x', x') = 0 at interpolated midpoints", r.equation_residual,
                           1e-8});
    if (p.contains("expect")) {
      const std::string e = p.at("expect").get<std::string>();
      out.records.push_back({"termination", "expected termination", e == to_string(r.terminated) ? 0.0 : 1.0, 0.0});
    }
    out.data["termination"] = to_string(r.terminated);
    out.data["tau_star"] = r.tau_star;
    if (r.endpoint) out.data["endpoint"] = *r.endpoint;
    out.row_header = {"tau"};
    out.row_header.push_back("t");
    out.row_header.push_back("s");
    for (int i = 1; i <= c.model.m(); ++i) out.row_header.push_back("v" + std::to_string(i));
    for (const auto& h : std::vector<std::string>{"dt", "ds"}) out.row_header.push_back(h);
    for (int i = 1; i <= c.model.m(); ++i) out.row_header.push_back("dv" + std::to_string(i));
    const std::size_t stride = std::max<std::size_t>(1, r.samples.size() / static_cast<std::size_t>(param_int(p, "rows", 200)));
    for (std::size_t k = 0; k < r.samples.size(); k += stride) {
      const auto& smp = r.samples[k];
      std::vector<double> row{smp.tau};
      const Vector xf = smp.x.flat();
      row.insert(row.end(), xf.data(), xf.data() + xf.size());
      row.insert(row.end(), smp.velocity.data(), smp.velocity.data() + smp.velocity.size());
      out.rows.push_back(std::move(row));
    }
    return out;
  }
  const auto s = suites::geodesics(c.model, param_int(p, "count", 20), p.value("tau", 1.0), c.seed);
  out.records.push_back({"energy_drift", "g(x', x') is constant along geodesics", s.energy_drift, 1e-8});
  out.records.push_back({"t_affinity", "t is an affine function of the geodesic parameter", s.affinity, 1e-8});
  out.records.push_back({"geodesic_equation", "x'' + G(x', x') = 0 at interpolated midpoints", s.equation, 1e-8});
  out.records.push_back({"integration_failures", "no tolerance failures", static_cast<double>(s.failures), 0.0});
  const Interval& I = c.model.interval();
  if (I.lo == 0.0 && !I.hi_finite()) {
    const auto b = suites::boundary(c.model, param_int(p, "boundary_count", 10), c.seed + 1);
    out.records.push_back({"boundary_reached", "decreasing t reaches t = 0 at finite parameter",
                           static_cast<double>(b.cases - b.hits), 0.0});
    out.records.push_back({"boundary_t_star", "t at the barrier", b.max_t_star, 1e-6});
  }
  return out;
}

TaskOutput task_classify_group(const TaskContext& c) {
  TaskOutput out;
  const auto& p = c.params;
  if (p.contains("generators")) {
    std::vector<IsoElement> gens;
    const int m = c.model.m();
    for (const auto& g : p.at("generators")) {
      const double q = g.at("q").get<double>();
      if (!(q > 0.0)) throw ScenarioError("generator with q <= 0");
      // Only q enters the classification.
      gens.push_back({{q, g.value("p", 0.0), Matrix::Identity(m, m)}, g.value("r", 0.0),
                      SolutionE::zero(m, default_base(c.model))});
    }
    const Holonomy h = classify_holonomy(gens);
    out.data["holonomy"] = to_string(h);
    if (p.contains("expect")) {
      const bool ok = p.at("expect").get<std::string>() == to_string(h);
      out.records.push_back({"holonomy_class", "translational iff q = 1 on all generators", ok ? 0.0 : 1.0, 0.0});
    }
    return out;
  }
  const auto s = suites::classifier(c.seed);
  out.records.push_back({"classifier_table", "translational iff q = 1 on all generators",
                         static_cast<double>(s.table_mismatches), 0.0});
  out.records.push_back({"generic_m2", "every nonzero A is generic when m = 2", static_cast<double>(s.m2_mismatches),
                         0.0});
  out.records.push_back({"generic_nilpotent", "nilpotent A is generic iff A^(m-1) != 0",
                         static_cast<double>(s.nilpotent_mismatches), 0.0});
  out.records.push_back({"generic_dense", "generic endomorphisms are dense (non-generic fraction)", 1.0 - s.density_min,
                         0.0});
  return out;
}

TaskOutput task_appendix_a(const TaskContext& c) {
  TaskOutput out;
  const auto s = suites::appendix_a(c.model, param_int(c.params, "configs", 20), c.seed);
  out.records.push_back({"variation_geodesic", "t -> x(t, 1) is a geodesic", s.residual, 1e-6});
  out.records.push_back({"variation_velocity", "x(., 1) realizes the prescribed t-normalized velocity",
                         s.velocity_err, 1e-6});
  out.records.push_back({"variation_shift", "z = z0 - mu w with mu'' = Q(z0)/4 is a solution", s.split_residual, 1e-6});
  out.records.push_back({"exp_on_leaves", "exp along D^perp is affine in the chart", s.exp_consistency, 1e-10});
  out.records.push_back({"affine_field", "X(s) = (1 - s) Z(s)", s.affine, 1e-9});
  out.data["printed_Q_min_residual"] = s.printed_residual;
  return out;
}

TaskOutput task_appendix_b(const TaskContext& c) {
  TaskOutput out;
  const auto s = suites::appendix_b(c.model, param_int(c.params, "geodesics", 5), c.seed);
  out.records.push_back({"reconstruction_pullback", "F* g = g for F(t,s,v) = exp_x(t)(v(t) + s w/2)", s.pullback, 1e-6});
  out.records.push_back({"reconstruction_leaves", "F maps {t} x R x V into the leaf at t", s.leaf, 1e-12});
  out.records.push_back({"reconstruction_frame", "parallel frame of span(x', w)^perp", s.frame, 1e-9});
  return out;
}

const std::map<std::string, std::function<TaskOutput(const TaskContext&)>>& task_table() {
  static const std::map<std::string, std::function<TaskOutput(const TaskContext&)>> t{
      {"verify-model", task_verify_model}, {"spectra", task_spectra},
      {"isometry-check", task_isometry_check}, {"tcp-check", task_tcp_check},
      {"geodesic", task_geodesic},           {"classify-group", task_classify_group},
      {"appendix-a", task_appendix_a},       {"appendix-b", task_appendix_b}};
  return t;
}

struct TaskResult {
  TaskOutput out;
  int code = 0;  // 0 ok, 2 rejected, 3 runtime failure
  std::string error;
};

TaskResult run_task(const std::string& name, const TaskContext& ctx) {
  TaskResult r;
  try {
    r.out = task_table().at(name)(ctx);
  } catch (const ScenarioError& e) {
    r.code = 2;
    r.error = e.what();
  } catch (const PreconditionError& e) {
    r.code = 2;
    r.error = e.what();
  } catch (const DimensionMismatch& e) {
    r.code = 2;
    r.error = e.what();
  } catch (const json::exception& e) {
    r.code = 2;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.code = 3;
    r.error = e.what();
  }
  return r;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return o + "\"";
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

json environment_stamp(const RunOptions& opt) {
  json env;
#ifdef __VERSION__
  env["compiler"] = __VERSION__;
#endif
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  env["boost"] = BOOST_LIB_VERSION;
  env["tol_scale"] = opt.tol_scale;
  env["parallel"] = opt.parallel;
  return env;
}

RunOutcome rejected(const std::string& why, const RunOptions& opt) {
  RunOutcome o;
  o.exit_code = 2;
  o.diagnostic = why;
  o.report = {{"schema_version", kReportSchemaVersion}, {"error", why}, {"environment", environment_stamp(opt)}};
  return o;
}

}  // namespace

std::optional<double> tol_scale_from_env() {
  const char* s = std::getenv("ECS_LAB_TOL_SCALE");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
    throw Error(std::string("ECS_LAB_TOL_SCALE must be a positive number, got '") + s + "'");
  return v;
}

RunOutcome run_scenario_text(const std::string& text, const RunOptions& opt) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return rejected(std::string("scenario does not parse: ") + e.what(), opt);
  }
  return run_scenario(j, opt);
}

RunOutcome run_scenario(const json& scenario, const RunOptions& opt) {
  if (!(opt.tol_scale > 0.0)) return rejected("tolerance scale must be positive", opt);
  if (opt.parallel < 1) return rejected("--parallel must be at least 1", opt);

  // Parse everything before running anything.
  std::optional<ModelManifold> model;
  std::vector<std::pair<std::string, json>> tasks;
  std::map<std::string, double> overrides;
  std::uint64_t seed = 0;
  try {
    if (!scenario.is_object()) throw ScenarioError("scenario: expected a JSON object");
    if (scenario.contains("schema_version") && scenario.at("schema_version").get<int>() != kReportSchemaVersion)
      throw ScenarioError("scenario: unsupported schema_version");
    seed = opt.seed ? *opt.seed : scenario.value("seed", std::uint64_t{0});
    const json task_list = scenario.value("tasks", json::array());
    if (!task_list.is_array()) throw ScenarioError("tasks: expected an array");
    for (const auto& t : task_list) {
      if (t.is_string()) {
        tasks.emplace_back(t.get<std::string>(), json::object());
      } else if (t.is_object()) {
        tasks.emplace_back(t.at("task").get<std::string>(), t);
      } else {
        throw ScenarioError("tasks: entries are names or objects with a \"task\" field");
      }
      if (!task_table().count(tasks.back().first)) throw ScenarioError("unknown task '" + tasks.back().first + "'");
    }
    if (scenario.contains("tolerances")) {
      for (const auto& [k, v] : scenario.at("tolerances").items()) {
        const double tol = v.get<double>();
        if (!(tol >= 0.0)) throw ScenarioError("tolerances: '" + k + "' must be non-negative");
        overrides[k] = tol;
      }
    }
    if (!tasks.empty()) model = parse_model(scenario.at("model"));
  } catch (const ScenarioError& e) {
    return rejected(e.what(), opt);
  } catch (const json::exception& e) {
    return rejected(std::string("scenario: ") + e.what(), opt);
  } catch (const Error& e) {
    return rejected(std::string("model: ") + e.what(), opt);
  }

  std::vector<TaskResult> results(tasks.size());
  auto work = [&](std::size_t i) {
    const TaskContext ctx{*model, tasks[i].second, task_seed(seed, i)};
    return run_task(tasks[i].first, ctx);
  };
  for (std::size_t i = 0; i < tasks.size(); i += static_cast<std::size_t>(opt.parallel)) {
    const std::size_t end = std::min(tasks.size(), i + static_cast<std::size_t>(opt.parallel));
    if (opt.parallel == 1) {
      results[i] = work(i);
      continue;
    }
    std::vector<std::future<TaskResult>> fs;
    for (std::size_t k = i; k < end; ++k) fs.push_back(std::async(std::launch::async, work, k));
    for (std::size_t k = i; k < end; ++k) results[k] = fs[k - i].get();
  }

  RunOutcome o;
  json records = json::array(), task_json = json::array();
  int passed = 0, failed = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& r = results[i];
    json tj = {{"index", i}, {"task", tasks[i].first}};
    if (r.code) {
      tj["error"] = r.error;
      if (!o.exit_code) {
        o.exit_code = r.code;
        o.diagnostic = tasks[i].first + ": " + r.error;
      }
    }
    for (const auto& rec : r.out.records) {
      const double tol = (overrides.count(rec.name) ? overrides.at(rec.name) : rec.tolerance) * opt.tol_scale;
      const bool pass = rec.residual <= tol;
      (pass ? passed : failed)++;
      records.push_back({{"task", tasks[i].first},
                         {"task_index", i},
                         {"name", rec.name},
                         {"paper_anchor", rec.anchor},
                         {"residual", rec.residual},
                         {"tolerance", tol},
                         {"pass", pass}});
    }
    if (!r.out.data.empty()) tj["data"] = r.out.data;
    if (!r.out.rows.empty()) {
      tj["columns"] = r.out.row_header;
      tj["rows"] = r.out.rows;
    }
    task_json.push_back(tj);
  }
  if (!o.exit_code && failed) {
    o.exit_code = 1;
    o.diagnostic = std::to_string(failed) + " check(s) failed";
  }
  o.report = {{"schema_version", kReportSchemaVersion},
              {"seed", seed},
              {"records", records},
              {"tasks", task_json},
              {"summary", {{"checks", passed + failed}, {"passed", passed}, {"failed", failed}}},
              {"environment", environment_stamp(opt)}};
  if (o.exit_code == 2 || o.exit_code == 3) o.report["error"] = o.diagnostic;

  if (!opt.csv_dir.empty()) {
    std::filesystem::create_directories(opt.csv_dir);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const std::string stem = opt.csv_dir + "/" + std::to_string(i) + "_" + tasks[i].first;
      std::ofstream f(stem + ".csv");
      f << "name,paper_anchor,residual,tolerance,pass\n";
      for (const auto& rec : records)
        if (rec["task_index"].get<std::size_t>() == i)
          f << rec["name"].get<std::string>() << "," << csv_escape(rec["paper_anchor"].get<std::string>()) << ","
            << num(rec["residual"].get<double>()) << "," << num(rec["tolerance"].get<double>()) << ","
            << (rec["pass"].get<bool>() ? "true" : "false") << "\n";
      const auto& rows = results[i].out.rows;
      if (!rows.empty()) {
        std::ofstream g(stem + "_samples.csv");
        const auto& hdr = results[i].out.row_header;
        for (std::size_t k = 0; k < hdr.size(); ++k) g << (k ? "," : "") << hdr[k];
        g << "\n";
        for (const auto& row : rows) {
          for (std::size_t k = 0; k < row.size(); ++k) g << (k ? "," : "") << num(row[k]);
          g << "\n";
        }
      }
    }
  }
  return o;
}

}  // namespace ecs
