#ifndef JORDAN_TOOLS_CLI_COMMANDS_HPP
#define JORDAN_TOOLS_CLI_COMMANDS_HPP

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jordan/jordan.hpp"

// Command implementations behind the jordan CLI. Each returns the process
// exit code; data goes to `out`, diagnostics to `err`.
namespace jordan::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kSpecError = 2, kSamplingFailed = 3, kIoFailed = 4 };

inline constexpr double kAnalyticTol = 1e-8;
inline constexpr double kFdTol = 1e-6;
inline constexpr int kDefaultSamples = 100;

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SpecError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const UsageError*>(&e) || dynamic_cast<const UnsupportedError*>(&e) ||
      dynamic_cast<const InputError*>(&e))
    return kSpecError;
  if (dynamic_cast<const SamplingError*>(&e)) return kSamplingFailed;
  if (dynamic_cast<const IoError*>(&e)) return kIoFailed;
  return kCheckFailed;
}

// Runs a command body, turning library errors into exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// --seed wins, then JORDAN_SEED, then the library default.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("JORDAN_SEED"); env && *env) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw UsageError(std::string("JORDAN_SEED is not an unsigned integer: ") + env);
    return v;
  }
  return kDefaultSeed;
}

inline Vector parse_point(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',' || c == '[' || c == ']' || c == ';') c = ' ';
  std::istringstream in(s);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("cannot parse coordinate \"" + tok + "\"");
    }
  }
  if (v.empty()) throw UsageError("empty point");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// catalog list

struct CatalogListOptions {
  bool json = false;
  std::optional<std::string> family;
};

inline int catalog_list(const CatalogListOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<CatalogRow> rows;
    for (const auto& r : catalog_table())
      if (!opt.family || r.family == *opt.family) rows.push_back(r);
    if (opt.family && rows.empty()) throw UsageError("no catalog family named " + *opt.family);
    if (opt.json) {
      Json arr = Json::array();
      for (const auto& r : rows)
        arr.push_back({{"family", r.family},
                       {"space", r.space},
                       {"field", r.field},
                       {"real_dim", r.real_dim},
                       {"range", r.range},
                       {"potential", r.potential},
                       {"omega", r.omega},
                       {"min_parameter", r.min_parameter},
                       {"parametrized", r.parametrized}});
      out << arr.dump(2) << '\n';
      return int{kOk};
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 1, ' '); };
    out << pad("family", 24) << pad("space", 10) << pad("field", 9) << pad("dim", 10) << pad("range", 7)
        << pad("potential", 18) << "omega\n";
    for (const auto& r : rows)
      out << pad(r.family, 24) << pad(r.space, 10) << pad(r.field, 9) << pad(r.real_dim, 10) << pad(r.range, 7)
          << pad(r.potential, 18) << r.omega << '\n';
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::string spec_path;
  int samples = kDefaultSamples;
  double tol = kAnalyticTol;
  double fd_tol = kFdTol;
  std::optional<std::uint64_t> seed;
};

struct Check {
  std::string name;
  std::string status;  // "pass", "fail", "info" or "not applicable (...)"
  ResidualReport residual;
  double tolerance = 0;
  std::string note;

  Json to_json() const {
    Json j{{"name", name}, {"status", status}, {"tolerance", tolerance}};
    j["max_abs"] = residual.max_abs;
    j["rms"] = residual.rms;
    j["samples"] = residual.samples_used;
    if (!residual.breakdown.empty()) j["breakdown"] = residual.breakdown;
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

namespace detail {

inline Check thresholded(std::string name, ResidualReport r, double tol, std::string note = {}) {
  Check c{std::move(name), r.max_abs <= tol ? "pass" : "fail", std::move(r), tol, std::move(note)};
  return c;
}

inline Check not_applicable(std::string name, const std::string& why) {
  return Check{std::move(name), "not applicable (" + why + ")", {}, 0, {}};
}

inline constexpr double kMinPointRcond = 1e-6;

// Points e + spread |e| u in the unit component (or with det P > 0 when no
// closed form is known), away from complex-log branch cuts and from the
// boundary of the invertible set, where finite differences lose accuracy.
inline std::vector<Vector> domain_points(const LoadedSpec& spec, int count, std::uint64_t seed, double spread = 0.5) {
  std::vector<Vector> pts;
  const Algebra& j = spec.alg();
  const Vector& e = j.unit();
  Rng rng(seed);
  const long budget = 100L * std::max(count, 1);
  for (long tries = 0; static_cast<int>(pts.size()) < count; ++tries) {
    if (tries >= budget) throw SamplingError("could not draw " + std::to_string(count) + " domain points near e");
    Vector x = e + spread * e.norm() * rng.unit_vector(j.dim()) * std::abs(rng.normal());
    auto cert = is_invertible(j, x);
    if (!cert.invertible || cert.rcond < kMinPointRcond) continue;
    if (spec.omega ? !in_unit_component(*spec.omega, x) : cert.det.sign <= 0) continue;
    if (spec.potential && (!spec.potential->in_domain(x) || spec.potential->eval(x).branch_warning)) continue;
    pts.push_back(std::move(x));
  }
  return pts;
}

inline ImmersionPair make_pair(const LoadedSpec& spec) {
  const Vector& e = spec.alg().unit();
  return ImmersionPair(spec.alg(), *spec.gamma, (*spec.gamma)(e, e) != 0);
}

// Relative |closed form - numeric| of det P over the sample points.
inline Check detp_check(const LoadedSpec& spec, const std::vector<Vector>& pts) {
  const double tol = spec.alg().dim() >= 27 ? 1e-5 : 1e-7;
  ResidualReport r;
  for (const auto& x : pts) {
    LogDet d = log_det(p_operator(spec.alg(), x));
    double closed = closed_form_detP_real(*spec.omega, x);
    r.add(std::abs(d.value() - closed) / std::abs(closed));
  }
  return thresholded("detP_closed_form", r, tol);
}

// D zeta = gamma, D^2 zeta(u,v,v) = -2 gamma(u,v^2), D^3 zeta(u,v,v,v) =
// 6 gamma(v*u, v^2) at e, relative to the right-hand sides.
inline Check zeta_at_unit_check(const LoadedSpec& spec, const ImmersionPair& pair, int samples, double tol,
                                std::uint64_t seed) {
  const Algebra& j = spec.alg();
  ZetaFrame f(pair, j.unit());
  const Matrix& g = pair.gamma_matrix();
  ResidualReport r;
  double first = (f.d_zeta() - g).norm() / g.norm();
  r.add(first);
  r.breakdown["first"] = first;
  double second = 0, third = 0;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    Vector u = rng.unit_vector(j.dim()), v = rng.unit_vector(j.dim());
    Vector v2 = mul(j, v, v);
    double lhs2 = u.dot(f.d2(v, v)), rhs2 = -2 * u.dot(g * v2);
    double lhs3 = u.dot(f.d3(v, v, v)), rhs3 = 6 * mul(j, v, u).dot(g * v2);
    double scale2 = std::abs(g.norm() * v2.norm());
    double scale3 = std::abs(g.norm() * v2.norm() * mul(j, v, u).norm());
    second = std::max(second, std::abs(lhs2 - rhs2) / (std::max(scale2, 1e-300)));
    third = std::max(third, std::abs(lhs3 - rhs3) / (std::max(scale3, 1e-300)));
  }
  r.add(second);
  r.add(third);
  r.breakdown["second"] = second;
  r.breakdown["third"] = third;
  return thresholded("zeta_identities_at_unit", r, tol);
}

// Richardson-extrapolated central differences (error O(h^4)).
inline const fd::Steps kGradientSteps{1e-4, 1e-4, 1e-3, 1e-3, true};

// Finite-difference gradient of the potential against zeta.
inline Check potential_gradient_check(const LoadedSpec& spec, const ImmersionPair& pair,
                                      const std::vector<Vector>& pts, double tol) {
  const PotentialSpec& phi = *spec.potential;
  const double nu = phi.homogeneity();
  const ImmersionPair own = phi.pair();
  ResidualReport r;
  fd::Field f = [&phi](const Vector& y) { return phi(y); };
  for (const auto& x : pts) {
    Vector grad = fd::gradient(f, x, kGradientSteps);
    // The normalized pair carries zeta / nu.
    Vector expected = nu != 0 && pair.normalized() ? Vector(nu * zeta_form(pair, x)) : zeta_form(own, x);
    r.add((grad - expected).norm() / (expected.norm() + 1e-300));
  }
  return thresholded("potential_gradient", r, tol, "finite differences");
}

inline ResidualReport over_points(const std::vector<Vector>& pts, const std::function<double(const Vector&)>& f) {
  ResidualReport r;
  for (const auto& x : pts) r.add(f(x));
  return r;
}

}  // namespace detail

struct VerifyResult {
  Json report;
  int code = kOk;
};

inline VerifyResult verify_spec(const LoadedSpec& spec, const VerifyOptions& opt, std::uint64_t seed) {
  std::vector<Check> checks;
  const Algebra& j = spec.alg();
  const int n = opt.samples;

  auto jr = check_jordan_identity(j, std::max(n, 1), opt.tol, seed);
  ResidualReport jres;
  jres.max_abs = jres.rms = jr.max_residual;
  jres.samples_used = jr.samples;
  checks.push_back(detail::thresholded("jordan_identity", jres, opt.tol));

  if (!j.has_unit()) {
    for (const char* name : {"trace_form", "detP_closed_form", "zeta_identities_at_unit", "parallel_cubic",
                             "hypersphere", "quadric"})
      checks.push_back(detail::not_applicable(name, "no unit element"));
  } else if (checks.front().status != "pass") {
    // Later checks assume a Jordan algebra.
    for (const char* name : {"trace_form", "detP_closed_form", "zeta_identities_at_unit", "parallel_cubic",
                             "hypersphere", "quadric"})
      checks.push_back(detail::not_applicable(name, "Jordan identity fails"));
  } else {
    ResidualReport tf;
    tf.add(associativity_defect(j, *spec.gamma));
    bool nondegenerate = is_nondegenerate(*spec.gamma);
    Check trace = detail::thresholded("trace_form", tf, opt.tol, nondegenerate ? "" : "gamma is degenerate");
    if (!nondegenerate) trace.status = "fail";
    checks.push_back(trace);
    if (trace.status == "pass") {
      ImmersionPair pair = detail::make_pair(spec);
      auto pts = detail::domain_points(spec, n, seed);

      if (spec.omega)
        checks.push_back(detail::detp_check(spec, pts));
      else
        checks.push_back(detail::not_applicable("detP_closed_form", "no closed form for custom algebras"));

      checks.push_back(detail::zeta_at_unit_check(spec, pair, n, opt.tol, seed));
      if (spec.potential) checks.push_back(detail::potential_gradient_check(spec, pair, pts, opt.fd_tol));

      ResidualOptions ro{24, seed};
      checks.push_back(detail::thresholded(
          "parallel_cubic", detail::over_points(pts, [&](const Vector& x) { return parallel_cubic_residual(pair, x, ro); }),
          opt.tol));

      if (!is_semisimple(j)) {
        checks.push_back(detail::not_applicable("hypersphere", "not semi-simple"));
      } else {
        auto r = detail::over_points(pts, [&](const Vector& x) { return hypersphere_residual(pair, x); });
        const bool holds = r.max_abs <= opt.tol;
        Check c{"hypersphere", holds == spec.canonical_gamma ? "pass" : "fail", r, opt.tol,
                holds ? "proper affine hypersphere" : "not a hypersphere (gamma is not a multiple of g)"};
        checks.push_back(c);
      }

      auto q = detail::over_points(pts, [&](const Vector& x) { return quadric_residual(pair, x, ro); });
      checks.push_back(Check{"quadric", "info", q, opt.tol, q.max_abs <= opt.tol ? "quadric" : "not a quadric"});
    }
  }

  bool pass = true;
  Json arr = Json::array();
  for (const auto& c : checks) {
    if (c.status == "fail") pass = false;
    arr.push_back(c.to_json());
  }
  VerifyResult out;
  out.report = {{"command", "verify"},
                {"spec", spec.name},
                {"seed", seed},
                {"samples", opt.samples},
                {"tolerance", {{"analytic", opt.tol}, {"finite_difference", opt.fd_tol}}},
                {"checks", arr},
                {"pass", pass}};
  out.code = pass ? kOk : kCheckFailed;
  return out;
}

inline void print_summary(const Json& report, std::ostream& err) {
  if (!report.contains("checks")) return;
  for (const auto& c : report.at("checks")) {
    err << c.at("name").get<std::string>() << ": " << c.at("status").get<std::string>();
    if (c.at("samples").get<int>() > 0) err << " (max " << format_double(c.at("max_abs").get<double>()) << ")";
    err << '\n';
  }
}

inline int verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto t0 = std::chrono::steady_clock::now();
    if (opt.samples < 0) throw UsageError("--samples must be nonnegative");
    const std::uint64_t seed = resolve_seed(opt.seed);
    LoadedSpec spec = load_spec_file(opt.spec_path);
    VerifyResult r = verify_spec(spec, opt, seed);
    r.report["wall_time_s"] = seconds_since(t0);
    out << r.report.dump(2) << '\n';
    print_summary(r.report, err);
    return r.code;
  });
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string spec_path;
  std::string point;
  std::string what = "omega";
};

inline int eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    LoadedSpec spec = load_spec_file(opt.spec_path);
    Vector x = parse_point(opt.point);
    require_dim(x, spec.alg().dim(), "--point");
    if (opt.what == "omega") {
      if (!spec.omega) throw UsageError("omega needs a catalog algebra");
      out << format_double(omega(*spec.omega, x)) << '\n';
    } else if (opt.what == "phi") {
      if (!spec.potential) throw UsageError("spec defines no potential");
      PotentialValue v = spec.potential->eval(x);
      if (v.branch_warning) err << "warning: point is next to a branch cut of a complex logarithm\n";
      out << format_double(v.value) << '\n';
    } else if (opt.what == "zeta") {
      if (!spec.gamma) throw UsageError("zeta needs a unital algebra and a trace form");
      if (!is_invertible(spec.alg(), x).invertible) throw PreconditionError("point is not invertible (det P_x ~ 0)");
      ImmersionPair pair = detail::make_pair(spec);
      Vector z = zeta_form(pair, x);
      for (Eigen::Index i = 0; i < z.size(); ++i) out << format_double(z(i)) << '\n';
    } else if (opt.what == "detP") {
      if (!is_invertible(spec.alg(), x).invertible) throw PreconditionError("point is not invertible (det P_x ~ 0)");
      out << format_double(log_det(p_operator(spec.alg(), x)).value()) << '\n';
    } else {
      throw UsageError("--what must be omega, phi, zeta or detP");
    }
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// surface

struct SurfaceOptions {
  std::string spec_path;
  double level = 1;
  int count = kDefaultSamples;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  double spread = 0.5;
  int geometric_points = 20;  // points at which geometric residuals are evaluated
};

namespace detail {

// Grid over the default leaf parameter box: r, x in [1/2, 2], phi in [-2 pi, 2 pi].
inline SurfaceSample leaf_sample(const PotentialSpec& phi, double level, int count) {
  LeafChart chart(phi, level);
  const auto names = chart.parameter_names();
  const int m = static_cast<int>(names.size());
  if (count == 0 || m == 0) {
    SurfaceSample s;
    s.kind = "leaf";
    s.dim = phi.dim();
    s.level = level;
    return s;
  }
  Vector lo(m), hi(m);
  for (int i = 0; i < m; ++i) {
    bool angle = names[static_cast<std::size_t>(i)] == "phi";
    lo(i) = angle ? -2 * std::numbers::pi : 0.5;
    hi(i) = angle ? 2 * std::numbers::pi : 2.0;
  }
  int per_axis = std::max(1, static_cast<int>(std::lround(std::pow(count, 1.0 / m))));
  std::vector<int> counts(static_cast<std::size_t>(m), per_axis);
  if (m == 1) counts[0] = count;
  return trace_leaf(phi, level, lo, hi, counts);
}

inline bool has_complex_log(const PotentialSpec& phi) {
  for (const auto& b : phi.blocks())
    if (b.kind == PotentialKind::ComplexLog) return true;
  return false;
}

}  // namespace detail

inline int surface(const SurfaceOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto t0 = std::chrono::steady_clock::now();
    if (opt.count < 0) throw UsageError("--count must be nonnegative");
    if (opt.format != "csv" && opt.format != "json") throw UsageError("--format must be csv or json");
    const std::uint64_t seed = resolve_seed(opt.seed);
    LoadedSpec spec = load_spec_file(opt.spec_path);
    SamplingOptions so;
    so.seed = seed;
    so.spread = opt.spread;

    SurfaceSample sample;
    std::optional<ImmersionPair> pair;
    if (spec.explicit_potential && detail::has_complex_log(*spec.potential)) {
      sample = detail::leaf_sample(*spec.potential, opt.level, opt.count);
      pair.emplace(spec.potential->pair());
    } else if (spec.explicit_potential) {
      sample = sample_surface(*spec.potential, opt.level, opt.count, so);
      pair.emplace(spec.potential->pair());
    } else {
      if (!spec.omega) throw UsageError("surface sampling needs a catalog algebra or a potential");
      sample = sample_surface(*spec.omega, opt.level, opt.count, so);
      if (spec.gamma) pair.emplace(detail::make_pair(spec));
    }
    export_sample(sample, opt.format == "csv" ? ExportFormat::Csv : ExportFormat::Json, opt.out_path);

    Json geometry = Json::object();
    if (pair) {
      std::vector<Vector> pts(sample.points.begin(),
                              sample.points.begin() + std::min<std::ptrdiff_t>(opt.geometric_points,
                                                                               static_cast<std::ptrdiff_t>(sample.points.size())));
      ResidualOptions ro{24, seed};
      auto pc = detail::over_points(pts, [&](const Vector& x) { return parallel_cubic_residual(*pair, x, ro); });
      geometry["parallel_cubic_max"] = pc.max_abs;
      geometry["points"] = pc.samples_used;
      if (is_semisimple(pair->algebra())) {
        auto hs = detail::over_points(pts, [&](const Vector& x) { return hypersphere_residual(*pair, x); });
        geometry["hypersphere_max"] = hs.max_abs;
      }
    }
    Json report{{"command", "surface"},
                {"spec", spec.name},
                {"seed", seed},
                {"kind", sample.kind},
                {"level", opt.level},
                {"count", sample.points.size()},
                {"attempts", sample.attempts},
                {"max_level_residual", sample.max_residual()},
                {"geometry", geometry},
                {"output", {{"path", opt.out_path}, {"format", opt.format}}},
                {"wall_time_s", seconds_since(t0)}};
    out << report.dump(2) << '\n';
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// calabi

struct CalabiOptions {
  std::string config_path;
  int count = 1;
  double tol = kAnalyticTol;
  std::optional<std::uint64_t> seed;
};

inline Json calabi_run(const CalabiInput& in, int count, double tol, std::uint64_t seed) {
  const CalabiConfig& cfg = in.config;
  cfg.validate();
  const std::size_t k = cfg.factors.size();
  // Factor points per sample: explicit, projected direction, or sampled.
  std::vector<std::vector<Vector>> factor_points(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& f = cfg.factors[i];
    if (in.points[i]) {
      factor_points[i].assign(static_cast<std::size_t>(count), *in.points[i]);
    } else if (in.directions[i]) {
      factor_points[i].assign(static_cast<std::size_t>(count), level_surface_point(f.omega, f.level, *in.directions[i]));
    } else {
      SamplingOptions so;
      so.seed = seed + i;
      factor_points[i] = sample_surface(f.omega, f.level, count, so).points;
    }
  }
  const OmegaSpec total = cfg.omega();
  Json points = Json::array(), errors = Json::array();
  double worst = 0;
  for (int s = 0; s < count; ++s) {
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < k; ++i) pts.push_back(factor_points[i][static_cast<std::size_t>(s)]);
    Vector f = calabi_point(cfg, pts);
    double rel = std::abs(omega(total, f) - cfg.level) / cfg.level;
    worst = std::max(worst, rel);
    points.push_back(vector_json(f));
    errors.push_back(rel);
  }
  return {{"command", "calabi"},
          {"seed", seed},
          {"level", cfg.level},
          {"t", vector_json(cfg.t)},
          {"points", points},
          {"relative_errors", errors},
          {"max_relative_error", worst},
          {"tolerance", tol},
          {"pass", worst <= tol}};
}

inline int calabi(const CalabiOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto t0 = std::chrono::steady_clock::now();
    if (opt.count < 0) throw UsageError("--count must be nonnegative");
    const std::uint64_t seed = resolve_seed(opt.seed);
    CalabiInput in = load_calabi(read_json_file(opt.config_path));
    Json report = calabi_run(in, opt.count, opt.tol, seed);
    report["wall_time_s"] = seconds_since(t0);
    out << report.dump(2) << '\n';
    bool pass = report.at("pass").get<bool>();
    err << "calabi: " << (pass ? "pass" : "fail") << " (max relative error "
        << format_double(report.at("max_relative_error").get<double>()) << ")\n";
    return pass ? int{kOk} : int{kCheckFailed};
  });
}

}  // namespace jordan::cli

#endif  // JORDAN_TOOLS_CLI_COMMANDS_HPP
