#ifndef JORDAN_SURFACE_HPP
#define JORDAN_SURFACE_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "jordan/algebra.hpp"
#include "jordan/catalog.hpp"
#include "jordan/error.hpp"
#include "jordan/geometry.hpp"
#include "jordan/linalg.hpp"

namespace jordan {

// Points on one level set: either omega = level or Phi = level.
struct SurfaceSample {
  std::string spec;  // description of the omega data or potential
  std::string kind;  // "omega", "potential" or "leaf"
  int dim = 0;
  double level = 0;
  std::vector<Vector> points;
  std::vector<double> residuals;  // per point: |omega/level - 1| or |Phi - level|
  int attempts = 0;               // directions drawn, including rejected ones

  double max_residual() const {
    double m = 0;
    for (double r : residuals) m = std::max(m, r);
    return m;
  }
};

// The ray through d meets {omega = c} at lambda d, lambda = (c / omega(d))^{1/n}.
inline Vector level_surface_point(const OmegaSpec& spec, double c, const Vector& d) {
  require_dim(d, spec.dim(), "direction");
  if (!(c > 0)) throw UsageError("level must be positive");
  if (!in_unit_component(spec, d)) throw DomainError("direction is outside the unit component");
  double lo = log_omega(spec, d);
  if (!std::isfinite(lo)) throw DomainError("omega vanishes on the direction");
  return std::exp((std::log(c) - lo) / spec.dim()) * d;
}

// The ray through d meets {Phi = target} at exp((target - Phi(d)) / nu) d.
inline Vector level_surface_point(const PotentialSpec& spec, double target, const Vector& d) {
  const double nu = spec.homogeneity();
  if (nu == 0) throw SpecError("potential has zero homogeneity; its level sets are cones");
  if (!spec.in_domain(d)) throw DomainError("direction is outside the potential's domain");
  return std::exp((target - spec(d)) / nu) * d;
}

struct SamplingOptions {
  std::uint64_t seed = kDefaultSeed;
  double spread = 0.5;            // Gaussian perturbation of e, relative to |e|
  double max_rejection = 0.99;    // give up when a larger share of draws is rejected
  int min_attempts = 100;
};

namespace detail {

// Draw directions e + spread |e| u until `count` are accepted.
template <class Accept, class Project>
void sample_rays(SurfaceSample& out, const Vector& e, int count, const SamplingOptions& opt, Accept accept,
                 Project project) {
  if (count < 0) throw UsageError("sample count must be nonnegative");
  Rng rng(opt.seed);
  const double radius = opt.spread * e.norm();
  const int budget = std::max(opt.min_attempts, static_cast<int>(std::ceil(count / (1.0 - opt.max_rejection))));
  while (static_cast<int>(out.points.size()) < count) {
    if (out.attempts >= budget) {
      std::ostringstream msg;
      msg << "rejection sampling accepted " << out.points.size() << " of " << out.attempts
          << " directions (spread " << opt.spread << "); the unit component is too thin around e";
      throw SamplingError(msg.str());
    }
    ++out.attempts;
    Vector d = e + radius * rng.unit_vector(e.size()) * std::abs(rng.normal());
    if (!accept(d)) continue;
    auto [p, r] = project(d);
    out.points.push_back(std::move(p));
    out.residuals.push_back(r);
  }
}

}  // namespace detail

inline SurfaceSample sample_surface(const OmegaSpec& spec, double c, int count, const SamplingOptions& opt = {}) {
  SurfaceSample out;
  out.kind = "omega";
  out.dim = spec.dim();
  out.level = c;
  for (const auto& b : spec.blocks) out.spec += (out.spec.empty() ? "" : "+") + b.tag.name();
  if (!(c > 0)) throw UsageError("level must be positive");
  detail::sample_rays(
      out, spec.unit(), count, opt,
      [&](const Vector& d) {
        if (!in_unit_component(spec, d)) return false;
        return std::isfinite(log_omega(spec, d));
      },
      [&](const Vector& d) {
        Vector p = level_surface_point(spec, c, d);
        return std::pair{p, std::abs(std::exp(log_omega(spec, p) - std::log(c)) - 1.0)};
      });
  return out;
}

inline SurfaceSample sample_surface(const PotentialSpec& spec, double level, int count,
                                    const SamplingOptions& opt = {}) {
  SurfaceSample out;
  out.kind = "potential";
  out.dim = spec.dim();
  out.level = level;
  for (const auto& b : spec.blocks()) out.spec += (out.spec.empty() ? "" : "+") + b.entry.name;
  if (spec.homogeneity() == 0) throw SpecError("potential has zero homogeneity; its level sets are cones");
  const OmegaSpec omega = catalog_direct_sum([&] {
    std::vector<CatalogEntry> parts;
    for (const auto& b : spec.blocks()) parts.push_back(b.entry);
    return parts;
  }()).omega;
  detail::sample_rays(
      out, spec.algebra().unit(), count, opt,
      [&](const Vector& d) {
        if (!in_unit_component(omega, d) || !spec.in_domain(d)) return false;
        return !spec.eval(d).branch_warning;
      },
      [&](const Vector& d) {
        Vector p = level_surface_point(spec, level, d);
        return std::pair{p, std::abs(spec(p) - level)};
      });
  return out;
}

// Ray projection onto {det P = 1}: y -> (det P_y)^{-1/(2n)} y.
inline Vector project_pi(const Algebra& j, const Vector& y) {
  require_dim(y, j.dim(), "project_pi");
  LogDet d = log_det(p_operator(j, y));
  if (d.sign <= 0) throw ComponentError("det P_y <= 0: y is not in a positive component");
  return std::exp(-d.log_abs / (2.0 * j.dim())) * y;
}

// ---------------------------------------------------------------------------
// Calabi products

struct CalabiFactor {
  std::string name;
  OmegaSpec omega;
  double level = 1;  // c_k
  int dim() const { return omega.dim(); }
};

struct CalabiConfig {
  std::vector<CalabiFactor> factors;
  double level = 1;  // c
  Vector t;          // sum n_k t_k = log c - sum log c_k

  double constraint_residual() const {
    double lhs = 0, rhs = std::log(level);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      lhs += factors[k].dim() * t(static_cast<Eigen::Index>(k));
      rhs -= std::log(factors[k].level);
    }
    return std::abs(lhs - rhs);
  }

  void validate(double tol = 1e-12) const {
    if (factors.empty()) throw ConfigError("Calabi product needs at least one factor");
    if (!(level > 0)) throw ConfigError("total level must be positive");
    if (t.size() != static_cast<Eigen::Index>(factors.size())) throw ConfigError("one t per factor");
    for (const auto& f : factors)
      if (!(f.level > 0)) throw ConfigError("factor level must be positive");
    double rhs = std::abs(std::log(level));
    for (const auto& f : factors) rhs += std::abs(std::log(f.level));
    if (constraint_residual() > tol * (1 + rhs))
      throw ConfigError("t violates the constraint sum n_k t_k = log c - sum log c_k (residual " +
                        std::to_string(constraint_residual()) + ")");
  }

  // Choose the last t so that the constraint holds exactly.
  void complete_t() {
    if (factors.empty()) throw ConfigError("Calabi product needs at least one factor");
    if (t.size() != static_cast<Eigen::Index>(factors.size())) t = Vector::Zero(static_cast<Eigen::Index>(factors.size()));
    double rhs = std::log(level);
    for (std::size_t k = 0; k < factors.size(); ++k) rhs -= std::log(factors[k].level);
    for (std::size_t k = 0; k + 1 < factors.size(); ++k) rhs -= factors[k].dim() * t(static_cast<Eigen::Index>(k));
    t(t.size() - 1) = rhs / factors.back().dim();
  }

  int dim() const {
    int n = 0;
    for (const auto& f : factors) n += f.dim();
    return n;
  }

  OmegaSpec omega() const {
    OmegaSpec spec;
    int offset = 0;
    for (const auto& f : factors) {
      for (auto b : f.omega.blocks) {
        b.offset += offset;
        spec.blocks.push_back(std::move(b));
      }
      offset += f.dim();
    }
    return spec;
  }
};

// f = sum_k e^{t_k} x_k for factor points x_k on omega_k = c_k.
inline Vector calabi_point(const CalabiConfig& config, const std::vector<Vector>& points,
                           double level_tol = 1e-8) {
  config.validate();
  if (points.size() != config.factors.size()) throw InputError("one point per Calabi factor");
  Vector f(config.dim());
  int offset = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& fac = config.factors[k];
    require_dim(points[k], fac.dim(), "Calabi factor point");
    double w = omega(fac.omega, points[k]);
    if (std::abs(w / fac.level - 1.0) > level_tol)
      throw InputError("factor point " + std::to_string(k) + " is off its level set (omega = " +
                       std::to_string(w) + ", level " + std::to_string(fac.level) + ")");
    f.segment(offset, fac.dim()) = std::exp(config.t(static_cast<Eigen::Index>(k))) * points[k];
    offset += fac.dim();
  }
  return f;
}

// ---------------------------------------------------------------------------
// Truncated polynomial hypersurface (log p)(1) = 0

// Last coefficient p_{n-1} of the point on (log p)(1) = 0 with the given
// leading coefficients p_0..p_{n-2}.
inline double nilpotent_surface_coeff(int n, const Vector& prefix) {
  if (n < 2) throw UsageError("need n >= 2");
  if (prefix.size() != n - 1) throw UsageError("need the n-1 leading coefficients");
  if (!(prefix(0) > 0)) throw DomainError("p_0 must be positive (principal branch)");
  Vector p = Vector::Zero(n);
  p.head(n - 1) = prefix;
  // p_{n-1} enters (log p)(1) only through the linear term p_{n-1} / p_0.
  return -prefix(0) * trunc_poly_log_at_one(p);
}

// ---------------------------------------------------------------------------
// Leaves of complex-log potentials on products of C and R factors.

// Explicit chart of the leaf Phi = level for potentials whose blocks are all
// ComplexField or RealLine. Parameters: (r, phi) per complex block and x per
// real block, minus the one coordinate solved from the level equation.
class LeafChart {
 public:
  LeafChart(const PotentialSpec& spec, double level) : spec_(spec), level_(level) {
    const auto& blocks = spec.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      Family f = blocks[k].entry.tag.family;
      if (f != Family::ComplexField && f != Family::RealLine)
        throw UnsupportedError("leaf charts need ComplexField and RealLine blocks only");
    }
    // Solve for the last real coordinate if there is one, else for the last
    // complex block's radius (or angle when the real part of c vanishes).
    for (std::size_t k = blocks.size(); k-- > 0;) {
      if (blocks[k].entry.tag.family == Family::RealLine) {
        solved_block_ = static_cast<int>(k);
        solved_ = Solved::Real;
        break;
      }
    }
    if (solved_block_ < 0) {
      solved_block_ = static_cast<int>(blocks.size()) - 1;
      solved_ = blocks.back().coefficient.real() != 0 ? Solved::Radius : Solved::Angle;
    }
  }

  int parameter_count() const {
    int n = 0;
    for (const auto& b : spec_.blocks()) n += b.entry.algebra.dim();
    return n - 1;
  }

  // "x", "r" or "phi" per parameter, in the order point() reads them.
  std::vector<std::string> parameter_names() const {
    std::vector<std::string> names;
    const auto& blocks = spec_.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const bool solved_here = static_cast<int>(k) == solved_block_;
      if (blocks[k].entry.tag.family == Family::RealLine) {
        if (!solved_here) names.emplace_back("x");
      } else if (solved_here) {
        names.emplace_back(solved_ == Solved::Radius ? "phi" : "r");
      } else {
        names.emplace_back("r");
        names.emplace_back("phi");
      }
    }
    return names;
  }

  // Branch-continuous potential from coordinates and explicit angles.
  double continuous_potential(const Vector& x, const std::vector<double>& angles) const {
    double v = 0;
    std::size_t a = 0;
    for (std::size_t k = 0; k < spec_.blocks().size(); ++k) {
      const auto& b = spec_.blocks()[k];
      const int o = spec_.offset(k);
      if (b.entry.tag.family == Family::RealLine) {
        v += b.coefficient.real() * std::log(std::abs(x(o)));
      } else {
        // Re(2 c (log r + i phi)); det P^C = z^2 on C
        double r = std::hypot(x(o), x(o + 1));
        v += 2 * (b.coefficient.real() * std::log(r) - b.coefficient.imag() * angles[a++]);
      }
    }
    return v;
  }

  struct ChartPoint {
    Vector x;
    std::vector<double> angles;  // unwrapped angle per complex block
  };

  ChartPoint point(const Vector& params) const {
    if (params.size() != parameter_count()) throw UsageError("wrong number of leaf parameters");
    const auto& blocks = spec_.blocks();
    ChartPoint out{Vector::Zero(spec_.dim()), {}};
    double rest = 0;          // potential of every coordinate except the solved one
    double solved_free = 0;   // the free coordinate of a solved complex block
    std::size_t solved_angle = 0;
    Eigen::Index p = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto& b = blocks[k];
      const int o = spec_.offset(k);
      const double a = b.coefficient.real(), bi = b.coefficient.imag();
      const bool solved_here = static_cast<int>(k) == solved_block_;
      if (b.entry.tag.family == Family::RealLine) {
        if (solved_here) continue;
        out.x(o) = params(p++);
        rest += a * std::log(std::abs(out.x(o)));
      } else if (solved_here) {
        solved_free = params(p++);
        solved_angle = out.angles.size();
        out.angles.push_back(solved_free);  // replaced below when the angle is solved
        rest += solved_ == Solved::Radius ? -2 * bi * solved_free : 2 * a * std::log(solved_free);
      } else {
        double r = params(p++), phi = params(p++);
        out.x(o) = r * std::cos(phi);
        out.x(o + 1) = r * std::sin(phi);
        out.angles.push_back(phi);
        rest += 2 * (a * std::log(r) - bi * phi);
      }
    }
    const auto& b = blocks[static_cast<std::size_t>(solved_block_)];
    const int o = spec_.offset(static_cast<std::size_t>(solved_block_));
    const double remainder = level_ - rest;
    switch (solved_) {
      case Solved::Real:
        out.x(o) = std::exp(remainder / b.coefficient.real());
        break;
      case Solved::Radius: {
        double r = std::exp(remainder / (2 * b.coefficient.real()));
        out.x(o) = r * std::cos(solved_free);
        out.x(o + 1) = r * std::sin(solved_free);
        break;
      }
      case Solved::Angle: {
        double phi = -remainder / (2 * b.coefficient.imag());
        out.x(o) = solved_free * std::cos(phi);
        out.x(o + 1) = solved_free * std::sin(phi);
        out.angles[solved_angle] = phi;
        break;
      }
    }
    return out;
  }

  // |Phi - level| with angles unwrapped by the nearest multiple of 2 pi to
  // the chart's own angle.
  double residual(const ChartPoint& cp) const {
    std::vector<double> angles;
    std::size_t a = 0;
    for (std::size_t k = 0; k < spec_.blocks().size(); ++k) {
      if (spec_.blocks()[k].entry.tag.family != Family::ComplexField) continue;
      const int o = spec_.offset(k);
      double principal = std::atan2(cp.x(o + 1), cp.x(o));
      double turns = std::round((cp.angles[a++] - principal) / (2 * std::numbers::pi));
      angles.push_back(principal + 2 * std::numbers::pi * turns);
    }
    return std::abs(continuous_potential(cp.x, angles) - level_);
  }

 private:
  enum class Solved { Real, Radius, Angle };
  PotentialSpec spec_;
  double level_;
  int solved_block_ = -1;
  Solved solved_ = Solved::Real;
};

// Regular grid over a box of chart parameters; counts[i] >= 1 nodes per axis.
inline SurfaceSample trace_leaf(const PotentialSpec& spec, double level, const Vector& lo, const Vector& hi,
                                const std::vector<int>& counts) {
  LeafChart chart(spec, level);
  const int m = chart.parameter_count();
  if (lo.size() != m || hi.size() != m || static_cast<int>(counts.size()) != m)
    throw UsageError("leaf grid needs one range and count per parameter");
  SurfaceSample out;
  out.kind = "leaf";
  out.dim = spec.dim();
  out.level = level;
  for (const auto& b : spec.blocks()) out.spec += (out.spec.empty() ? "" : "+") + b.entry.name;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  long total = 1;
  for (int c : counts) {
    if (c < 1) throw UsageError("grid counts must be positive");
    total *= c;
  }
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    Vector params(m);
    for (int i = m - 1; i >= 0; --i) {
      int c = counts[static_cast<std::size_t>(i)];
      int k = static_cast<int>(rem % c);
      rem /= c;
      params(i) = c == 1 ? lo(i) : lo(i) + (hi(i) - lo(i)) * k / (c - 1);
    }
    auto cp = chart.point(params);
    out.residuals.push_back(chart.residual(cp));
    out.points.push_back(std::move(cp.x));
  }
  out.attempts = static_cast<int>(total);
  return out;
}

// ---------------------------------------------------------------------------
// Export

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string sample_to_csv(const SurfaceSample& s) {
  std::ostringstream out;
  for (int i = 0; i < s.dim; ++i) out << 'x' << i + 1 << ',';
  out << "level_residual\n";
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    for (int i = 0; i < s.dim; ++i) out << format_double(s.points[k](i)) << ',';
    out << format_double(s.residuals[k]) << '\n';
  }
  return out.str();
}

inline nlohmann::json sample_to_json(const SurfaceSample& s) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : s.points) points.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  return {{"spec", {{"name", s.spec}, {"kind", s.kind}, {"dim", s.dim}}},
          {"level", s.level},
          {"points", points},
          {"residuals", s.residuals}};
}

inline SurfaceSample sample_from_json(const nlohmann::json& j) {
  SurfaceSample s;
  try {
    s.spec = j.at("spec").at("name").get<std::string>();
    s.kind = j.at("spec").at("kind").get<std::string>();
    s.dim = j.at("spec").at("dim").get<int>();
    s.level = j.at("level").get<double>();
    for (const auto& p : j.at("points")) {
      auto v = p.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != s.dim) throw InputError("point has the wrong dimension");
      s.points.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    s.residuals = j.at("residuals").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed sample JSON: ") + e.what());
  }
  if (s.residuals.size() != s.points.size()) throw InputError("one residual per point");
  return s;
}

enum class ExportFormat { Csv, Json };

inline void export_sample(const SurfaceSample& s, ExportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (format == ExportFormat::Csv)
    out << sample_to_csv(s);
  else
    out << sample_to_json(s).dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

inline SurfaceSample read_sample_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed sample JSON: ") + e.what());
  }
  return sample_from_json(j);
}

}  // namespace jordan

#endif  // JORDAN_SURFACE_HPP
