#ifndef JORDAN_SPEC_IO_HPP
#define JORDAN_SPEC_IO_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "jordan/algebra.hpp"
#include "jordan/catalog.hpp"
#include "jordan/error.hpp"
#include "jordan/geometry.hpp"
#include "jordan/surface.hpp"

// Reading algebra specifications from JSON. See docs/spec_format.md.
namespace jordan {

using Json = nlohmann::json;

struct LoadedSpec {
  std::string name;
  std::vector<CatalogEntry> parts;   // empty for custom algebras
  std::optional<Algebra> algebra;
  std::optional<OmegaSpec> omega;    // closed forms, catalog algebras only
  std::optional<TraceForm> gamma;    // absent for non-unital custom algebras
  std::optional<PotentialSpec> potential;
  bool explicit_potential = false;   // potential given in the file (else derived from weights)
  bool canonical_gamma = false;      // gamma = -g/n

  bool is_catalog() const { return !parts.empty(); }
  const Algebra& alg() const { return *algebra; }
};

namespace detail {

template <class T>
T get_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SpecError(where + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SpecError(where + ": field \"" + key + "\" has the wrong type");
  }
}

inline Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SpecError(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw SpecError(where + ": rows must be arrays");
    if (r == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw SpecError(where + ": ragged matrix");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw SpecError(where + ": entries must be numbers");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

inline Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SpecError(where + ": entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

}  // namespace detail

inline FamilyTag tag_from_json(const Json& j) {
  const std::string where = "algebra";
  auto name = detail::get_field<std::string>(j, "family", where);
  auto fam = family_from_name(name);
  if (!fam || *fam == Family::Custom) throw SpecError("unknown family \"" + name + "\"");
  if (*fam == Family::QuadraticFactorReal) {
    if (!j.contains("q")) throw SpecError("QuadraticFactorReal needs the form \"q\"");
    return FamilyTag::quadratic_real(detail::matrix_from_json(j.at("q"), "q"));
  }
  int m = j.contains("m") ? detail::get_field<int>(j, "m", where) : 0;
  if (j.contains("twist")) return FamilyTag::twisted(*fam, m, detail::get_field<std::vector<int>>(j, "twist", where));
  return FamilyTag::make(*fam, m);
}

inline CatalogEntry entry_from_json(const Json& j) {
  try {
    return make_algebra(tag_from_json(j));
  } catch (const UsageError& e) {
    throw SpecError(e.what());
  }
}

inline Json tag_to_json(const FamilyTag& tag) {
  Json j{{"family", family_name(tag.family)}};
  if (tag.family == Family::QuadraticFactorReal) {
    Json q = Json::array();
    for (Eigen::Index r = 0; r < tag.q.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < tag.q.cols(); ++c) row.push_back(tag.q(r, c));
      q.push_back(row);
    }
    j["q"] = q;
  } else if (tag.m > 0) {
    j["m"] = tag.m;
  }
  if (!tag.twist.empty()) j["twist"] = tag.twist;
  return j;
}

namespace detail {

inline void load_custom(LoadedSpec& out, const Json& c) {
  const int n = get_field<int>(c, "dim", "custom");
  auto flat = get_field<std::vector<double>>(c, "structure", "custom");
  std::optional<Vector> unit;
  if (c.contains("unit")) unit = vector_from_json(c.at("unit"), "custom.unit");
  try {
    out.algebra = Algebra::from_tensor(n, flat, unit, "custom");
  } catch (const UsageError& e) {
    throw SpecError(std::string("custom algebra: ") + e.what());
  }
}

inline PotentialSpec potential_from_json(const Json& p, const std::vector<CatalogEntry>& parts) {
  if (parts.empty()) throw SpecError("potentials need catalog algebras");
  auto terms = p.is_object() && p.contains("terms") ? p.at("terms") : Json();
  if (!terms.is_array() || terms.size() != parts.size())
    throw SpecError("potential needs one term per algebra block (" + std::to_string(parts.size()) + ")");
  std::vector<PotentialBlock> blocks;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Json& t = terms[k];
    std::string kind_name = get_field<std::string>(t, "kind", "potential term");
    auto kind = potential_kind_from_name(kind_name);
    if (!kind) throw SpecError("unknown potential kind \"" + kind_name + "\"");
    Complex c;
    if (t.contains("coefficient")) {
      c = get_field<double>(t, "coefficient", "potential term");
    } else {
      c = Complex(get_field<double>(t, "re", "potential term"), t.contains("im") ? get_field<double>(t, "im", "potential term") : 0.0);
    }
    blocks.push_back({parts[k], *kind, c});
  }
  return PotentialSpec(std::move(blocks));
}

// gamma is a nonzero multiple of g, i.e. -g/n after normalization.
inline bool is_canonical_gamma(const LoadedSpec& s) {
  if (!s.gamma || !s.alg().has_unit() || !is_semisimple(s.alg())) return false;
  const Vector& e = s.alg().unit();
  double gee = (*s.gamma)(e, e);
  if (gee == 0) return false;
  Matrix target = -g_matrix(s.alg()) / s.alg().dim();
  Matrix normalized = -s.gamma->matrix() / gee;
  return (normalized - target).norm() <= 1e-10 * target.norm();
}

}  // namespace detail

inline LoadedSpec load_spec(const Json& j) {
  if (!j.is_object()) throw SpecError("spec must be a JSON object");
  LoadedSpec out;
  if (!j.contains("algebra")) throw SpecError("spec: missing field \"algebra\"");
  const Json& a = j.at("algebra");
  std::optional<std::vector<double>> weights;
  if (a.is_object() && a.contains("custom")) {
    detail::load_custom(out, a.at("custom"));
    out.name = "custom(" + std::to_string(out.alg().dim()) + ")";
  } else if (a.is_object() && a.contains("direct_sum")) {
    const Json& list = a.at("direct_sum");
    if (!list.is_array() || list.empty()) throw SpecError("direct_sum needs a nonempty list of families");
    for (const auto& item : list) out.parts.push_back(entry_from_json(item));
  } else {
    out.parts.push_back(entry_from_json(a));
  }

  // gamma
  Json g = j.contains("gamma") ? j.at("gamma") : Json("canonical-g-scaled");
  if (g.is_object() && g.contains("weights")) {
    if (!out.is_catalog()) throw SpecError("gamma weights need catalog blocks");
    weights = detail::get_field<std::vector<double>>(g, "weights", "gamma");
    if (weights->size() != out.parts.size()) throw SpecError("gamma: one weight per block");
  }
  if (out.is_catalog()) {
    auto combine = [&] {
      try {
        return out.parts.size() == 1 && !weights ? out.parts.front() : catalog_direct_sum(out.parts, weights);
      } catch (const UsageError& e) {
        throw SpecError(e.what());
      }
    };
    CatalogEntry sum = combine();
    out.name = out.parts.size() == 1 ? out.parts.front().name : sum.name;
    out.algebra = sum.algebra;
    out.omega = sum.omega;
    out.gamma = sum.default_gamma;
  }
  if (g.is_string()) {
    if (g.get<std::string>() != "canonical-g-scaled") throw SpecError("gamma: unknown keyword " + g.dump());
    if (!out.is_catalog()) {
      if (!out.alg().has_unit()) {
        out.gamma.reset();
      } else {
        Matrix gm = g_matrix(out.alg());
        if (!is_nondegenerate(TraceForm(gm)))
          throw SpecError("canonical gamma needs a semi-simple algebra; give gamma explicitly");
        out.gamma = TraceForm(-gm / out.alg().dim());
      }
    }
  } else if (g.is_object() && g.contains("matrix")) {
    Matrix m = detail::matrix_from_json(g.at("matrix"), "gamma.matrix");
    if (m.rows() != out.alg().dim() || m.cols() != out.alg().dim()) throw SpecError("gamma matrix has the wrong size");
    out.gamma = TraceForm(m);
  } else if (!weights) {
    throw SpecError("gamma must be \"canonical-g-scaled\", {\"matrix\": ...} or {\"weights\": ...}");
  }

  // potential
  if (j.contains("potential")) {
    out.potential = detail::potential_from_json(j.at("potential"), out.parts);
    out.explicit_potential = true;
  } else if (out.is_catalog() && !(g.is_object() && g.contains("matrix"))) {
    // The potential whose gradient is zeta of the (weighted) canonical gamma.
    std::vector<double> w = weights ? *weights : std::vector<double>(out.parts.size(), 1.0);
    double total = 0;
    for (std::size_t k = 0; k < out.parts.size(); ++k) total += w[k] * out.parts[k].algebra.dim();
    std::vector<PotentialBlock> blocks;
    for (std::size_t k = 0; k < out.parts.size(); ++k) {
      const auto& p = out.parts[k];
      if (p.tag.family == Family::TruncPoly)
        blocks.push_back({p, PotentialKind::TruncLog, w[k] * p.algebra.dim() / total});
      else
        blocks.push_back({p, PotentialKind::RealLog, w[k] / total});
    }
    out.potential = PotentialSpec(std::move(blocks));
  }
  if (!j.contains("gamma") && out.explicit_potential) out.gamma = out.potential->gamma();
  out.canonical_gamma = detail::is_canonical_gamma(out);
  if (j.contains("name")) out.name = detail::get_field<std::string>(j, "name", "spec");
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    Json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path + ": " + e.what());
  }
}

inline LoadedSpec load_spec_file(const std::string& path) { return load_spec(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Calabi configurations

struct CalabiInput {
  CalabiConfig config;
  std::vector<std::optional<Vector>> points;      // explicit factor points
  std::vector<std::optional<Vector>> directions;  // rays to project onto the factor level
};

inline CalabiInput load_calabi(const Json& j) {
  CalabiInput out;
  out.config.level = detail::get_field<double>(j, "level", "calabi");
  if (!j.contains("factors") || !j.at("factors").is_array() || j.at("factors").empty())
    throw SpecError("calabi: need a nonempty \"factors\" list");
  for (const auto& f : j.at("factors")) {
    if (!f.contains("algebra")) throw SpecError("calabi factor: missing \"algebra\"");
    CatalogEntry entry = entry_from_json(f.at("algebra"));
    if (!entry.algebra.has_unit() || entry.tag.family == Family::TruncPoly)
      throw SpecError("calabi factors must be semi-simple catalog families");
    CalabiFactor fac{entry.name, entry.omega, detail::get_field<double>(f, "level", "calabi factor")};
    out.config.factors.push_back(std::move(fac));
    out.points.push_back(f.contains("point") ? std::optional<Vector>(detail::vector_from_json(f.at("point"), "point"))
                                             : std::nullopt);
    out.directions.push_back(f.contains("direction")
                                 ? std::optional<Vector>(detail::vector_from_json(f.at("direction"), "direction"))
                                 : std::nullopt);
  }
  if (!j.contains("t")) throw SpecError("calabi: missing \"t\"");
  out.config.t = detail::vector_from_json(j.at("t"), "t");
  return out;
}

}  // namespace jordan

#endif  // JORDAN_SPEC_IO_HPP
