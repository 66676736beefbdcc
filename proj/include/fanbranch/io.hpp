#pragma once

// JSON formats for fans, covers, assignments, PL functions and bundles.

#include <fanbranch/cover.hpp>
#include <fanbranch/fan.hpp>
#include <fanbranch/klyachko.hpp>
#include <fanbranch/monodromy.hpp>
#include <fanbranch/pl.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanbranch::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw FormatError("cannot write " + p.string());
  out << j.dump(2) << "\n";
}

inline Integer integer_from(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) return Integer(j.get<std::string>());
  throw FormatError("expected an integer, got " + j.dump());
}

inline Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    Rational q(j.get<std::string>());
    q.canonicalize();
    return q;
  }
  throw FormatError("expected a rational (integer or \"p/q\" string), got " + j.dump());
}

inline json to_json(const Integer& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

inline json to_json(const Rational& q) {
  if (q.get_den() == 1) return to_json(Integer(q.get_num()));
  return json(q.get_str());
}

template <class T>
json vector_json(const std::vector<T>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline IntegerVector integer_vector_from(const json& j) {
  IntegerVector v;
  for (const auto& x : j) v.push_back(integer_from(x));
  return v;
}

inline RationalVector rational_vector_from(const json& j) {
  RationalVector v;
  for (const auto& x : j) v.push_back(rational_from(x));
  return v;
}

// ---- fans

inline Fan fan_from_json(const json& j) {
  if (!j.contains("rank") || !j.contains("rays") || !j.contains("max_cones"))
    throw FormatError("fan needs \"rank\", \"rays\" and \"max_cones\"");
  std::vector<IntegerVector> rays;
  for (const auto& r : j.at("rays")) rays.push_back(integer_vector_from(r));
  std::vector<std::vector<std::size_t>> cones;
  for (const auto& c : j.at("max_cones")) cones.push_back(c.get<std::vector<std::size_t>>());
  return Fan::from_data(j.at("rank").get<std::size_t>(), rays, cones);
}

inline std::shared_ptr<const Fan> load_fan(const std::filesystem::path& p) {
  try {
    return std::make_shared<const Fan>(fan_from_json(read_json(p)));
  } catch (const json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

inline json to_json(const Fan& f) {
  json rays = json::array(), cones = json::array();
  for (const auto& r : f.rays()) rays.push_back(vector_json(r));
  for (std::size_t k = 0; k < f.num_max_cones(); ++k) cones.push_back(f.max_cone(k).rays);
  return json{{"rank", f.rank()}, {"rays", rays}, {"max_cones", cones}};
}

// ---- assignments

inline json to_json(const MonodromyAssignment& a) {
  json perms = json::array();
  for (const auto& p : a.perms) {
    json img = json::array();
    for (auto x : p.image()) img.push_back(int(x));
    perms.push_back(img);
  }
  return json{{"degree", a.degree}, {"perms", perms}};
}

inline MonodromyAssignment assignment_from_json(const json& j) {
  MonodromyAssignment a;
  a.degree = j.at("degree").get<std::size_t>();
  for (const auto& p : j.at("perms")) {
    auto perm = Permutation::from(p.get<std::vector<int>>());
    if (perm.degree() != a.degree) throw FormatError("permutation degree mismatch");
    a.perms.push_back(perm);
  }
  return a;
}

// ---- covers

inline json to_json(const CoverPoset& c, const std::string& fan_name = "") {
  json cells = json::array(), faces = json::array();
  for (const auto& cell : c.cells()) cells.push_back(json{{"base", cell.base}, {"copy", cell.copy}, {"weight", cell.weight}});
  for (std::size_t i = 0; i < c.size(); ++i)
    for (auto f : c.facets(i)) faces.push_back(json::array({f, i}));
  return json{{"fan", fan_name}, {"cells", cells}, {"faces", faces}};
}

/// Explicit cells, or {"monodromy": {...}} built over the fan's spanning tree.
inline std::shared_ptr<const CoverPoset> cover_from_json(const json& j, const std::shared_ptr<const Fan>& fan) {
  if (j.contains("monodromy")) {
    const auto t = spanning_tree(*fan);
    return build_cover_detailed(fan, t, assignment_from_json(j.at("monodromy"))).cover;
  }
  auto c = std::make_shared<CoverPoset>(fan);
  for (const auto& cell : j.at("cells"))
    c->add_cell(cell.at("base").get<std::size_t>(), cell.value("copy", std::size_t{0}), cell.value("weight", std::uint64_t{1}));
  for (const auto& f : j.at("faces")) c->add_face(f.at(0).get<std::size_t>(), f.at(1).get<std::size_t>());
  return c;
}

// ---- PL functions

inline json to_json(const PLFunction& f) {
  json cells = json::array();
  for (const auto& [cell, u] : f.u)
    cells.push_back(json{{"base", f.cover->cell(cell).base}, {"copy", f.cover->cell(cell).copy}, {"u", vector_json(u)}});
  return json{{"cells", cells}};
}

inline PLFunction pl_function_from_json(const json& j, const std::shared_ptr<const CoverPoset>& c) {
  PLFunction f;
  f.cover = c;
  for (const auto& e : j.at("cells")) {
    const auto base = e.at("base").get<std::size_t>();
    const auto copy = e.at("copy").get<std::size_t>();
    std::optional<std::size_t> id;
    for (std::size_t i = 0; i < c->size(); ++i)
      if (c->cell(i).base == base && c->cell(i).copy == copy) id = i;
    if (!id) throw FormatError("no cell with base " + std::to_string(base) + " and copy " + std::to_string(copy));
    f.u[*id] = rational_vector_from(e.at("u"));
  }
  return f;
}

// ---- bundles

struct Bundle {
  KlyachkoData data;
  SplittingCertificate cert;
  std::string fan_name;
};

inline Subspace subspace_from(const json& j, std::size_t r) {
  std::vector<RationalVector> vs;
  for (const auto& v : j) {
    auto rv = rational_vector_from(v);
    if (rv.size() != r) throw FormatError("subspace vector has wrong length");
    vs.push_back(rv);
  }
  return Subspace::span(r, vs);
}

inline json subspace_json(const Subspace& s) {
  json a = json::array();
  for (const auto& v : s.vectors()) a.push_back(vector_json(v));
  return a;
}

inline Bundle bundle_from_json(const json& j, std::shared_ptr<const Fan> fan) {
  Bundle b;
  b.fan_name = j.value("fan", "");
  const auto r = j.at("rank").get<std::size_t>();
  std::vector<Filtration> filts(fan->num_rays());
  std::vector<bool> seen(fan->num_rays(), false);
  for (const auto& [key, steps] : j.at("filtrations").items()) {
    const auto ray = static_cast<std::size_t>(std::stoul(key));
    if (ray >= fan->num_rays()) throw FormatError("filtration for unknown ray " + key);
    std::vector<FiltrationStep> fs;
    for (const auto& s : steps) fs.push_back(FiltrationStep{s.at("threshold").get<long>(), subspace_from(s.at("subspace"), r)});
    filts[ray] = Filtration::make(r, std::move(fs));
    seen[ray] = true;
  }
  for (std::size_t ray = 0; ray < seen.size(); ++ray)
    if (!seen[ray]) throw FormatError("missing filtration for ray " + std::to_string(ray));
  b.data = make_data(fan, r, std::move(filts));
  b.cert.cones.resize(fan->num_max_cones());
  if (j.contains("splittings"))
    for (const auto& [key, pieces] : j.at("splittings").items()) {
      const auto k = static_cast<std::size_t>(std::stoul(key));
      if (k >= fan->num_max_cones()) throw FormatError("splitting for unknown cone " + key);
      for (const auto& p : pieces) b.cert.cones[k].push_back(SplitPiece{integer_vector_from(p.at("u")), subspace_from(p.at("subspace"), r)});
    }
  return b;
}

/// Loads a bundle; its "fan" entry is resolved relative to the bundle file.
inline Bundle load_bundle(const std::filesystem::path& p) {
  try {
    const auto j = read_json(p);
    const auto fan = load_fan(p.parent_path() / j.at("fan").get<std::string>());
    return bundle_from_json(j, fan);
  } catch (const json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

inline json to_json(const KlyachkoData& d, const SplittingCertificate& c, const std::string& fan_name) {
  json filts = json::object();
  for (std::size_t r = 0; r < d.filtrations.size(); ++r) {
    json steps = json::array();
    for (const auto& s : d.filtrations[r].steps()) steps.push_back(json{{"threshold", s.threshold}, {"subspace", subspace_json(s.space)}});
    filts[std::to_string(r)] = steps;
  }
  json splits = json::object();
  for (std::size_t k = 0; k < c.cones.size(); ++k) {
    json ps = json::array();
    for (const auto& p : c.cones[k]) ps.push_back(json{{"u", vector_json(p.u)}, {"subspace", subspace_json(p.space)}});
    splits[std::to_string(k)] = ps;
  }
  return json{{"fan", fan_name}, {"rank", d.rank}, {"filtrations", filts}, {"splittings", splits}};
}

}  // namespace fanbranch::io
