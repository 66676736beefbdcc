#pragma once

// Rational polyhedral fans stored combinatorially: a ray table of primitive
// generators plus maximal cones as ray-index sets. The full face poset, walls,
// dual graph and (in rank 3) ray link cycles are derived on construction.

#include <fanbranch/cone_geometry.hpp>
#include <fanbranch/exact_linalg.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanbranch {

class FanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RaySet = std::vector<std::size_t>;  // sorted ray indices

struct Cone {
  RaySet rays;
  std::size_t dim = 0;
  ConeInequalities halfspaces;
  std::vector<std::size_t> facets;    // face ids of codimension-one faces
  std::vector<std::size_t> cofacets;  // face ids of cones having this one as a facet
  std::vector<std::size_t> maximal;   // indices of maximal cones containing this cone
};

/// One step of a ray's link: the cone we are in and the wall we leave it by.
struct LinkStep {
  std::size_t max_cone;
  std::size_t wall;
};

struct DualEdge {
  std::size_t wall;
  std::size_t from;  // lower-indexed maximal cone
  std::size_t to;
};

namespace detail {

inline std::string raylist(const RaySet& r) {
  std::ostringstream os;
  os << '<';
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
  os << '>';
  return os.str();
}

inline bool subset_of(const RaySet& a, const RaySet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline std::int64_t det2(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) { return a0 * b1 - a1 * b0; }

/// Completeness of a rank-2 fan given by integer generators and 2-ray cones.
inline bool planar_complete(const std::vector<std::array<std::int64_t, 2>>& rays,
                            const std::vector<std::array<std::size_t, 2>>& cones) {
  const std::size_t m = rays.size();
  if (cones.size() < 3) return false;
  std::vector<std::size_t> next(m, m), prev(m, m);
  for (const auto& c : cones) {
    std::size_t a = c[0], b = c[1];
    const auto d = det2(rays[a][0], rays[a][1], rays[b][0], rays[b][1]);
    if (d == 0) return false;
    if (d < 0) std::swap(a, b);  // orient counterclockwise a -> b
    if (next[a] != m || prev[b] != m) return false;
    next[a] = b;
    prev[b] = a;
  }
  for (std::size_t i = 0; i < m; ++i)
    if (next[i] == m || prev[i] == m) return false;
  // Single cycle through every ray.
  std::size_t steps = 0, cur = 0;
  do {
    cur = next[cur];
    ++steps;
  } while (cur != 0 && steps <= m);
  if (cur != 0 || steps != m) return false;
  // Winding number one: count sectors containing a direction that avoids all rays.
  std::int64_t wx = 1, wy = 0;
  for (std::int64_t k = 1;; ++k) {
    wx = 2 * k + 1;
    wy = 1;
    bool clash = false;
    for (const auto& r : rays)
      if (det2(r[0], r[1], wx, wy) == 0) clash = true;
    if (!clash) break;
  }
  std::size_t winding = 0;
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t b = next[a];
    const bool left_of_a = det2(rays[a][0], rays[a][1], wx, wy) > 0;
    const bool right_of_b = det2(wx, wy, rays[b][0], rays[b][1]) > 0;
    if (left_of_a && right_of_b) ++winding;
  }
  return winding == 1;
}

inline std::int64_t to_i64(const Integer& z) {
  if (!z.fits_slong_p()) throw FanError("ray coordinate does not fit in 64 bits");
  return z.get_si();
}

}  // namespace detail

class Fan;

/// Star of a cone: the cones containing it, seen in the quotient lattice.
struct Star {
  std::size_t base = 0;                  // face id of the base cone
  std::vector<std::size_t> cells;        // face ids of cones containing the base
  IntegerMatrix quotient_map;            // rows span the functionals vanishing on the base
  std::shared_ptr<const Fan> quotient;   // null when the base is full-dimensional
  std::map<std::size_t, std::size_t> cell_to_quotient_face;
};

class Fan {
 public:
  /// Builds and validates a fan. Rays are replaced by their primitive forms;
  /// cone ray lists may be given in any order.
  static Fan from_data(std::size_t rank, const std::vector<IntegerVector>& rays,
                       const std::vector<std::vector<std::size_t>>& max_cones) {
    Fan f;
    f.build(rank, rays, max_cones);
    return f;
  }

  static Fan from_data(std::size_t rank, const std::vector<std::vector<long>>& rays,
                       const std::vector<std::vector<std::size_t>>& max_cones) {
    std::vector<IntegerVector> r;
    for (const auto& v : rays) r.emplace_back(v.begin(), v.end());
    return from_data(rank, r, max_cones);
  }

  std::size_t rank() const { return rank_; }
  std::size_t num_rays() const { return rays_.size(); }
  const IntegerVector& ray(std::size_t i) const { return rays_.at(i); }
  const std::vector<IntegerVector>& rays() const { return rays_; }
  const std::vector<std::int64_t>& ray_i64(std::size_t i) const { return rays_i64_.at(i); }

  std::size_t num_faces() const { return faces_.size(); }
  const Cone& face(std::size_t id) const { return faces_.at(id); }
  const std::vector<Cone>& faces() const { return faces_; }
  std::optional<std::size_t> face_id(const RaySet& rays) const {
    auto it = face_index_.find(rays);
    if (it == face_index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t zero_face() const { return 0; }
  std::size_t ray_face(std::size_t ray) const { return ray_face_.at(ray); }

  std::size_t num_max_cones() const { return max_faces_.size(); }
  std::size_t max_cone_face(std::size_t k) const { return max_faces_.at(k); }
  const Cone& max_cone(std::size_t k) const { return faces_.at(max_faces_.at(k)); }
  std::optional<std::size_t> max_cone_index(std::size_t face_id) const {
    auto it = std::find(max_faces_.begin(), max_faces_.end(), face_id);
    if (it == max_faces_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - max_faces_.begin());
  }

  /// Walls are the codimension-one cones, indexed in face-id order.
  std::size_t num_walls() const { return walls_.size(); }
  std::size_t wall_face(std::size_t w) const { return walls_.at(w); }
  const Cone& wall(std::size_t w) const { return faces_.at(walls_.at(w)); }
  std::optional<std::size_t> wall_index(std::size_t face_id) const {
    auto it = std::find(walls_.begin(), walls_.end(), face_id);
    if (it == walls_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - walls_.begin());
  }

  const std::vector<DualEdge>& dual_edges() const { return dual_edges_; }

  /// Incidence between faces: true iff `a` is a face of `b`.
  bool is_face_of(std::size_t a, std::size_t b) const { return detail::subset_of(faces_[a].rays, faces_[b].rays); }

  bool adjacent_rays(std::size_t a, std::size_t b) const {
    RaySet s{std::min(a, b), std::max(a, b)};
    auto id = face_id(s);
    return id && faces_[*id].dim == 2;
  }

  bool complete() const { return complete_; }

  /// Link cycle of a ray in a complete rank-3 fan, starting at the
  /// lowest-index incident maximal cone and leaving it by its
  /// lowest-index wall through the ray.
  const std::vector<LinkStep>& link(std::size_t ray) const {
    if (!complete_ || rank_ != 3) throw FanError("ray links are defined for complete rank-3 fans");
    return links_.at(ray);
  }

  IntegerMatrix generator_matrix(const RaySet& rays) const {
    IntegerMatrix g(rays.size(), rank_);
    for (std::size_t i = 0; i < rays.size(); ++i)
      for (std::size_t j = 0; j < rank_; ++j) g(i, j) = rays_[rays[i]][j];
    return g;
  }

  /// Linear relations among the ray generators of a maximal cone, in the
  /// cone's (sorted) ray order.
  std::vector<IntegerVector> wall_relation(std::size_t max_cone) const {
    const auto& c = this->max_cone(max_cone);
    if (c.dim != rank_) throw FanError("wall relation needs a full-dimensional maximal cone");
    return left_nullspace(generator_matrix(c.rays));
  }

  /// Smallest-index maximal cone containing the point, if any.
  template <class T>
  std::optional<std::size_t> locate(std::span<const T> point) const {
    for (std::size_t k = 0; k < max_faces_.size(); ++k)
      if (faces_[max_faces_[k]].halfspaces.contains(point)) return k;
    return std::nullopt;
  }

  Star star(std::size_t face_id) const;

  std::string summary() const {
    std::ostringstream os;
    os << (complete_ ? "complete" : "valid, not complete") << ", " << num_rays() << " rays, " << num_max_cones()
       << " maximal cones, " << num_walls() << " walls";
    return os.str();
  }

 private:
  void build(std::size_t rank, const std::vector<IntegerVector>& rays, const std::vector<std::vector<std::size_t>>& cones);
  void enumerate_faces(const std::vector<RaySet>& max_sets);
  void check_pairwise(const std::vector<RaySet>& max_sets) const;
  void compute_completeness();

  std::size_t rank_ = 0;
  std::vector<IntegerVector> rays_;
  std::vector<std::vector<std::int64_t>> rays_i64_;
  std::vector<Cone> faces_;
  std::map<RaySet, std::size_t> face_index_;
  std::vector<std::size_t> ray_face_;
  std::vector<std::size_t> max_faces_;
  std::vector<std::size_t> walls_;
  std::vector<DualEdge> dual_edges_;
  std::vector<std::vector<LinkStep>> links_;
  bool complete_ = false;
};

inline void Fan::build(std::size_t rank, const std::vector<IntegerVector>& rays,
                       const std::vector<std::vector<std::size_t>>& cones) {
  if (rank < 1) throw FanError("lattice rank must be at least 1");
  rank_ = rank;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (rays[i].size() != rank) throw FanError("ray " + std::to_string(i) + " has wrong length");
    if (is_zero<Integer>(rays[i])) throw FanError("ray " + std::to_string(i) + " is the zero vector");
    rays_.push_back(primitive(rays[i]));
  }
  for (std::size_t i = 0; i < rays_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (rays_[i] == rays_[j])
        throw FanError("duplicate ray: rays " + std::to_string(j) + " and " + std::to_string(i) +
                       " have the same primitive generator " + to_string(rays_[i]));
  for (const auto& r : rays_) {
    std::vector<std::int64_t> small;
    for (const auto& x : r) small.push_back(detail::to_i64(x));
    rays_i64_.push_back(std::move(small));
  }

  std::vector<RaySet> max_sets;
  for (std::size_t k = 0; k < cones.size(); ++k) {
    RaySet s = cones[k];
    std::sort(s.begin(), s.end());
    if (s.empty()) throw FanError("maximal cone " + std::to_string(k) + " has no rays");
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw FanError("maximal cone " + std::to_string(k) + " repeats a ray index");
    if (s.back() >= rays_.size()) throw FanError("maximal cone " + std::to_string(k) + " has an invalid ray index");
    if (s.size() > 20) throw FanError("maximal cone " + std::to_string(k) + " has too many rays");
    for (std::size_t j = 0; j < k; ++j)
      if (max_sets[j] == s) throw FanError("maximal cones " + std::to_string(j) + " and " + std::to_string(k) + " coincide");
    max_sets.push_back(std::move(s));
  }
  enumerate_faces(max_sets);
  check_pairwise(max_sets);
  compute_completeness();
}

inline void Fan::enumerate_faces(const std::vector<RaySet>& max_sets) {
  struct Found {
    std::size_t dim;
  };
  std::map<RaySet, Found> found;
  std::map<RaySet, std::vector<std::size_t>> containing;
  for (std::size_t k = 0; k < max_sets.size(); ++k) {
    const auto& s = max_sets[k];
    const std::size_t n = s.size();
    std::vector<RationalVector> gens;
    for (auto r : s) gens.push_back(to_rational(rays_[r]));
    const std::size_t dim = fanbranch::rank(to_rational(generator_matrix(s)));
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<RationalVector> eq, ineq;
      RaySet sub;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          eq.push_back(gens[i]);
          sub.push_back(s[i]);
        } else {
          ineq.push_back(gens[i]);
        }
      }
      auto rip = relative_interior_point(rank_, eq, ineq);
      const bool is_face = rip.implicit_equalities.empty();
      if (mask == 0 && !is_face)
        throw FanError("maximal cone " + std::to_string(k) + " " + detail::raylist(s) + " is not strongly convex");
      if (!is_face) continue;
      auto it = found.find(sub);
      if (it == found.end()) found.emplace(sub, Found{fanbranch::rank(to_rational(generator_matrix(sub)))});
      containing[sub].push_back(k);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!found.count(RaySet{s[i]}) || std::find(containing[RaySet{s[i]}].begin(), containing[RaySet{s[i]}].end(), k) ==
                                             containing[RaySet{s[i]}].end())
        throw FanError("ray " + std::to_string(s[i]) + " is not extremal in maximal cone " + std::to_string(k) + " " +
                       detail::raylist(s));
    if (found.at(s).dim != dim) throw FanError("internal: cone dimension mismatch");
  }

  // Order faces by (dim, ray list).
  std::vector<std::pair<std::size_t, RaySet>> order;
  for (const auto& [rs, info] : found) order.emplace_back(info.dim, rs);
  std::sort(order.begin(), order.end());
  for (const auto& [dim, rs] : order) {
    Cone c;
    c.rays = rs;
    c.dim = dim;
    c.maximal = containing[rs];
    face_index_[rs] = faces_.size();
    faces_.push_back(std::move(c));
  }
  if (faces_.empty() || !faces_[0].rays.empty()) throw FanError("internal: zero cone missing");

  ray_face_.assign(rays_.size(), static_cast<std::size_t>(-1));
  for (std::size_t r = 0; r < rays_.size(); ++r) {
    auto id = face_id(RaySet{r});
    if (!id) throw FanError("ray " + std::to_string(r) + " is not used by any maximal cone");
    ray_face_[r] = *id;
  }
  for (const auto& s : max_sets) max_faces_.push_back(face_index_.at(s));

  for (std::size_t a = 0; a < faces_.size(); ++a)
    for (std::size_t b = 0; b < faces_.size(); ++b)
      if (faces_[b].dim == faces_[a].dim + 1 && detail::subset_of(faces_[a].rays, faces_[b].rays)) {
        faces_[b].facets.push_back(a);
        faces_[a].cofacets.push_back(b);
      }

  // Halfspace descriptions: equations from the functionals vanishing on the
  // cone, inequalities from facet normals.
  for (auto& c : faces_) {
    if (c.rays.empty()) {
      for (std::size_t j = 0; j < rank_; ++j) {
        IntegerVector e(rank_);
        e[j] = 1;
        c.halfspaces.equations.push_back(e);
      }
      continue;
    }
    c.halfspaces.equations = right_nullspace(generator_matrix(c.rays));
    for (auto f : c.facets) {
      std::vector<RationalVector> eq, ineq;
      for (auto r : c.rays)
        (std::binary_search(faces_[f].rays.begin(), faces_[f].rays.end(), r) ? eq : ineq).push_back(to_rational(rays_[r]));
      c.halfspaces.inequalities.push_back(primitive_multiple(relative_interior_point(rank_, eq, ineq).point));
    }
  }
  for (std::size_t i = 0; i < faces_.size(); ++i)
    if (faces_[i].dim + 1 == rank_) walls_.push_back(i);
}

inline void Fan::check_pairwise(const std::vector<RaySet>& max_sets) const {
  for (std::size_t i = 0; i < max_sets.size(); ++i)
    for (std::size_t j = i + 1; j < max_sets.size(); ++j) {
      RaySet common;
      std::set_intersection(max_sets[i].begin(), max_sets[i].end(), max_sets[j].begin(), max_sets[j].end(),
                            std::back_inserter(common));
      if (common == max_sets[i] || common == max_sets[j])
        throw FanError("maximal cone " + std::to_string(common == max_sets[i] ? i : j) + " is a face of maximal cone " +
                       std::to_string(common == max_sets[i] ? j : i));
      std::vector<RationalVector> eq, ineq;
      for (auto r : common) eq.push_back(to_rational(rays_[r]));
      for (auto r : max_sets[i])
        if (!std::binary_search(common.begin(), common.end(), r)) ineq.push_back(to_rational(rays_[r]));
      for (auto r : max_sets[j])
        if (!std::binary_search(common.begin(), common.end(), r)) {
          auto v = to_rational(rays_[r]);
          for (auto& x : v) x = -x;
          ineq.push_back(v);
        }
      auto rip = relative_interior_point(rank_, eq, ineq);
      if (!rip.implicit_equalities.empty())
        throw FanError("maximal cones " + std::to_string(i) + " " + detail::raylist(max_sets[i]) + " and " +
                       std::to_string(j) + " " + detail::raylist(max_sets[j]) +
                       " intersect in a non-face (their intersection is not the cone over their common rays " +
                       detail::raylist(common) + ")");
    }
}

inline void Fan::compute_completeness() {
  complete_ = false;
  for (auto k : max_faces_)
    if (faces_[k].dim != rank_) return;
  if (rank_ == 1) {
    complete_ = rays_.size() == 2 && max_faces_.size() == 2 && rays_[0][0] == -rays_[1][0];
    return;
  }
  // Dual graph.
  for (std::size_t w = 0; w < walls_.size(); ++w) {
    const auto& m = faces_[walls_[w]].maximal;
    if (m.size() != 2) return;
    dual_edges_.push_back(DualEdge{w, std::min(m[0], m[1]), std::max(m[0], m[1])});
  }
  {
    std::vector<bool> seen(max_faces_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      auto c = stack.back();
      stack.pop_back();
      for (const auto& e : dual_edges_) {
        std::size_t other = e.from == c ? e.to : e.to == c ? e.from : max_faces_.size();
        if (other < max_faces_.size() && !seen[other]) {
          seen[other] = true;
          stack.push_back(other);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      dual_edges_.clear();
      return;
    }
  }
  if (rank_ == 2) {
    std::vector<std::array<std::int64_t, 2>> pts;
    for (const auto& r : rays_i64_) pts.push_back({r[0], r[1]});
    std::vector<std::array<std::size_t, 2>> cones;
    for (auto k : max_faces_) {
      if (faces_[k].rays.size() != 2) return;
      cones.push_back({faces_[k].rays[0], faces_[k].rays[1]});
    }
    complete_ = detail::planar_complete(pts, cones);
    if (!complete_) dual_edges_.clear();
    return;
  }
  if (rank_ != 3) {
    dual_edges_.clear();
    throw FanError("completeness check requires rank <= 3");
  }
  links_.assign(rays_.size(), {});
  for (std::size_t r = 0; r < rays_.size(); ++r) {
    const auto& ray_cone = faces_[ray_face_[r]];
    std::vector<std::size_t> incident_walls;
    for (std::size_t w = 0; w < walls_.size(); ++w)
      if (std::binary_search(faces_[walls_[w]].rays.begin(), faces_[walls_[w]].rays.end(), r)) incident_walls.push_back(w);
    const auto& incident_cones = ray_cone.maximal;
    const std::size_t start = *std::min_element(incident_cones.begin(), incident_cones.end());
    // Walk the link.
    std::vector<LinkStep> steps;
    std::size_t cur = start, came_by = walls_.size();
    std::set<std::size_t> visited;
    for (;;) {
      if (visited.count(cur)) break;
      visited.insert(cur);
      std::size_t exit = walls_.size();
      for (auto w : incident_walls) {
        const auto& m = faces_[walls_[w]].maximal;
        if (w != came_by && (m[0] == cur || m[1] == cur)) {
          exit = w;
          break;  // walls are in index order, so this is the lowest one
        }
      }
      if (exit == walls_.size()) {
        dual_edges_.clear();
        links_.clear();
        return;
      }
      steps.push_back(LinkStep{cur, exit});
      const auto& m = faces_[walls_[exit]].maximal;
      came_by = exit;
      cur = m[0] == cur ? m[1] : m[0];
    }
    if (cur != start || visited.size() != incident_cones.size() || steps.size() != incident_walls.size()) {
      dual_edges_.clear();
      links_.clear();
      return;
    }
    // The link must be a complete planar fan in the quotient by the ray.
    const auto q = integer_kernel(generator_matrix(RaySet{r}));
    auto project = [&](std::size_t other) {
      std::array<std::int64_t, 2> p{};
      for (std::size_t i = 0; i < 2; ++i) p[i] = detail::to_i64(dot<Integer>(q[i], rays_[other]));
      return p;
    };
    std::vector<std::array<std::int64_t, 2>> pts;
    std::map<std::size_t, std::size_t> wall_to_pt;
    for (auto w : incident_walls) {
      const auto& wr = faces_[walls_[w]].rays;
      const std::size_t other = wr[0] == r ? wr[1] : wr[0];
      wall_to_pt[w] = pts.size();
      pts.push_back(project(other));
    }
    std::vector<std::array<std::size_t, 2>> cones;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const std::size_t in = steps[(s + steps.size() - 1) % steps.size()].wall;
      cones.push_back({wall_to_pt[in], wall_to_pt[steps[s].wall]});
    }
    if (!detail::planar_complete(pts, cones)) {
      dual_edges_.clear();
      links_.clear();
      return;
    }
    links_[r] = std::move(steps);
  }
  complete_ = true;
}

inline Star Fan::star(std::size_t face_id) const {
  Star s;
  s.base = face_id;
  const auto& base = faces_.at(face_id);
  for (std::size_t i = 0; i < faces_.size(); ++i)
    if (is_face_of(face_id, i)) s.cells.push_back(i);
  s.quotient_map = IntegerMatrix(0, rank_);
  for (const auto& row : integer_kernel(generator_matrix(base.rays))) s.quotient_map.append_row(row);
  const std::size_t qrank = s.quotient_map.rows();
  if (qrank == 0) {
    s.cell_to_quotient_face[face_id] = 0;
    return s;
  }
  // Rays of the star: cones of dimension dim(base)+1 containing the base.
  std::vector<IntegerVector> qrays;
  std::map<std::size_t, std::size_t> cone_to_qray;
  for (auto c : s.cells) {
    if (faces_[c].dim != base.dim + 1) continue;
    std::size_t other = faces_[c].rays.size();
    for (auto r : faces_[c].rays)
      if (!std::binary_search(base.rays.begin(), base.rays.end(), r)) {
        other = r;
        break;
      }
    IntegerVector img(qrank);
    for (std::size_t i = 0; i < qrank; ++i) img[i] = dot<Integer>(s.quotient_map.row(i), rays_[other]);
    cone_to_qray[c] = qrays.size();
    qrays.push_back(primitive(img));
  }
  std::vector<std::vector<std::size_t>> qcones;
  for (std::size_t k = 0; k < max_faces_.size(); ++k) {
    if (!is_face_of(face_id, max_faces_[k])) continue;
    std::vector<std::size_t> rs;
    for (const auto& [c, qi] : cone_to_qray)
      if (is_face_of(c, max_faces_[k])) rs.push_back(qi);
    qcones.push_back(rs);
  }
  auto fan = std::make_shared<Fan>(Fan::from_data(qrank, qrays, qcones));
  for (auto c : s.cells) {
    RaySet rs;
    for (const auto& [cc, qi] : cone_to_qray)
      if (is_face_of(cc, c)) rs.push_back(qi);
    std::sort(rs.begin(), rs.end());
    auto id = fan->face_id(rs);
    if (!id) throw FanError("internal: star cell has no image face");
    s.cell_to_quotient_face[c] = *id;
  }
  s.quotient = std::move(fan);
  return s;
}

}  // namespace fanbranch
