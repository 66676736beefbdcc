#pragma once

// Branched covers of a fan as weighted cell posets. A cell sits over one cone
// of the base fan; face relations are stored as covering pairs (facet, cell).

#include <fanbranch/fan.hpp>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fanbranch {

class CoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CoverCell {
  std::size_t base = 0;  // face id in the base fan
  std::size_t copy = 0;
  std::uint64_t weight = 1;
};

struct CoverViolation {
  std::string axiom;  // "rooted", "local-isomorphism", "trace", "degree", "structure"
  std::optional<std::size_t> cell;
  std::string message;
};

struct CoverReport {
  std::vector<CoverViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (const auto& v : violations) {
      os << "axiom " << v.axiom;
      if (v.cell) os << " at cell " << *v.cell;
      os << ": " << v.message << "\n";
    }
    return os.str();
  }
};

class CoverPoset {
 public:
  CoverPoset() = default;
  explicit CoverPoset(std::shared_ptr<const Fan> fan) : fan_(std::move(fan)) {
    if (!fan_) throw CoverError("cover needs a base fan");
  }

  std::size_t add_cell(std::size_t base, std::size_t copy, std::uint64_t weight) {
    if (base >= fan_->num_faces()) throw CoverError("cell base " + std::to_string(base) + " is not a cone of the fan");
    if (weight == 0) throw CoverError("cell weights must be positive");
    cells_.push_back(CoverCell{base, copy, weight});
    facets_.emplace_back();
    cofacets_.emplace_back();
    return cells_.size() - 1;
  }

  /// Records that `lower` is a facet of `upper`.
  void add_face(std::size_t lower, std::size_t upper) {
    if (lower >= cells_.size() || upper >= cells_.size()) throw CoverError("face relation names an unknown cell");
    facets_[upper].push_back(lower);
    cofacets_[lower].push_back(upper);
  }

  const Fan& fan() const { return *fan_; }
  const std::shared_ptr<const Fan>& fan_ptr() const { return fan_; }
  std::size_t size() const { return cells_.size(); }
  const CoverCell& cell(std::size_t i) const { return cells_.at(i); }
  const std::vector<CoverCell>& cells() const { return cells_; }
  const std::vector<std::size_t>& facets(std::size_t i) const { return facets_.at(i); }
  const std::vector<std::size_t>& cofacets(std::size_t i) const { return cofacets_.at(i); }
  std::size_t dim(std::size_t i) const { return fan_->face(cells_.at(i).base).dim; }

  std::optional<std::size_t> minimal_cell() const {
    std::optional<std::size_t> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].base == fan_->zero_face()) {
        if (out) return std::nullopt;
        out = i;
      }
    return out;
  }

  std::uint64_t degree() const {
    auto m = minimal_cell();
    if (!m) throw CoverError("cover has no unique minimal cell");
    return cells_[*m].weight;
  }

  std::vector<std::size_t> cells_over(std::size_t face) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].base == face) out.push_back(i);
    return out;
  }

  /// Cells lying over maximal cones of the base fan.
  std::vector<std::size_t> top_cells() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (fan_->max_cone_index(cells_[i].base)) out.push_back(i);
    return out;
  }

  /// The unique cell in the down-set of `x` lying over the face `face`.
  std::size_t below(std::size_t x, std::size_t face) const {
    const auto& target = fan_->face(face).rays;
    std::size_t cur = x;
    while (cells_[cur].base != face) {
      std::size_t next = cells_.size();
      for (auto f : facets_[cur])
        if (detail::subset_of(target, fan_->face(cells_[f].base).rays)) {
          next = f;
          break;
        }
      if (next == cells_.size())
        throw CoverError("cell " + std::to_string(x) + " has no face over cone " + std::to_string(face));
      cur = next;
    }
    return cur;
  }

  std::vector<std::size_t> down_set(std::size_t x) const { return closure(x, facets_); }
  std::vector<std::size_t> up_set(std::size_t x) const { return closure(x, cofacets_); }

  std::vector<std::size_t> ramification_cells() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].base != fan_->zero_face() && cells_[i].weight > 1) out.push_back(i);
    return out;
  }

  /// Alternating count of nonminimal cells: rays - walls + maximal cells in rank 3.
  long euler_characteristic() const {
    long chi = 0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const auto d = dim(i);
      if (d == 0) continue;
      chi += (d % 2 == 1) ? 1 : -1;
    }
    return chi;
  }

  /// Connected components of the nonminimal cells (wedge summands).
  std::vector<std::vector<std::size_t>> wedge_summands() const {
    std::vector<std::size_t> comp(cells_.size(), cells_.size());
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      if (dim(s) == 0 || comp[s] != cells_.size()) continue;
      std::vector<std::size_t> stack{s}, members;
      comp[s] = out.size();
      while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        members.push_back(c);
        auto visit = [&](std::size_t n) {
          if (dim(n) != 0 && comp[n] == cells_.size()) {
            comp[n] = out.size();
            stack.push_back(n);
          }
        };
        for (auto n : facets_[c]) visit(n);
        for (auto n : cofacets_[c]) visit(n);
      }
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
    return out;
  }

  /// Sub-cover on one wedge summand, with a fresh minimal cell of weight
  /// equal to the summand's sheet count.
  CoverPoset restrict_to(const std::vector<std::size_t>& summand) const;

  std::string summary() const {
    std::ostringstream os;
    std::map<std::size_t, std::size_t> by_dim;
    for (std::size_t i = 0; i < cells_.size(); ++i) ++by_dim[dim(i)];
    os << "degree " << degree() << ", cells by dimension:";
    for (const auto& [d, n] : by_dim) os << " " << d << ":" << n;
    return os.str();
  }

 private:
  std::vector<std::size_t> closure(std::size_t x, const std::vector<std::vector<std::size_t>>& adj) const {
    std::vector<bool> seen(cells_.size(), false);
    std::vector<std::size_t> stack{x}, out;
    seen[x] = true;
    while (!stack.empty()) {
      auto c = stack.back();
      stack.pop_back();
      out.push_back(c);
      for (auto n : adj[c])
        if (!seen[n]) {
          seen[n] = true;
          stack.push_back(n);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::shared_ptr<const Fan> fan_;
  std::vector<CoverCell> cells_;
  std::vector<std::vector<std::size_t>> facets_;
  std::vector<std::vector<std::size_t>> cofacets_;
};

inline CoverPoset CoverPoset::restrict_to(const std::vector<std::size_t>& summand) const {
  CoverPoset out(fan_);
  std::map<std::size_t, std::size_t> remap;
  std::uint64_t sheets = 0;
  for (auto c : summand)
    if (fan_->max_cone_index(cells_[c].base) && cells_[c].base == fan_->max_cone_face(0)) sheets += cells_[c].weight;
  const std::size_t root = out.add_cell(fan_->zero_face(), 0, sheets);
  for (auto c : summand) remap[c] = out.add_cell(cells_[c].base, cells_[c].copy, cells_[c].weight);
  for (auto c : summand)
    for (auto f : facets_[c]) {
      auto it = remap.find(f);
      out.add_face(it == remap.end() ? root : it->second, remap.at(c));
    }
  return out;
}

/// Checks the poset axioms: unique minimal cell, down-sets isomorphic to the
/// base face posets, constant weight traces on up-sets, and the degree.
inline CoverReport validate_cover(const CoverPoset& c) {
  CoverReport rep;
  const Fan& fan = c.fan();
  auto fail = [&](std::string axiom, std::optional<std::size_t> cell, std::string msg) {
    rep.violations.push_back(CoverViolation{std::move(axiom), cell, std::move(msg)});
  };
  std::set<std::pair<std::size_t, std::size_t>> ids;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!ids.insert({c.cell(i).base, c.cell(i).copy}).second)
      fail("structure", i, "duplicate (base, copy) pair");

  std::size_t minimal_count = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.cell(i).base == fan.zero_face()) ++minimal_count;
  if (minimal_count != 1) {
    fail("rooted", std::nullopt, "expected exactly one cell over the zero cone, found " + std::to_string(minimal_count));
    return rep;
  }

  // (b) facets of each cell project bijectively onto the facets of its base.
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& base = fan.face(c.cell(i).base);
    std::vector<std::size_t> images;
    for (auto f : c.facets(i)) images.push_back(c.cell(f).base);
    std::sort(images.begin(), images.end());
    auto expected = base.facets;
    std::sort(expected.begin(), expected.end());
    if (images != expected) {
      fail("local-isomorphism", i,
           "facets do not map bijectively onto the facets of base cone " + std::to_string(c.cell(i).base));
    }
  }
  if (!rep.ok()) return rep;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto down = c.down_set(i);
    const auto& base = fan.face(c.cell(i).base);
    std::set<std::size_t> images;
    for (auto y : down) images.insert(c.cell(y).base);
    std::size_t faces_of_base = 0;
    for (std::size_t f = 0; f < fan.num_faces(); ++f)
      if (detail::subset_of(fan.face(f).rays, base.rays)) ++faces_of_base;
    if (images.size() != down.size() || down.size() != faces_of_base)
      fail("local-isomorphism", i, "down-set is not isomorphic to the face poset of its base cone");
  }
  if (!rep.ok()) return rep;

  // (c) weight traces over the up-set are constant.
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto up = c.up_set(i);
    std::map<std::size_t, std::uint64_t> trace;
    for (std::size_t f = 0; f < fan.num_faces(); ++f)
      if (fan.is_face_of(c.cell(i).base, f)) trace[f] = 0;
    for (auto y : up) trace[c.cell(y).base] += c.cell(y).weight;
    for (const auto& [f, t] : trace)
      if (t != c.cell(i).weight) {
        fail("trace", i,
             "weight trace over cone " + std::to_string(f) + " is " + std::to_string(t) + ", expected " +
                 std::to_string(c.cell(i).weight));
        break;
      }
  }
  return rep;
}

/// Maximality over a complete rank-3 fan: unramified on maximal cones and
/// walls, and every ray cell has a connected link.
inline bool is_maximal(const CoverPoset& c) {
  const Fan& fan = c.fan();
  if (fan.rank() != 3 || !fan.complete()) throw CoverError("maximality test needs a complete rank-3 base fan");
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto d = c.dim(i);
    if ((d == 2 || d == 3) && c.cell(i).weight != 1) return false;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.dim(i) != 1) continue;
    std::vector<std::size_t> link;
    for (auto y : c.up_set(i))
      if (c.dim(y) >= 2) link.push_back(y);
    if (link.empty()) return false;
    std::set<std::size_t> members(link.begin(), link.end()), seen{link[0]};
    std::vector<std::size_t> stack{link[0]};
    while (!stack.empty()) {
      auto y = stack.back();
      stack.pop_back();
      auto visit = [&](std::size_t n) {
        if (members.count(n) && seen.insert(n).second) stack.push_back(n);
      };
      for (auto n : c.facets(y)) visit(n);
      for (auto n : c.cofacets(y)) visit(n);
    }
    if (seen.size() != members.size()) return false;
  }
  return true;
}

/// d copies of the fan glued along every cone: one cell per cone, weight d.
inline CoverPoset weighted_identity(std::shared_ptr<const Fan> fan, std::uint64_t d) {
  CoverPoset out(fan);
  for (std::size_t f = 0; f < fan->num_faces(); ++f) out.add_cell(f, 0, d);
  for (std::size_t f = 0; f < fan->num_faces(); ++f)
    for (auto g : fan->face(f).facets) out.add_face(g, f);
  return out;
}

inline CoverPoset wedge_sum(const CoverPoset& a, const CoverPoset& b) {
  if (a.fan_ptr() != b.fan_ptr() && !(a.fan().rays() == b.fan().rays() && a.fan().num_faces() == b.fan().num_faces()))
    throw CoverError("wedge sum needs covers of the same fan");
  CoverPoset out(a.fan_ptr());
  const std::size_t root = out.add_cell(a.fan().zero_face(), 0, a.degree() + b.degree());
  std::map<std::size_t, std::size_t> next_copy;
  auto copy_in = [&](const CoverPoset& c) {
    std::vector<std::size_t> remap(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.dim(i) == 0) {
        remap[i] = root;
        continue;
      }
      const auto base = c.cell(i).base;
      remap[i] = out.add_cell(base, next_copy[base]++, c.cell(i).weight);
    }
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.dim(i) != 0)
        for (auto f : c.facets(i)) out.add_face(remap[f], remap[i]);
  };
  copy_in(a);
  copy_in(b);
  return out;
}

/// Pairs of cells over the same cone, weights multiplied.
inline CoverPoset fibered_product(const CoverPoset& a, const CoverPoset& b) {
  if (a.fan_ptr() != b.fan_ptr() && !(a.fan().rays() == b.fan().rays() && a.fan().num_faces() == b.fan().num_faces()))
    throw CoverError("fibered product needs covers of the same fan");
  CoverPoset out(a.fan_ptr());
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> id;
  std::map<std::size_t, std::size_t> next_copy;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (a.cell(i).base == b.cell(j).base) {
        const auto base = a.cell(i).base;
        id[{i, j}] = out.add_cell(base, next_copy[base]++, a.cell(i).weight * b.cell(j).weight);
      }
  for (const auto& [pair, cell] : id)
    for (auto fi : a.facets(pair.first))
      for (auto fj : b.facets(pair.second)) {
        auto it = id.find({fi, fj});
        if (it != id.end()) out.add_face(it->second, cell);
      }
  return out;
}

/// Isomorphism of covers over the same fan, as a cell map a -> b.
inline std::optional<std::vector<std::size_t>> find_isomorphism(const CoverPoset& a, const CoverPoset& b) {
  if (a.size() != b.size()) return std::nullopt;
  const Fan& fan = a.fan();
  const auto tops_a = a.top_cells();
  const auto tops_b = b.top_cells();
  if (tops_a.size() != tops_b.size()) return std::nullopt;
  const std::size_t none = a.size();
  std::vector<std::size_t> map(a.size(), none), inverse(b.size(), none);
  std::vector<bool> used_top(b.size(), false);

  // Assigning a top cell fixes its whole down-set; returns the cells newly set.
  auto assign = [&](std::size_t x, std::size_t y, std::vector<std::size_t>& trail) {
    for (auto xa : a.down_set(x)) {
      const auto face = a.cell(xa).base;
      const auto yb = b.below(y, face);
      if (a.cell(xa).weight != b.cell(yb).weight) return false;
      if (map[xa] == none && inverse[yb] == none) {
        map[xa] = yb;
        inverse[yb] = xa;
        trail.push_back(xa);
      } else if (map[xa] != yb) {
        return false;
      }
    }
    return true;
  };
  std::function<bool(std::size_t)> search = [&](std::size_t k) {
    if (k == tops_a.size()) return true;
    const auto x = tops_a[k];
    for (auto y : tops_b) {
      if (used_top[y] || b.cell(y).base != a.cell(x).base || b.cell(y).weight != a.cell(x).weight) continue;
      std::vector<std::size_t> trail;
      if (assign(x, y, trail)) {
        used_top[y] = true;
        if (search(k + 1)) return true;
        used_top[y] = false;
      }
      for (auto t : trail) {
        inverse[map[t]] = none;
        map[t] = none;
      }
    }
    return false;
  };
  (void)fan;
  if (!search(0)) return std::nullopt;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (map[i] == none) return std::nullopt;
  // Face relations must correspond.
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<std::size_t> fa;
    for (auto f : a.facets(i)) fa.push_back(map[f]);
    auto fb = b.facets(map[i]);
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    if (fa != fb) return std::nullopt;
  }
  return map;
}

inline bool isomorphic(const CoverPoset& a, const CoverPoset& b) { return find_isomorphism(a, b).has_value(); }

}  // namespace fanbranch
