#pragma once

// Degree-d maximal covers of a complete rank-3 fan from permutation
// assignments on the non-tree edges of a spanning tree of the dual graph.

#include <fanbranch/cover.hpp>
#include <fanbranch/fan.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanbranch {

class MonodromyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Permutation of {0..d-1} in one-line notation.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::size_t d) : image_(d) { std::iota(image_.begin(), image_.end(), 0); }
  explicit Permutation(std::vector<std::uint8_t> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (auto x : image_) {
      if (x >= image_.size() || seen[x]) throw MonodromyError("not a permutation");
      seen[x] = true;
    }
  }
  static Permutation from(const std::vector<int>& image) {
    std::vector<std::uint8_t> v;
    for (int x : image) {
      if (x < 0 || x > 255) throw MonodromyError("not a permutation");
      v.push_back(static_cast<std::uint8_t>(x));
    }
    return Permutation(std::move(v));
  }

  std::size_t degree() const { return image_.size(); }
  std::size_t operator()(std::size_t i) const { return image_[i]; }
  const std::vector<std::uint8_t>& image() const { return image_; }

  /// (a * b)(i) = a(b(i)).
  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    Permutation out;
    out.image_.resize(b.image_.size());
    for (std::size_t i = 0; i < b.image_.size(); ++i) out.image_[i] = a.image_[b.image_[i]];
    return out;
  }
  Permutation inverse() const {
    Permutation out;
    out.image_.resize(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) out.image_[image_[i]] = static_cast<std::uint8_t>(i);
    return out;
  }
  bool is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] != i) return false;
    return true;
  }
  bool operator==(const Permutation& o) const = default;
  auto operator<=>(const Permutation& o) const = default;

  std::vector<std::vector<std::size_t>> cycles() const {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(image_.size(), false);
    for (std::size_t i = 0; i < image_.size(); ++i) {
      if (seen[i]) continue;
      std::vector<std::size_t> cyc;
      for (std::size_t j = i; !seen[j]; j = image_[j]) {
        seen[j] = true;
        cyc.push_back(j);
      }
      out.push_back(std::move(cyc));
    }
    return out;
  }
  /// Cycle lengths, longest first.
  std::vector<std::size_t> cycle_type() const {
    std::vector<std::size_t> t;
    for (const auto& c : cycles()) t.push_back(c.size());
    std::sort(t.rbegin(), t.rend());
    return t;
  }
  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < image_.size(); ++i) os << (i ? "," : "") << int(image_[i]);
    os << ']';
    return os.str();
  }

 private:
  std::vector<std::uint8_t> image_;
};

/// All permutations of degree d in lexicographic order of images.
inline std::vector<Permutation> all_permutations(std::size_t d) {
  std::vector<std::uint8_t> v(d);
  std::iota(v.begin(), v.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

struct DualSpanningTree {
  std::size_t root = 0;
  std::vector<std::size_t> tree_walls;
  std::vector<std::size_t> non_tree_walls;  // in wall index order
  std::vector<std::optional<std::size_t>> generator_of_wall;
};

inline DualSpanningTree spanning_tree(const Fan& fan) {
  if (fan.rank() != 3 || !fan.complete()) throw MonodromyError("spanning tree needs a complete rank-3 fan");
  DualSpanningTree t;
  std::vector<bool> seen(fan.num_max_cones(), false), in_tree(fan.num_walls(), false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    auto c = q.front();
    q.pop();
    for (const auto& e : fan.dual_edges()) {
      if (e.from != c && e.to != c) continue;
      const auto other = e.from == c ? e.to : e.from;
      if (seen[other]) continue;
      seen[other] = true;
      in_tree[e.wall] = true;
      t.tree_walls.push_back(e.wall);
      q.push(other);
    }
  }
  t.generator_of_wall.assign(fan.num_walls(), std::nullopt);
  for (std::size_t w = 0; w < fan.num_walls(); ++w)
    if (!in_tree[w]) {
      t.generator_of_wall[w] = t.non_tree_walls.size();
      t.non_tree_walls.push_back(w);
    }
  return t;
}

struct MonodromyAssignment {
  std::size_t degree = 1;
  std::vector<Permutation> perms;  // one per non-tree wall
  bool operator==(const MonodromyAssignment& o) const = default;
  auto operator<=>(const MonodromyAssignment& o) const = default;
};

inline std::uint64_t factorial(std::size_t d) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= d; ++i) f *= i;
  return f;
}

inline std::uint64_t assignment_count(const DualSpanningTree& t, std::size_t d) {
  const std::uint64_t base = factorial(d);
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < t.non_tree_walls.size(); ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / base) throw MonodromyError("assignment count overflows 64 bits");
    n *= base;
  }
  return n;
}

/// The index-th assignment in lexicographic order of permutation words; the
/// first non-tree wall is the most significant position.
inline MonodromyAssignment assignment_at(const DualSpanningTree& t, const std::vector<Permutation>& perms,
                                         std::size_t d, std::uint64_t index) {
  MonodromyAssignment a;
  a.degree = d;
  const std::size_t k = t.non_tree_walls.size();
  a.perms.assign(k, Permutation(d));
  for (std::size_t i = k; i-- > 0;) {
    a.perms[i] = perms[index % perms.size()];
    index /= perms.size();
  }
  return a;
}

inline std::uint64_t assignment_index(const std::vector<Permutation>& perms, const MonodromyAssignment& a) {
  std::uint64_t idx = 0;
  for (const auto& p : a.perms) {
    auto it = std::lower_bound(perms.begin(), perms.end(), p);
    idx = idx * perms.size() + static_cast<std::uint64_t>(it - perms.begin());
  }
  return idx;
}

/// Streams every assignment; the callback returns false to stop early.
inline void enumerate_assignments(const DualSpanningTree& t, std::size_t d,
                                  const std::function<bool(std::uint64_t, const MonodromyAssignment&)>& fn) {
  if (d < 1) throw MonodromyError("degree must be at least 1");
  const auto perms = all_permutations(d);
  const auto total = assignment_count(t, d);
  const std::size_t k = t.non_tree_walls.size();
  std::vector<std::size_t> digits(k, 0);
  MonodromyAssignment a;
  a.degree = d;
  a.perms.assign(k, perms[0]);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    if (!fn(idx, a)) return;
    for (std::size_t i = k; i-- > 0;) {
      if (++digits[i] < perms.size()) {
        a.perms[i] = perms[digits[i]];
        break;
      }
      digits[i] = 0;
      a.perms[i] = perms[0];
    }
  }
}

/// Sheet bookkeeping derived from an assignment: wall transitions, ray
/// monodromies and the ray cell each (maximal cone, sheet) lies over.
struct SheetData {
  std::size_t degree = 1;
  std::vector<Permutation> wall_perm;      // h_e, oriented from lower to higher cone index
  std::vector<Permutation> ray_monodromy;  // at the ray's reference cone
  // orbit[ray][cone * d + sheet]: index of the cycle of the ray monodromy, or npos
  std::vector<std::vector<std::size_t>> orbit;
  std::vector<std::vector<std::size_t>> orbit_sizes;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

inline SheetData sheet_data(const Fan& fan, const DualSpanningTree& t, const MonodromyAssignment& a) {
  const std::size_t d = a.degree;
  if (a.perms.size() != t.non_tree_walls.size()) throw MonodromyError("assignment length does not match the spanning tree");
  for (const auto& p : a.perms)
    if (p.degree() != d) throw MonodromyError("permutation degree mismatch");
  SheetData s;
  s.degree = d;
  s.wall_perm.assign(fan.num_walls(), Permutation(d));
  for (std::size_t g = 0; g < t.non_tree_walls.size(); ++g) s.wall_perm[t.non_tree_walls[g]] = a.perms[g];
  const auto& edges = fan.dual_edges();
  const std::size_t m = fan.num_max_cones();
  s.ray_monodromy.resize(fan.num_rays());
  s.orbit.assign(fan.num_rays(), std::vector<std::size_t>(m * d, SheetData::npos));
  s.orbit_sizes.resize(fan.num_rays());
  for (std::size_t r = 0; r < fan.num_rays(); ++r) {
    const auto& steps = fan.link(r);
    // transport[k] maps sheets at the reference cone to sheets at step k's cone.
    std::vector<Permutation> transport;
    Permutation g(d);
    for (const auto& st : steps) {
      transport.push_back(g);
      const auto& e = edges[st.wall];
      const auto& h = s.wall_perm[st.wall];
      g = (e.from == st.max_cone ? h : h.inverse()) * g;
    }
    s.ray_monodromy[r] = g;
    const auto cycles = g.cycles();
    std::vector<std::size_t> cycle_of(d);
    for (std::size_t c = 0; c < cycles.size(); ++c) {
      s.orbit_sizes[r].push_back(cycles[c].size());
      for (auto x : cycles[c]) cycle_of[x] = c;
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto inv = transport[k].inverse();
      for (std::size_t sh = 0; sh < d; ++sh) s.orbit[r][steps[k].max_cone * d + sh] = cycle_of[inv(sh)];
    }
  }
  return s;
}

inline Permutation ray_monodromy(const Fan& fan, const DualSpanningTree& t, const MonodromyAssignment& a,
                                 std::size_t ray) {
  return sheet_data(fan, t, a).ray_monodromy.at(ray);
}

/// Rays with nontrivial monodromy.
inline std::vector<std::size_t> branch_rays(const SheetData& s) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < s.ray_monodromy.size(); ++r)
    if (!s.ray_monodromy[r].is_identity()) out.push_back(r);
  return out;
}

/// Cell layout of a monodromy-built cover, in creation order.
struct BuiltCover {
  std::shared_ptr<const CoverPoset> cover;
  SheetData sheets;
  std::vector<std::vector<std::size_t>> ray_cell;  // [ray][orbit]
  std::vector<std::size_t> max_cell;               // [cone * d + sheet]
};

inline BuiltCover build_cover_detailed(const std::shared_ptr<const Fan>& fan, const DualSpanningTree& t,
                                       const MonodromyAssignment& a) {
  BuiltCover out;
  out.sheets = sheet_data(*fan, t, a);
  const auto& s = out.sheets;
  const std::size_t d = s.degree;
  auto cover = std::make_shared<CoverPoset>(fan);
  const auto root = cover->add_cell(fan->zero_face(), 0, d);
  out.ray_cell.resize(fan->num_rays());
  for (std::size_t r = 0; r < fan->num_rays(); ++r)
    for (std::size_t o = 0; o < s.orbit_sizes[r].size(); ++o) {
      const auto id = cover->add_cell(fan->ray_face(r), o, s.orbit_sizes[r][o]);
      cover->add_face(root, id);
      out.ray_cell[r].push_back(id);
    }
  const auto& edges = fan->dual_edges();
  std::vector<std::size_t> wall_cell(fan->num_walls() * d);
  for (std::size_t w = 0; w < fan->num_walls(); ++w) {
    const auto from = edges[w].from;
    for (std::size_t sh = 0; sh < d; ++sh) {
      const auto id = cover->add_cell(fan->wall_face(w), sh, 1);
      wall_cell[w * d + sh] = id;
      for (auto r : fan->wall(w).rays) cover->add_face(out.ray_cell[r][s.orbit[r][from * d + sh]], id);
    }
  }
  out.max_cell.resize(fan->num_max_cones() * d);
  for (std::size_t k = 0; k < fan->num_max_cones(); ++k)
    for (std::size_t sh = 0; sh < d; ++sh) {
      const auto id = cover->add_cell(fan->max_cone_face(k), sh, 1);
      out.max_cell[k * d + sh] = id;
      for (auto f : fan->max_cone(k).facets) {
        const auto w = *fan->wall_index(f);
        const auto wsheet = edges[w].from == k ? sh : s.wall_perm[w].inverse()(sh);
        cover->add_face(wall_cell[w * d + wsheet], id);
      }
    }
  out.cover = std::move(cover);
  return out;
}

inline CoverPoset build_cover(const std::shared_ptr<const Fan>& fan, const DualSpanningTree& t,
                              const MonodromyAssignment& a) {
  return *build_cover_detailed(fan, t, a).cover;
}

/// Lexicographically least simultaneous conjugate g a g^-1.
inline MonodromyAssignment canonical_class(const MonodromyAssignment& a) {
  MonodromyAssignment best = a;
  for (const auto& g : all_permutations(a.degree)) {
    const auto gi = g.inverse();
    MonodromyAssignment c;
    c.degree = a.degree;
    for (const auto& p : a.perms) c.perms.push_back(g * p * gi);
    if (c < best) best = std::move(c);
  }
  return best;
}

/// First degree-2 assignment whose branch rays are exactly `rays`.
inline std::optional<MonodromyAssignment> assignment_for_branch_set(const Fan& fan, const DualSpanningTree& t,
                                                                    std::vector<std::size_t> rays) {
  std::sort(rays.begin(), rays.end());
  std::optional<MonodromyAssignment> found;
  enumerate_assignments(t, 2, [&](std::uint64_t, const MonodromyAssignment& a) {
    if (branch_rays(sheet_data(fan, t, a)) == rays) {
      found = a;
      return false;
    }
    return true;
  });
  return found;
}

/// Ray permutations carrying the set of maximal cones to itself.
inline std::vector<std::vector<std::size_t>> combinatorial_automorphisms(const Fan& fan) {
  std::set<RaySet> cones;
  for (std::size_t k = 0; k < fan.num_max_cones(); ++k) cones.insert(fan.max_cone(k).rays);
  std::vector<std::size_t> p(fan.num_rays());
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  if (fan.num_rays() > 10) throw MonodromyError("automorphism search limited to 10 rays");
  do {
    bool ok = true;
    for (const auto& c : cones) {
      RaySet img;
      for (auto r : c) img.push_back(p[r]);
      std::sort(img.begin(), img.end());
      if (!cones.count(img)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

struct BranchCensus {
  std::uint64_t assignments = 0;
  std::map<std::vector<std::size_t>, std::uint64_t> branch_sets;  // branch set -> assignment count
  std::vector<std::vector<std::size_t>> admissible;  // nonempty, no two adjacent rays
  std::vector<std::vector<std::vector<std::size_t>>> orbits;  // admissible sets by symmetry orbit
};

inline bool has_adjacent_pair(const Fan& fan, const std::vector<std::size_t>& rays) {
  for (std::size_t i = 0; i < rays.size(); ++i)
    for (std::size_t j = i + 1; j < rays.size(); ++j)
      if (fan.adjacent_rays(rays[i], rays[j])) return true;
  return false;
}

inline BranchCensus branch_census(const Fan& fan, const DualSpanningTree& t, std::size_t d) {
  BranchCensus c;
  enumerate_assignments(t, d, [&](std::uint64_t, const MonodromyAssignment& a) {
    ++c.assignments;
    ++c.branch_sets[branch_rays(sheet_data(fan, t, a))];
    return true;
  });
  for (const auto& [set, n] : c.branch_sets)
    if (!set.empty() && !has_adjacent_pair(fan, set)) c.admissible.push_back(set);
  const auto autos = combinatorial_automorphisms(fan);
  std::set<std::vector<std::size_t>> placed;
  for (const auto& set : c.admissible) {
    if (placed.count(set)) continue;
    std::set<std::vector<std::size_t>> orbit;
    for (const auto& p : autos) {
      std::vector<std::size_t> img;
      for (auto r : set) img.push_back(p[r]);
      std::sort(img.begin(), img.end());
      orbit.insert(img);
    }
    std::vector<std::vector<std::size_t>> members;
    for (const auto& o : orbit)
      if (std::find(c.admissible.begin(), c.admissible.end(), o) != c.admissible.end()) {
        members.push_back(o);
        placed.insert(o);
      }
    c.orbits.push_back(std::move(members));
  }
  std::sort(c.orbits.begin(), c.orbits.end(), [](const auto& x, const auto& y) {
    return std::make_pair(x.front().size(), x.size()) < std::make_pair(y.front().size(), y.size());
  });
  return c;
}

}  // namespace fanbranch
