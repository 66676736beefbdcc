#pragma once

// Piecewise-linear functions on branched covers: one linear functional per
// top cell, agreeing on shared faces.

#include <fanbranch/cover.hpp>
#include <fanbranch/exact_linalg.hpp>
#include <fanbranch/fan.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanbranch {

class PLError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PLFunction {
  std::shared_ptr<const CoverPoset> cover;
  std::map<std::size_t, RationalVector> u;  // top cell id -> functional

  PLFunction operator+(const PLFunction& o) const {
    PLFunction out{cover, u};
    for (auto& [c, v] : out.u)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.u.at(c)[i];
    return out;
  }
  PLFunction scaled(const Rational& s) const {
    PLFunction out{cover, u};
    for (auto& [c, v] : out.u)
      for (auto& x : v) x *= s;
    return out;
  }
  bool operator==(const PLFunction& o) const { return u == o.u; }
};

enum class SolveMode { rational, integral };

struct PLBasis {
  std::shared_ptr<const CoverPoset> cover;
  std::vector<PLFunction> functions;
  std::size_t dim = 0;
  std::size_t pullback_count = 0;  // leading entries that are pullbacks of coordinate functionals
};

struct ConeMultiset {
  std::size_t cone = 0;  // maximal cone index of the base fan
  std::map<RationalVector, std::uint64_t> entries;
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [u, n] : entries) t += n;
    return t;
  }
  bool operator==(const ConeMultiset& o) const { return entries == o.entries; }
};

namespace detail {

inline void require_full_dimensional(const Fan& fan) {
  for (std::size_t k = 0; k < fan.num_max_cones(); ++k)
    if (fan.max_cone(k).dim != fan.rank())
      throw PLError("maximal cone " + std::to_string(k) + " is not full-dimensional");
}

/// Solves G u = z where the rows of G are the generators of a full-dimensional cone.
inline RationalVector functional_from_values(const IntegerMatrix& g, const RationalVector& z) {
  const std::size_t n = g.cols();
  RationalMatrix aug(g.rows(), n + 1);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = g(i, j);
    aug(i, n) = z[i];
  }
  auto r = rref_with_pivots(aug);
  if (r.rank != n || (!r.pivot_cols.empty() && r.pivot_cols.back() == n))
    throw PLError("ray values are not induced by a linear functional");
  RationalVector u(n);
  for (std::size_t i = 0; i < n; ++i) u[r.pivot_cols[i]] = r.reduced(i, n);
  return u;
}

}  // namespace detail

/// The per-cone relation rows: values at the ray cells of each top cell
/// satisfy the linear relations among its base cone's generators.
struct ValuesAtRays {
  std::vector<std::size_t> ray_cells;        // column order
  std::vector<std::vector<long>> rows;       // small integer coefficients
  RationalMatrix matrix() const {
    RationalMatrix m(rows.size(), ray_cells.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < ray_cells.size(); ++j) m(i, j) = rows[i][j];
    return m;
  }
};

class PLSystem {
 public:
  explicit PLSystem(const Fan& fan) {
    detail::require_full_dimensional(fan);
    for (std::size_t k = 0; k < fan.num_max_cones(); ++k) {
      relations_.push_back(fan.wall_relation(k));
      generators_.push_back(fan.generator_matrix(fan.max_cone(k).rays));
    }
  }

  const std::vector<IntegerVector>& relations(std::size_t cone) const { return relations_.at(cone); }
  const IntegerMatrix& generators(std::size_t cone) const { return generators_.at(cone); }

  ValuesAtRays values_at_rays(const CoverPoset& c) const {
    const Fan& fan = c.fan();
    ValuesAtRays out;
    std::vector<std::size_t> column(c.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.dim(i) == 1) {
        column[i] = out.ray_cells.size();
        out.ray_cells.push_back(i);
      }
    for (auto top : c.top_cells()) {
      const auto k = *fan.max_cone_index(c.cell(top).base);
      const auto& rays = fan.max_cone(k).rays;
      std::vector<std::size_t> cols;
      for (auto r : rays) cols.push_back(column[c.below(top, fan.ray_face(r))]);
      for (const auto& rel : relations_[k]) {
        std::vector<long> row(out.ray_cells.size(), 0);
        for (std::size_t i = 0; i < rays.size(); ++i) {
          if (!rel[i].fits_slong_p()) throw PLError("relation coefficient too large");
          row[cols[i]] += rel[i].get_si();
        }
        out.rows.push_back(std::move(row));
      }
    }
    return out;
  }

  /// Columns: n entries per top cell, then one per ray cell.
  IntegerMatrix per_cell_matrix(const CoverPoset& c, std::vector<std::size_t>* tops = nullptr,
                                std::vector<std::size_t>* ray_cells = nullptr) const {
    const Fan& fan = c.fan();
    const std::size_t n = fan.rank();
    const auto top = c.top_cells();
    std::vector<std::size_t> rc, column(c.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.dim(i) == 1) {
        column[i] = rc.size();
        rc.push_back(i);
      }
    IntegerMatrix m(0, n * top.size() + rc.size());
    for (std::size_t t = 0; t < top.size(); ++t) {
      const auto k = *fan.max_cone_index(c.cell(top[t]).base);
      for (auto r : fan.max_cone(k).rays) {
        IntegerVector row(m.cols());
        for (std::size_t j = 0; j < n; ++j) row[t * n + j] = fan.ray(r)[j];
        row[n * top.size() + column[c.below(top[t], fan.ray_face(r))]] = -1;
        m.append_row(row);
      }
    }
    if (tops) *tops = top;
    if (ray_cells) *ray_cells = rc;
    return m;
  }

  /// Dimension of PL(cover) tensor Q, via the values-at-rays system.
  std::size_t dimension(const CoverPoset& c) const {
    const auto v = values_at_rays(c);
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& r : v.rows) rows.emplace_back(r.begin(), r.end());
    const auto fast = small_rank(rows);
    const std::size_t r = fast ? *fast : rank(v.matrix());
    return v.ray_cells.size() - r;
  }

  PLFunction from_ray_values(const std::shared_ptr<const CoverPoset>& c, const std::vector<std::size_t>& ray_cells,
                             const RationalVector& z) const {
    const Fan& fan = c->fan();
    std::vector<std::size_t> column(c->size(), c->size());
    for (std::size_t i = 0; i < ray_cells.size(); ++i) column[ray_cells[i]] = i;
    PLFunction f;
    f.cover = c;
    for (auto top : c->top_cells()) {
      const auto k = *fan.max_cone_index(c->cell(top).base);
      RationalVector vals;
      for (auto r : fan.max_cone(k).rays) vals.push_back(z[column[c->below(top, fan.ray_face(r))]]);
      f.u[top] = detail::functional_from_values(generators_[k], vals);
    }
    return f;
  }

 private:
  std::vector<std::vector<IntegerVector>> relations_;
  std::vector<IntegerMatrix> generators_;
};

inline PLFunction pullback(const std::shared_ptr<const CoverPoset>& c, const RationalVector& u) {
  PLFunction f;
  f.cover = c;
  for (auto top : c->top_cells()) f.u[top] = u;
  return f;
}

inline PLFunction pullback(const std::shared_ptr<const CoverPoset>& c, const IntegerVector& u) {
  return pullback(c, to_rational(u));
}

inline PLFunction zero_function(const std::shared_ptr<const CoverPoset>& c) {
  return pullback(c, RationalVector(c->fan().rank()));
}

/// Every pair of top cells agrees on the rays of each common face cell.
inline bool is_consistent(const PLFunction& f) {
  const auto& c = *f.cover;
  const Fan& fan = c.fan();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.dim(i) == 0) continue;
    std::optional<RationalVector> ref;
    for (auto y : c.up_set(i)) {
      auto it = f.u.find(y);
      if (it == f.u.end()) continue;
      if (!ref) {
        ref = it->second;
        continue;
      }
      for (auto r : fan.face(c.cell(i).base).rays) {
        const auto v = to_rational(fan.ray(r));
        if (dot<Rational>(*ref, v) != dot<Rational>(it->second, v)) return false;
      }
    }
  }
  return true;
}

inline PLBasis solve(const std::shared_ptr<const CoverPoset>& c, SolveMode mode = SolveMode::rational) {
  const Fan& fan = c->fan();
  const std::size_t n = fan.rank();
  PLSystem sys(fan);
  PLBasis out;
  out.cover = c;
  if (mode == SolveMode::integral) {
    std::vector<std::size_t> tops;
    const auto m = sys.per_cell_matrix(*c, &tops);
    for (const auto& x : integer_kernel(m)) {
      PLFunction f;
      f.cover = c;
      for (std::size_t t = 0; t < tops.size(); ++t) {
        RationalVector u(n);
        for (std::size_t j = 0; j < n; ++j) u[j] = x[t * n + j];
        f.u[tops[t]] = u;
      }
      out.functions.push_back(std::move(f));
    }
    out.dim = out.functions.size();
    return out;
  }
  const auto v = sys.values_at_rays(*c);
  const auto kernel = right_nullspace(v.matrix());
  out.dim = kernel.size();
  // Pullbacks of the coordinate functionals first, then kernel vectors that
  // enlarge the span.
  std::vector<RationalVector> chosen;
  RationalMatrix span(0, v.ray_cells.size());
  auto try_add = [&](const RationalVector& z) {
    RationalMatrix trial = span;
    trial.append_row(z);
    if (rank(trial) == span.rows() + 1) {
      span = std::move(trial);
      chosen.push_back(z);
      return true;
    }
    return false;
  };
  for (std::size_t j = 0; j < n && chosen.size() < out.dim; ++j) {
    RationalVector z(v.ray_cells.size());
    for (std::size_t i = 0; i < v.ray_cells.size(); ++i) {
      const auto r = fan.face(c->cell(v.ray_cells[i]).base).rays[0];
      z[i] = fan.ray(r)[j];
    }
    if (try_add(z)) ++out.pullback_count;
  }
  for (const auto& k : kernel) {
    if (chosen.size() == out.dim) break;
    try_add(to_rational(k));
  }
  for (const auto& z : chosen) out.functions.push_back(sys.from_ray_values(c, v.ray_cells, z));
  return out;
}

inline std::vector<ConeMultiset> multisets(const PLFunction& f) {
  const auto& c = *f.cover;
  const Fan& fan = c.fan();
  std::vector<ConeMultiset> out(fan.num_max_cones());
  for (std::size_t k = 0; k < out.size(); ++k) out[k].cone = k;
  for (const auto& [cell, u] : f.u) out[*fan.max_cone_index(c.cell(cell).base)].entries[u] += c.cell(cell).weight;
  return out;
}

inline bool is_trivial_function(const PLFunction& f) {
  const auto ms = multisets(f);
  for (std::size_t k = 1; k < ms.size(); ++k)
    if (!(ms[k] == ms[0])) return false;
  return true;
}

inline Rational evaluate(const PLFunction& f, std::size_t cell, std::span<const Rational> point) {
  const auto& c = *f.cover;
  const Fan& fan = c.fan();
  if (!fan.face(c.cell(cell).base).halfspaces.contains(point))
    throw PLError("point lies outside the base cone of cell " + std::to_string(cell));
  for (auto y : c.up_set(cell)) {
    auto it = f.u.find(y);
    if (it != f.u.end()) return dot<Rational>(it->second, point);
  }
  throw PLError("cell " + std::to_string(cell) + " lies below no top cell");
}

/// A PL function whose multiset over each maximal cone k is `table[k]`, if
/// the functionals can be placed on the top cells consistently.
inline std::optional<PLFunction> realize_multisets(const std::shared_ptr<const CoverPoset>& c,
                                                   const std::vector<std::vector<RationalVector>>& table) {
  const Fan& fan = c->fan();
  if (table.size() != fan.num_max_cones()) throw PLError("need one multiset per maximal cone");
  std::vector<std::vector<std::size_t>> tops(fan.num_max_cones());
  for (auto t : c->top_cells()) {
    if (c->cell(t).weight != 1) throw PLError("multiset placement needs unramified top cells");
    tops[*fan.max_cone_index(c->cell(t).base)].push_back(t);
  }
  for (std::size_t k = 0; k < tops.size(); ++k)
    if (tops[k].size() != table[k].size()) return std::nullopt;
  std::map<std::size_t, Rational> value;  // ray cell -> value
  PLFunction f;
  f.cover = c;
  std::function<bool(std::size_t)> place = [&](std::size_t k) {
    if (k == tops.size()) return true;
    auto order = table[k];
    std::sort(order.begin(), order.end());
    do {
      std::vector<std::size_t> added;
      bool ok = true;
      for (std::size_t i = 0; i < order.size() && ok; ++i)
        for (auto r : fan.max_cone(k).rays) {
          const auto cell = c->below(tops[k][i], fan.ray_face(r));
          const Rational val = dot<Rational>(order[i], to_rational(fan.ray(r)));
          auto it = value.find(cell);
          if (it == value.end()) {
            value[cell] = val;
            added.push_back(cell);
          } else if (it->second != val) {
            ok = false;
            break;
          }
        }
      if (ok) {
        for (std::size_t i = 0; i < order.size(); ++i) f.u[tops[k][i]] = order[i];
        if (place(k + 1)) return true;
      }
      for (auto a : added) value.erase(a);
    } while (std::next_permutation(order.begin(), order.end()));
    return false;
  };
  if (!place(0)) return std::nullopt;
  return f;
}

enum class VerdictKind { pullbacks_only, wedge_of_pullbacks, matched_pattern, nontrivial };

inline const char* verdict_tag(VerdictKind k) {
  switch (k) {
    case VerdictKind::pullbacks_only: return "pullbacks-only";
    case VerdictKind::wedge_of_pullbacks: return "wedge-of-pullbacks";
    case VerdictKind::matched_pattern: return "matched-pattern";
    case VerdictKind::nontrivial: return "nontrivial";
  }
  return "?";
}

struct Verdict {
  VerdictKind kind = VerdictKind::pullbacks_only;
  std::size_t dim = 0;
  std::optional<PLFunction> witness;  // nontrivial function, or the generic element for matched patterns
  // matched patterns: for each maximal cone, top cells matched to those over cone 0
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pattern;
  bool all_trivial() const { return kind != VerdictKind::nontrivial; }
  std::string tag() const { return verdict_tag(kind); }
};

namespace detail {

/// Sorts the top cells over each cone by the generic functional and pairs
/// them with the cells over cone 0.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> matching(const PLFunction& f) {
  const auto& c = *f.cover;
  const Fan& fan = c.fan();
  std::vector<std::vector<std::pair<RationalVector, std::size_t>>> by_cone(fan.num_max_cones());
  for (const auto& [cell, u] : f.u)
    for (std::uint64_t w = 0; w < c.cell(cell).weight; ++w) by_cone[*fan.max_cone_index(c.cell(cell).base)].emplace_back(u, cell);
  for (auto& v : by_cone) std::sort(v.begin(), v.end());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out(fan.num_max_cones());
  for (std::size_t k = 0; k < by_cone.size(); ++k)
    for (std::size_t i = 0; i < by_cone[k].size() && i < by_cone[0].size(); ++i)
      out[k].emplace_back(by_cone[k][i].second, by_cone[0][i].second);
  return out;
}

inline bool respects(const PLFunction& f, const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& pattern) {
  for (const auto& cone : pattern)
    for (const auto& [a, b] : cone)
      if (f.u.at(a) != f.u.at(b)) return false;
  return true;
}

}  // namespace detail

/// Decides whether every PL function on the cover is trivial.
inline Verdict group_triviality(const std::shared_ptr<const CoverPoset>& c, const PLSystem& sys) {
  const std::size_t n = c->fan().rank();
  Verdict v;
  v.dim = sys.dimension(*c);
  if (v.dim == n) {
    v.kind = VerdictKind::pullbacks_only;
    return v;
  }
  const auto summands = c->wedge_summands();
  if (summands.size() > 1 && v.dim == n * summands.size()) {
    // Values-at-rays rows never mix summands, so each summand has dimension n.
    v.kind = VerdictKind::wedge_of_pullbacks;
    return v;
  }
  const auto basis = solve(c);
  std::vector<PLFunction> ints;
  Integer maxabs = 0;
  for (const auto& b : basis.functions) {
    Integer den = 1;
    for (const auto& [cell, u] : b.u)
      for (const auto& x : u) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    auto s = b.scaled(Rational(den));
    for (const auto& [cell, u] : s.u)
      for (const auto& x : u) {
        Integer a = abs(x.get_num());
        if (a > maxabs) maxabs = a;
      }
    ints.push_back(std::move(s));
  }
  // Base-t expansion with t > 2 maxabs: equal values of the generic element
  // force equal values of every basis element.
  const Integer t = 2 * maxabs + 2;
  Integer power = 1;
  PLFunction generic = zero_function(c);
  for (const auto& b : ints) {
    generic = generic + b.scaled(Rational(power));
    power *= t;
  }
  if (!is_trivial_function(generic)) {
    v.kind = VerdictKind::nontrivial;
    v.witness = generic;
    return v;
  }
  v.pattern = detail::matching(generic);
  bool certified = true;
  for (const auto& b : ints)
    if (!detail::respects(b, v.pattern)) certified = false;
  if (certified) {
    v.kind = VerdictKind::matched_pattern;
    v.witness = generic;
    return v;
  }
  for (long s = 1;; ++s)
    for (const auto& b : ints) {
      auto cand = generic + b.scaled(Rational(s));
      if (!is_trivial_function(cand)) {
        v.kind = VerdictKind::nontrivial;
        v.witness = cand;
        v.pattern.clear();
        return v;
      }
    }
}

inline Verdict group_triviality(const std::shared_ptr<const CoverPoset>& c) { return group_triviality(c, PLSystem(c->fan())); }

inline std::string format_function(const PLFunction& f) {
  std::ostringstream os;
  const auto& c = *f.cover;
  for (const auto& [cell, u] : f.u) {
    os << "  cell " << cell << " over maximal cone " << *c.fan().max_cone_index(c.cell(cell).base) << " copy "
       << c.cell(cell).copy << ": " << to_string(u) << "\n";
  }
  return os.str();
}

inline std::string format_multiset(const ConeMultiset& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [u, k] : m.entries) {
    os << (first ? "" : ", ") << to_string(u);
    if (k > 1) os << " x" << k;
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace fanbranch
