#pragma once

// Klyachko filtration data for toric vector bundles over Q, with splitting
// certificates per maximal cone.

#include <fanbranch/cover.hpp>
#include <fanbranch/exact_linalg.hpp>
#include <fanbranch/fan.hpp>
#include <fanbranch/pl.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
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

class KlyachkoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FiltrationStep {
  long threshold;  // the step's subspace is E(i) for previous threshold < i <= threshold
  Subspace space;
};

/// Decreasing filtration E(i): the full space for small i, zero above the last threshold.
class Filtration {
 public:
  Filtration() = default;

  /// Normalizes the steps (drops zero subspaces, merges repeats) and checks
  /// that thresholds increase and subspaces strictly decrease from the full space.
  static Filtration make(std::size_t r, std::vector<FiltrationStep> steps) {
    Filtration f;
    f.r_ = r;
    std::sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) { return a.threshold < b.threshold; });
    for (std::size_t j = 0; j < steps.size(); ++j) {
      if (steps[j].space.ambient_dim() != r) throw KlyachkoError("filtration subspace has wrong ambient dimension");
      if (j > 0 && steps[j].threshold == steps[j - 1].threshold) throw KlyachkoError("repeated filtration threshold");
      if (j > 0 && !steps[j - 1].space.contains(steps[j].space)) throw KlyachkoError("filtration is not decreasing");
    }
    for (auto& s : steps) {
      if (s.space.is_zero()) break;
      if (!f.steps_.empty() && f.steps_.back().space == s.space) {
        f.steps_.back().threshold = s.threshold;
        continue;
      }
      f.steps_.push_back(std::move(s));
    }
    if (!f.steps_.empty() && !f.steps_.front().space.is_full())
      throw KlyachkoError("filtration must equal the full space for small indices");
    return f;
  }

  /// Rank-r filtration with E(i) = E for i <= t and 0 above.
  static Filtration constant(std::size_t r, long t) { return make(r, {FiltrationStep{t, Subspace::full(r)}}); }

  std::size_t rank() const { return r_; }
  const std::vector<FiltrationStep>& steps() const { return steps_; }

  Subspace at(long i) const {
    for (const auto& s : steps_)
      if (i <= s.threshold) return s.space;
    return Subspace::zero(r_);
  }

  bool operator==(const Filtration& o) const {
    if (r_ != o.r_ || steps_.size() != o.steps_.size()) return false;
    for (std::size_t j = 0; j < steps_.size(); ++j)
      if (steps_[j].threshold != o.steps_[j].threshold || !(steps_[j].space == o.steps_[j].space)) return false;
    return true;
  }

  std::string str() const {
    std::ostringstream os;
    long prev = 0;
    for (std::size_t j = 0; j < steps_.size(); ++j) {
      if (j == 0)
        os << "i <= " << steps_[j].threshold;
      else
        os << "; " << prev << " < i <= " << steps_[j].threshold;
      os << ": " << steps_[j].space.str();
      prev = steps_[j].threshold;
    }
    if (steps_.empty()) os << "zero";
    return os.str();
  }

 private:
  std::size_t r_ = 0;
  std::vector<FiltrationStep> steps_;
};

struct KlyachkoData {
  std::shared_ptr<const Fan> fan;
  std::size_t rank = 0;
  std::vector<Filtration> filtrations;  // one per ray
};

struct SplitPiece {
  IntegerVector u;
  Subspace space;
};

struct SplittingCertificate {
  std::vector<std::vector<SplitPiece>> cones;  // per maximal cone
};

struct KlyachkoViolation {
  std::size_t cone = 0;
  std::optional<std::size_t> ray;
  std::optional<long> index;
  std::string message;
};

struct KlyachkoReport {
  std::optional<KlyachkoViolation> violation;
  bool ok() const { return !violation.has_value(); }
  std::string str() const {
    if (ok()) return "ok";
    std::ostringstream os;
    os << "cone " << violation->cone;
    if (violation->ray) os << ", ray " << *violation->ray;
    if (violation->index) os << ", i = " << *violation->index;
    os << ": " << violation->message;
    return os.str();
  }
};

inline KlyachkoData make_data(std::shared_ptr<const Fan> fan, std::size_t r, std::vector<Filtration> filtrations) {
  if (filtrations.size() != fan->num_rays()) throw KlyachkoError("need one filtration per ray");
  for (const auto& f : filtrations)
    if (f.rank() != r) throw KlyachkoError("filtration rank mismatch");
  return KlyachkoData{std::move(fan), r, std::move(filtrations)};
}

inline KlyachkoReport verify(const KlyachkoData& data, const SplittingCertificate& cert) {
  KlyachkoReport rep;
  const Fan& fan = *data.fan;
  auto fail = [&](std::size_t cone, std::optional<std::size_t> ray, std::optional<long> i, std::string msg) {
    rep.violation = KlyachkoViolation{cone, ray, i, std::move(msg)};
    return rep;
  };
  if (cert.cones.size() != fan.num_max_cones())
    return fail(0, std::nullopt, std::nullopt, "certificate must cover every maximal cone");
  for (std::size_t k = 0; k < fan.num_max_cones(); ++k) {
    const auto& pieces = cert.cones[k];
    std::size_t total = 0;
    std::vector<Subspace> parts;
    for (const auto& p : pieces) {
      if (p.u.size() != fan.rank()) return fail(k, std::nullopt, std::nullopt, "functional has wrong length");
      if (p.space.ambient_dim() != data.rank) return fail(k, std::nullopt, std::nullopt, "piece has wrong ambient dimension");
      total += p.space.dim();
      parts.push_back(p.space);
    }
    if (total != data.rank || !sum_all(data.rank, parts).is_full())
      return fail(k, std::nullopt, std::nullopt, "pieces do not form a direct sum decomposition");
    for (auto r : fan.max_cone(k).rays) {
      const auto& filt = data.filtrations[r];
      std::vector<long> values;
      std::set<long> checkpoints;
      for (const auto& p : pieces) {
        const auto val = dot<Integer>(p.u, fan.ray(r)).get_si();
        values.push_back(val);
        checkpoints.insert(val);
        checkpoints.insert(val + 1);
      }
      for (const auto& s : filt.steps()) {
        checkpoints.insert(s.threshold);
        checkpoints.insert(s.threshold + 1);
      }
      if (!checkpoints.empty()) checkpoints.insert(*checkpoints.begin() - 1);
      for (long i : checkpoints) {
        std::vector<Subspace> active;
        for (std::size_t j = 0; j < pieces.size(); ++j)
          if (values[j] >= i) active.push_back(pieces[j].space);
        if (!(sum_all(data.rank, active) == filt.at(i)))
          return fail(k, r, i,
                      "E(i) = " + filt.at(i).str() + " differs from the certificate sum " +
                          sum_all(data.rank, active).str());
      }
    }
  }
  return rep;
}

/// Values of a functional on the rays of a cone, the class of u in M_sigma.
inline std::vector<long> restrict_values(const Fan& fan, const RaySet& rays, const IntegerVector& u) {
  std::vector<long> out;
  for (auto r : rays) out.push_back(dot<Integer>(u, fan.ray(r)).get_si());
  return out;
}

struct DimensionCheck {
  enum Status { ok, violation } status = ok;
  std::string message;
  // Recovered multisets per maximal cone: (functional, multiplicity).
  std::vector<std::vector<std::pair<IntegerVector, std::uint64_t>>> multisets;
  static constexpr const char* annotation = "inconclusive: necessary condition only";
};

namespace detail {

/// An integral u with <u, v_rho> = a_rho for the rays of the cone, if any.
inline std::optional<IntegerVector> integral_functional(const Fan& fan, const RaySet& rays, const std::vector<long>& a) {
  const std::size_t n = fan.rank();
  IntegerMatrix m(rays.size(), n + 1);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = fan.ray(rays[i])[j];
    m(i, n) = -a[i];
  }
  // Kernel vectors with last coordinate 1 give solutions; the last coordinates
  // of a lattice basis generate the ideal of achievable values.
  const auto ker = integer_kernel(m);
  Integer g = 0;
  std::vector<Integer> coeffs;
  for (const auto& k : ker) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k[n].get_mpz_t());
  if (g != 1) return std::nullopt;
  // Extended gcd combination of the basis vectors.
  IntegerVector sol(n + 1);
  Integer cur = 0;
  for (const auto& k : ker) {
    if (k[n] == 0) continue;
    if (cur == 0) {
      sol = k;
      cur = k[n];
      continue;
    }
    Integer gg, s, t;
    mpz_gcdext(gg.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), cur.get_mpz_t(), k[n].get_mpz_t());
    for (std::size_t j = 0; j <= n; ++j) sol[j] = s * sol[j] + t * k[j];
    cur = gg;
  }
  if (cur < 0)
    for (auto& x : sol) x = -x;
  sol.resize(n);
  return sol;
}

}  // namespace detail

/// Certificate-free screen: Moebius inversion of intersection dimensions over
/// the grid of jump values must give nonnegative multiplicities supported on
/// integral functionals.
inline DimensionCheck necessary_dimension_check(const KlyachkoData& data) {
  DimensionCheck out;
  const Fan& fan = *data.fan;
  out.multisets.resize(fan.num_max_cones());
  for (std::size_t k = 0; k < fan.num_max_cones(); ++k) {
    const auto& rays = fan.max_cone(k).rays;
    const std::size_t q = rays.size();
    std::vector<std::vector<long>> jumps(q);
    for (std::size_t i = 0; i < q; ++i) {
      for (const auto& s : data.filtrations[rays[i]].steps()) jumps[i].push_back(s.threshold);
      if (jumps[i].empty()) {
        out.status = DimensionCheck::violation;
        out.message = "ray " + std::to_string(rays[i]) + " has the zero filtration";
        return out;
      }
    }
    // D(index tuple), with index == size meaning "above the last jump" (zero).
    std::map<std::vector<std::size_t>, long> dims;
    auto dim_at = [&](const std::vector<std::size_t>& idx) -> long {
      auto it = dims.find(idx);
      if (it != dims.end()) return it->second;
      Subspace s = Subspace::full(data.rank);
      for (std::size_t i = 0; i < q; ++i) {
        if (idx[i] >= jumps[i].size()) {
          s = Subspace::zero(data.rank);
          break;
        }
        s = intersect(s, data.filtrations[rays[i]].at(jumps[i][idx[i]]));
      }
      return dims[idx] = static_cast<long>(s.dim());
    };
    std::vector<std::size_t> idx(q, 0);
    std::uint64_t total = 0;
    for (;;) {
      long m = 0;
      for (std::uint32_t mask = 0; mask < (1u << q); ++mask) {
        auto j = idx;
        int sign = 1;
        for (std::size_t i = 0; i < q; ++i)
          if (mask & (1u << i)) {
            ++j[i];
            sign = -sign;
          }
        m += sign * dim_at(j);
      }
      if (m < 0) {
        out.status = DimensionCheck::violation;
        out.message = "maximal cone " + std::to_string(k) + ": negative multiplicity forced";
        return out;
      }
      if (m > 0) {
        std::vector<long> a;
        for (std::size_t i = 0; i < q; ++i) a.push_back(jumps[i][idx[i]]);
        auto u = detail::integral_functional(fan, rays, a);
        if (!u) {
          out.status = DimensionCheck::violation;
          out.message = "maximal cone " + std::to_string(k) + ": jump values are not induced by an integral functional";
          return out;
        }
        out.multisets[k].emplace_back(*u, static_cast<std::uint64_t>(m));
        total += static_cast<std::uint64_t>(m);
      }
      std::size_t i = 0;
      while (i < q && ++idx[i] == jumps[i].size()) idx[i++] = 0;
      if (i == q) break;
    }
    if (total != data.rank) {
      out.status = DimensionCheck::violation;
      out.message = "maximal cone " + std::to_string(k) + ": multiplicities do not add up to the rank";
      return out;
    }
    std::sort(out.multisets[k].begin(), out.multisets[k].end());
  }
  return out;
}

inline Filtration dual(const Filtration& f) {
  const auto& s = f.steps();
  std::vector<FiltrationStep> out;
  if (s.empty()) return Filtration::make(f.rank(), {});
  out.push_back(FiltrationStep{-s.back().threshold, Subspace::full(f.rank())});
  for (std::size_t m = s.size() - 1; m >= 1; --m) out.push_back(FiltrationStep{-s[m - 1].threshold, s[m].space.annihilator()});
  return Filtration::make(f.rank(), std::move(out));
}

inline KlyachkoData dual(const KlyachkoData& d) {
  KlyachkoData out{d.fan, d.rank, {}};
  for (const auto& f : d.filtrations) out.filtrations.push_back(dual(f));
  return out;
}

inline SplittingCertificate dual(const SplittingCertificate& c, std::size_t r) {
  SplittingCertificate out;
  for (const auto& pieces : c.cones) {
    std::vector<SplitPiece> dp;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      std::vector<Subspace> others;
      for (std::size_t l = 0; l < pieces.size(); ++l)
        if (l != j) others.push_back(pieces[l].space);
      IntegerVector u = pieces[j].u;
      for (auto& x : u) x = -x;
      dp.push_back(SplitPiece{u, sum_all(r, others).annihilator()});
    }
    out.cones.push_back(std::move(dp));
  }
  return out;
}

namespace detail {

inline Subspace embed(const Subspace& s, std::size_t offset, std::size_t total) {
  std::vector<RationalVector> vs;
  for (const auto& v : s.vectors()) {
    RationalVector w(total);
    for (std::size_t i = 0; i < v.size(); ++i) w[offset + i] = v[i];
    vs.push_back(w);
  }
  return Subspace::span(total, vs);
}

inline const std::vector<SplitPiece>& pieces_at(const KlyachkoData& data, const SplittingCertificate& cert,
                                                std::span<const Rational> v) {
  auto k = data.fan->locate(v);
  if (!k) throw KlyachkoError("point " + to_string(RationalVector(v.begin(), v.end())) + " lies outside the fan support");
  return cert.cones.at(*k);
}

}  // namespace detail

inline std::pair<KlyachkoData, SplittingCertificate> direct_sum(const KlyachkoData& a, const SplittingCertificate& ca,
                                                                const KlyachkoData& b, const SplittingCertificate& cb) {
  if (a.fan != b.fan) throw KlyachkoError("direct sum needs data over the same fan");
  const std::size_t r = a.rank + b.rank;
  KlyachkoData out{a.fan, r, {}};
  for (std::size_t ray = 0; ray < a.filtrations.size(); ++ray) {
    std::set<long> ts;
    for (const auto& s : a.filtrations[ray].steps()) ts.insert(s.threshold);
    for (const auto& s : b.filtrations[ray].steps()) ts.insert(s.threshold);
    std::vector<FiltrationStep> steps;
    for (long t : ts)
      steps.push_back(FiltrationStep{t, sum(detail::embed(a.filtrations[ray].at(t), 0, r),
                                            detail::embed(b.filtrations[ray].at(t), a.rank, r))});
    out.filtrations.push_back(Filtration::make(r, std::move(steps)));
  }
  SplittingCertificate cert;
  for (std::size_t k = 0; k < ca.cones.size(); ++k) {
    std::vector<SplitPiece> ps;
    for (const auto& p : ca.cones[k]) ps.push_back(SplitPiece{p.u, detail::embed(p.space, 0, r)});
    for (const auto& p : cb.cones[k]) ps.push_back(SplitPiece{p.u, detail::embed(p.space, a.rank, r)});
    cert.cones.push_back(std::move(ps));
  }
  return {out, cert};
}

/// E^v(t): sum of the certificate pieces with <u, v> >= t.
inline Subspace interpolate(const KlyachkoData& data, const SplittingCertificate& cert, std::span<const Rational> v,
                            const Rational& t) {
  std::vector<Subspace> parts;
  for (const auto& p : detail::pieces_at(data, cert, v))
    if (dot<Rational>(to_rational(p.u), v) >= t) parts.push_back(p.space);
  return sum_all(data.rank, parts);
}

/// Distinct nonzero subspaces among the E^v(t), smallest first.
inline std::vector<Subspace> flag(const KlyachkoData& data, const SplittingCertificate& cert, std::span<const Rational> v) {
  std::set<Rational> values;
  for (const auto& p : detail::pieces_at(data, cert, v)) values.insert(dot<Rational>(to_rational(p.u), v));
  std::vector<Subspace> out;
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    auto s = interpolate(data, cert, v, *it);
    if (!s.is_zero() && (out.empty() || !(out.back() == s))) out.push_back(s);
  }
  return out;
}

/// Filtration at a lattice point, read off the interpolation.
inline Filtration filtration_at(const KlyachkoData& data, const SplittingCertificate& cert, std::span<const Rational> v) {
  std::set<long> values;
  for (const auto& p : detail::pieces_at(data, cert, v)) {
    const Rational val = dot<Rational>(to_rational(p.u), v);
    if (val.get_den() != 1) throw KlyachkoError("non-integral pairing at a lattice point");
    values.insert(val.get_num().get_si());
  }
  std::vector<FiltrationStep> steps;
  for (long c : values) steps.push_back(FiltrationStep{c, interpolate(data, cert, v, Rational(c))});
  return Filtration::make(data.rank, std::move(steps));
}

/// Pullback along phi: N' -> N (an n x n' integer matrix) to the fan `target`.
inline std::pair<KlyachkoData, SplittingCertificate> pullback(const KlyachkoData& data, const SplittingCertificate& cert,
                                                              const IntegerMatrix& phi,
                                                              std::shared_ptr<const Fan> target) {
  const Fan& src = *data.fan;
  if (phi.rows() != src.rank() || phi.cols() != target->rank()) throw KlyachkoError("lattice map has wrong shape");
  auto image = [&](const IntegerVector& v) {
    RationalVector w(src.rank());
    for (std::size_t i = 0; i < src.rank(); ++i) {
      Integer acc = 0;
      for (std::size_t j = 0; j < v.size(); ++j) acc += phi(i, j) * v[j];
      w[i] = acc;
    }
    return w;
  };
  KlyachkoData out{target, data.rank, {}};
  SplittingCertificate oc;
  for (std::size_t k = 0; k < target->num_max_cones(); ++k) {
    const auto& rays = target->max_cone(k).rays;
    std::optional<std::size_t> host;
    for (std::size_t s = 0; s < src.num_max_cones() && !host; ++s) {
      bool all = true;
      for (auto r : rays) all = all && src.max_cone(s).halfspaces.contains(std::span<const Rational>(image(target->ray(r))));
      if (all) host = s;
    }
    if (!host) throw KlyachkoError("maximal cone " + std::to_string(k) + " of the target is not mapped into a cone");
    std::map<IntegerVector, std::vector<Subspace>> merged;
    for (const auto& p : cert.cones[*host]) {
      IntegerVector pu(target->rank());
      for (std::size_t j = 0; j < target->rank(); ++j) {
        Integer acc = 0;
        for (std::size_t i = 0; i < src.rank(); ++i) acc += phi(i, j) * p.u[i];
        pu[j] = acc;
      }
      merged[pu].push_back(p.space);
    }
    std::vector<SplitPiece> ps;
    for (const auto& [u, spaces] : merged) ps.push_back(SplitPiece{u, sum_all(data.rank, spaces)});
    oc.cones.push_back(std::move(ps));
  }
  for (std::size_t r = 0; r < target->num_rays(); ++r) {
    const auto w = image(target->ray(r));
    out.filtrations.push_back(filtration_at(data, cert, w));
  }
  return {out, oc};
}

struct BundleCover {
  std::shared_ptr<const CoverPoset> cover;
  PLFunction psi;
};

/// The cover Delta_E with cells (cone, class of u) and its function Psi_E.
inline BundleCover branched_cover_of(const KlyachkoData& data, const SplittingCertificate& cert) {
  const auto rep = verify(data, cert);
  if (!rep.ok()) throw KlyachkoError("certificate does not verify: " + rep.str());
  const Fan& fan = *data.fan;
  auto cover = std::make_shared<CoverPoset>(data.fan);
  // weights[face][class] from the lowest-index maximal cone containing the face
  std::vector<std::map<std::vector<long>, std::uint64_t>> classes(fan.num_faces());
  for (std::size_t f = 0; f < fan.num_faces(); ++f) {
    const auto& face = fan.face(f);
    bool first = true;
    for (auto k : face.maximal) {
      std::map<std::vector<long>, std::uint64_t> here;
      for (const auto& p : cert.cones[k]) here[restrict_values(fan, face.rays, p.u)] += p.space.dim();
      if (first)
        classes[f] = here;
      else if (here != classes[f])
        throw KlyachkoError("multisets disagree on face " + detail::raylist(face.rays));
      first = false;
    }
  }
  std::vector<std::map<std::vector<long>, std::size_t>> cell_of(fan.num_faces());
  for (std::size_t f = 0; f < fan.num_faces(); ++f) {
    std::size_t copy = 0;
    for (const auto& [cls, w] : classes[f]) cell_of[f][cls] = cover->add_cell(f, copy++, w);
  }
  for (std::size_t f = 0; f < fan.num_faces(); ++f) {
    const auto& face = fan.face(f);
    for (const auto& [cls, cell] : cell_of[f])
      for (auto g : face.facets) {
        std::vector<long> sub;
        for (std::size_t i = 0; i < face.rays.size(); ++i)
          if (std::binary_search(fan.face(g).rays.begin(), fan.face(g).rays.end(), face.rays[i])) sub.push_back(cls[i]);
        cover->add_face(cell_of[g].at(sub), cell);
      }
  }
  PLFunction psi;
  psi.cover = cover;
  for (std::size_t k = 0; k < fan.num_max_cones(); ++k) {
    const auto f = fan.max_cone_face(k);
    for (const auto& p : cert.cones[k]) psi.u[cell_of[f].at(restrict_values(fan, fan.face(f).rays, p.u))] = to_rational(p.u);
  }
  return BundleCover{cover, psi};
}

/// Polynomials in the coordinates of N with integer coefficients.
using Monomial = std::vector<unsigned>;
using Polynomial = std::map<Monomial, Integer>;

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out[m] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

/// i-th elementary symmetric function of the linear forms in the multiset.
inline Polynomial elementary_symmetric(const std::vector<std::pair<IntegerVector, std::uint64_t>>& ms, std::size_t i,
                                       std::size_t n) {
  // e[j] accumulates coefficients of s^j in prod (1 + s * l_u).
  std::vector<Polynomial> e(i + 1);
  e[0][Monomial(n, 0)] = 1;
  for (const auto& [u, mult] : ms) {
    Polynomial lin;
    for (std::size_t j = 0; j < n; ++j)
      if (u[j] != 0) {
        Monomial m(n, 0);
        m[j] = 1;
        lin[m] = u[j];
      }
    for (std::uint64_t c = 0; c < mult; ++c)
      for (std::size_t j = i; j >= 1; --j) {
        auto add = poly_mul(e[j - 1], lin);
        for (const auto& [m, v] : add) e[j][m] += v;
        for (auto it = e[j].begin(); it != e[j].end();) it = it->second == 0 ? e[j].erase(it) : std::next(it);
      }
  }
  return e[i];
}

inline std::string format_polynomial(const Polynomial& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    const auto& [m, c] = *it;
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    const Integer a = abs(c);
    bool constant = std::all_of(m.begin(), m.end(), [](unsigned e) { return e == 0; });
    if (a != 1 || constant) os << a.get_str();
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m[j] > 0) {
        os << "x" << (j + 1);
        if (m[j] > 1) os << "^" << m[j];
      }
    first = false;
  }
  return os.str();
}

struct ChernData {
  std::size_t lattice_rank = 0;
  std::vector<std::vector<std::pair<IntegerVector, std::uint64_t>>> multisets;  // per maximal cone, sorted
  bool operator==(const ChernData& o) const = default;

  Polynomial chern(std::size_t cone, std::size_t i) const {
    return elementary_symmetric(multisets.at(cone), i, lattice_rank);
  }
};

inline ChernData chern(const KlyachkoData& data, const SplittingCertificate& cert) {
  const auto rep = verify(data, cert);
  if (!rep.ok()) throw KlyachkoError("certificate does not verify: " + rep.str());
  ChernData out;
  out.lattice_rank = data.fan->rank();
  for (const auto& pieces : cert.cones) {
    std::map<IntegerVector, std::uint64_t> m;
    for (const auto& p : pieces) m[p.u] += p.space.dim();
    out.multisets.emplace_back(m.begin(), m.end());
  }
  return out;
}

inline bool equal_chern(const ChernData& a, const ChernData& b) { return a == b; }

inline bool is_trivial_chern(const KlyachkoData& data, const SplittingCertificate& cert) {
  detail::require_full_dimensional(*data.fan);
  const auto c = chern(data, cert);
  for (const auto& m : c.multisets)
    if (m != c.multisets.front()) return false;
  return true;
}

}  // namespace fanbranch
