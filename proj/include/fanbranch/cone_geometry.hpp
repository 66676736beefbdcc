#pragma once

// LP-free exact geometry of small polyhedral cones. Everything here reduces
// to finding a relative-interior point of a cone of linear functionals
// {f : E f = 0, A f >= 0}, which is done by enumerating its extreme rays.

#include <fanbranch/exact_linalg.hpp>

#include <cstddef>
#include <functional>
#include <vector>

namespace fanbranch {

struct RelativeInteriorPoint {
  RationalVector point;
  /// Indices of the inequality rows that vanish on the whole cone.
  std::vector<std::size_t> implicit_equalities;
};

namespace detail {

inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Relative-interior point of {f in Q^n : equalities f = 0, inequalities f >= 0}.
/// The cone is never empty (it contains 0); the returned point is strictly
/// positive on every inequality that is not forced to vanish.
inline RelativeInteriorPoint relative_interior_point(std::size_t n, const std::vector<RationalVector>& equalities,
                                                     const std::vector<RationalVector>& inequalities) {
  // Parametrize the equality solution space: f = K^T y.
  RationalMatrix eq(0, n);
  for (const auto& e : equalities) eq.append_row(e);
  const auto kernel = right_nullspace(eq);
  const std::size_t p = kernel.size();

  // Inequalities in y-coordinates.
  const std::size_t m = inequalities.size();
  RationalMatrix a(m, p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      Rational acc = 0;
      for (std::size_t k = 0; k < n; ++k) acc += inequalities[i][k] * kernel[j][k];
      a(i, j) = acc;
    }

  RationalVector y(p);
  const std::size_t r = p == 0 ? 0 : rank(a);
  if (r > 0) {
    auto eval = [&](const RationalVector& z) {
      RationalVector out(m);
      for (std::size_t i = 0; i < m; ++i) {
        Rational acc = 0;
        for (std::size_t j = 0; j < p; ++j) acc += a(i, j) * z[j];
        out[i] = acc;
      }
      return out;
    };
    // Extreme rays modulo lineality: solutions of r-1 independent tight rows.
    detail::for_each_subset(m, r - 1, [&](const std::vector<std::size_t>& rows) {
      RationalMatrix sub(0, p);
      for (auto i : rows) sub.append_row(a.row(i));
      if (rank(sub) != r - 1) return;
      for (const auto& cand : right_nullspace(sub)) {
        RationalVector z(cand.begin(), cand.end());
        auto vals = eval(z);
        bool any_pos = false, any_neg = false;
        for (const auto& v : vals) {
          if (v > 0) any_pos = true;
          if (v < 0) any_neg = true;
        }
        if (any_pos == any_neg) continue;  // zero on all rows, or not one-signed
        const int sign = any_pos ? 1 : -1;
        for (std::size_t j = 0; j < p; ++j) y[j] += sign * z[j];
        break;
      }
    });
  }

  RelativeInteriorPoint out;
  out.point.assign(n, Rational(0));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < n; ++k) out.point[k] += y[j] * kernel[j][k];
  for (std::size_t i = 0; i < m; ++i)
    if (dot<Rational>(inequalities[i], out.point) == 0) out.implicit_equalities.push_back(i);
  return out;
}

/// Halfspace description of the cone generated by `generators` inside Q^n:
/// points x with eq.x = 0 for all eq and ineq.x >= 0 for all ineq.
struct ConeInequalities {
  std::vector<IntegerVector> equations;
  std::vector<IntegerVector> inequalities;

  bool contains(std::span<const Rational> x) const {
    for (const auto& e : equations)
      if (dot<Rational>(to_rational(e), x) != 0) return false;
    for (const auto& f : inequalities)
      if (dot<Rational>(to_rational(f), x) < 0) return false;
    return true;
  }
  bool contains(std::span<const Integer> x) const {
    for (const auto& e : equations)
      if (dot<Integer>(e, x) != 0) return false;
    for (const auto& f : inequalities)
      if (dot<Integer>(f, x) < 0) return false;
    return true;
  }
};

}  // namespace fanbranch
