#include <fanbranch/klyachko.hpp>

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace fanbranch;

namespace {

Filtration random_filtration(std::mt19937& rng, std::size_t r) {
  std::vector<FiltrationStep> steps;
  long t = long(rng() % 7) - 3;
  Subspace s = Subspace::full(r);
  steps.push_back({t, s});
  while (s.dim() > 1 && rng() % 3 != 0) {
    // A random proper subspace of the current step.
    const auto vs = s.vectors();
    std::vector<RationalVector> sub;
    const std::size_t k = 1 + rng() % (s.dim() - 1);
    for (std::size_t i = 0; i < k; ++i) {
      RationalVector w(r);
      for (const auto& v : vs) {
        const long c = long(rng() % 5) - 2;
        for (std::size_t j = 0; j < r; ++j) w[j] += c * v[j];
      }
      sub.push_back(w);
    }
    auto next = Subspace::span(r, sub);
    if (next.is_zero() || next == s) continue;
    s = next;
    t += 1 + long(rng() % 3);
    steps.push_back({t, s});
  }
  return Filtration::make(r, steps);
}

}  // namespace

TEST(Klyachko, FiltrationSemantics) {
  const auto l = Subspace::span(2, std::vector<IntegerVector>{{1, 0}});
  const auto f = Filtration::make(2, {{-1, Subspace::full(2)}, {2, l}});
  EXPECT_TRUE(f.at(-5).is_full());
  EXPECT_TRUE(f.at(-1).is_full());
  EXPECT_EQ(f.at(0), l);
  EXPECT_EQ(f.at(2), l);
  EXPECT_TRUE(f.at(3).is_zero());
  EXPECT_THROW(Filtration::make(2, {{0, l}}), KlyachkoError);
  EXPECT_THROW(Filtration::make(2, {{0, Subspace::full(2)}, {0, l}}), KlyachkoError);
}

TEST(Klyachko, DualIsAnInvolution) {
  std::mt19937 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const std::size_t r = 1 + rng() % 4;
    const auto f = random_filtration(rng, r);
    EXPECT_EQ(dual(dual(f)), f) << f.str();
  }
}

TEST(Klyachko, RankOneDualJump) {
  for (long d : {-3L, 0L, 4L}) {
    const auto f = dual(Filtration::constant(1, d));
    ASSERT_EQ(f.steps().size(), 1u);
    EXPECT_EQ(f.steps()[0].threshold, -d);
  }
}

TEST(Klyachko, FixturesVerify) {
  for (const char* name : {"eikelberg", "p2_tangent"}) {
    const auto b = fixture_bundle(name);
    EXPECT_TRUE(verify(b.data, b.cert).ok()) << name << ": " << verify(b.data, b.cert).str();
    const auto dd = dual(b.data);
    const auto dc = dual(b.cert, b.data.rank);
    EXPECT_TRUE(verify(dd, dc).ok()) << name << " dual: " << verify(dd, dc).str();
    EXPECT_EQ(necessary_dimension_check(b.data).status, DimensionCheck::ok);
  }
}

TEST(Klyachko, InterpolationAtGeneratorsRecoversData) {
  for (const char* name : {"eikelberg", "p2_tangent"}) {
    const auto b = fixture_bundle(name);
    for (std::size_t r = 0; r < b.data.fan->num_rays(); ++r) {
      const RationalVector v = to_rational(b.data.fan->ray(r));
      EXPECT_EQ(filtration_at(b.data, b.cert, v), b.data.filtrations[r]) << name << " ray " << r;
    }
  }
}

TEST(Klyachko, SwappedLinesViolate) {
  auto b = fixture_bundle("p2_tangent");
  std::swap(b.cert.cones[0][0].space, b.cert.cones[0][1].space);
  const auto rep = verify(b.data, b.cert);
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.violation->cone, 0u);
  EXPECT_TRUE(rep.violation->ray.has_value());
}

TEST(Klyachko, ThreeLinesThroughOneConeViolate) {
  // Rank 2 over the octant: three rays each jumping to a different line
  // at index 1 cannot be split by two functionals.
  const auto f = fixture_fan("octant");
  std::vector<Filtration> fs;
  for (const IntegerVector& l : {IntegerVector{1, 0}, IntegerVector{0, 1}, IntegerVector{1, 1}})
    fs.push_back(Filtration::make(2, {{0, Subspace::full(2)}, {1, Subspace::span(2, std::vector<IntegerVector>{l})}}));
  const auto d = make_data(f, 2, fs);
  EXPECT_EQ(necessary_dimension_check(d).status, DimensionCheck::violation);
}

TEST(Klyachko, PullbackAlongIdentity) {
  const auto b = fixture_bundle("eikelberg");
  const auto [d, c] = pullback(b.data, b.cert, IntegerMatrix::identity(3), b.data.fan);
  EXPECT_TRUE(verify(d, c).ok());
  for (std::size_t r = 0; r < d.filtrations.size(); ++r) EXPECT_EQ(d.filtrations[r], b.data.filtrations[r]);
  EXPECT_EQ(chern(d, c), chern(b.data, b.cert));
}

TEST(Klyachko, PullbackAlongProjection) {
  const auto b = fixture_bundle("p2_tangent");
  // P^2 times P^1, projected onto the first factor.
  const auto prod = std::make_shared<const Fan>(Fan::from_data(
      3, std::vector<std::vector<long>>{{1, 0, 0}, {0, 1, 0}, {-1, -1, 0}, {0, 0, 1}, {0, 0, -1}},
      {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {1, 2, 4}, {0, 2, 4}, {0, 1, 4}}));
  ASSERT_TRUE(prod->complete());
  const auto phi = IntegerMatrix::from_rows({{1, 0, 0}, {0, 1, 0}});
  const auto [d, c] = pullback(b.data, b.cert, phi, prod);
  EXPECT_TRUE(verify(d, c).ok()) << verify(d, c).str();
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(d.filtrations[r], b.data.filtrations[r]);
  EXPECT_EQ(d.filtrations[3], Filtration::constant(2, 0));
  EXPECT_EQ(d.filtrations[4], Filtration::constant(2, 0));
}

TEST(Klyachko, DirectSum) {
  const auto b = fixture_bundle("p2_tangent");
  const auto line = make_data(b.data.fan, 1, std::vector<Filtration>(3, Filtration::constant(1, 1)));
  SplittingCertificate lc;
  // O(1) on P^2 in this chart: functionals with <u, v_j> = 1 on the cone's rays.
  const std::vector<IntegerVector> us{{-1, 0}, {0, -1}, {1, 1}};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& rays = b.data.fan->max_cone(k).rays;
    IntegerVector u(2);
    for (const auto& cand : {IntegerVector{1, 1}, IntegerVector{-2, 1}, IntegerVector{1, -2}})
      if (dot<Integer>(cand, b.data.fan->ray(rays[0])) == 1 && dot<Integer>(cand, b.data.fan->ray(rays[1])) == 1) u = cand;
    lc.cones.push_back({SplitPiece{u, Subspace::full(1)}});
  }
  ASSERT_TRUE(verify(line, lc).ok()) << verify(line, lc).str();
  const auto [d, c] = direct_sum(b.data, b.cert, line, lc);
  EXPECT_EQ(d.rank, 3u);
  EXPECT_TRUE(verify(d, c).ok()) << verify(d, c).str();
  const auto ch = chern(d, c);
  for (std::size_t k = 0; k < 3; ++k) {
    std::uint64_t total = 0;
    for (const auto& [u, m] : ch.multisets[k]) total += m;
    EXPECT_EQ(total, 3u);
  }
}

TEST(Klyachko, ElementarySymmetric) {
  const std::vector<std::pair<IntegerVector, std::uint64_t>> one{{{1, -2, 1}, 1}};
  const auto c1 = elementary_symmetric(one, 1, 3);
  EXPECT_EQ(format_polynomial(c1), "x1 - 2x2 + x3");
  const std::vector<std::pair<IntegerVector, std::uint64_t>> two{{{1, 0, 0}, 1}, {{0, 1, 0}, 2}};
  EXPECT_EQ(format_polynomial(elementary_symmetric(two, 2, 3)), "2x1x2 + x2^2");
  EXPECT_EQ(format_polynomial(elementary_symmetric(two, 0, 3)), "1");
}

TEST(Klyachko, EikelbergChernAndCover) {
  const auto b = fixture_bundle("eikelberg");
  EXPECT_FALSE(is_trivial_chern(b.data, b.cert));
  const auto bc = branched_cover_of(b.data, b.cert);
  EXPECT_TRUE(validate_cover(*bc.cover).ok());
  EXPECT_EQ(bc.cover->degree(), 2u);
  EXPECT_TRUE(is_consistent(bc.psi));
  EXPECT_FALSE(is_trivial_function(bc.psi));
}

TEST(Klyachko, TangentBundleCover) {
  const auto b = fixture_bundle("p2_tangent");
  const auto bc = branched_cover_of(b.data, b.cert);
  const auto& c = *bc.cover;
  EXPECT_TRUE(validate_cover(c).ok());
  EXPECT_EQ(c.top_cells().size(), 6u);
  EXPECT_EQ(c.degree(), 2u);
  for (auto t : c.top_cells()) EXPECT_EQ(c.cell(t).weight, 1u);
  EXPECT_TRUE(is_consistent(bc.psi));
}

TEST(Klyachko, FultonRankThreeCertificateIsNotADirectSum) {
  const auto b = fixture_bundle("fulton_rank3");
  const auto rep = verify(b.data, b.cert);
  EXPECT_FALSE(rep.ok());
  EXPECT_THROW(branched_cover_of(b.data, b.cert), KlyachkoError);
}
