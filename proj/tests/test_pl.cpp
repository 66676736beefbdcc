#include <fanbranch/pl.hpp>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace fanbranch;

namespace {

std::shared_ptr<const CoverPoset> deg2(const std::shared_ptr<const Fan>& f, const std::vector<std::size_t>& branch) {
  const auto t = spanning_tree(*f);
  const auto a = assignment_for_branch_set(*f, t, branch);
  if (!a) return nullptr;
  return build_cover_detailed(f, t, *a).cover;
}

}  // namespace

TEST(PL, IdentityCoverHasOnlyPullbacks) {
  const auto f = fixture_fan("fulton");
  const auto c = std::make_shared<const CoverPoset>(weighted_identity(f, 1));
  const auto b = solve(c);
  EXPECT_EQ(b.dim, 3u);
  EXPECT_EQ(b.pullback_count, 3u);
  EXPECT_EQ(group_triviality(c).tag(), "pullbacks-only");
}

TEST(PL, WedgeOfTwoIdentities) {
  const auto f = fixture_fan("fulton");
  const auto c = std::make_shared<const CoverPoset>(wedge_sum(weighted_identity(f, 1), weighted_identity(f, 1)));
  EXPECT_EQ(solve(c).dim, 6u);
  const auto v = group_triviality(c);
  EXPECT_EQ(v.tag(), "wedge-of-pullbacks");
  EXPECT_TRUE(v.all_trivial());
}

TEST(PL, FormulationsAgreeOnFultonDegreeTwo) {
  const auto f = fixture_fan("fulton");
  const auto t = spanning_tree(*f);
  const PLSystem sys(*f);
  enumerate_assignments(t, 2, [&](std::uint64_t idx, const MonodromyAssignment& a) {
    const auto c = build_cover_detailed(f, t, a).cover;
    const auto v = sys.values_at_rays(*c);
    const std::size_t by_rays = v.ray_cells.size() - rank(v.matrix());
    const auto basis = solve(c);
    EXPECT_EQ(by_rays, basis.dim) << idx;
    EXPECT_EQ(sys.dimension(*c), basis.dim) << idx;
    for (const auto& g : basis.functions) EXPECT_TRUE(is_consistent(g)) << idx;
    EXPECT_TRUE(group_triviality(c, sys).all_trivial()) << idx;
    return true;
  });
}

TEST(PL, TypeCCover) {
  const auto f = fixture_fan("fulton");
  const auto c = deg2(f, {0, 2, 5, 7});
  ASSERT_TRUE(c);
  const PLSystem sys(*f);
  const auto v = sys.values_at_rays(*c);
  EXPECT_EQ(v.rows.size(), 12u);
  EXPECT_EQ(rank(v.matrix()), 9u);
  EXPECT_EQ(group_triviality(c, sys).tag(), "pullbacks-only");
}

TEST(PL, IntegralBasisSpansTheLattice) {
  const auto f = fixture_fan("fulton");
  const auto c = deg2(f, {0, 2, 5, 7});
  const auto q = solve(c, SolveMode::rational);
  const auto z = solve(c, SolveMode::integral);
  EXPECT_EQ(q.dim, z.dim);
  for (const auto& g : z.functions) {
    EXPECT_TRUE(is_consistent(g));
    for (const auto& [cell, u] : g.u)
      for (const auto& x : u) EXPECT_EQ(x.get_den(), 1);
  }
}

TEST(PL, InconsistentFunctionIsRejected) {
  const auto f = fixture_fan("p2");
  const auto c = std::make_shared<const CoverPoset>(weighted_identity(f, 1));
  auto g = pullback(c, IntegerVector{1, 0});
  EXPECT_TRUE(is_consistent(g));
  g.u.begin()->second = RationalVector{0, 1};
  EXPECT_FALSE(is_consistent(g));
}

TEST(PL, EikelbergNontrivial) {
  const auto f = fixture_fan("eikelberg");
  const auto c = deg2(f, {0, 5});
  ASSERT_TRUE(c);
  const auto v = group_triviality(c);
  EXPECT_EQ(v.tag(), "nontrivial");
  ASSERT_TRUE(v.witness);
  EXPECT_TRUE(is_consistent(*v.witness));
  EXPECT_FALSE(is_trivial_function(*v.witness));

  const std::vector<std::vector<RationalVector>> table{{{15, -15, 3}, {3, 3, -9}}, {{16, -14, -4}, {2, 2, -2}},
                                                       {{12, -18, 0}, {6, 6, -6}}, {{24, -18, 0}, {-6, 6, -6}},
                                                       {{12, -6, 0}, {6, -6, -6}}};
  const auto psi = realize_multisets(c, table);
  ASSERT_TRUE(psi);
  EXPECT_TRUE(is_consistent(*psi));
  EXPECT_FALSE(is_trivial_function(*psi));
  // The branch cell over the first ray: both sheets pair to -12 there.
  const auto ray_cells = c->cells_over(f->ray_face(0));
  ASSERT_EQ(ray_cells.size(), 1u);
  const RationalVector v0 = to_rational(f->ray(0));
  EXPECT_EQ(evaluate(*psi, ray_cells[0], v0), -12);
  EXPECT_THROW(evaluate(*psi, ray_cells[0], RationalVector{1, 0, 0}), PLError);
}

TEST(PL, WrongMultisetsAreNotRealizable) {
  const auto f = fixture_fan("eikelberg");
  const auto c = deg2(f, {0, 5});
  std::vector<std::vector<RationalVector>> table(5, {{1, 0, 0}, {0, 1, 0}});
  EXPECT_FALSE(realize_multisets(c, table));
  std::vector<std::vector<RationalVector>> constant(5, {{1, 0, 0}, {1, 0, 0}});
  const auto g = realize_multisets(c, constant);
  ASSERT_TRUE(g);
  EXPECT_TRUE(is_trivial_function(*g));
}

TEST(PL, PullbackIsLinear) {
  const auto f = fixture_fan("fulton");
  const auto c = deg2(f, {0, 6});
  const auto a = pullback(c, IntegerVector{1, 2, 3});
  const auto b = pullback(c, IntegerVector{0, -1, 1});
  EXPECT_EQ(a + b.scaled(2), pullback(c, IntegerVector{1, 0, 5}));
  EXPECT_TRUE(is_trivial_function(a));
  EXPECT_EQ(zero_function(c), a.scaled(0));
}
