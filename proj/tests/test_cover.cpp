#include <fanbranch/cover.hpp>
#include <fanbranch/monodromy.hpp>

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

TEST(Cover, IdentityAndDegree) {
  const auto f = fixture_fan("fulton");
  for (std::uint64_t d : {1, 3}) {
    const auto c = weighted_identity(f, d);
    EXPECT_TRUE(validate_cover(c).ok()) << validate_cover(c).str();
    EXPECT_EQ(c.degree(), d);
    EXPECT_EQ(c.euler_characteristic(), 2);
  }
}

TEST(Cover, EulerCharacteristics) {
  const auto f = fixture_fan("fulton");
  const auto t = spanning_tree(*f);
  // Unbranched double cover: two spheres.
  EXPECT_EQ(build_cover_detailed(f, t, MonodromyAssignment{2, std::vector<Permutation>(t.non_tree_walls.size(), Permutation(2))})
                .cover->euler_characteristic(),
            4);
  // Branched over two rays: a sphere. Over four: a torus.
  EXPECT_EQ(deg2(f, {0, 6})->euler_characteristic(), 2);
  EXPECT_EQ(deg2(f, {0, 2, 5, 7})->euler_characteristic(), 0);
}

TEST(Cover, DeletedWallCellViolatesLocalStructure) {
  const auto f = fixture_fan("fulton");
  const auto c = deg2(f, {0, 2, 5, 7});
  ASSERT_TRUE(c);
  ASSERT_TRUE(validate_cover(*c).ok());
  // Rebuild without the first cell over wall 0.
  const auto wall = f->wall_face(0);
  const auto drop = c->cells_over(wall).front();
  CoverPoset broken(f);
  std::vector<std::size_t> remap(c->size());
  for (std::size_t i = 0; i < c->size(); ++i)
    if (i != drop) remap[i] = broken.add_cell(c->cell(i).base, c->cell(i).copy, c->cell(i).weight);
  for (std::size_t i = 0; i < c->size(); ++i)
    for (auto g : c->facets(i))
      if (i != drop && g != drop) broken.add_face(remap[g], remap[i]);
  const auto rep = validate_cover(broken);
  EXPECT_FALSE(rep.ok());
  bool local = false;
  for (const auto& v : rep.violations) local = local || v.axiom == "local-isomorphism";
  EXPECT_TRUE(local) << rep.str();
}

TEST(Cover, BadWeightsViolateTrace) {
  const auto f = fixture_fan("p2");
  CoverPoset c = weighted_identity(f, 2);
  CoverPoset bumped(f);
  for (std::size_t i = 0; i < c.size(); ++i)
    bumped.add_cell(c.cell(i).base, 0, i == f->ray_face(0) ? 1 : c.cell(i).weight);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (auto g : c.facets(i)) bumped.add_face(g, i);
  EXPECT_FALSE(validate_cover(bumped).ok());
}

TEST(Cover, WedgeSumOfIdentities) {
  const auto f = fixture_fan("fulton");
  const auto w = wedge_sum(weighted_identity(f, 1), weighted_identity(f, 1));
  EXPECT_TRUE(validate_cover(w).ok()) << validate_cover(w).str();
  EXPECT_EQ(w.degree(), 2u);
  EXPECT_EQ(w.wedge_summands().size(), 2u);
  EXPECT_EQ(w.euler_characteristic(), 4);
  const auto t = spanning_tree(*f);
  const auto trivial = build_cover(f, t, MonodromyAssignment{2, std::vector<Permutation>(t.non_tree_walls.size(), Permutation(2))});
  EXPECT_TRUE(isomorphic(w, trivial));
  EXPECT_FALSE(isomorphic(w, weighted_identity(f, 2)));
  const auto part = w.restrict_to(w.wedge_summands()[0]);
  EXPECT_TRUE(validate_cover(part).ok());
  EXPECT_TRUE(isomorphic(part, weighted_identity(f, 1)));
}

TEST(Cover, FiberedProduct) {
  const auto f = fixture_fan("fulton");
  const auto c = deg2(f, {0, 6});
  ASSERT_TRUE(c);
  const auto p = fibered_product(*c, weighted_identity(f, 1));
  EXPECT_TRUE(validate_cover(p).ok());
  EXPECT_TRUE(isomorphic(p, *c));
  const auto q = fibered_product(*c, *c);
  EXPECT_TRUE(validate_cover(q).ok()) << validate_cover(q).str();
  EXPECT_EQ(q.degree(), 4u);
}

TEST(Cover, MaximalityAndRamification) {
  const auto f = fixture_fan("fulton");
  EXPECT_FALSE(is_maximal(weighted_identity(f, 2)));
  const auto c = deg2(f, {0, 2, 5, 7});
  EXPECT_TRUE(is_maximal(*c));
  std::vector<std::size_t> rays;
  for (auto x : c->ramification_cells()) rays.push_back(f->face(c->cell(x).base).rays[0]);
  EXPECT_EQ(rays, (std::vector<std::size_t>{0, 2, 5, 7}));
}
