// Acceptance checks: one PASS/FAIL line per criterion, with the measured values.

#include <fanbranch/fanbranch.hpp>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace fanbranch;

namespace {

const std::string kData = FANBRANCH_DATA_DIR;

std::shared_ptr<const Fan> fan(const std::string& name) { return io::load_fan(kData + "/" + name + ".fan.json"); }
io::Bundle bundle(const std::string& name) { return io::load_bundle(kData + "/" + name + ".bundle.json"); }

std::size_t jobs() {
  if (const char* env = std::getenv("FANBRANCH_JOBS"))
    if (long n = std::strtol(env, nullptr, 10); n > 0) return static_cast<std::size_t>(n);
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Result {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(const std::string& id, const std::string& title, const std::function<void(Result&)>& body) {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!r.pass) ++failures;
  std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << ":" << r.detail.str() << " ("
            << std::fixed << std::setprecision(2) << secs << " s)" << std::endl;
}

std::shared_ptr<const CoverPoset> deg2(const std::shared_ptr<const Fan>& f, const std::vector<std::size_t>& rays) {
  const auto t = spanning_tree(*f);
  const auto a = assignment_for_branch_set(*f, t, rays);
  if (!a) throw std::runtime_error("no degree-2 cover with that branch set");
  return build_cover_detailed(f, t, *a).cover;
}

bool pullbacks_contained(const std::shared_ptr<const CoverPoset>& c) {
  const std::size_t n = c->fan().rank();
  for (std::size_t i = 0; i < n; ++i) {
    IntegerVector e(n);
    e[i] = 1;
    if (!is_consistent(pullback(c, e))) return false;
  }
  return true;
}

// Sum of rank-one bundles in a random basis, over a smooth complete fan.
std::pair<KlyachkoData, SplittingCertificate> random_split_bundle(std::mt19937& rng, const std::shared_ptr<const Fan>& f) {
  const std::size_t n = f->rank();
  const std::size_t r = 1 + rng() % 3;
  std::uniform_int_distribution<int> small(-3, 3);
  RationalMatrix basis;
  do {
    basis = RationalMatrix(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) basis(i, j) = small(rng);
  } while (rank(basis) != r);
  std::vector<std::vector<long>> a(r, std::vector<long>(f->num_rays()));
  for (auto& row : a)
    for (auto& x : row) x = small(rng);
  SplittingCertificate cert;
  for (std::size_t k = 0; k < f->num_max_cones(); ++k) {
    const auto& rays = f->max_cone(k).rays;
    RationalMatrix g = to_rational(f->generator_matrix(rays));
    std::vector<SplitPiece> pieces;
    for (std::size_t j = 0; j < r; ++j) {
      // Solve <u, v_rho> = a[j][rho] on the cone's rays.
      RationalMatrix aug(rays.size(), n + 1);
      for (std::size_t i = 0; i < rays.size(); ++i) {
        for (std::size_t c = 0; c < n; ++c) aug(i, c) = g(i, c);
        aug(i, n) = a[j][rays[i]];
      }
      const auto red = rref(aug).first;
      IntegerVector u(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (red(i, n).get_den() != 1) throw std::runtime_error("fan is not smooth");
        u[i] = red(i, n).get_num();
      }
      pieces.push_back(SplitPiece{u, Subspace::span(r, std::vector<RationalVector>{basis.row_vector(j)})});
    }
    cert.cones.push_back(pieces);
  }
  KlyachkoData d{f, r, {}};
  for (std::size_t rho = 0; rho < f->num_rays(); ++rho) d.filtrations.push_back(filtration_at(d, cert, to_rational(f->ray(rho))));
  return {d, cert};
}

}  // namespace

int main() {
  const auto fulton = fan("fulton");

  run("1", "Fulton fan is complete with 8 rays, 6 maximal cones, 12 walls and relation (2,-4,3,-5)", [&](Result& r) {
    const auto f = fan("fulton");
    const auto rel = f->wall_relation(0);
    r.detail << " " << f->summary() << "; relation " << (rel.size() == 1 ? to_string(rel[0]) : "?");
    r.require(f->complete() && f->num_rays() == 8 && f->num_max_cones() == 6 && f->num_walls() == 12, "counts");
    r.require(rel.size() == 1 && (rel[0] == IntegerVector{2, -4, 3, -5} || rel[0] == IntegerVector{-2, 4, -3, 5}), "relation");
  });

  run("2", "type-C cover: 12x12 values-at-rays system of rank 9, PL dimension 3, pullbacks only", [&](Result& r) {
    const auto c = deg2(fulton, {0, 2, 5, 7});
    const PLSystem sys(*fulton);
    const auto v = sys.values_at_rays(*c);
    const auto rk = rank(v.matrix());
    const auto verdict = group_triviality(c, sys);
    r.detail << " " << v.rows.size() << "x" << v.ray_cells.size() << ", rank " << rk << ", dim " << verdict.dim << ", "
             << verdict.tag();
    r.require(v.rows.size() == 12 && v.ray_cells.size() == 12 && rk == 9, "matrix");
    r.require(verdict.dim == 3 && verdict.kind == VerdictKind::pullbacks_only, "verdict");
  });

  run("3", "degree-2 census: 128 assignments, 18 admissible branch sets, orbit types 4/12/2", [&](Result& r) {
    const auto c = branch_census(*fulton, spanning_tree(*fulton), 2);
    r.detail << " " << c.assignments << " assignments, " << c.admissible.size() << " admissible, orbits";
    std::vector<std::size_t> sizes;
    for (const auto& o : c.orbits) {
      sizes.push_back(o.size());
      r.detail << " " << o.size();
    }
    r.require(c.assignments == 128 && c.admissible.size() == 18, "counts");
    r.require(sizes == std::vector<std::size_t>{4, 12, 2}, "orbits");
  });

  run("4", "full degree-2 sweep of Fulton's fan is all trivial", [&](Result& r) {
    SweepOptions o;
    o.degree = 2;
    o.jobs = jobs();
    const auto s = run_sweep(fulton, o);
    r.detail << " " << s.processed << " processed";
    for (const auto& [tag, n] : s.by_verdict) r.detail << ", " << tag << " " << n;
    r.require(s.processed == 128 && s.nontrivial.empty(), "verdicts");
  });

  SweepSummary sigma;
  run("5", "full degree-3 sweep of the modified fan: 279936 assignments, none nontrivial", [&](Result& r) {
    SweepOptions o;
    o.degree = 3;
    o.jobs = jobs();
    sigma = run_sweep(fan("sigma_prime"), o);
    r.detail << " " << sigma.processed << " processed with " << o.jobs << " jobs";
    for (const auto& [tag, n] : sigma.by_verdict) r.detail << ", " << tag << " " << n;
    for (const auto& rec : sigma.nontrivial) r.detail << "; DISCREPANCY at index " << rec.index;
    r.require(sigma.processed == 279936 && sigma.nontrivial.empty(), "sweep");
  });

  run("6", "Eikelberg cover over rays 1 and 6 carries the listed nontrivial Psi; bundle fixture reproduces it", [&](Result& r) {
    const auto f = fan("eikelberg");
    r.require(f->complete(), "fan complete");
    const auto c = deg2(f, {0, 5});
    const std::vector<std::vector<RationalVector>> table{{{15, -15, 3}, {3, 3, -9}}, {{16, -14, -4}, {2, 2, -2}},
                                                         {{12, -18, 0}, {6, 6, -6}}, {{24, -18, 0}, {-6, 6, -6}},
                                                         {{12, -6, 0}, {6, -6, -6}}};
    const auto psi = realize_multisets(c, table);
    r.require(psi && is_consistent(*psi), "listed values satisfy the constraints");
    r.require(psi && !is_trivial_function(*psi), "Psi nontrivial");
    const auto b = bundle("eikelberg");
    r.require(verify(b.data, b.cert).ok(), "bundle verifies");
    const auto bc = branched_cover_of(b.data, b.cert);
    std::vector<std::size_t> branch;
    for (auto x : bc.cover->ramification_cells())
      if (bc.cover->dim(x) == 1) branch.push_back(f->face(bc.cover->cell(x).base).rays[0]);
    r.detail << " branch rays";
    for (auto x : branch) r.detail << " " << x + 1;
    r.require(branch == std::vector<std::size_t>{0, 5}, "branch set");
    const auto ms = multisets(bc.psi);
    for (std::size_t k = 0; k < 5; ++k) {
      ConeMultiset want;
      want.cone = k;
      for (const auto& u : table[k]) ++want.entries[u];
      r.require(ms[k] == want, "multiset of cone " + std::to_string(k + 1));
    }
  });

  run("7", "Fulton rank-3 bundle fixture verifies with the six listed multisets; Chern data nontrivial", [&](Result& r) {
    const auto b = bundle("fulton_rank3");
    const auto rep = verify(b.data, b.cert);
    r.detail << " verify: " << rep.str();
    r.require(rep.ok(), "certificate");
    if (rep.ok()) r.require(!is_trivial_chern(b.data, b.cert), "chern");
  });

  run("8", "tangent bundle of P^2: 6 top cells of weight 1, apex weight 2, Psi = e_j* - e_i*", [&](Result& r) {
    const auto b = bundle("p2_tangent");
    const auto bc = branched_cover_of(b.data, b.cert);
    const auto& c = *bc.cover;
    r.detail << " " << c.top_cells().size() << " top cells, degree " << c.degree();
    r.require(validate_cover(c).ok() && c.top_cells().size() == 6 && c.degree() == 2, "cover");
    const std::vector<RationalVector> dual{{1, 0}, {0, 1}, {0, 0}};
    const Fan& f = c.fan();
    for (auto t : c.top_cells()) {
      r.require(c.cell(t).weight == 1, "top weight");
      const auto k = *f.max_cone_index(c.cell(t).base);
      const auto& u = bc.psi.u.at(t);
      // Cone k is sigma_{k+1}; on the sheet of ray j, Psi = e_j* - e_i*.
      bool matched = false;
      for (auto j : f.max_cone(k).rays) {
        RationalVector want{dual[j][0] - dual[k][0], dual[j][1] - dual[k][1]};
        matched = matched || u == want;
      }
      r.require(matched, "Psi on cell " + std::to_string(t));
    }
  });

  run("9a", "every constructed cover validates", [&](Result& r) {
    std::size_t n = 0;
    auto check = [&](const CoverPoset& c) {
      ++n;
      r.require(validate_cover(c).ok(), "cover " + std::to_string(n));
    };
    for (const char* name : {"fulton", "bipyramid", "eikelberg"}) {
      const auto f = fan(name);
      const auto t = spanning_tree(*f);
      for (std::size_t d : {2u, 3u})
        enumerate_assignments(t, d, [&](std::uint64_t idx, const MonodromyAssignment& a) {
          check(*build_cover_detailed(f, t, a).cover);
          return idx < 2000;
        });
      check(weighted_identity(f, 2));
      check(wedge_sum(weighted_identity(f, 1), weighted_identity(f, 2)));
    }
    check(fibered_product(*deg2(fulton, {0, 6}), *deg2(fulton, {0, 2, 5, 7})));
    for (const char* name : {"eikelberg", "p2_tangent"}) {
      const auto b = bundle(name);
      check(*branched_cover_of(b.data, b.cert).cover);
    }
    r.detail << " " << n << " covers";
  });

  run("9b", "Riemann-Hurwitz holds for monodromy-built covers (exhaustive d=2 on Fulton's fan)", [&](Result& r) {
    std::size_t n = 0;
    auto rh = [&](const std::shared_ptr<const Fan>& f, std::size_t d, std::uint64_t cap) {
      const auto t = spanning_tree(*f);
      enumerate_assignments(t, d, [&](std::uint64_t idx, const MonodromyAssignment& a) {
        const auto b = build_cover_detailed(f, t, a);
        long defect = 0;
        for (const auto& o : b.sheets.orbit_sizes) defect += long(d) - long(o.size());
        r.require(b.cover->euler_characteristic() == 2 * long(d) - defect, "assignment " + std::to_string(idx));
        ++n;
        return idx + 1 < cap;
      });
    };
    rh(fulton, 2, UINT64_MAX);
    rh(fulton, 3, 5000);
    rh(fan("bipyramid"), 3, UINT64_MAX);
    r.detail << " " << n << " covers";
  });

  std::vector<std::pair<KlyachkoData, SplittingCertificate>> randoms;
  run("9c", "dual of dual is the identity on 100 random bundles", [&](Result& r) {
    std::mt19937 rng(1);
    const auto p2 = fan("p2");
    for (int i = 0; i < 100; ++i) {
      auto [d, c] = random_split_bundle(rng, i % 2 ? p2 : fan("bipyramid"));
      r.require(verify(d, c).ok(), "fixture " + std::to_string(i) + " verifies");
      const auto dd = dual(d);
      const auto dc = dual(c, d.rank);
      r.require(verify(dd, dc).ok(), "dual of fixture " + std::to_string(i) + " verifies");
      const auto back = dual(dd);
      for (std::size_t rho = 0; rho < d.filtrations.size(); ++rho)
        r.require(back.filtrations[rho] == d.filtrations[rho], "fixture " + std::to_string(i));
      randoms.emplace_back(std::move(d), std::move(c));
    }
    r.detail << " " << randoms.size() << " bundles";
  });

  run("9d", "interpolation at ray generators reproduces the stored filtrations", [&](Result& r) {
    auto all = randoms;
    for (const char* name : {"eikelberg", "p2_tangent"}) {
      const auto b = bundle(name);
      all.emplace_back(b.data, b.cert);
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto& [d, c] = all[i];
      for (std::size_t rho = 0; rho < d.filtrations.size(); ++rho)
        r.require(filtration_at(d, c, to_rational(d.fan->ray(rho))) == d.filtrations[rho], "fixture " + std::to_string(i));
    }
    r.detail << " " << all.size() << " fixtures";
  });

  run("9e", "swept covers have PL dimension at least 3 and contain the pullbacks", [&](Result& r) {
    std::uint64_t n = 0;
    const auto t = spanning_tree(*fulton);
    enumerate_assignments(t, 2, [&](std::uint64_t, const MonodromyAssignment& a) {
      const auto c = build_cover_detailed(fulton, t, a).cover;
      r.require(solve(c).dim >= 3 && pullbacks_contained(c), "Fulton cover");
      ++n;
      return true;
    });
    for (const auto& [dim, count] : sigma.by_dim) r.require(dim >= 3, "sweep record of dimension " + std::to_string(dim));
    r.require(sigma.processed == 279936, "modified fan sweep present");
    const auto sp = fan("sigma_prime");
    const auto st = spanning_tree(*sp);
    enumerate_assignments(st, 3, [&](std::uint64_t, const MonodromyAssignment& a) {
      r.require(pullbacks_contained(build_cover_detailed(sp, st, a).cover), "modified fan cover");
      ++n;
      return true;
    });
    r.detail << " " << n << " covers";
  });

  run("9f", "per-cell and values-at-rays systems agree on all 128 Fulton degree-2 covers", [&](Result& r) {
    const auto t = spanning_tree(*fulton);
    const PLSystem sys(*fulton);
    std::size_t n = 0;
    enumerate_assignments(t, 2, [&](std::uint64_t idx, const MonodromyAssignment& a) {
      const auto c = build_cover_detailed(fulton, t, a).cover;
      const auto v = sys.values_at_rays(*c);
      std::vector<std::size_t> tops, ray_cells;
      const auto per_cell = sys.per_cell_matrix(*c, &tops, &ray_cells);
      const std::size_t by_cells = per_cell.cols() - rank(per_cell);
      const std::size_t by_rays = v.ray_cells.size() - rank(v.matrix());
      r.require(by_cells == by_rays && by_rays == sys.dimension(*c), "assignment " + std::to_string(idx));
      ++n;
      return true;
    });
    r.detail << " " << n << " covers";
  });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
