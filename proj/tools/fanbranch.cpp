// fanbranch: command-line front end for fans, covers, PL sweeps and bundles.

#include <fanbranch/fanbranch.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef FANBRANCH_DEFAULT_DATA_DIR
#define FANBRANCH_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace fanbranch;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNontrivial = 2;

fs::path data_dir() {
  if (const char* env = std::getenv("FANBRANCH_DATA_DIR")) return env;
  return FANBRANCH_DEFAULT_DATA_DIR;
}

/// Accepts a path, or a bundled name such as "fulton" or "sigma-prime".
fs::path resolve(const std::string& name, const std::string& suffix) {
  if (fs::exists(name)) return name;
  std::string base = name;
  for (auto& ch : base)
    if (ch == '-') ch = '_';
  for (const auto& cand : {data_dir() / (base + suffix), data_dir() / base})
    if (fs::exists(cand)) return cand;
  throw io::FormatError("no such file: " + name);
}

std::size_t default_jobs() {
  if (const char* env = std::getenv("FANBRANCH_JOBS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string ray_list(const std::vector<std::size_t>& rays) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < rays.size(); ++i) os << (i ? "," : "") << rays[i];
  os << '}';
  return os.str();
}

std::vector<std::size_t> parse_rays(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoul(tok));
  return out;
}

void print_fan(const Fan& f) {
  std::cout << f.summary() << "\n";
  for (std::size_t r = 0; r < f.num_rays(); ++r) std::cout << "  ray " << r << ": " << to_string(f.ray(r)) << "\n";
  for (std::size_t k = 0; k < f.num_max_cones(); ++k)
    std::cout << "  cone " << k << ": " << detail::raylist(f.max_cone(k).rays) << " dim " << f.max_cone(k).dim << "\n";
  for (std::size_t w = 0; w < f.num_walls(); ++w) {
    std::cout << "  wall " << w << ": " << detail::raylist(f.wall(w).rays) << " in cones";
    for (auto k : f.wall(w).maximal) std::cout << " " << k;
    std::cout << "\n";
  }
}

int cmd_fan_validate(const std::string& file) {
  try {
    auto f = io::load_fan(resolve(file, ".fan.json"));
    print_fan(*f);
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "invalid fan: " << e.what() << "\n";
    return kInvalid;
  }
}

int cmd_covers_enumerate(const std::string& file, std::size_t degree, bool classes, bool branch_report) {
  auto fan = io::load_fan(resolve(file, ".fan.json"));
  const auto tree = spanning_tree(*fan);
  std::cout << "assignments: " << assignment_count(tree, degree) << "\n";
  if (classes) {
    std::set<MonodromyAssignment> seen;
    enumerate_assignments(tree, degree, [&](std::uint64_t, const MonodromyAssignment& a) {
      seen.insert(canonical_class(a));
      return true;
    });
    std::cout << "conjugacy classes: " << seen.size() << "\n";
  }
  if (branch_report) {
    const auto census = branch_census(*fan, tree, degree);
    std::cout << "branch sets:\n";
    for (const auto& [set, n] : census.branch_sets)
      std::cout << "  " << ray_list(set) << ": " << n << (has_adjacent_pair(*fan, set) ? " (adjacent pair)" : "") << "\n";
    std::cout << "nonempty without adjacent rays: " << census.admissible.size() << "\n";
    char type = 'A';
    for (const auto& orbit : census.orbits) {
      std::cout << "  type " << type++ << ": " << orbit.size() << " (branched over " << orbit.front().size() << " rays, e.g. "
                << ray_list(orbit.front()) << ")\n";
    }
  }
  return kOk;
}

int cmd_pl_sweep(const std::string& file, std::size_t degree, std::size_t jobs, const std::string& cache, bool resume,
                 std::int64_t limit, bool timings, bool expect_trivial, bool quiet) {
  auto fan = io::load_fan(resolve(file, ".fan.json"));
  SweepOptions opt;
  opt.degree = degree;
  opt.jobs = jobs;
  if (!cache.empty()) opt.cache = fs::path(cache);
  opt.resume = resume;
  if (limit >= 0) opt.limit = static_cast<std::uint64_t>(limit);
  opt.timings = timings;
  if (!quiet)
    opt.progress = [](std::uint64_t done, std::uint64_t total) {
      if (done % 16384 < 256 || done == total) std::cerr << "\r" << done << " / " << total << std::flush;
    };
  auto s = run_sweep(fan, opt);
  if (!quiet) std::cerr << "\n";
  if (opt.cache) s = summarize_cache(fan, degree, *opt.cache);
  std::cout << "records: " << s.processed << " / " << s.total << (s.complete() ? "" : " (incomplete)") << "\n";
  for (const auto& [tag, n] : s.by_verdict) std::cout << "  " << tag << ": " << n << "\n";
  std::cout << "PL dimensions:";
  for (const auto& [d, n] : s.by_dim) std::cout << " " << d << ":" << n;
  std::cout << "\n";
  std::cout << "nontrivial: " << s.nontrivial.size() << "\n";
  for (const auto& r : s.nontrivial)
    std::cout << "  index " << r.index << " dim " << r.dim_pl << " branch rays " << ray_list(r.branch_rays) << "\n";
  if (expect_trivial && !s.nontrivial.empty()) return kNontrivial;
  return kOk;
}

int cmd_pl_solve(const std::string& file, const std::string& cover_file, const std::string& branch, bool branch_given,
                 bool integral, bool expect_trivial) {
  auto fan = io::load_fan(resolve(file, ".fan.json"));
  std::shared_ptr<const CoverPoset> cover;
  if (!cover_file.empty()) {
    cover = io::cover_from_json(io::read_json(cover_file), fan);
  } else if (branch_given) {
    const auto tree = spanning_tree(*fan);
    const auto a = assignment_for_branch_set(*fan, tree, parse_rays(branch));
    if (!a) {
      std::cerr << "no degree-2 cover is branched exactly over " << ray_list(parse_rays(branch)) << "\n";
      return kInvalid;
    }
    std::cout << "assignment: " << io::to_json(*a).dump() << "\n";
    cover = build_cover_detailed(fan, tree, *a).cover;
  } else {
    std::cerr << "pass --cover or --branch-rays\n";
    return kInvalid;
  }
  const auto rep = validate_cover(*cover);
  if (!rep.ok()) {
    std::cerr << "invalid cover:\n" << rep.str();
    return kInvalid;
  }
  std::cout << "cover: " << cover->summary() << "\n";
  PLSystem sys(*fan);
  const auto v = sys.values_at_rays(*cover);
  std::cout << "values-at-rays system: " << v.rows.size() << " x " << v.ray_cells.size() << ", rank "
            << rank(v.matrix()) << "\n";
  const auto basis = solve(cover, integral ? SolveMode::integral : SolveMode::rational);
  std::cout << "PL dimension: " << basis.dim << (integral ? " (integral lattice basis)" : "") << "\n";
  for (std::size_t i = 0; i < basis.functions.size(); ++i) {
    std::cout << "basis " << i << (i < basis.pullback_count ? " (pullback)" : "") << ":\n"
              << format_function(basis.functions[i]);
  }
  const auto verdict = group_triviality(cover, sys);
  std::cout << "verdict: " << (verdict.all_trivial() ? "AllTrivial(" + verdict.tag() + ")" : "Nontrivial") << "\n";
  if (verdict.kind == VerdictKind::nontrivial) {
    std::cout << "witness:\n" << format_function(*verdict.witness);
    for (const auto& m : multisets(*verdict.witness)) std::cout << "  u(cone " << m.cone << ") = " << format_multiset(m) << "\n";
    if (expect_trivial) return kNontrivial;
  }
  return kOk;
}

void print_chern(const ChernData& c) {
  for (std::size_t k = 0; k < c.multisets.size(); ++k) {
    std::cout << "  u(cone " << k << ") = {";
    bool first = true;
    for (const auto& [u, m] : c.multisets[k]) {
      std::cout << (first ? "" : ", ") << to_string(u) << (m > 1 ? " x" + std::to_string(m) : "");
      first = false;
    }
    std::cout << "}  c1 = " << format_polynomial(c.chern(k, 1)) << "\n";
  }
}

int cmd_bundle(const std::string& what, const std::string& file) {
  io::Bundle b;
  try {
    b = io::load_bundle(resolve(file, ".bundle.json"));
  } catch (const std::exception& e) {
    std::cerr << "cannot load bundle: " << e.what() << "\n";
    return kInvalid;
  }
  const auto rep = verify(b.data, b.cert);
  if (what == "verify") {
    for (std::size_t r = 0; r < b.data.filtrations.size(); ++r)
      std::cout << "ray " << r << ": " << b.data.filtrations[r].str() << "\n";
    const auto screen = necessary_dimension_check(b.data);
    if (screen.status == DimensionCheck::ok)
      std::cout << "dimension screen: ok (" << DimensionCheck::annotation << ")\n";
    else
      std::cout << "dimension screen: violation: " << screen.message << "\n";
    std::cout << "verify: " << rep.str() << "\n";
    return rep.ok() ? kOk : kInvalid;
  }
  if (!rep.ok()) {
    std::cerr << "certificate does not verify: " << rep.str() << "\n";
    return kInvalid;
  }
  if (what == "chern") {
    const auto c = chern(b.data, b.cert);
    print_chern(c);
    std::cout << "chern: " << (is_trivial_chern(b.data, b.cert) ? "trivial" : "nontrivial") << "\n";
    return kOk;
  }
  const auto bc = branched_cover_of(b.data, b.cert);
  const auto cr = validate_cover(*bc.cover);
  std::cout << "cover: " << bc.cover->summary() << " (" << cr.str() << ")\n";
  std::vector<std::size_t> branched;
  for (auto c : bc.cover->ramification_cells())
    if (bc.cover->dim(c) == 1) branched.push_back(bc.cover->fan().face(bc.cover->cell(c).base).rays[0]);
  std::cout << "branched over rays: " << ray_list(branched) << "\n";
  std::cout << "Psi:\n" << format_function(bc.psi);
  for (const auto& m : multisets(bc.psi)) std::cout << "  u(cone " << m.cone << ") = " << format_multiset(m) << "\n";
  return cr.ok() ? kOk : kInvalid;
}

// ---- reproduction harness

struct Checker {
  int failures = 0;
  template <class A, class B>
  void expect(const std::string& what, const A& got, const B& want) {
    const bool ok = got == want;
    std::cout << (ok ? "  MATCH    " : "  MISMATCH ") << what << ": " << json(got).dump();
    if (!ok) std::cout << " (expected " << json(want).dump() << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

std::vector<std::vector<RationalVector>> rational_table(const json& j) {
  std::vector<std::vector<RationalVector>> t;
  for (const auto& cone : j) {
    std::vector<RationalVector> row;
    for (const auto& u : cone) row.push_back(io::rational_vector_from(u));
    t.push_back(row);
  }
  return t;
}

std::vector<long> to_longs(const IntegerVector& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.get_si());
  return out;
}

int reproduce_fulton_deg2(const json& e, Checker& ck) {
  auto fan = io::load_fan(data_dir() / e.at("fan").get<std::string>());
  ck.expect("rays", fan->num_rays(), e.at("rays").get<std::size_t>());
  ck.expect("maximal cones", fan->num_max_cones(), e.at("max_cones").get<std::size_t>());
  ck.expect("walls", fan->num_walls(), e.at("walls").get<std::size_t>());
  ck.expect("complete", fan->complete(), e.at("complete").get<bool>());
  ck.expect("wall relation of cone 0", to_longs(fan->wall_relation(0).at(0)), e.at("wall_relation_cone0").get<std::vector<long>>());
  const auto tree = spanning_tree(*fan);
  const auto a = assignment_for_branch_set(*fan, tree, e.at("branch_rays").get<std::vector<std::size_t>>());
  if (!a) {
    ck.expect("type-C cover exists", false, true);
    return ck.failures;
  }
  auto built = build_cover_detailed(fan, tree, *a);
  PLSystem sys(*fan);
  const auto v = sys.values_at_rays(*built.cover);
  std::cout << "  values-at-rays matrix (columns = ray cells):\n";
  for (const auto& row : v.rows) {
    std::cout << "   ";
    for (auto x : row) std::cout << std::setw(3) << x;
    std::cout << "\n";
  }
  ck.expect("matrix rows", v.rows.size(), e.at("matrix_rows").get<std::size_t>());
  ck.expect("matrix cols", v.ray_cells.size(), e.at("matrix_cols").get<std::size_t>());
  ck.expect("matrix rank", rank(v.matrix()), e.at("matrix_rank").get<std::size_t>());
  const auto verdict = group_triviality(built.cover, sys);
  ck.expect("PL dimension", verdict.dim, e.at("pl_dim").get<std::size_t>());
  ck.expect("verdict", verdict.tag(), e.at("verdict").get<std::string>());
  ck.expect("ray cells", v.ray_cells.size(), e.at("ray_cells").get<std::size_t>());
  ck.expect("maximal cells", built.cover->top_cells().size(), e.at("max_cells").get<std::size_t>());
  ck.expect("euler characteristic", built.cover->euler_characteristic(), e.at("euler_characteristic").get<long>());
  const auto census = branch_census(*fan, tree, 2);
  ck.expect("assignments", census.assignments, e.at("assignments").get<std::uint64_t>());
  ck.expect("admissible branch sets", census.admissible.size(), e.at("admissible_branch_sets").get<std::size_t>());
  std::vector<std::size_t> sizes;
  for (const auto& o : census.orbits) sizes.push_back(o.size());
  ck.expect("orbit sizes (types A, B, C)", sizes, e.at("orbit_sizes").get<std::vector<std::size_t>>());
  return ck.failures;
}

int reproduce_eikelberg(const json& e, Checker& ck) {
  auto fan = io::load_fan(data_dir() / e.at("fan").get<std::string>());
  ck.expect("complete", fan->complete(), e.at("complete").get<bool>());
  const auto tree = spanning_tree(*fan);
  const auto branch = e.at("branch_rays").get<std::vector<std::size_t>>();
  const auto a = assignment_for_branch_set(*fan, tree, branch);
  if (!a) {
    ck.expect("cover exists", false, true);
    return ck.failures;
  }
  auto cover = build_cover_detailed(fan, tree, *a).cover;
  const auto table = rational_table(e.at("psi"));
  const auto psi = realize_multisets(cover, table);
  ck.expect("listed Psi satisfies the constraints", psi.has_value() && is_consistent(*psi), true);
  if (psi) ck.expect("Psi trivial", is_trivial_function(*psi), false);
  ck.expect("group verdict", group_triviality(cover).tag(), std::string("nontrivial"));
  const auto b = io::load_bundle(data_dir() / e.at("bundle").get<std::string>());
  ck.expect("bundle verifies", verify(b.data, b.cert).ok(), true);
  const auto bc = branched_cover_of(b.data, b.cert);
  std::vector<std::size_t> branched;
  for (auto c : bc.cover->ramification_cells())
    if (bc.cover->dim(c) == 1) branched.push_back(fan->face(bc.cover->cell(c).base).rays[0]);
  ck.expect("bundle cover branch rays", branched, branch);
  const auto ms = multisets(bc.psi);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    ConeMultiset want;
    want.cone = k;
    for (const auto& u : table[k]) ++want.entries[u];
    ck.expect("u(cone " + std::to_string(k) + ")", format_multiset(ms[k]), format_multiset(want));
  }
  return ck.failures;
}

int reproduce_fulton_rank3(const json& e, Checker& ck) {
  const auto b = io::load_bundle(data_dir() / e.at("bundle").get<std::string>());
  const auto rep = verify(b.data, b.cert);
  std::cout << "  verify: " << rep.str() << "\n";
  ck.expect("bundle verifies", rep.ok(), true);
  const auto screen = necessary_dimension_check(b.data);
  std::cout << "  dimension screen: " << (screen.status == DimensionCheck::ok ? "ok" : "violation: " + screen.message) << "\n";
  std::vector<std::vector<std::vector<long>>> got;
  for (const auto& pieces : b.cert.cones) {
    std::vector<std::vector<long>> row;
    for (const auto& p : pieces) row.push_back(to_longs(p.u));
    got.push_back(row);
  }
  ck.expect("certificate multisets", got, e.at("multisets").get<std::vector<std::vector<std::vector<long>>>>());
  if (!rep.ok()) return ck.failures;
  ck.expect("trivial chern", is_trivial_chern(b.data, b.cert), e.at("trivial_chern").get<bool>());
  ck.expect("cover degree", branched_cover_of(b.data, b.cert).cover->degree(), e.at("degree").get<std::uint64_t>());
  return ck.failures;
}

int reproduce_sigma_prime(const json& e, Checker& ck, std::size_t jobs) {
  auto fan = io::load_fan(data_dir() / e.at("fan").get<std::string>());
  ck.expect("complete", fan->complete(), e.at("complete").get<bool>());
  ck.expect("non-tree edges", spanning_tree(*fan).non_tree_walls.size(), e.at("non_tree_edges").get<std::size_t>());
  SweepOptions opt;
  opt.degree = e.at("degree").get<std::size_t>();
  opt.jobs = jobs;
  const auto s = run_sweep(fan, opt);
  for (const auto& [tag, n] : s.by_verdict) std::cout << "  " << tag << ": " << n << "\n";
  ck.expect("assignments processed", s.processed, e.at("assignments").get<std::uint64_t>());
  ck.expect("nontrivial", s.nontrivial.size(), e.at("nontrivial").get<std::size_t>());
  for (const auto& r : s.nontrivial) std::cout << "  DISCREPANCY: nontrivial at index " << r.index << "\n";
  return ck.failures;
}

int reproduce_p2(const json& e, Checker& ck) {
  const auto b = io::load_bundle(data_dir() / e.at("bundle").get<std::string>());
  ck.expect("bundle verifies", verify(b.data, b.cert).ok(), true);
  const auto bc = branched_cover_of(b.data, b.cert);
  const auto& c = *bc.cover;
  ck.expect("cover validates", validate_cover(c).ok(), true);
  ck.expect("maximal cells", c.top_cells().size(), e.at("max_cells").get<std::size_t>());
  ck.expect("minimal weight", c.degree(), e.at("minimal_weight").get<std::uint64_t>());
  const auto dual = e.at("dual_basis").get<std::vector<std::vector<long>>>();
  const auto names = e.at("cone_index").get<std::vector<int>>();
  const Fan& fan = c.fan();
  for (auto t : c.top_cells()) {
    const auto k = *fan.max_cone_index(c.cell(t).base);
    ck.expect("top cells have weight 1", c.cell(t).weight, 1u);
    // The cell's own ray is the one where the functional is 1.
    const auto& u = bc.psi.u.at(t);
    std::size_t j = 0;
    for (auto r : fan.max_cone(k).rays)
      if (dot<Rational>(u, to_rational(fan.ray(r))) == 1) j = r;
    std::vector<long> want{dual[j][0] - dual[k][0], dual[j][1] - dual[k][1]};
    std::cout << "  sigma_" << names[k] << names[j] << ": Psi = " << to_string(u) << "\n";
    ck.expect("Psi on sigma_" + std::to_string(names[k]) + std::to_string(names[j]) + " equals e_" +
                  std::to_string(names[j]) + "* - e_" + std::to_string(names[k]) + "*",
              to_string(u), to_string(io::rational_vector_from(json(want))));
  }
  return ck.failures;
}

int cmd_reproduce(const std::string& name, std::size_t jobs) {
  const std::map<std::string, std::string> files{{"eikelberg", "eikelberg.json"},
                                                 {"fulton-deg2", "fulton-deg2.json"},
                                                 {"fulton-rank3", "fulton-rank3.json"},
                                                 {"sigma-prime-deg3", "sigma-prime-deg3.json"},
                                                 {"p2-tangent", "p2-tangent.json"}};
  auto it = files.find(name);
  if (it == files.end()) {
    std::cerr << "unknown reproduction " << name << "\n";
    return kInvalid;
  }
  const auto e = io::read_json(data_dir() / "expected" / it->second);
  Checker ck;
  std::cout << name << ":\n";
  if (name == "fulton-deg2") reproduce_fulton_deg2(e, ck);
  if (name == "eikelberg") reproduce_eikelberg(e, ck);
  if (name == "fulton-rank3") reproduce_fulton_rank3(e, ck);
  if (name == "sigma-prime-deg3") reproduce_sigma_prime(e, ck, jobs);
  if (name == "p2-tangent") reproduce_p2(e, ck);
  std::cout << (ck.failures == 0 ? "all values match" : std::to_string(ck.failures) + " mismatches") << "\n";
  return ck.failures == 0 ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branched covers of fans, piecewise-linear functions and Klyachko data"};
  app.require_subcommand(1);
  int status = kOk;

  auto* fan_cmd = app.add_subcommand("fan", "fan operations")->require_subcommand(1);
  std::string fan_file;
  auto* validate = fan_cmd->add_subcommand("validate", "load and validate a fan");
  validate->add_option("file", fan_file, "fan JSON file or bundled name")->required();
  validate->callback([&] { status = cmd_fan_validate(fan_file); });

  auto* covers = app.add_subcommand("covers", "cover enumeration")->require_subcommand(1);
  auto* enumerate = covers->add_subcommand("enumerate", "count monodromy assignments");
  std::size_t degree = 2;
  bool classes = false, branch_report = false;
  enumerate->add_option("fan", fan_file)->required();
  enumerate->add_option("--degree,-d", degree)->required()->check(CLI::Range(1, 8));
  enumerate->add_flag("--classes", classes, "deduplicate by simultaneous conjugacy");
  enumerate->add_flag("--branch-report", branch_report, "tabulate branch ray sets");
  enumerate->callback([&] { status = cmd_covers_enumerate(fan_file, degree, classes, branch_report); });

  auto* pl = app.add_subcommand("pl", "piecewise-linear functions")->require_subcommand(1);
  auto* sweep = pl->add_subcommand("sweep", "solve every cover of a given degree");
  std::size_t jobs = default_jobs();
  std::string cache;
  bool resume = false, timings = false, expect_trivial = false, quiet = false;
  std::int64_t limit = -1;
  sweep->add_option("fan", fan_file)->required();
  sweep->add_option("--degree,-d", degree)->required()->check(CLI::Range(1, 8));
  sweep->add_option("--jobs,-j", jobs, "worker threads (default FANBRANCH_JOBS or hardware)");
  sweep->add_option("--cache", cache, "line-delimited JSON record file");
  sweep->add_flag("--resume", resume, "continue from the records already in the cache");
  sweep->add_option("--limit", limit, "stop after this many new records");
  sweep->add_flag("--timings", timings, "store per-record wall-clock time");
  sweep->add_flag("--expect-trivial", expect_trivial, "exit 2 on any nontrivial finding");
  sweep->add_flag("--quiet,-q", quiet, "no progress output");
  sweep->callback([&] { status = cmd_pl_sweep(fan_file, degree, jobs, cache, resume, limit, timings, expect_trivial, quiet); });

  auto* solve_cmd = pl->add_subcommand("solve", "solve a single cover");
  std::string cover_file, branch;
  bool integral = false;
  solve_cmd->add_option("fan", fan_file)->required();
  auto* cover_opt = solve_cmd->add_option("--cover", cover_file, "cover JSON (explicit cells or monodromy)");
  auto* branch_opt = solve_cmd->add_option("--branch-rays", branch, "degree-2 cover by branch rays, e.g. 0,2,5,7");
  cover_opt->excludes(branch_opt);
  solve_cmd->add_flag("--integral", integral, "integral lattice basis");
  solve_cmd->add_flag("--expect-trivial", expect_trivial);
  solve_cmd->callback([&] { status = cmd_pl_solve(fan_file, cover_file, branch, branch_opt->count() > 0, integral, expect_trivial); });

  auto* bundle = app.add_subcommand("bundle", "Klyachko data")->require_subcommand(1);
  std::string bundle_file;
  for (const char* what : {"verify", "chern", "cover"}) {
    auto* sub = bundle->add_subcommand(what);
    sub->add_option("file", bundle_file)->required();
    sub->callback([&, what] { status = cmd_bundle(what, bundle_file); });
  }

  auto* paper = app.add_subcommand("paper", "reproduction harness")->require_subcommand(1);
  auto* reproduce = paper->add_subcommand("reproduce", "run a bundled computation and compare with expected values");
  std::string name;
  reproduce->add_option("name", name)
      ->required()
      ->check(CLI::IsMember({"eikelberg", "fulton-deg2", "fulton-rank3", "sigma-prime-deg3", "p2-tangent"}));
  reproduce->add_option("--jobs,-j", jobs);
  reproduce->callback([&] { status = cmd_reproduce(name, jobs); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return status;
}
