#include <fanbranch/sweep.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

using namespace fanbranch;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("fanbranch_sweep_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SweepOptions options(std::size_t jobs, const fs::path& cache) {
  SweepOptions o;
  o.degree = 2;
  o.jobs = jobs;
  o.chunk = 16;
  o.cache = cache;
  return o;
}

}  // namespace

TEST(Sweep, FultonDegreeTwoAllTrivial) {
  const auto s = run_sweep(fixture_fan("fulton"), SweepOptions{});
  EXPECT_EQ(s.total, 128u);
  EXPECT_TRUE(s.complete());
  EXPECT_TRUE(s.nontrivial.empty());
  for (const auto& [dim, n] : s.by_dim) EXPECT_GE(dim, 3u);
}

TEST(Sweep, DeterministicAcrossJobCounts) {
  TempDir tmp;
  const auto fan = fixture_fan("fulton");
  run_sweep(fan, options(1, tmp.path / "a.jsonl"));
  run_sweep(fan, options(3, tmp.path / "b.jsonl"));
  EXPECT_EQ(slurp(tmp.path / "a.jsonl"), slurp(tmp.path / "b.jsonl"));
  EXPECT_EQ(read_sweep_cache(tmp.path / "a.jsonl", sweep_header(*fan, 2, 128)).size(), 128u);
}

TEST(Sweep, ResumeMatchesUninterrupted) {
  TempDir tmp;
  const auto fan = fixture_fan("fulton");
  run_sweep(fan, options(2, tmp.path / "full.jsonl"));
  auto part = options(2, tmp.path / "part.jsonl");
  part.limit = 50;
  const auto first = run_sweep(fan, part);
  EXPECT_EQ(first.processed, 50u);
  EXPECT_FALSE(first.complete());
  part.limit.reset();
  part.resume = true;
  const auto rest = run_sweep(fan, part);
  EXPECT_EQ(rest.resumed_from, 50u);
  EXPECT_TRUE(rest.complete());
  EXPECT_EQ(slurp(tmp.path / "full.jsonl"), slurp(tmp.path / "part.jsonl"));
}

TEST(Sweep, RefusesCorruptOrForeignCache) {
  TempDir tmp;
  const auto fan = fixture_fan("fulton");
  auto o = options(1, tmp.path / "c.jsonl");
  o.limit = 20;
  run_sweep(fan, o);
  {
    std::ofstream out(tmp.path / "c.jsonl", std::ios::app);
    out << "{\"index\": 20, \"dim_pl\"";
  }
  o.resume = true;
  o.limit.reset();
  EXPECT_THROW(run_sweep(fan, o), SweepError);

  auto other = options(1, tmp.path / "d.jsonl");
  other.limit = 5;
  run_sweep(fan, other);
  other.degree = 3;
  other.resume = true;
  EXPECT_THROW(run_sweep(fan, other), SweepError);
}

TEST(Sweep, TimingsAreOptIn) {
  TempDir tmp;
  const auto fan = fixture_fan("fulton");
  auto o = options(1, tmp.path / "t.jsonl");
  o.limit = 3;
  run_sweep(fan, o);
  EXPECT_EQ(slurp(tmp.path / "t.jsonl").find("seconds"), std::string::npos);
  o.timings = true;
  o.cache = tmp.path / "u.jsonl";
  run_sweep(fan, o);
  EXPECT_NE(slurp(tmp.path / "u.jsonl").find("seconds"), std::string::npos);
}

TEST(Sweep, RecordsRoundTrip) {
  SweepRecord r{7, 3, "pullbacks-only", {0, 2}, {{2}, {1, 1}}, std::nullopt};
  const auto back = SweepRecord::from_json(r.to_json());
  EXPECT_EQ(back.to_json(), r.to_json());
}
