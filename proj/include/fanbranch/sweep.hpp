#pragma once

// Exhaustive PL sweeps over every monodromy assignment of a given degree,
// with a line-delimited JSON cache written in index order.

#include <fanbranch/io.hpp>
#include <fanbranch/monodromy.hpp>
#include <fanbranch/pl.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fanbranch {

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepRecord {
  std::uint64_t index = 0;
  std::size_t dim_pl = 0;
  std::string verdict;
  std::vector<std::size_t> branch_rays;
  std::vector<std::vector<std::size_t>> profile;  // cycle type of each ray monodromy
  std::optional<double> seconds;

  nlohmann::json to_json() const {
    nlohmann::json j{{"index", index}, {"dim_pl", dim_pl}, {"verdict", verdict}, {"branch_rays", branch_rays}, {"profile", profile}};
    if (seconds) j["seconds"] = *seconds;
    return j;
  }
  static SweepRecord from_json(const nlohmann::json& j) {
    SweepRecord r;
    r.index = j.at("index").get<std::uint64_t>();
    r.dim_pl = j.at("dim_pl").get<std::size_t>();
    r.verdict = j.at("verdict").get<std::string>();
    r.branch_rays = j.at("branch_rays").get<std::vector<std::size_t>>();
    r.profile = j.at("profile").get<std::vector<std::vector<std::size_t>>>();
    if (j.contains("seconds")) r.seconds = j.at("seconds").get<double>();
    return r;
  }
};

struct SweepOptions {
  std::size_t degree = 2;
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> cache;
  bool resume = false;
  std::optional<std::uint64_t> limit;  // stop after this many new records
  bool timings = false;
  std::uint64_t chunk = 256;
  std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

struct SweepSummary {
  std::uint64_t total = 0;
  std::uint64_t processed = 0;
  std::uint64_t resumed_from = 0;
  std::map<std::string, std::uint64_t> by_verdict;
  std::map<std::size_t, std::uint64_t> by_dim;
  std::vector<SweepRecord> nontrivial;
  bool complete() const { return processed == total; }

  void add(const SweepRecord& r) {
    ++processed;
    ++by_verdict[r.verdict];
    ++by_dim[r.dim_pl];
    if (r.verdict == verdict_tag(VerdictKind::nontrivial)) nontrivial.push_back(r);
  }
};

/// The sweep's per-assignment computation.
inline SweepRecord sweep_one(const std::shared_ptr<const Fan>& fan, const DualSpanningTree& tree, const PLSystem& sys,
                             const std::vector<Permutation>& perms, std::size_t degree, std::uint64_t index) {
  const auto a = assignment_at(tree, perms, degree, index);
  const auto built = build_cover_detailed(fan, tree, a);
  const auto v = group_triviality(built.cover, sys);
  SweepRecord r;
  r.index = index;
  r.dim_pl = v.dim;
  r.verdict = v.tag();
  r.branch_rays = branch_rays(built.sheets);
  for (const auto& p : built.sheets.ray_monodromy) r.profile.push_back(p.cycle_type());
  return r;
}

inline nlohmann::json sweep_header(const Fan& fan, std::size_t degree, std::uint64_t total) {
  return nlohmann::json{{"sweep", {{"degree", degree}, {"assignments", total}, {"fan", io::to_json(fan)}}}};
}

/// Reads a cache; it must start with a matching header and hold records
/// 0, 1, 2, ... with no gaps. Anything else is treated as corruption.
inline std::vector<SweepRecord> read_sweep_cache(const std::filesystem::path& p, const nlohmann::json& header) {
  std::ifstream in(p);
  if (!in) throw SweepError("cannot open cache " + p.string());
  std::string line;
  std::vector<SweepRecord> out;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) return out;
  ++lineno;
  try {
    if (nlohmann::json::parse(line) != header)
      throw SweepError("cache " + p.string() + " was written for a different fan or degree");
  } catch (const nlohmann::json::exception&) {
    throw SweepError("cache " + p.string() + " has a corrupt header line");
  }
  while (std::getline(in, line)) {
    ++lineno;
    SweepRecord r;
    try {
      r = SweepRecord::from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception&) {
      throw SweepError("cache " + p.string() + " is corrupt at line " + std::to_string(lineno) + "; refusing to resume");
    }
    if (r.index != out.size())
      throw SweepError("cache " + p.string() + " has record " + std::to_string(r.index) + " at line " +
                       std::to_string(lineno) + " (expected " + std::to_string(out.size()) + "); refusing to resume");
    out.push_back(std::move(r));
  }
  if (!in.eof()) throw SweepError("error reading cache " + p.string());
  return out;
}

inline SweepSummary run_sweep(const std::shared_ptr<const Fan>& fan, const SweepOptions& opt) {
  const auto tree = spanning_tree(*fan);
  const PLSystem sys(*fan);
  const auto perms = all_permutations(opt.degree);
  SweepSummary summary;
  summary.total = assignment_count(tree, opt.degree);
  const auto header = sweep_header(*fan, opt.degree, summary.total);

  std::uint64_t start = 0;
  std::ofstream cache;
  if (opt.cache) {
    if (opt.resume && std::filesystem::exists(*opt.cache)) {
      for (const auto& r : read_sweep_cache(*opt.cache, header)) summary.add(r);
      start = summary.processed;
      summary.resumed_from = start;
      cache.open(*opt.cache, std::ios::app);
      if (start == 0 && std::filesystem::file_size(*opt.cache) == 0) cache << header.dump() << "\n";
    } else {
      cache.open(*opt.cache, std::ios::trunc);
      cache << header.dump() << "\n";
    }
    if (!cache) throw SweepError("cannot write cache " + opt.cache->string());
  }
  std::uint64_t end = summary.total;
  if (opt.limit) end = std::min(end, start + *opt.limit);

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::uint64_t, std::vector<SweepRecord>> ready;
  std::atomic<std::uint64_t> next{start};
  std::exception_ptr failure;
  const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
  auto worker = [&] {
    for (;;) {
      const auto lo = next.fetch_add(opt.chunk);
      if (lo >= end) return;
      const auto hi = std::min(end, lo + opt.chunk);
      std::vector<SweepRecord> recs;
      try {
        for (auto i = lo; i < hi; ++i) {
          const auto t0 = std::chrono::steady_clock::now();
          auto r = sweep_one(fan, tree, sys, perms, opt.degree, i);
          if (opt.timings) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          recs.push_back(std::move(r));
        }
      } catch (...) {
        std::lock_guard lk(mu);
        if (!failure) failure = std::current_exception();
        next = end;
        cv.notify_all();
        return;
      }
      std::lock_guard lk(mu);
      ready.emplace(lo, std::move(recs));
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);

  // Single writer: flush chunks in index order.
  std::uint64_t written = start;
  while (written < end) {
    std::vector<SweepRecord> recs;
    {
      std::unique_lock lk(mu);
      cv.wait(lk, [&] { return failure || ready.count(written); });
      if (failure) break;
      recs = std::move(ready.at(written));
      ready.erase(written);
    }
    for (const auto& r : recs) {
      summary.add(r);
      if (cache.is_open()) cache << r.to_json().dump() << "\n";
    }
    if (cache.is_open()) cache.flush();
    written += recs.size();
    if (opt.progress) opt.progress(written, summary.total);
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return summary;
}

/// Summary recomputed from a cache file.
inline SweepSummary summarize_cache(const std::shared_ptr<const Fan>& fan, std::size_t degree,
                                    const std::filesystem::path& p) {
  const auto tree = spanning_tree(*fan);
  SweepSummary s;
  s.total = assignment_count(tree, degree);
  for (const auto& r : read_sweep_cache(p, sweep_header(*fan, degree, s.total))) s.add(r);
  return s;
}

}  // namespace fanbranch
