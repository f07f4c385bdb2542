// Copyright 2026 The memconst Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance runner. One line per criterion; exit status 1 if any fail.
//   acceptance            run all
//   acceptance --only N   run criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "memconst/channel_planner.hpp"
#include "memconst/error.hpp"
#include "memconst/evo_search.hpp"
#include "memconst/memory_model.hpp"
#include "memconst/predictor.hpp"
#include "memconst/random.hpp"
#include "memconst/search_space.hpp"
#include "memconst/serialization.hpp"
#include "memconst/stats.hpp"

namespace mc = memconst;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 means no runtime bound
  std::function<Outcome()> body;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

template <typename T>
std::string list(const std::vector<T>& v) {
  std::ostringstream s;
  s << '[';
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  s << ']';
  return s.str();
}

mc::SyntheticParams zero_noise() { return {1.0, 0.001, 0.0, 0}; }

Outcome symmetry() {
  mc::Rng rng(101);
  const std::vector<mc::ExpandRatio> ratios{1, 2, 3, 4, 6, mc::ExpandRatio(3, 2), mc::ExpandRatio(5, 2)};
  int equal = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const std::int64_t c = 1 + static_cast<std::int64_t>(rng.uniform_index(512));
    mc::MBBlockShape s{c, c, rng.pick(ratios), 2 * static_cast<std::int64_t>(rng.uniform_index(5)) + 1, 1,
                       1 + static_cast<std::int64_t>(rng.uniform_index(224))};
    if (mc::expansion_memory(s).total_items == mc::projection_memory(s).total_items) ++equal;
  }
  return {equal == n, std::to_string(equal) + "/" + std::to_string(n) + " shapes equal"};
}

double rel_residual(const mc::Quadratic& q, double x) {
  const double terms[] = {q.a * x * x, q.b * x, q.d};
  const double scale = std::max({std::abs(terms[0]), std::abs(terms[1]), std::abs(terms[2])});
  return std::abs(terms[0] + terms[1] + terms[2]) / scale;
}

Outcome closed_form() {
  double worst = 0.0;
  double min_disc = INFINITY;
  int points = 0;
  for (double c : {1.0, 3.0, 8.0, 16.0, 24.0, 40.0, 80.0, 160.0, 320.0, 1024.0}) {
    for (double i : {2.0, 4.0, 7.0, 14.0, 28.0, 56.0, 112.0, 160.0, 224.0, 512.0}) {
      for (double k : {3.0, 5.0, 7.0, 9.0, 11.0}) {
        for (double e : {3.0, 6.0}) {
          const auto q1 = mc::dw_to_exp_quadratic(c, i, k, e);
          const auto q2 = mc::exp_dominated_quadratic(c, i, e);
          min_disc = std::min({min_disc, q1.b * q1.b - 4 * q1.a * q1.d, q2.b * q2.b - 4 * q2.a * q2.d});
          worst = std::max({worst, rel_residual(q1, mc::cout_dw_to_exp(c, i, k, e)),
                            rel_residual(q2, mc::cout_exp_dominated(c, i, e))});
          ++points;
        }
      }
    }
  }
  return {worst <= 1e-6 && min_disc > 0.0,
          std::to_string(points) + " points, max rel residual " + fmt(worst, 3) +
              ", min discriminant " + fmt(min_disc, 3)};
}

Outcome maximality() {
  mc::Rng rng(303);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform_index(hi - lo + 1)); };
  int ok = 0;
  int scanned = 0;
  for (int n = 0; n < 100; ++n) {
    const std::int64_t i = std::int64_t{2} << pick(1, 6);
    const mc::StageTemplate cur{i, 2 * pick(1, 3) + 1, pick(2, 6), pick(1, 4), true};
    const mc::StageTemplate next{i / 2, 2 * pick(1, 3) + 1, pick(2, 6), pick(1, 4), pick(0, 1) == 1};
    const auto blocks = mc::stage_blocks(pick(1, 400), cur);
    const mc::Items target = mc::stage_peak(blocks);
    const auto c = mc::numeric_balance(blocks, next);
    std::int64_t lin = 0;
    while (mc::stage_peak(mc::stage_blocks(lin + 1, next)) <= target) ++lin;
    ++scanned;
    const bool max_ok = mc::stage_peak(mc::stage_blocks(c, next)) <= target &&
                        mc::stage_peak(mc::stage_blocks(c + 1, next)) > target;
    if (max_ok && c == lin) ++ok;
  }
  return {ok == 100, std::to_string(ok) + "/100 transitions maximal and equal to linear scan (" +
                         std::to_string(scanned) + " scans)"};
}

Outcome plausibility() {
  const auto space = mc::reference_space();
  const auto& w = space.schedule.stage_widths;
  const bool monotone = std::is_sorted(w.begin(), w.end()) && space.schedule.head_width >= w.back();
  const auto peaks = mc::stage_peaks(mc::resolve(mc::maximal_config(space), space));
  const mc::Items top = *std::max_element(peaks.begin(), peaks.end());
  std::vector<std::string> ratios;
  bool within = true;
  for (auto p : peaks) {
    const double r = static_cast<double>(p) / static_cast<double>(top);
    ratios.push_back(fmt(r, 3));
    within = within && r >= 0.9;
  }
  std::ostringstream out, err;
  const int code = mc::cli::run({"plan"}, out, err);
  const auto report = out.str();
  bool listed = code == 0 && report.find("deviation") != std::string::npos;
  for (const char* v : {"8", "24", "96", "288", "360", "384", "392"}) {
    listed = listed && report.find(v) != std::string::npos;
  }
  std::string devs;
  for (const auto& a : mc::align_with_published(space.schedule)) {
    if (!devs.empty()) devs += ' ';
    devs += a.field + "=" + std::to_string(a.published);
  }
  return {monotone && within && listed,
          "widths " + list(w) + " head " + std::to_string(space.schedule.head_width) +
              (monotone ? " monotone" : " NOT monotone") + "; stage peak / max " + list(ratios) +
              (within ? "" : " (below 0.9)") + "; report lists deviations: " +
              (listed ? "yes" : "no") + " (published " + devs + ")"};
}

std::vector<mc::SubnetConfig> enumerate(const mc::SupernetSpace& space) {
  std::vector<mc::StageGenes> stages;
  const int slots = space.max_depth();
  for (int d : space.depth_options) {
    std::vector<mc::StageGenes> partial{mc::StageGenes{d, std::vector<std::int64_t>(slots, space.kernel_options.front()),
                                                       std::vector<mc::ExpandRatio>(slots, space.expand_options.front())}};
    for (int j = 0; j < d; ++j) {
      std::vector<mc::StageGenes> grown;
      for (const auto& g : partial) {
        for (auto k : space.kernel_options) {
          for (auto e : space.expand_options) {
            auto h = g;
            h.kernels[j] = k;
            h.expands[j] = e;
            grown.push_back(h);
          }
        }
      }
      partial = std::move(grown);
    }
    stages.insert(stages.end(), partial.begin(), partial.end());
  }
  std::vector<mc::SubnetConfig> out{mc::SubnetConfig{}};
  for (int s = 0; s < space.num_stages; ++s) {
    std::vector<mc::SubnetConfig> grown;
    for (const auto& c : out) {
      for (const auto& g : stages) {
        auto x = c;
        x.stages.push_back(g);
        grown.push_back(x);
      }
    }
    out = std::move(grown);
  }
  std::vector<mc::SubnetConfig> all;
  for (auto r : space.resolution_options) {
    for (auto c : out) {
      c.resolution = r;
      all.push_back(std::move(c));
    }
  }
  return all;
}

Outcome cardinality() {
  const auto space = mc::reference_space();
  const mc::BigInt expected = mc::BigInt(7371) * 7371 * 7371 * 7371 * 7371;
  const auto count = mc::count_subnets(space);

  mc::SupernetSpace small = space;
  small.num_stages = 2;
  small.depth_options = {1, 2};
  small.kernel_options = {3, 5};
  small.expand_options = {3, 6};
  small.resolution_options = {224};
  small.schedule = mc::plan_schedule(small.reference(), 8, 8, mc::PlanMode::NumericBalance, 2);
  const auto all = enumerate(small);
  std::vector<std::string> keys;
  for (const auto& c : all) {
    if (!mc::validate(c, small).empty()) return {false, "enumerated config failed validation"};
    keys.push_back(mc::Json(c).dump());
  }
  std::sort(keys.begin(), keys.end());
  const auto distinct = std::unique(keys.begin(), keys.end()) - keys.begin();
  const bool brute = static_cast<std::size_t>(distinct) == all.size() && all.size() <= 10000 &&
                     mc::BigInt(all.size()) == mc::count_subnets(small);
  return {count == expected && brute,
          "count " + count.str() + (count == expected ? " == " : " != ") + "7371^5; reduced space " +
              std::to_string(all.size()) + " enumerated vs " + mc::count_subnets(small).str()};
}

const std::vector<mc::Items> kLevels{325000, 350000, 400000, 800000};

Outcome soundness() {
  const auto space = mc::reference_space();
  int ok = 0;
  int total = 0;
  std::string failures;
  for (auto level : kLevels) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      mc::SyntheticParams p;
      p.noise_seed = seed;
      const mc::SyntheticPredictor predictor(space, p);
      mc::SearchParams params;
      params.seed = seed;
      ++total;
      try {
        const auto r = mc::search(space, {level, true}, predictor, params);
        const auto peak = mc::profile_network(mc::resolve(r.best_config, space)).peak_items;
        if (peak <= level) {
          ++ok;
        } else {
          failures += " " + std::to_string(level) + "/" + std::to_string(seed);
        }
      } catch (const mc::InfeasibleError&) {
        failures += " " + std::to_string(level) + "/" + std::to_string(seed) + "(infeasible)";
      }
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " re-profiled peaks within bound" + (failures.empty() ? "" : ";" + failures)};
}

Outcome effectiveness() {
  const auto space = mc::reference_space();
  const mc::Items limit = 350000;
  const mc::SyntheticPredictor predictor(space, zero_noise());
  mc::Rng rng(7007);
  std::vector<double> scores;
  std::size_t draws = 0;
  while (scores.size() < 10000) {
    auto c = mc::sample_uniform(space, rng);
    ++draws;
    if (mc::config_peak(c, space) <= limit) scores.push_back(predictor.predict(c));
  }
  std::sort(scores.begin(), scores.end());
  const double p99 = scores[static_cast<std::size_t>(std::ceil(0.99 * scores.size())) - 1];
  int wins = 0;
  std::vector<std::string> bests;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    mc::SearchParams params;
    params.seed = seed;
    const auto r = mc::search(space, {limit, true}, predictor, params);
    bests.push_back(fmt(r.best_score, 6));
    if (r.best_score >= p99) ++wins;
  }
  return {wins >= 9, std::to_string(wins) + "/10 seeds >= p99 " + fmt(p99, 6) + " of 10000 feasible (" +
                         std::to_string(draws) + " draws); best " + list(bests)};
}

Outcome flatness() {
  const auto space = mc::reference_space();
  auto baseline = space;
  baseline.schedule = mc::ChannelSchedule{16, {16, 32, 64, 128, 256}, space.schedule.head_width, 8,
                                          mc::PlanMode::NumericBalance};
  const auto config = mc::maximal_config(space);
  auto cv = [&](const mc::SupernetSpace& s) {
    const auto peaks = mc::block_peaks(mc::resolve(config, s));
    const std::vector<double> xs(peaks.begin(), peaks.end());
    return mc::coefficient_of_variation(xs);
  };
  const double planner = cv(space);
  const double base = cv(baseline);
  return {planner <= 0.5 * base,
          "block-peak CV planner " + fmt(planner) + " vs baseline " + fmt(base) + " (ratio " +
              fmt(planner / base, 3) + ")"};
}

Outcome balance() {
  const auto space = mc::reference_space();
  const mc::SyntheticPredictor predictor(space, zero_noise());
  const mc::Scorer scorer = [&](const mc::SubnetConfig& c) { return predictor.predict(c); };
  const std::uint64_t seed = 9;
  const auto bal = mc::balanced_sample(space, 1000, 10, seed, scorer);
  const auto uni = mc::uniform_sample(space, 1000, 10, seed, scorer);
  const auto occ = mc::bucket_occupancy(bal);
  const auto occ_uni = mc::bucket_occupancy(uni);

  // Check the skipped buckets really are unreachable with a much larger draw.
  const auto big = mc::uniform_sample(space, 20000, 10, seed, scorer);
  const auto occ_big = mc::bucket_occupancy(big);
  bool unreachable = big.bucket_edges == bal.bucket_edges;
  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < occ.size(); ++b) {
    const bool skipped = std::find(bal.empty_buckets.begin(), bal.empty_buckets.end(), b) !=
                         bal.empty_buckets.end();
    if (skipped) {
      unreachable = unreachable && occ_big[b] == 0;
    } else {
      active.push_back(occ[b]);
    }
  }
  const auto [lo, hi] = std::minmax_element(active.begin(), active.end());
  const bool spread = hi != active.end() && *hi - *lo <= 1;
  const bool lowest = occ[0] > occ_uni[0];
  return {spread && lowest && unreachable && bal.rows.size() == 1000,
          "balanced " + list(occ) + " uniform " + list(occ_uni) + "; spread over occupied " +
              std::to_string(active.empty() ? 0 : *hi - *lo) + "; empty " + list(bal.empty_buckets) +
              (unreachable ? " (none of 20000 uniform draws land there)" : " (reachable!)")};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "memconst_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const char* n) { return (dir / n).string(); };
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) { return mc::cli::run(args, out, err); };
  int codes = run({"--seed", "21", "--out", p("d.jsonl"), "sample", "--n", "500"});
  codes += run({"--seed", "21", "--out", p("m.json"), "train-predictor", "--dataset", p("d.jsonl")});
  for (const char* n : {"a.json", "b.json"}) {
    codes += run({"--seed", "21", "--out", p(n), "search", "--model", p("m.json"), "--max-peak", "350000"});
  }
  if (codes != 0) return {false, "command failed: " + err.str()};
  const auto a = mc::read_text(p("a.json"));
  const auto b = mc::read_text(p("b.json"));
  fs::remove_all(dir);
  return {a == b && !a.empty(), std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                    " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 2;
    }
  }
  const std::vector<Criterion> criteria{
      {1, "within-stage symmetry", 1, symmetry},
      {2, "closed-form fidelity", 1, closed_form},
      {3, "numeric balancer maximality", 10, maximality},
      {4, "schedule plausibility", 5, plausibility},
      {5, "space cardinality", 1, cardinality},
      {6, "constraint soundness", 300, soundness},
      {7, "search effectiveness", 600, effectiveness},
      {8, "memory flatness", 1, flatness},
      {9, "balanced sampling", 60, balance},
      {10, "determinism", 0, determinism},
  };
  bool all = true;
  bool ran = false;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0 || s < c.limit_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " C" << std::setw(2) << std::setfill('0') << c.id
              << std::setfill(' ') << ' ' << c.name << ": " << o.detail << " [" << fmt(s, 3) << " s"
              << (in_time ? "" : ", over " + fmt(c.limit_s) + " s limit") << "]\n";
  }
  if (!ran) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return all ? 0 : 1;
}
