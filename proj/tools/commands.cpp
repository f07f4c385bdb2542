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


#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "memconst/channel_planner.hpp"
#include "memconst/error.hpp"
#include "memconst/evo_search.hpp"
#include "memconst/memory_model.hpp"
#include "memconst/predictor.hpp"
#include "memconst/search_space.hpp"
#include "memconst/serialization.hpp"
#include "memconst/stats.hpp"

#ifndef MEMCONST_VERSION
#define MEMCONST_VERSION "0.0.0"
#endif

namespace memconst::cli {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string space_path;
  std::string out_path;
};

struct Context {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
  Globals globals;
  std::string command;
  Json inputs = Json::object();
  Json extra = Json::object();
};

SupernetSpace space_from(const std::string& path) {
  return path.empty() ? reference_space() : load_space(path);
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_manifest(const Context& ctx, double wall_seconds) {
  if (ctx.globals.out_path.empty()) return;
  Json m{{"command", ctx.command},
         {"args", ctx.args},
         {"inputs", ctx.inputs},
         {"seed", ctx.globals.seed},
         {"version", MEMCONST_VERSION},
         {"wall_time_s", wall_seconds}};
  for (auto it = ctx.extra.begin(); it != ctx.extra.end(); ++it) m[it.key()] = it.value();
  write_atomic(ctx.globals.out_path + ".manifest.json", dump_json(m));
}

std::string require_out(const Context& ctx) {
  if (ctx.globals.out_path.empty()) {
    throw ValidationError("--out", ctx.command + " needs an output path");
  }
  return ctx.globals.out_path;
}

// Violations are listed one per line before bailing out.
bool report_violations(const SubnetConfig& config, const SupernetSpace& space,
                       const std::string& what, std::ostream& err) {
  const auto violations = validate(config, space);
  if (violations.empty()) return false;
  err << what << ": " << violations.size() << " violation(s)\n";
  for (const auto& v : violations) err << "  " << v.path << ": " << v.message << "\n";
  return true;
}

// ---- profile

struct ProfileOptions {
  std::string config_path;
  bool bytes = false;
  bool include_classifier = false;
  std::string csv_path;
};

int cmd_profile(Context& ctx, const ProfileOptions& o) {
  const SupernetSpace space = space_from(ctx.globals.space_path);
  const SubnetConfig config = load_config(o.config_path);
  ctx.inputs = {{"config", o.config_path}, {"space", ctx.globals.space_path}};
  if (report_violations(config, space, o.config_path, ctx.err)) return kValidation;

  const NetworkSkeleton net = resolve(config, space, o.include_classifier);
  const MemoryProfile profile = profile_network(net);
  const auto flops = flops_estimate(net);

  auto& out = ctx.out;
  out << "layers: " << profile.counted_records()
      << (profile.classifier_excluded ? " (classifier excluded)" : " (classifier included)")
      << "\n";
  out << "peak_items: " << profile.peak_items << " at "
      << profile.records[profile.peak_index].label << "\n";
  out << "avg_items: " << fixed(profile.avg_items, 1) << " +- " << fixed(profile.std_items, 1)
      << "\n";
  if (o.bytes) {
    out << "peak_bytes_fp32: " << items_to_bytes(profile.peak_items, Precision::Float32) << "\n";
    out << "avg_bytes_fp32: " << fixed(profile.avg_items * 4.0, 1) << " +- "
        << fixed(profile.std_items * 4.0, 1) << "\n";
  }
  out << "mflops: " << mflops_3sig(flops) << "\n";

  if (!o.csv_path.empty()) write_atomic(o.csv_path, profile_csv(profile));
  if (!ctx.globals.out_path.empty()) write_atomic(ctx.globals.out_path, dump_json(Json(profile)));
  return kOk;
}

// ---- plan

struct PlanOptions {
  std::string mode = "numeric";
  std::int64_t divisor = 8;
  std::int64_t stem = 8;
};

int cmd_plan(Context& ctx, const PlanOptions& o) {
  SupernetSpace space = space_from(ctx.globals.space_path);
  ctx.inputs = {{"space", ctx.globals.space_path}};
  const PlanMode mode = plan_mode_from_string(o.mode);
  if (o.divisor < 1) throw ValidationError("--divisor", "must be >= 1");
  if (o.stem < 1) throw ValidationError("--stem", "must be >= 1");

  auto& out = ctx.out;
  if (mode == PlanMode::ClosedForm) {
    ctx.err << "warning: closed-form widths come from the printed per-layer formulas and do "
               "not balance the reference network exactly; the published schedule also "
               "disagrees with those formulas. Prefer --mode numeric.\n";
  }
  const ChannelSchedule schedule =
      plan_schedule(space.reference(), o.stem, o.divisor, mode, space.num_stages);
  space.schedule = schedule;

  const ReferenceConfig ref = space.reference();
  const SubnetConfig reference =
      uniform_config(space, ref.depth, ref.kernel, ref.expand, ref.resolution);
  const auto peaks = stage_peaks(resolve(reference, space));
  const Items top = *std::max_element(peaks.begin(), peaks.end());

  out << "mode: " << to_string(mode) << "  divisor: " << o.divisor << "  stem: " << o.stem
      << "\n\n";
  out << std::left << std::setw(8) << "stage" << std::right << std::setw(8) << "width"
      << std::setw(12) << "peak" << std::setw(10) << "of max" << "\n";
  for (std::size_t s = 0; s < peaks.size(); ++s) {
    out << std::left << std::setw(8) << (s + 1) << std::right << std::setw(8)
        << schedule.stage_widths[s] << std::setw(12) << peaks[s] << std::setw(9)
        << fixed(100.0 * static_cast<double>(peaks[s]) / static_cast<double>(top), 1) << "%\n";
  }
  out << std::left << std::setw(8) << "head" << std::right << std::setw(8)
      << schedule.head_width << "\n\n";

  out << std::left << std::setw(12) << "entry" << std::right << std::setw(10) << "published"
      << std::setw(10) << "planned" << std::setw(11) << "deviation" << "\n";
  for (const auto& row : align_with_published(schedule)) {
    out << std::left << std::setw(12) << row.field << std::right << std::setw(10)
        << row.published;
    if (row.planned < 0) {
      out << std::setw(10) << "-" << std::setw(11) << "-";
    } else {
      const double dev = 100.0 * static_cast<double>(row.planned - row.published) /
                         static_cast<double>(row.published);
      out << std::setw(10) << row.planned << std::setw(10) << fixed(dev, 1) << "%";
    }
    out << "\n";
  }

  const std::string body = dump_json(Json(schedule));
  if (ctx.globals.out_path.empty()) {
    out << "\n" << body;
  } else {
    write_atomic(ctx.globals.out_path, body);
  }
  return kOk;
}

// ---- sample

struct SampleOptions {
  std::size_t n = 1000;
  std::size_t buckets = 10;
  std::size_t pilot = 1000;
  double sigma = 0.02;
};

int cmd_sample(Context& ctx, const SampleOptions& o) {
  const std::string out_path = require_out(ctx);
  const SupernetSpace space = space_from(ctx.globals.space_path);
  ctx.inputs = {{"space", ctx.globals.space_path}};
  SyntheticParams sp;
  sp.sigma = o.sigma;
  sp.noise_seed = ctx.globals.seed;
  const Scorer scorer = [&](const SubnetConfig& c) { return synthetic_score(c, space, sp); };
  BalanceOptions bo;
  bo.pilot = o.pilot;
  const Dataset d = balanced_sample(space, o.n, o.buckets, ctx.globals.seed, scorer, bo);
  write_atomic(out_path, dataset_to_jsonl(d));

  const auto occ = bucket_occupancy(d);
  ctx.out << "rows: " << d.rows.size() << "\nbucket occupancy:";
  for (auto c : occ) ctx.out << ' ' << c;
  ctx.out << "\nbucket edges:";
  for (double e : d.bucket_edges) ctx.out << ' ' << static_cast<std::uint64_t>(std::llround(e));
  ctx.out << "\n";
  ctx.extra["bucket_edges"] = d.bucket_edges;
  ctx.extra["synthetic"] = {{"alpha", sp.alpha}, {"beta", sp.beta}, {"sigma", sp.sigma}};
  return kOk;
}

// ---- train-predictor

struct TrainOptions {
  std::string dataset_path;
  double l2 = 1e-3;
  double holdout = 0.2;
};

int cmd_train(Context& ctx, const TrainOptions& o) {
  const std::string out_path = require_out(ctx);
  const SupernetSpace space = space_from(ctx.globals.space_path);
  ctx.inputs = {{"dataset", o.dataset_path}, {"space", ctx.globals.space_path}};
  if (!(o.holdout >= 0.0 && o.holdout < 1.0)) {
    throw ValidationError("--holdout", "must lie in [0, 1)");
  }
  const Dataset d = dataset_from_jsonl(read_text(o.dataset_path));
  if (d.rows.empty()) throw ValidationError("dataset", "no rows in " + o.dataset_path);

  std::vector<std::size_t> order(d.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(ctx.globals.seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  const auto n_test = static_cast<std::size_t>(std::floor(o.holdout * static_cast<double>(order.size())));

  std::vector<FeatureVector> xs;
  std::vector<double> ys;
  for (std::size_t k = n_test; k < order.size(); ++k) {
    xs.push_back(encode(d.rows[order[k]].config, space));
    ys.push_back(d.rows[order[k]].score);
  }
  const PredictorModel model = train(xs, ys, o.l2, ctx.globals.seed);
  write_atomic(out_path, dump_json(Json(model)));

  ctx.out << "train_rows: " << xs.size() << "\nholdout_rows: " << n_test << "\n";
  if (n_test >= 2) {
    std::vector<double> truth, pred;
    for (std::size_t k = 0; k < n_test; ++k) {
      const auto& row = d.rows[order[k]];
      truth.push_back(row.score);
      pred.push_back(predict(model, row.config, space));
    }
    const double rho = spearman(truth, pred);
    ctx.out << "holdout_spearman: " << fixed(rho, 4) << "\n";
    ctx.extra["holdout_spearman"] = rho;
  }
  return kOk;
}

// ---- search / sweep

struct PredictorOptions {
  std::string model_path;
  bool synthetic = false;
  double sigma = 0.0;
};

struct SearchOptions {
  PredictorOptions predictor;
  std::uint64_t max_peak = 0;
  bool include_classifier = false;
  SearchParams params;
  std::string constraints = "325000,350000,400000,800000";
};

std::unique_ptr<ScorePredictor> make_predictor(Context& ctx, const SupernetSpace& space,
                                               const PredictorOptions& o) {
  if (o.synthetic == !o.model_path.empty()) {
    throw ValidationError("--model", "give exactly one of --model or --synthetic");
  }
  if (o.synthetic) {
    SyntheticParams sp;
    sp.sigma = o.sigma;
    sp.noise_seed = ctx.globals.seed;
    return std::make_unique<SyntheticPredictor>(space, sp);
  }
  ctx.inputs["model"] = o.model_path;
  return std::make_unique<LinearPredictor>(load_model(o.model_path), space);
}

int cmd_search(Context& ctx, SearchOptions o) {
  const std::string out_path = require_out(ctx);
  const SupernetSpace space = space_from(ctx.globals.space_path);
  ctx.inputs["space"] = ctx.globals.space_path;
  const auto predictor = make_predictor(ctx, space, o.predictor);
  SearchConstraint constraint;
  constraint.max_peak_items = o.max_peak;
  constraint.exclude_classifier = !o.include_classifier;
  o.params.seed = ctx.globals.seed;
  const SearchResult r = search(space, constraint, *predictor, o.params);
  write_atomic(out_path, dump_json(Json(r)));
  ctx.out << "best_score: " << format_double(r.best_score) << "\nbest_peak_items: "
          << r.best_peak_items << " (limit " << r.max_peak_items << ")\nevaluations: "
          << r.evaluations << "\n";
  return kOk;
}

std::vector<Items> parse_constraints(const std::string& text) {
  std::vector<Items> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(item, &pos);
      if (pos != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("--constraints", "bad entry '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("--constraints", "empty list");
  return out;
}

int cmd_sweep(Context& ctx, SearchOptions o) {
  const std::string out_path = require_out(ctx);
  const SupernetSpace space = space_from(ctx.globals.space_path);
  ctx.inputs["space"] = ctx.globals.space_path;
  const auto predictor = make_predictor(ctx, space, o.predictor);
  o.params.seed = ctx.globals.seed;
  const auto points = sweep(space, parse_constraints(o.constraints), *predictor, o.params);
  write_atomic(out_path, sweep_csv(points));
  for (const auto& p : points) {
    ctx.out << p.constraint << ": ";
    if (p.result) {
      ctx.out << format_double(p.result->best_score) << " (peak " << p.result->best_peak_items
              << ")\n";
    } else {
      ctx.out << "infeasible: " << p.error << "\n";
    }
  }
  return kOk;
}

// ---- compare

struct CompareOptions {
  std::string config_a;
  std::string config_b;
  std::string space_a;
  std::string space_b;
  bool include_classifier = false;
};

int cmd_compare(Context& ctx, const CompareOptions& o) {
  const std::string out_path = require_out(ctx);
  const SupernetSpace sa = space_from(o.space_a.empty() ? ctx.globals.space_path : o.space_a);
  const SupernetSpace sb = space_from(o.space_b.empty() ? ctx.globals.space_path : o.space_b);
  ctx.inputs = {{"config_a", o.config_a}, {"config_b", o.config_b},
                {"space_a", o.space_a},   {"space_b", o.space_b},
                {"space", ctx.globals.space_path}};
  const SubnetConfig ca = load_config(o.config_a);
  const SubnetConfig cb = load_config(o.config_b);
  const bool bad_a = report_violations(ca, sa, o.config_a, ctx.err);
  const bool bad_b = report_violations(cb, sb, o.config_b, ctx.err);
  if (bad_a || bad_b) return kValidation;

  const NetworkSkeleton na = resolve(ca, sa, o.include_classifier);
  const NetworkSkeleton nb = resolve(cb, sb, o.include_classifier);
  const MemoryProfile pa = profile_network(na);
  const MemoryProfile pb = profile_network(nb);
  write_atomic(out_path, compare_csv(pa, pb));

  auto cv = [](const NetworkSkeleton& n) {
    const auto peaks = block_peaks(n);
    std::vector<double> xs(peaks.begin(), peaks.end());
    return coefficient_of_variation(xs);
  };
  const double cva = cv(na);
  const double cvb = cv(nb);
  ctx.out << "a: peak " << pa.peak_items << " at " << pa.records[pa.peak_index].label
          << ", block-peak cv " << fixed(cva, 4) << "\n";
  ctx.out << "b: peak " << pb.peak_items << " at " << pb.records[pb.peak_index].label
          << ", block-peak cv " << fixed(cvb, 4) << "\n";
  ctx.extra["block_peak_cv"] = {{"a", cva}, {"b", cvb}};
  return kOk;
}

void add_predictor_options(CLI::App* cmd, PredictorOptions& p) {
  cmd->add_option("--model", p.model_path, "Trained predictor JSON");
  cmd->add_flag("--synthetic", p.synthetic, "Score with the synthetic capacity oracle");
  cmd->add_option("--sigma", p.sigma, "Noise level of the synthetic oracle")
      ->capture_default_str();
}

void add_search_params(CLI::App* cmd, SearchOptions& o) {
  cmd->add_flag("--include-classifier", o.include_classifier,
                "Count the classifier layer toward the peak");
  cmd->add_option("--population", o.params.population)->capture_default_str();
  cmd->add_option("--generations", o.params.generations)->capture_default_str();
  cmd->add_option("--parent-fraction", o.params.parent_fraction)->capture_default_str();
  cmd->add_option("--mutation-prob", o.params.mutation_prob)->capture_default_str();
  cmd->add_option("--mutation-fraction", o.params.mutation_fraction)->capture_default_str();
  cmd->add_option("--child-retries", o.params.child_retries)->capture_default_str();
  cmd->add_flag("--freeze-resolution", o.params.freeze_resolution);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"memconst: memory-constant channel planning and constrained subnet search"};
  app.set_version_flag("--version", std::string(MEMCONST_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx{args, out, err, {}, {}, Json::object(), Json::object()};
  app.add_option("--seed", ctx.globals.seed, "Random seed")->capture_default_str();
  app.add_option("--space", ctx.globals.space_path, "Supernet space JSON")
      ;
  app.add_option("--out", ctx.globals.out_path, "Output artifact path");

  std::function<int()> action;

  ProfileOptions profile;
  auto* c_profile = app.add_subcommand("profile", "Per-layer memory profile of one config");
  c_profile->add_option("--config", profile.config_path)->required();
  c_profile->add_flag("--bytes", profile.bytes, "Also report float32 bytes");
  c_profile->add_flag("--include-classifier", profile.include_classifier);
  c_profile->add_option("--csv", profile.csv_path, "Per-layer CSV output");
  c_profile->callback([&] { action = [&] { return cmd_profile(ctx, profile); }; });

  PlanOptions plan;
  auto* c_plan = app.add_subcommand("plan", "Plan a memory-constant channel schedule");
  c_plan->add_option("--mode", plan.mode)
      ->check(CLI::IsMember({"numeric", "closed-form"}))
      ->capture_default_str();
  c_plan->add_option("--divisor", plan.divisor)->capture_default_str();
  c_plan->add_option("--stem", plan.stem)->capture_default_str();
  c_plan->callback([&] { action = [&] { return cmd_plan(ctx, plan); }; });

  SampleOptions sample;
  auto* c_sample = app.add_subcommand("sample", "Draw a peak-balanced dataset (JSON lines)");
  c_sample->add_option("--n", sample.n)->capture_default_str();
  c_sample->add_option("--buckets", sample.buckets)->capture_default_str();
  c_sample->add_option("--pilot", sample.pilot)->capture_default_str();
  c_sample->add_option("--sigma", sample.sigma, "Noise of the synthetic score")
      ->capture_default_str();
  c_sample->callback([&] { action = [&] { return cmd_sample(ctx, sample); }; });

  TrainOptions trainer;
  auto* c_train = app.add_subcommand("train-predictor", "Fit the ridge score predictor");
  c_train->add_option("--dataset", trainer.dataset_path)->required();
  c_train->add_option("--l2", trainer.l2)->capture_default_str();
  c_train->add_option("--holdout", trainer.holdout)->capture_default_str();
  c_train->callback([&] { action = [&] { return cmd_train(ctx, trainer); }; });

  SearchOptions searcher;
  auto* c_search = app.add_subcommand("search", "Evolutionary search under a peak limit");
  add_predictor_options(c_search, searcher.predictor);
  c_search->add_option("--max-peak", searcher.max_peak, "Peak limit in items")->required();
  add_search_params(c_search, searcher);
  c_search->callback([&] { action = [&] { return cmd_search(ctx, searcher); }; });

  SearchOptions sweeper;
  auto* c_sweep = app.add_subcommand("sweep", "Search at several peak limits");
  add_predictor_options(c_sweep, sweeper.predictor);
  c_sweep->add_option("--constraints", sweeper.constraints, "Comma-separated item limits")
      ->capture_default_str();
  add_search_params(c_sweep, sweeper);
  c_sweep->callback([&] { action = [&] { return cmd_sweep(ctx, sweeper); }; });

  CompareOptions compare;
  auto* c_compare = app.add_subcommand("compare", "Aligned per-layer traces of two configs");
  c_compare->add_option("--config-a", compare.config_a)->required();
  c_compare->add_option("--config-b", compare.config_b)->required();
  c_compare->add_option("--space-a", compare.space_a);
  c_compare->add_option("--space-b", compare.space_b);
  c_compare->add_flag("--include-classifier", compare.include_classifier);
  c_compare->callback([&] { action = [&] { return cmd_compare(ctx, compare); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  ctx.command = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    const int code = action();
    if (code == kOk) {
      const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
      write_manifest(ctx, wall.count());
    }
    return code;
  } catch (const InfeasibleError& e) {
    err << "infeasible";
    if (e.stage()) err << " at stage " << *e.stage();
    err << ": " << e.what() << "\n";
    return kInfeasible;
  } catch (const PartialDatasetError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const Json::exception& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const SingularityError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace memconst::cli
