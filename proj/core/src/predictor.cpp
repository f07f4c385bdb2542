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


#include "memconst/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "memconst/error.hpp"

namespace memconst {

namespace {

template <typename T>
std::size_t index_of(const std::vector<T>& options, const T& value) {
  return static_cast<std::size_t>(std::find(options.begin(), options.end(), value) -
                                  options.begin());
}

void fnv_mix(std::uint64_t& h, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    h ^= (u >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

DatasetRow make_row(const SubnetConfig& config, const SupernetSpace& space,
                    const Scorer& scorer) {
  return DatasetRow{config, config_peak(config, space), scorer ? scorer(config) : 0.0};
}

}  // namespace

std::size_t feature_length(const SupernetSpace& space) {
  const auto stages = static_cast<std::size_t>(space.num_stages);
  const auto slots = static_cast<std::size_t>(space.max_depth());
  return space.resolution_options.size() + stages * space.depth_options.size() +
         stages * slots * (space.kernel_options.size() + space.expand_options.size());
}

FeatureVector encode(const SubnetConfig& config, const SupernetSpace& space) {
  require_valid(config, space);
  FeatureVector v(feature_length(space), 0.0);
  std::size_t offset = 0;
  v[offset + index_of(space.resolution_options, config.resolution)] = 1.0;
  offset += space.resolution_options.size();
  for (const auto& stage : config.stages) {
    v[offset + index_of(space.depth_options, stage.depth)] = 1.0;
    offset += space.depth_options.size();
  }
  const std::size_t nk = space.kernel_options.size();
  const std::size_t ne = space.expand_options.size();
  for (const auto& stage : config.stages) {
    for (std::size_t j = 0; j < stage.kernels.size(); ++j) {
      if (static_cast<int>(j) < stage.depth) {
        v[offset + index_of(space.kernel_options, stage.kernels[j])] = 1.0;
        v[offset + nk + index_of(space.expand_options, stage.expands[j])] = 1.0;
      }
      offset += nk + ne;
    }
  }
  return v;
}

Items config_peak(const SubnetConfig& config, const SupernetSpace& space,
                  bool exclude_classifier) {
  return profile_network(resolve(config, space, !exclude_classifier)).peak_items;
}

std::size_t bucket_of(double peak, std::span<const double> edges) {
  const std::size_t buckets = edges.size() - 1;
  if (peak <= edges.front()) return 0;
  if (peak >= edges.back()) return buckets - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), peak);
  return std::min(static_cast<std::size_t>(it - edges.begin()) - 1, buckets - 1);
}

std::vector<std::size_t> bucket_occupancy(const std::vector<DatasetRow>& rows,
                                          std::span<const double> edges) {
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (const auto& row : rows) ++counts[bucket_of(static_cast<double>(row.peak_items), edges)];
  return counts;
}

std::vector<std::size_t> bucket_occupancy(const Dataset& dataset) {
  if (dataset.bucket_edges.size() < 2) return {dataset.rows.size()};
  return bucket_occupancy(dataset.rows, dataset.bucket_edges);
}

PilotBuckets pilot_buckets(const SupernetSpace& space, std::size_t num_buckets, Rng& rng,
                           std::size_t pilot) {
  if (num_buckets == 0) throw ValidationError("num_buckets", "must be positive");
  if (pilot == 0) throw ValidationError("pilot", "must be positive");
  std::vector<Items> peaks(pilot);
  for (auto& p : peaks) p = config_peak(sample_uniform(space, rng), space);
  const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end());
  const double a = static_cast<double>(*lo);
  const double b = *hi > *lo ? static_cast<double>(*hi) : a + 1.0;
  PilotBuckets out;
  out.edges.resize(num_buckets + 1);
  for (std::size_t i = 0; i <= num_buckets; ++i) {
    out.edges[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(num_buckets);
  }
  out.edges.back() = b;
  out.counts.assign(num_buckets, 0);
  for (Items p : peaks) ++out.counts[bucket_of(static_cast<double>(p), out.edges)];
  return out;
}

Dataset balanced_sample(const SupernetSpace& space, std::size_t n, std::size_t num_buckets,
                        std::uint64_t seed, const Scorer& scorer,
                        const BalanceOptions& options) {
  if (num_buckets == 0 || n < num_buckets) {
    throw ValidationError("n", "need n >= num_buckets >= 1, got n=" + std::to_string(n) +
                                   " num_buckets=" + std::to_string(num_buckets));
  }
  Rng rng(seed);
  Dataset out;
  out.seed = seed;
  const PilotBuckets pilot = pilot_buckets(space, num_buckets, rng, options.pilot);
  out.bucket_edges = pilot.edges;

  // Peak values cluster, so some equal-width ranges hold no configs at all.
  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < num_buckets; ++b) {
    if (pilot.counts[b] == 0) {
      out.empty_buckets.push_back(b);
    } else {
      active.push_back(b);
    }
  }
  std::vector<std::size_t> quota(num_buckets, 0);
  for (std::size_t k = 0; k < active.size(); ++k) {
    quota[active[k]] = n / active.size() + (k < n % active.size() ? 1 : 0);
  }
  std::vector<std::size_t> have(num_buckets, 0);

  const std::size_t budget = options.retry_factor * n;
  std::size_t draws = 0;
  while (out.rows.size() < n) {
    if (draws++ >= budget) {
      std::string message = "bucket quota not met after " + std::to_string(budget) +
                            " draws; occupancy";
      for (auto c : have) message += " " + std::to_string(c);
      throw PartialDatasetError(message, have);
    }
    SubnetConfig config = sample_uniform(space, rng);
    const Items peak = config_peak(config, space);
    const std::size_t b = bucket_of(static_cast<double>(peak), out.bucket_edges);
    if (have[b] >= quota[b]) continue;
    ++have[b];
    const double score = scorer ? scorer(config) : 0.0;
    out.rows.push_back(DatasetRow{std::move(config), peak, score});
  }
  return out;
}

Dataset uniform_sample(const SupernetSpace& space, std::size_t n, std::size_t num_buckets,
                       std::uint64_t seed, const Scorer& scorer,
                       const BalanceOptions& options) {
  Rng rng(seed);
  Dataset out;
  out.seed = seed;
  out.bucket_edges = pilot_buckets(space, num_buckets, rng, options.pilot).edges;
  out.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.rows.push_back(make_row(sample_uniform(space, rng), space, scorer));
  }
  return out;
}

PredictorModel train(std::span<const FeatureVector> features, std::span<const double> scores,
                     double l2, std::uint64_t seed) {
  if (features.empty()) throw ValidationError("dataset", "must not be empty");
  if (features.size() != scores.size()) throw ValidationError("dataset", "score count mismatch");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ValidationError("l2", "must be finite and >= 0");
  const auto rows = static_cast<Eigen::Index>(features.size());
  const auto cols = static_cast<Eigen::Index>(features.front().size());

  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& f = features[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(f.size()) != cols) {
      throw ValidationError("features", "row " + std::to_string(i) + " has wrong length");
    }
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = f[static_cast<std::size_t>(j)];
    y(i) = scores[static_cast<std::size_t>(i)];
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;

  Eigen::VectorXd w;
  if (l2 == 0.0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    if (cod.rank() == 0) {
      throw SingularityError("design matrix has rank 0 (all rows identical); use l2 > 0");
    }
    w = cod.solve(y);
  } else {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += l2;
    w = gram.ldlt().solve(x.transpose() * y);
  }
  if (!w.allFinite()) throw SingularityError("ridge solve produced non-finite weights");

  PredictorModel model;
  model.weights.assign(w.data(), w.data() + w.size());
  model.intercept = y_mean - x_mean.dot(w);
  model.l2 = l2;
  model.seed = seed;
  model.rows = features.size();
  return model;
}

PredictorModel train(const Dataset& dataset, const SupernetSpace& space, double l2) {
  std::vector<FeatureVector> features;
  std::vector<double> scores;
  features.reserve(dataset.rows.size());
  scores.reserve(dataset.rows.size());
  for (const auto& row : dataset.rows) {
    features.push_back(encode(row.config, space));
    scores.push_back(row.score);
  }
  return train(features, scores, l2, dataset.seed);
}

double predict(const PredictorModel& model, const FeatureVector& features) {
  if (features.size() != model.weights.size()) {
    throw ValidationError("features", "length " + std::to_string(features.size()) +
                                          " does not match model length " +
                                          std::to_string(model.weights.size()));
  }
  double acc = model.intercept;
  for (std::size_t i = 0; i < features.size(); ++i) acc += model.weights[i] * features[i];
  return acc;
}

double predict(const PredictorModel& model, const SubnetConfig& config,
               const SupernetSpace& space) {
  return predict(model, encode(config, space));
}

std::uint64_t gene_hash(const SubnetConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv_mix(h, config.resolution);
  for (const auto& stage : config.stages) {
    fnv_mix(h, stage.depth);
    for (int j = 0; j < stage.depth; ++j) {
      fnv_mix(h, stage.kernels.at(j));
      fnv_mix(h, stage.expands.at(j).num());
      fnv_mix(h, stage.expands.at(j).den());
    }
  }
  return h;
}

double synthetic_score(const SubnetConfig& config, const SupernetSpace& space,
                       const SyntheticParams& params) {
  const NetworkSkeleton net = resolve(config, space, false);
  const MemoryProfile profile = profile_network(net);
  const double flops = static_cast<double>(flops_estimate(net));
  double score = params.alpha * std::log(flops) +
                 params.beta * profile.avg_items / static_cast<double>(profile.peak_items);
  if (params.sigma != 0.0) {
    Rng rng(splitmix(params.noise_seed ^ splitmix(gene_hash(config))));
    score += params.sigma * rng.normal();
  }
  return score;
}

std::vector<double> ScorePredictor::predict_batch(std::span<const SubnetConfig> configs) const {
  std::vector<double> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(predict(c));
  return out;
}

LinearPredictor::LinearPredictor(PredictorModel model, SupernetSpace space)
    : model_(std::move(model)), space_(std::move(space)) {
  if (model_.weights.size() != feature_length(space_)) {
    throw ValidationError("model.weights", "length " + std::to_string(model_.weights.size()) +
                                               " does not match space feature length " +
                                               std::to_string(feature_length(space_)));
  }
}

double LinearPredictor::predict(const SubnetConfig& config) const {
  return memconst::predict(model_, config, space_);
}

SyntheticPredictor::SyntheticPredictor(SupernetSpace space, SyntheticParams params)
    : space_(std::move(space)), params_(params) {}

double SyntheticPredictor::predict(const SubnetConfig& config) const {
  return synthetic_score(config, space_, params_);
}

}  // namespace memconst
