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


#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "memconst/memory_model.hpp"
#include "memconst/search_space.hpp"

namespace memconst {

using FeatureVector = std::vector<double>;

// One-hot blocks: resolution, then per stage the depth, then per slot
// kernel and expand. Slots past the active depth stay zero.
std::size_t feature_length(const SupernetSpace& space);
FeatureVector encode(const SubnetConfig& config, const SupernetSpace& space);

// Peak used for stratification and search: classifier excluded.
Items config_peak(const SubnetConfig& config, const SupernetSpace& space,
                  bool exclude_classifier = true);

struct DatasetRow {
  SubnetConfig config;
  Items peak_items = 0;
  double score = 0.0;
};

struct Dataset {
  std::vector<DatasetRow> rows;
  std::vector<double> bucket_edges;  // num_buckets + 1 ascending boundaries
  // Buckets the pilot draw left empty; they get no quota.
  std::vector<std::size_t> empty_buckets;
  std::uint64_t seed = 0;
};

using Scorer = std::function<double(const SubnetConfig&)>;

struct BalanceOptions {
  std::size_t pilot = 1000;
  std::size_t retry_factor = 100;  // draw budget is retry_factor * n
};

std::size_t bucket_of(double peak, std::span<const double> edges);
std::vector<std::size_t> bucket_occupancy(const Dataset& dataset);
std::vector<std::size_t> bucket_occupancy(const std::vector<DatasetRow>& rows,
                                          std::span<const double> edges);

struct PilotBuckets {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

PilotBuckets pilot_buckets(const SupernetSpace& space, std::size_t num_buckets, Rng& rng,
                           std::size_t pilot);

Dataset balanced_sample(const SupernetSpace& space, std::size_t n, std::size_t num_buckets,
                        std::uint64_t seed, const Scorer& scorer,
                        const BalanceOptions& options = {});

// Plain uniform draws over the same stream and edges as balanced_sample.
Dataset uniform_sample(const SupernetSpace& space, std::size_t n, std::size_t num_buckets,
                       std::uint64_t seed, const Scorer& scorer,
                       const BalanceOptions& options = {});

struct PredictorModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  std::size_t rows = 0;

  friend bool operator==(const PredictorModel&, const PredictorModel&) = default;
};

PredictorModel train(const Dataset& dataset, const SupernetSpace& space, double l2);
PredictorModel train(std::span<const FeatureVector> features, std::span<const double> scores,
                     double l2, std::uint64_t seed = 0);

double predict(const PredictorModel& model, const FeatureVector& features);
double predict(const PredictorModel& model, const SubnetConfig& config,
               const SupernetSpace& space);

struct SyntheticParams {
  double alpha = 1.0;
  double beta = 0.001;
  double sigma = 0.02;
  std::uint64_t noise_seed = 0;
};

std::uint64_t gene_hash(const SubnetConfig& config);

// alpha * ln(FLOPs) + beta * (avg / peak) + sigma * N(0, 1)
double synthetic_score(const SubnetConfig& config, const SupernetSpace& space,
                       const SyntheticParams& params = {});

class ScorePredictor {
 public:
  virtual ~ScorePredictor() = default;
  virtual double predict(const SubnetConfig& config) const = 0;
  virtual std::vector<double> predict_batch(std::span<const SubnetConfig> configs) const;
  virtual const SupernetSpace& space() const = 0;
};

class LinearPredictor : public ScorePredictor {
 public:
  LinearPredictor(PredictorModel model, SupernetSpace space);
  double predict(const SubnetConfig& config) const override;
  const SupernetSpace& space() const override { return space_; }
  const PredictorModel& model() const { return model_; }

 private:
  PredictorModel model_;
  SupernetSpace space_;
};

class SyntheticPredictor : public ScorePredictor {
 public:
  SyntheticPredictor(SupernetSpace space, SyntheticParams params = {});
  double predict(const SubnetConfig& config) const override;
  const SupernetSpace& space() const override { return space_; }

 private:
  SupernetSpace space_;
  SyntheticParams params_;
};

}  // namespace memconst
