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
#include <optional>
#include <string>
#include <vector>

#include "memconst/memory_model.hpp"
#include "memconst/predictor.hpp"
#include "memconst/search_space.hpp"

namespace memconst {

struct SearchConstraint {
  Items max_peak_items = 0;
  bool exclude_classifier = true;

  void validate() const;
};

struct SearchParams {
  int population = 100;
  int generations = 50;
  double parent_fraction = 0.25;
  double mutation_prob = 0.1;
  double mutation_fraction = 0.5;
  std::uint64_t seed = 0;
  int child_retries = 50;
  std::size_t seed_budget_factor = 1000;  // uniform draws per population slot
  bool freeze_resolution = false;

  void validate() const;
  int num_parents() const;
  int num_mutants() const;
};

struct GenerationStats {
  double best = 0.0;
  double mean = 0.0;

  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct SearchResult {
  SubnetConfig best_config;
  double best_score = 0.0;
  Items best_peak_items = 0;
  Items max_peak_items = 0;
  std::vector<GenerationStats> history;
  std::uint64_t evaluations = 0;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

bool feasible(const SubnetConfig& config, const SupernetSpace& space,
              const SearchConstraint& constraint);

SearchResult search(const SupernetSpace& space, const SearchConstraint& constraint,
                    const ScorePredictor& predictor, const SearchParams& params,
                    const std::vector<SubnetConfig>& warm_start = {});

struct SweepPoint {
  Items constraint = 0;
  std::optional<SearchResult> result;
  std::string error;
};

// Constraints must be ascending. Each point is warm-started from the
// previous best, which stays feasible under a looser bound.
std::vector<SweepPoint> sweep(const SupernetSpace& space, const std::vector<Items>& constraints,
                              const ScorePredictor& predictor, const SearchParams& params);

}  // namespace memconst
