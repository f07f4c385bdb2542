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


#include "memconst/evo_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memconst/error.hpp"

namespace memconst {

namespace {

struct Individual {
  SubnetConfig config;
  double score = 0.0;
  Items peak = 0;
};

class Evaluator {
 public:
  Evaluator(const SupernetSpace& space, const SearchConstraint& constraint,
            const ScorePredictor& predictor)
      : space_(space), constraint_(constraint), predictor_(predictor) {}

  Items peak(const SubnetConfig& c) const {
    return config_peak(c, space_, constraint_.exclude_classifier);
  }

  Individual admit(SubnetConfig c, Items peak) {
    if (peak > constraint_.max_peak_items) {
      throw Error("admitted an infeasible individual (peak " + std::to_string(peak) + ")");
    }
    ++evaluations;
    const double score = predictor_.predict(c);
    return Individual{std::move(c), score, peak};
  }

  std::uint64_t evaluations = 0;

 private:
  const SupernetSpace& space_;
  const SearchConstraint& constraint_;
  const ScorePredictor& predictor_;
};

std::optional<std::pair<SubnetConfig, Items>> draw_feasible(const SupernetSpace& space,
                                                            const Evaluator& eval, Items limit,
                                                            Rng& rng, std::size_t budget,
                                                            Items* tightest) {
  for (std::size_t i = 0; i < budget; ++i) {
    SubnetConfig c = sample_uniform(space, rng);
    const Items p = eval.peak(c);
    if (tightest) *tightest = std::min(*tightest, p);
    if (p <= limit) return std::make_pair(std::move(c), p);
  }
  return std::nullopt;
}

}  // namespace

void SearchConstraint::validate() const {
  if (max_peak_items == 0) throw ValidationError("max_peak_items", "must be positive");
}

void SearchParams::validate() const {
  if (population < 2) throw ValidationError("population", "must be >= 2");
  if (generations < 0) throw ValidationError("generations", "must be >= 0");
  if (!(parent_fraction > 0.0 && parent_fraction < 1.0)) {
    throw ValidationError("parent_fraction", "must lie in (0, 1)");
  }
  if (!(mutation_fraction > 0.0 && mutation_fraction < 1.0)) {
    throw ValidationError("mutation_fraction", "must lie in (0, 1)");
  }
  if (!(mutation_prob > 0.0 && mutation_prob < 1.0)) {
    throw ValidationError("mutation_prob", "must lie in (0, 1)");
  }
  if (child_retries < 1) throw ValidationError("child_retries", "must be >= 1");
  if (seed_budget_factor < 1) throw ValidationError("seed_budget_factor", "must be >= 1");
}

int SearchParams::num_parents() const {
  const auto k = static_cast<int>(std::lround(parent_fraction * population));
  return std::clamp(k, 1, population - 1);
}

int SearchParams::num_mutants() const {
  const int children = population - num_parents();
  return static_cast<int>(std::lround(mutation_fraction * children));
}

bool feasible(const SubnetConfig& config, const SupernetSpace& space,
              const SearchConstraint& constraint) {
  return config_peak(config, space, constraint.exclude_classifier) <=
         constraint.max_peak_items;
}

SearchResult search(const SupernetSpace& space, const SearchConstraint& constraint,
                    const ScorePredictor& predictor, const SearchParams& params,
                    const std::vector<SubnetConfig>& warm_start) {
  constraint.validate();
  params.validate();
  space.validate();

  Rng rng(params.seed);
  Evaluator eval(space, constraint, predictor);
  const Items limit = constraint.max_peak_items;
  const auto pop_size = static_cast<std::size_t>(params.population);

  std::vector<Individual> population;
  population.reserve(pop_size);
  for (const auto& c : warm_start) {
    if (population.size() >= pop_size) break;
    if (!validate(c, space).empty()) continue;
    const Items p = eval.peak(c);
    if (p <= limit) population.push_back(eval.admit(c, p));
  }

  Items tightest = ~Items{0};
  const std::size_t budget = params.seed_budget_factor * pop_size;
  std::size_t used = 0;
  while (population.size() < pop_size) {
    if (used >= budget) {
      throw InfeasibleError("no feasible configuration found in " + std::to_string(budget) +
                                " draws under " + std::to_string(limit) +
                                " items; tightest peak seen " + std::to_string(tightest),
                            std::nullopt, tightest);
    }
    ++used;
    SubnetConfig c = sample_uniform(space, rng);
    const Items p = eval.peak(c);
    tightest = std::min(tightest, p);
    if (p <= limit) population.push_back(eval.admit(std::move(c), p));
  }

  const auto by_score = [](const Individual& a, const Individual& b) {
    return a.score > b.score;
  };

  SearchResult result;
  result.max_peak_items = limit;
  const auto n_parents = static_cast<std::size_t>(params.num_parents());
  const auto n_mutants = static_cast<std::size_t>(params.num_mutants());
  const auto retries = static_cast<std::size_t>(params.child_retries);

  for (int g = 0; g < params.generations; ++g) {
    std::stable_sort(population.begin(), population.end(), by_score);
    std::vector<Individual> next(population.begin(),
                                 population.begin() + static_cast<std::ptrdiff_t>(n_parents));

    while (next.size() < pop_size) {
      const bool mutant = next.size() < n_parents + n_mutants;
      std::optional<std::pair<SubnetConfig, Items>> child;
      for (std::size_t attempt = 0; attempt < retries && !child; ++attempt) {
        SubnetConfig c;
        if (mutant) {
          const auto& parent = population[rng.uniform_index(n_parents)].config;
          c = mutate(parent, space, params.mutation_prob, rng, params.freeze_resolution);
        } else {
          const auto& a = population[rng.uniform_index(n_parents)].config;
          const auto& b = population[rng.uniform_index(n_parents)].config;
          c = crossover(a, b, space, rng);
        }
        const Items p = eval.peak(c);
        if (p <= limit) child.emplace(std::move(c), p);
      }
      if (!child) child = draw_feasible(space, eval, limit, rng, budget, nullptr);
      if (!child) {
        const auto& parent = population[rng.uniform_index(n_parents)];
        child.emplace(parent.config, parent.peak);
      }
      next.push_back(eval.admit(std::move(child->first), child->second));
    }

    population = std::move(next);
    GenerationStats stats;
    stats.best = std::max_element(population.begin(), population.end(),
                                  [](const Individual& a, const Individual& b) {
                                    return a.score < b.score;
                                  })
                     ->score;
    double sum = 0.0;
    for (const auto& ind : population) sum += ind.score;
    stats.mean = sum / static_cast<double>(population.size());
    result.history.push_back(stats);
  }

  std::stable_sort(population.begin(), population.end(), by_score);
  const Individual& best = population.front();
  result.best_config = best.config;
  result.best_score = best.score;
  result.best_peak_items = best.peak;
  result.evaluations = eval.evaluations;
  return result;
}

std::vector<SweepPoint> sweep(const SupernetSpace& space, const std::vector<Items>& constraints,
                              const ScorePredictor& predictor, const SearchParams& params) {
  if (!std::is_sorted(constraints.begin(), constraints.end())) {
    throw ValidationError("constraints", "must be sorted ascending");
  }
  std::vector<SweepPoint> out;
  std::vector<SubnetConfig> warm;
  for (const Items c : constraints) {
    SweepPoint point;
    point.constraint = c;
    try {
      SearchConstraint constraint;
      constraint.max_peak_items = c;
      point.result = search(space, constraint, predictor, params, warm);
      warm = {point.result->best_config};
    } catch (const InfeasibleError& e) {
      point.error = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace memconst
