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
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "memconst/channel_planner.hpp"
#include "memconst/memory_model.hpp"
#include "memconst/random.hpp"

namespace memconst {

/// Option sets of an elastic MB supernet plus its fixed channel schedule.
struct SupernetSpace {
  int num_stages = 5;
  std::vector<int> depth_options{2, 3, 4};
  std::vector<std::int64_t> kernel_options{3, 5, 7};
  std::vector<ExpandRatio> expand_options{2, 3, 4};
  std::vector<std::int64_t> resolution_options{128, 160, 192, 224};
  ChannelSchedule schedule;
  std::int64_t num_classes = 1000;

  int max_depth() const { return depth_options.back(); }

  /// Block parameters at the option maxima.
  ReferenceConfig reference() const;

  /// Option lists non-empty and strictly ascending, schedule matches
  /// num_stages. Throws ValidationError.
  void validate() const;

  friend bool operator==(const SupernetSpace&, const SupernetSpace&) = default;
};

/// Depth {2,3,4}, kernel {3,5,7}, expand {2,3,4}, resolution
/// {128,160,192,224} with the numerically balanced schedule at stem 8,
/// divisor 8.
SupernetSpace reference_space();

struct StageGenes {
  int depth = 0;
  /// One entry per layer slot (max depth); slots past `depth` are inert.
  std::vector<std::int64_t> kernels;
  std::vector<ExpandRatio> expands;

  friend bool operator==(const StageGenes&, const StageGenes&) = default;
};

struct SubnetConfig {
  std::int64_t resolution = 0;
  std::vector<StageGenes> stages;

  friend bool operator==(const SubnetConfig&, const SubnetConfig&) = default;
};

/// Same active genes (resolution, depths, kernels/expands of active slots).
bool same_active_genes(const SubnetConfig& a, const SubnetConfig& b);

struct Violation {
  std::string path;
  std::string message;
};

/// Every option-set or shape violation, with the path of the offending field.
std::vector<Violation> validate(const SubnetConfig& config, const SupernetSpace& space);

/// Throws ValidationError listing every violation.
void require_valid(const SubnetConfig& config, const SupernetSpace& space);

using BigInt = boost::multiprecision::cpp_int;

/// [sum over depths d of (|K| * |E|)^d] ^ num_stages, exactly.
BigInt count_subnets(const SupernetSpace& space);

/// Every stage at `depth`, every slot at `kernel` / `expand`.
SubnetConfig uniform_config(const SupernetSpace& space, int depth, std::int64_t kernel,
                            ExpandRatio expand, std::int64_t resolution);
/// All genes at their largest option.
SubnetConfig maximal_config(const SupernetSpace& space);

SubnetConfig sample_uniform(const SupernetSpace& space, Rng& rng);
SubnetConfig sample_uniform(const SupernetSpace& space, std::uint64_t seed);

/// Each gene independently redrawn with probability `prob`.
SubnetConfig mutate(const SubnetConfig& config, const SupernetSpace& space, double prob,
                    Rng& rng, bool freeze_resolution = false);
SubnetConfig mutate(const SubnetConfig& config, const SupernetSpace& space, double prob,
                    std::uint64_t seed, bool freeze_resolution = false);

/// Each gene taken from `a` or `b` with probability 1/2. Both parents must
/// validate against `space` (ValidationError otherwise).
SubnetConfig crossover(const SubnetConfig& a, const SubnetConfig& b,
                       const SupernetSpace& space, Rng& rng);
SubnetConfig crossover(const SubnetConfig& a, const SubnetConfig& b,
                       const SupernetSpace& space, std::uint64_t seed);

/// Stem at schedule.stem_width, active blocks of each stage at the stage
/// width (first block takes the previous width, last block strides 2 in all
/// but the final stage), head at schedule.head_width.
NetworkSkeleton resolve(const SubnetConfig& config, const SupernetSpace& space,
                        bool include_classifier = false);

}  // namespace memconst
