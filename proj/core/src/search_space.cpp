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

#include "memconst/search_space.hpp"

#include <algorithm>
#include <sstream>
#include <type_traits>

#include "memconst/error.hpp"

namespace memconst {

namespace {

template <typename T>
bool contains(const std::vector<T>& options, const T& value) {
  return std::find(options.begin(), options.end(), value) != options.end();
}

template <typename T>
bool strictly_ascending(const std::vector<T>& v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](const T& a, const T& b) { return !(a < b); }) == v.end();
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_same_v<T, ExpandRatio>) {
      out << v[i].to_string();
    } else {
      out << v[i];
    }
  }
  out << ']';
  return out.str();
}

std::string stage_path(std::size_t s) { return "stages[" + std::to_string(s) + "]"; }

}  // namespace

ReferenceConfig SupernetSpace::reference() const {
  return ReferenceConfig{depth_options.back(), kernel_options.back(), expand_options.back(),
                         resolution_options.back()};
}

void SupernetSpace::validate() const {
  if (num_stages < 1) throw ValidationError("num_stages", "must be positive");
  auto check_list = [](const char* name, const auto& v) {
    if (v.empty()) throw ValidationError(name, "must not be empty");
    if (!strictly_ascending(v)) throw ValidationError(name, "must be strictly ascending");
  };
  check_list("depth_options", depth_options);
  check_list("kernel_options", kernel_options);
  check_list("expand_options", expand_options);
  check_list("resolution_options", resolution_options);
  if (depth_options.front() < 1) throw ValidationError("depth_options", "depths must be >= 1");
  for (auto k : kernel_options) {
    if (k <= 0 || k % 2 == 0) throw ValidationError("kernel_options", "kernels must be odd");
  }
  for (const auto& e : expand_options) {
    if (e.num() <= 0) throw ValidationError("expand_options", "ratios must be positive");
  }
  for (auto r : resolution_options) {
    if (r <= 0) throw ValidationError("resolution_options", "must be positive");
  }
  if (num_classes <= 0) throw ValidationError("num_classes", "must be positive");
  if (schedule.stage_widths.size() != static_cast<std::size_t>(num_stages)) {
    throw ValidationError("schedule.stage_widths",
                          "has " + std::to_string(schedule.stage_widths.size()) +
                              " entries for " + std::to_string(num_stages) + " stages");
  }
  schedule.validate();
}

SupernetSpace reference_space() {
  static const SupernetSpace space = [] {
    SupernetSpace s;
    s.schedule = plan_schedule(s.reference(), 8, 8, PlanMode::NumericBalance, s.num_stages);
    return s;
  }();
  return space;
}

bool same_active_genes(const SubnetConfig& a, const SubnetConfig& b) {
  if (a.resolution != b.resolution || a.stages.size() != b.stages.size()) return false;
  for (std::size_t s = 0; s < a.stages.size(); ++s) {
    const auto& x = a.stages[s];
    const auto& y = b.stages[s];
    if (x.depth != y.depth) return false;
    for (int j = 0; j < x.depth; ++j) {
      if (x.kernels.at(j) != y.kernels.at(j) || x.expands.at(j) != y.expands.at(j)) return false;
    }
  }
  return true;
}

std::vector<Violation> validate(const SubnetConfig& config, const SupernetSpace& space) {
  std::vector<Violation> out;
  if (!contains(space.resolution_options, config.resolution)) {
    out.push_back({"resolution", std::to_string(config.resolution) +
                                     " not in resolution_options " +
                                     join(space.resolution_options)});
  }
  if (config.stages.size() != static_cast<std::size_t>(space.num_stages)) {
    out.push_back({"stages", "expected " + std::to_string(space.num_stages) + " stages, got " +
                                 std::to_string(config.stages.size())});
  }
  const auto slots = static_cast<std::size_t>(space.max_depth());
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    const auto& stage = config.stages[s];
    const std::string base = stage_path(s);
    if (!contains(space.depth_options, stage.depth)) {
      out.push_back({base + ".depth", std::to_string(stage.depth) + " not in depth_options " +
                                          join(space.depth_options)});
    }
    if (stage.kernels.size() != slots) {
      out.push_back({base + ".kernels", "expected " + std::to_string(slots) + " slots, got " +
                                            std::to_string(stage.kernels.size())});
    }
    if (stage.expands.size() != slots) {
      out.push_back({base + ".expands", "expected " + std::to_string(slots) + " slots, got " +
                                            std::to_string(stage.expands.size())});
    }
    for (std::size_t j = 0; j < stage.kernels.size(); ++j) {
      if (!contains(space.kernel_options, stage.kernels[j])) {
        out.push_back({base + ".kernels[" + std::to_string(j) + "]",
                       std::to_string(stage.kernels[j]) + " not in kernel_options " +
                           join(space.kernel_options)});
      }
    }
    for (std::size_t j = 0; j < stage.expands.size(); ++j) {
      if (!contains(space.expand_options, stage.expands[j])) {
        out.push_back({base + ".expands[" + std::to_string(j) + "]",
                       stage.expands[j].to_string() + " not in expand_options " +
                           join(space.expand_options)});
      }
    }
  }
  return out;
}

void require_valid(const SubnetConfig& config, const SupernetSpace& space) {
  const auto violations = validate(config, space);
  if (violations.empty()) return;
  std::string message;
  for (const auto& v : violations) {
    if (!message.empty()) message += "; ";
    message += v.path + ": " + v.message;
  }
  throw ValidationError(violations.front().path, message);
}

BigInt count_subnets(const SupernetSpace& space) {
  const BigInt per_layer = BigInt(space.kernel_options.size()) * space.expand_options.size();
  BigInt per_stage = 0;
  for (int d : space.depth_options) {
    per_stage += boost::multiprecision::pow(per_layer, static_cast<unsigned>(d));
  }
  return boost::multiprecision::pow(per_stage, static_cast<unsigned>(space.num_stages));
}

SubnetConfig uniform_config(const SupernetSpace& space, int depth, std::int64_t kernel,
                            ExpandRatio expand, std::int64_t resolution) {
  SubnetConfig config;
  config.resolution = resolution;
  const auto slots = static_cast<std::size_t>(space.max_depth());
  config.stages.assign(space.num_stages,
                       StageGenes{depth, std::vector<std::int64_t>(slots, kernel),
                                  std::vector<ExpandRatio>(slots, expand)});
  return config;
}

SubnetConfig maximal_config(const SupernetSpace& space) {
  return uniform_config(space, space.depth_options.back(), space.kernel_options.back(),
                        space.expand_options.back(), space.resolution_options.back());
}

SubnetConfig sample_uniform(const SupernetSpace& space, Rng& rng) {
  SubnetConfig config;
  config.resolution = rng.pick(space.resolution_options);
  const auto slots = static_cast<std::size_t>(space.max_depth());
  config.stages.resize(space.num_stages);
  for (auto& stage : config.stages) {
    stage.depth = rng.pick(space.depth_options);
    stage.kernels.resize(slots);
    stage.expands.resize(slots);
    for (std::size_t j = 0; j < slots; ++j) {
      stage.kernels[j] = rng.pick(space.kernel_options);
      stage.expands[j] = rng.pick(space.expand_options);
    }
  }
  return config;
}

SubnetConfig sample_uniform(const SupernetSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform(space, rng);
}

SubnetConfig mutate(const SubnetConfig& config, const SupernetSpace& space, double prob,
                    Rng& rng, bool freeze_resolution) {
  require_valid(config, space);
  SubnetConfig out = config;
  if (!freeze_resolution && rng.bernoulli(prob)) {
    out.resolution = rng.pick(space.resolution_options);
  }
  for (auto& stage : out.stages) {
    if (rng.bernoulli(prob)) stage.depth = rng.pick(space.depth_options);
    for (std::size_t j = 0; j < stage.kernels.size(); ++j) {
      if (rng.bernoulli(prob)) stage.kernels[j] = rng.pick(space.kernel_options);
      if (rng.bernoulli(prob)) stage.expands[j] = rng.pick(space.expand_options);
    }
  }
  return out;
}

SubnetConfig mutate(const SubnetConfig& config, const SupernetSpace& space, double prob,
                    std::uint64_t seed, bool freeze_resolution) {
  Rng rng(seed);
  return mutate(config, space, prob, rng, freeze_resolution);
}

SubnetConfig crossover(const SubnetConfig& a, const SubnetConfig& b,
                       const SupernetSpace& space, Rng& rng) {
  const auto va = validate(a, space);
  const auto vb = validate(b, space);
  if (!va.empty() || !vb.empty()) {
    throw ValidationError(va.empty() ? "b" : "a", "parent does not belong to the space");
  }
  SubnetConfig out = a;
  if (rng.bernoulli(0.5)) out.resolution = b.resolution;
  for (std::size_t s = 0; s < out.stages.size(); ++s) {
    auto& stage = out.stages[s];
    const auto& other = b.stages[s];
    if (rng.bernoulli(0.5)) stage.depth = other.depth;
    for (std::size_t j = 0; j < stage.kernels.size(); ++j) {
      if (rng.bernoulli(0.5)) stage.kernels[j] = other.kernels[j];
      if (rng.bernoulli(0.5)) stage.expands[j] = other.expands[j];
    }
  }
  return out;
}

SubnetConfig crossover(const SubnetConfig& a, const SubnetConfig& b,
                       const SupernetSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  return crossover(a, b, space, rng);
}

NetworkSkeleton resolve(const SubnetConfig& config, const SupernetSpace& space,
                        bool include_classifier) {
  require_valid(config, space);
  const std::int64_t factor = std::int64_t{1} << space.num_stages;
  if (config.resolution % factor != 0) {
    throw ResolutionError("resolution", std::to_string(config.resolution) +
                                            " is not divisible by " + std::to_string(factor));
  }

  NetworkSkeleton net;
  net.resolution = config.resolution;
  net.stem_width = space.schedule.stem_width;
  net.head_width = space.schedule.head_width;
  net.include_classifier = include_classifier;
  net.num_classes = space.num_classes;

  std::int64_t channels = net.stem_width;
  std::int64_t spatial = net.stem_output_size();
  for (int s = 0; s < space.num_stages; ++s) {
    const auto& stage = config.stages[s];
    const std::int64_t width = space.schedule.stage_widths[s];
    const bool downsample = s + 1 < space.num_stages;
    for (int j = 0; j < stage.depth; ++j) {
      const bool last = j + 1 == stage.depth;
      const std::int64_t stride = (downsample && last) ? 2 : 1;
      net.blocks.push_back(SkeletonBlock{
          s + 1, j + 1,
          MBBlockShape{channels, width, stage.expands[j], stage.kernels[j], stride, spatial}});
      channels = width;
      spatial /= stride;
    }
  }
  return net;
}

}  // namespace memconst
