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

#include "memconst/memory_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "memconst/error.hpp"

namespace memconst {

Items checked_mul(Items a, Items b) {
  Items out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw ValidationError("items", "item count overflows 64 bits");
  }
  return out;
}

Items checked_add(Items a, Items b) {
  Items out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw ValidationError("items", "item count overflows 64 bits");
  }
  return out;
}

ExpandRatio::ExpandRatio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("expand", "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = num / (g == 0 ? 1 : g);
  den_ = den / (g == 0 ? 1 : g);
}

ExpandRatio ExpandRatio::from_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("expand", "not a finite number");
  for (std::int64_t den = 1; den <= 1000; ++den) {
    const double scaled = value * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) <= 1e-9 * std::max(1.0, std::abs(scaled))) {
      return ExpandRatio(static_cast<std::int64_t>(rounded), den);
    }
  }
  throw ValidationError("expand", "no exact rational with denominator <= 1000");
}

std::int64_t ExpandRatio::scale(std::int64_t channels) const {
  // floor((2 * c * num + den) / (2 * den)) == round-half-up(c * num / den)
  const std::int64_t twice = 2 * channels * num_ + den_;
  return twice / (2 * den_);
}

std::string ExpandRatio::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t MBBlockShape::output_size() const {
  if (stride == 2 && input_size % 2 != 0) {
    throw ResolutionError("input_size", "stride-2 layer needs an even input size, got " +
                                            std::to_string(input_size));
  }
  return input_size / stride;
}

void MBBlockShape::validate() const {
  if (c_in <= 0) throw ValidationError("c_in", "must be positive");
  if (c_out <= 0) throw ValidationError("c_out", "must be positive");
  if (expand.num() <= 0) throw ValidationError("expand", "must be positive");
  if (kernel <= 0 || kernel % 2 == 0) throw ValidationError("kernel", "must be odd and positive");
  if (stride != 1 && stride != 2) throw ValidationError("stride", "must be 1 or 2");
  if (input_size <= 0) throw ValidationError("input_size", "must be positive");
  if (expanded_channels() <= 0) {
    throw ValidationError("expand", "expanded channel count rounds to zero");
  }
  (void)output_size();
}

LayerMemory LayerMemory::make(std::string label, Items input, Items weight, Items output) {
  return LayerMemory{std::move(label), input, weight, output,
                     checked_add(checked_add(input, weight), output)};
}

namespace {

Items u(std::int64_t v) { return static_cast<Items>(v); }
Items sq(std::int64_t v) { return checked_mul(u(v), u(v)); }

}  // namespace

LayerMemory expansion_memory(const MBBlockShape& shape, std::string label) {
  shape.validate();
  const std::int64_t x = shape.expanded_channels();
  const Items area = sq(shape.input_size);
  return LayerMemory::make(std::move(label), checked_mul(u(shape.c_in), area),
                           checked_mul(u(shape.c_in), u(x)), checked_mul(u(x), area));
}

LayerMemory depthwise_memory(const MBBlockShape& shape, std::string label) {
  shape.validate();
  const std::int64_t x = shape.expanded_channels();
  return LayerMemory::make(std::move(label), checked_mul(u(x), sq(shape.input_size)),
                           checked_mul(u(x), sq(shape.kernel)),
                           checked_mul(u(x), sq(shape.output_size())));
}

LayerMemory projection_memory(const MBBlockShape& shape, std::string label) {
  shape.validate();
  const std::int64_t x = shape.expanded_channels();
  const Items area = sq(shape.output_size());
  return LayerMemory::make(std::move(label), checked_mul(u(x), area),
                           checked_mul(u(x), u(shape.c_out)),
                           checked_mul(u(shape.c_out), area));
}

std::array<LayerMemory, 3> block_memory(const MBBlockShape& shape, const std::string& prefix) {
  return {expansion_memory(shape, prefix + ".exp"), depthwise_memory(shape, prefix + ".dw"),
          projection_memory(shape, prefix + ".proj")};
}

Items block_peak(const MBBlockShape& shape) {
  const auto layers = block_memory(shape);
  return std::max({layers[0].total_items, layers[1].total_items, layers[2].total_items});
}

LayerMemory stem_memory(std::int64_t resolution, std::int64_t stem_width) {
  if (resolution <= 0 || resolution % 2 != 0) {
    throw ResolutionError("resolution", "stem needs a positive even resolution, got " +
                                            std::to_string(resolution));
  }
  if (stem_width <= 0) throw ValidationError("stem_width", "must be positive");
  constexpr Items kRgb = 3;
  constexpr Items kStemKernelArea = 9;
  return LayerMemory::make("stem", checked_mul(kRgb, sq(resolution)),
                           checked_mul(kRgb * kStemKernelArea, u(stem_width)),
                           checked_mul(u(stem_width), sq(resolution / 2)));
}

LayerMemory head_memory(std::int64_t c_in, std::int64_t head_width, std::int64_t spatial) {
  if (head_width <= 0) throw ValidationError("head_width", "must be positive");
  const Items area = sq(spatial);
  return LayerMemory::make("head", checked_mul(u(c_in), area),
                           checked_mul(u(c_in), u(head_width)),
                           checked_mul(u(head_width), area));
}

LayerMemory classifier_memory(std::int64_t head_width, std::int64_t num_classes) {
  if (num_classes <= 0) throw ValidationError("num_classes", "must be positive");
  // Global pooling leaves one item per head channel.
  return LayerMemory::make("classifier", u(head_width),
                           checked_mul(u(head_width), u(num_classes)), u(num_classes));
}

std::string SkeletonBlock::label() const {
  return "stage" + std::to_string(stage) + ".block" + std::to_string(position);
}

std::int64_t NetworkSkeleton::final_size() const {
  if (blocks.empty()) return stem_output_size();
  return blocks.back().shape.output_size();
}

std::int64_t NetworkSkeleton::final_channels() const {
  if (blocks.empty()) return stem_width;
  return blocks.back().shape.c_out;
}

void NetworkSkeleton::validate() const {
  if (resolution <= 0 || resolution % 2 != 0) {
    throw ResolutionError("resolution", "must be positive and even, got " +
                                            std::to_string(resolution));
  }
  if (stem_width <= 0) throw ValidationError("stem_width", "must be positive");
  if (head_width <= 0) throw ValidationError("head_width", "must be positive");
  if (num_classes <= 0) throw ValidationError("num_classes", "must be positive");

  std::int64_t channels = stem_width;
  std::int64_t spatial = stem_output_size();
  std::string previous = "stem";
  for (const auto& block : blocks) {
    const std::string name = block.label();
    try {
      block.shape.validate();
    } catch (const ResolutionError& e) {
      throw ResolutionError(name + "." + e.field(), e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(name + "." + e.field(), e.what());
    }
    if (block.shape.c_in != channels) {
      throw ChainError(previous + "->" + name,
                       "channel mismatch: " + std::to_string(channels) + " out vs " +
                           std::to_string(block.shape.c_in) + " in");
    }
    if (block.shape.input_size != spatial) {
      throw ChainError(previous + "->" + name,
                       "spatial mismatch: " + std::to_string(spatial) + " out vs " +
                           std::to_string(block.shape.input_size) + " in");
    }
    channels = block.shape.c_out;
    spatial = block.shape.output_size();
    previous = name;
  }
}

MemoryProfile summarize(std::vector<LayerMemory> records, bool exclude_last) {
  MemoryProfile profile;
  profile.records = std::move(records);
  profile.classifier_excluded = exclude_last;
  const std::size_t n = profile.counted_records();
  if (n == 0) return profile;

  Items sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Items total = profile.records[i].total_items;
    sum = checked_add(sum, total);
    if (total > profile.peak_items) {
      profile.peak_items = total;
      profile.peak_index = i;
    }
  }
  const double mean = static_cast<double>(sum) / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(profile.records[i].total_items) - mean;
    ss += d * d;
  }
  profile.avg_items = mean;
  profile.std_items = std::sqrt(ss / static_cast<double>(n));
  return profile;
}

MemoryProfile profile_network(const NetworkSkeleton& skeleton) {
  skeleton.validate();
  std::vector<LayerMemory> records;
  records.reserve(3 * skeleton.blocks.size() + 3);
  records.push_back(stem_memory(skeleton.resolution, skeleton.stem_width));
  for (const auto& block : skeleton.blocks) {
    for (auto& layer : block_memory(block.shape, block.label())) {
      records.push_back(std::move(layer));
    }
  }
  records.push_back(
      head_memory(skeleton.final_channels(), skeleton.head_width, skeleton.final_size()));
  records.push_back(classifier_memory(skeleton.head_width, skeleton.num_classes));
  return summarize(std::move(records), !skeleton.include_classifier);
}

std::vector<Items> block_peaks(const NetworkSkeleton& skeleton) {
  skeleton.validate();
  std::vector<Items> peaks;
  peaks.reserve(skeleton.blocks.size());
  for (const auto& block : skeleton.blocks) peaks.push_back(block_peak(block.shape));
  return peaks;
}

std::vector<Items> stage_peaks(const NetworkSkeleton& skeleton) {
  skeleton.validate();
  std::vector<Items> peaks;
  for (const auto& block : skeleton.blocks) {
    if (block.stage < 1) throw ValidationError("stage", "stage indices are 1-based");
    if (peaks.size() < static_cast<std::size_t>(block.stage)) peaks.resize(block.stage, 0);
    auto& slot = peaks[block.stage - 1];
    slot = std::max(slot, block_peak(block.shape));
  }
  return peaks;
}

std::uint64_t element_width(Precision precision) {
  switch (precision) {
    case Precision::Float32:
      return 4;
    case Precision::Float16:
      return 2;
    case Precision::Int8:
      return 1;
  }
  return 4;
}

std::uint64_t items_to_bytes(Items items, Precision precision) {
  return checked_mul(items, element_width(precision));
}

std::uint64_t flops_estimate(const NetworkSkeleton& skeleton) {
  skeleton.validate();
  Items macs = 0;
  auto add = [&macs](std::initializer_list<Items> factors) {
    Items term = 1;
    for (Items f : factors) term = checked_mul(term, f);
    macs = checked_add(macs, term);
  };
  // Stem: full 3x3 convolution from RGB.
  add({3, 9, u(skeleton.stem_width), sq(skeleton.stem_output_size())});
  for (const auto& block : skeleton.blocks) {
    const auto& s = block.shape;
    const Items x = u(s.expanded_channels());
    add({u(s.c_in), x, sq(s.input_size)});
    add({sq(s.kernel), x, sq(s.output_size())});
    add({x, u(s.c_out), sq(s.output_size())});
  }
  add({u(skeleton.final_channels()), u(skeleton.head_width), sq(skeleton.final_size())});
  if (skeleton.include_classifier) add({u(skeleton.head_width), u(skeleton.num_classes)});
  return checked_mul(2, macs);
}

double mflops_3sig(std::uint64_t flops) {
  const double m = static_cast<double>(flops) / 1e6;
  if (m == 0.0) return 0.0;
  const int digits = static_cast<int>(std::floor(std::log10(std::abs(m)))) + 1;
  const double scale = std::pow(10.0, 3 - digits);
  return std::round(m * scale) / scale;
}

}  // namespace memconst
