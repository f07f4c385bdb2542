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

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace memconst {

/// Tensor-element count. Every memory quantity in this library is exact.
using Items = std::uint64_t;

/// Multiply item counts, throwing ValidationError on 64-bit overflow.
Items checked_mul(Items a, Items b);
Items checked_add(Items a, Items b);

/// Positive rational channel multiplier of an MB block (2, 3, 4, or e.g. 3/2).
class ExpandRatio {
 public:
  constexpr ExpandRatio() = default;
  constexpr ExpandRatio(std::int64_t whole) : num_(whole), den_(1) {}  // NOLINT
  ExpandRatio(std::int64_t num, std::int64_t den);

  /// Exact rational for `value` if one exists with denominator <= 1000.
  static ExpandRatio from_double(double value);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const noexcept { return den_ == 1; }

  /// round(channels * ratio), ties rounded up.
  std::int64_t scale(std::int64_t channels) const;

  friend bool operator==(const ExpandRatio& a, const ExpandRatio& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const ExpandRatio& a, const ExpandRatio& b) noexcept {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  std::string to_string() const;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

/// Fully resolved Mobile Inverted Bottleneck block: expansion (1x1),
/// depthwise (KxK, stride S), projection (1x1). Feature maps are square.
struct MBBlockShape {
  std::int64_t c_in = 1;
  std::int64_t c_out = 1;
  ExpandRatio expand{1};
  std::int64_t kernel = 1;
  std::int64_t stride = 1;
  std::int64_t input_size = 1;

  /// E * C_in rounded to the nearest integer, ties up.
  std::int64_t expanded_channels() const { return expand.scale(c_in); }
  /// input_size / stride; stride-2 requires an even input.
  std::int64_t output_size() const;

  /// Throws ValidationError (or ResolutionError for odd stride-2 inputs).
  void validate() const;

  friend bool operator==(const MBBlockShape&, const MBBlockShape&) = default;
};

struct LayerMemory {
  std::string label;
  Items input_items = 0;
  Items weight_items = 0;
  Items output_items = 0;
  Items total_items = 0;

  static LayerMemory make(std::string label, Items input, Items weight, Items output);

  friend bool operator==(const LayerMemory&, const LayerMemory&) = default;
};

/// Ordered per-layer trace with summary statistics. When
/// `classifier_excluded` is set the final record (the classifier) is kept in
/// `records` but ignored by peak/avg/std.
struct MemoryProfile {
  std::vector<LayerMemory> records;
  Items peak_items = 0;
  std::size_t peak_index = 0;
  double avg_items = 0.0;
  double std_items = 0.0;
  bool classifier_excluded = false;

  /// Number of leading records covered by the statistics.
  std::size_t counted_records() const noexcept {
    return classifier_excluded && !records.empty() ? records.size() - 1 : records.size();
  }
};

/// One MB block of a network together with its position for labelling.
struct SkeletonBlock {
  int stage = 1;     // 1-based
  int position = 1;  // 1-based within the stage
  MBBlockShape shape;

  std::string label() const;

  friend bool operator==(const SkeletonBlock&, const SkeletonBlock&) = default;
};

/// Whole network: stride-2 3x3 stem, MB blocks, pointwise head, and a
/// pooled linear classifier.
struct NetworkSkeleton {
  std::int64_t resolution = 0;
  std::int64_t stem_width = 0;
  std::vector<SkeletonBlock> blocks;
  std::int64_t head_width = 0;
  bool include_classifier = false;
  std::int64_t num_classes = 1000;

  std::int64_t stem_output_size() const { return resolution / 2; }
  /// Spatial size seen by the head.
  std::int64_t final_size() const;
  /// Channels entering the head.
  std::int64_t final_channels() const;

  /// Checks every block plus channel and spatial chaining; throws ChainError
  /// naming the first broken boundary.
  void validate() const;

  friend bool operator==(const NetworkSkeleton&, const NetworkSkeleton&) = default;
};

// Per-layer accounting. Labels default to the layer kind.
LayerMemory expansion_memory(const MBBlockShape& shape, std::string label = "exp");
LayerMemory depthwise_memory(const MBBlockShape& shape, std::string label = "dw");
LayerMemory projection_memory(const MBBlockShape& shape, std::string label = "proj");

/// [expansion, depthwise, projection] labelled `<prefix>.exp` etc.
std::array<LayerMemory, 3> block_memory(const MBBlockShape& shape,
                                        const std::string& prefix = "block");

/// Largest of the three layer totals of a block.
Items block_peak(const MBBlockShape& shape);

LayerMemory stem_memory(std::int64_t resolution, std::int64_t stem_width);
LayerMemory head_memory(std::int64_t c_in, std::int64_t head_width, std::int64_t spatial);
LayerMemory classifier_memory(std::int64_t head_width, std::int64_t num_classes);

/// Statistics over `records`, skipping the last one when `exclude_last`.
MemoryProfile summarize(std::vector<LayerMemory> records, bool exclude_last);

/// Stem, every block layer, head and classifier, in execution order. Batch
/// size is 1 and only the running layer's weights are resident.
MemoryProfile profile_network(const NetworkSkeleton& skeleton);

/// Max layer total per MB block, in block order.
std::vector<Items> block_peaks(const NetworkSkeleton& skeleton);
/// Max layer total per stage (index 0 is stage 1).
std::vector<Items> stage_peaks(const NetworkSkeleton& skeleton);

enum class Precision { Float32, Float16, Int8 };

std::uint64_t element_width(Precision precision);
std::uint64_t items_to_bytes(Items items, Precision precision);

/// 2 x multiply-accumulates over stem, blocks, head and (when included) the
/// classifier.
std::uint64_t flops_estimate(const NetworkSkeleton& skeleton);

/// FLOPs in millions, rounded to 3 significant digits.
double mflops_3sig(std::uint64_t flops);

}  // namespace memconst
