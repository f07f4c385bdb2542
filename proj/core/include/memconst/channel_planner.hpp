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
#include <span>
#include <string>
#include <vector>

#include "memconst/memory_model.hpp"

namespace memconst {

/// Block parameters the planner balances at; defaults are the supernet maxima.
struct ReferenceConfig {
  int depth = 4;
  std::int64_t kernel = 7;
  ExpandRatio expand{4};
  std::int64_t resolution = 224;
};

enum class PlanMode { ClosedForm, NumericBalance };

std::string to_string(PlanMode mode);
/// Accepts "closed-form" and "numeric".
PlanMode plan_mode_from_string(const std::string& text);

struct ChannelSchedule {
  std::int64_t stem_width = 8;
  std::vector<std::int64_t> stage_widths;
  std::int64_t head_width = 0;
  std::int64_t divisor = 8;
  PlanMode mode = PlanMode::NumericBalance;

  /// Widths positive multiples of `divisor`; throws ValidationError.
  void validate() const;

  friend bool operator==(const ChannelSchedule&, const ChannelSchedule&) = default;
};

enum class DominantLayer { Depthwise, Expansion, Projection };

std::string to_string(DominantLayer layer);

/// Coefficients of A*x^2 + B*x + D = 0.
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;

  double discriminant() const { return b * b - 4.0 * a * d; }
  double evaluate(double x) const { return (a * x + b) * x + d; }
  /// The positive root, given a > 0 and d < 0.
  double positive_root() const;
};

// Closed-form transition widths, evaluated as published. All arguments must
// be positive (ValidationError otherwise).

/// Depthwise layer dominates both stages:
/// C_in * (I^2 + 4K^2 + I^2/4) / (2I^2 + 4K^2).
double cout_depthwise_dominated(double c_in, double input_size, double kernel);

/// Depthwise-dominated stage followed by an expansion-dominated one.
Quadratic dw_to_exp_quadratic(double c_in, double input_size, double kernel, double expand);
double cout_dw_to_exp(double c_in, double input_size, double kernel, double expand);

/// Expansion-dominated stage.
Quadratic exp_dominated_quadratic(double c_in, double input_size, double expand);
double cout_exp_dominated(double c_in, double input_size, double expand);

/// Layer with the largest total; ties go Depthwise, then Expansion, then
/// Projection.
DominantLayer dominant_layer(const MBBlockShape& shape);

/// Depthwise -> min(dw, dw->exp); Expansion and Projection -> exp-dominated.
double select_cout(double c_in, double input_size, double kernel, double expand,
                   DominantLayer dominant);

/// Shape of a stage with uniform width: `depth` blocks at `input_size`, the
/// last one stride 2 when `downsample`.
struct StageTemplate {
  std::int64_t input_size = 1;
  std::int64_t kernel = 3;
  ExpandRatio expand{1};
  int depth = 1;
  bool downsample = true;
};

/// Blocks of `tmpl` instantiated at `width` (C_in = C_out = width).
std::vector<MBBlockShape> stage_blocks(std::int64_t width, const StageTemplate& tmpl);

/// Peak layer total over `blocks`.
Items stage_peak(std::span<const MBBlockShape> blocks);

/// Largest integer width C whose instantiated `next` stage peaks at or below
/// the peak of `current_stage`. Monotone bisection on the memory model;
/// throws InfeasibleError if even C = 1 exceeds the target.
std::int64_t numeric_balance(std::span<const MBBlockShape> current_stage,
                             const StageTemplate& next);

/// Largest multiple of `divisor` <= x; InfeasibleError when x < divisor.
std::int64_t quantize(double x, std::int64_t divisor);

/// Walks stem -> stage 1..5 -> head. Stage 1 runs at the stem's output size;
/// every later stage at half of its predecessor. Throws InfeasibleError
/// carrying the 1-based stage index (num_stages + 1 for the head).
ChannelSchedule plan_schedule(const ReferenceConfig& ref, std::int64_t stem_width,
                              std::int64_t divisor, PlanMode mode, int num_stages = 5);

/// The widths reported for the reference supernet:
/// stem, first block, five stages, head.
inline constexpr std::int64_t kPublishedSchedule[8] = {8, 24, 96, 288, 360, 384, 392, 392};

/// Published entries aligned to this library's schedule fields.
struct PublishedAlignment {
  std::string field;
  std::int64_t published = 0;
  std::int64_t planned = 0;  // -1 when the field is not modelled
};

std::vector<PublishedAlignment> align_with_published(const ChannelSchedule& schedule);

}  // namespace memconst
