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

#include "memconst/channel_planner.hpp"

#include <algorithm>
#include <cmath>

#include "memconst/error.hpp"

namespace memconst {

std::string to_string(PlanMode mode) {
  return mode == PlanMode::ClosedForm ? "closed-form" : "numeric";
}

PlanMode plan_mode_from_string(const std::string& text) {
  if (text == "closed-form") return PlanMode::ClosedForm;
  if (text == "numeric") return PlanMode::NumericBalance;
  throw ValidationError("mode", "expected 'closed-form' or 'numeric', got '" + text + "'");
}

std::string to_string(DominantLayer layer) {
  switch (layer) {
    case DominantLayer::Depthwise:
      return "depthwise";
    case DominantLayer::Expansion:
      return "expansion";
    case DominantLayer::Projection:
      return "projection";
  }
  return "?";
}

void ChannelSchedule::validate() const {
  if (divisor <= 0) throw ValidationError("divisor", "must be positive");
  auto check = [this](const std::string& field, std::int64_t w) {
    if (w <= 0 || w % divisor != 0) {
      throw ValidationError(field, "width " + std::to_string(w) +
                                       " is not a positive multiple of " +
                                       std::to_string(divisor));
    }
  };
  check("stem_width", stem_width);
  if (stage_widths.empty()) throw ValidationError("stage_widths", "must not be empty");
  for (std::size_t i = 0; i < stage_widths.size(); ++i) {
    check("stage_widths[" + std::to_string(i) + "]", stage_widths[i]);
  }
  check("head_width", head_width);
}

double Quadratic::positive_root() const {
  // Same root as (-B + sqrt(disc)) / 2A, without the cancellation when
  // 4AD is small next to B^2.
  const double disc = discriminant();
  return -2.0 * d / (b + std::sqrt(disc));
}

namespace {

void require_positive(const char* field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(field, "must be positive");
  }
}

}  // namespace

double cout_depthwise_dominated(double c_in, double input_size, double kernel) {
  require_positive("c_in", c_in);
  require_positive("input_size", input_size);
  require_positive("kernel", kernel);
  const double i2 = input_size * input_size;
  const double k2 = kernel * kernel;
  return c_in * (i2 + 4.0 * k2 + i2 / 4.0) / (2.0 * i2 + 4.0 * k2);
}

Quadratic dw_to_exp_quadratic(double c_in, double input_size, double kernel, double expand) {
  require_positive("c_in", c_in);
  require_positive("input_size", input_size);
  require_positive("kernel", kernel);
  require_positive("expand", expand);
  const double i2 = input_size * input_size;
  return {expand, expand * i2 / 4.0 + i2 / 4.0,
          -expand * c_in * (i2 + kernel * kernel + i2 / 4.0)};
}

double cout_dw_to_exp(double c_in, double input_size, double kernel, double expand) {
  return dw_to_exp_quadratic(c_in, input_size, kernel, expand).positive_root();
}

Quadratic exp_dominated_quadratic(double c_in, double input_size, double expand) {
  require_positive("c_in", c_in);
  require_positive("input_size", input_size);
  require_positive("expand", expand);
  const double i2 = input_size * input_size;
  return {expand, expand * i2 / 2.0 + i2 / 4.0,
          -c_in * (i2 / 4.0 + expand * c_in + expand * i2)};
}

double cout_exp_dominated(double c_in, double input_size, double expand) {
  return exp_dominated_quadratic(c_in, input_size, expand).positive_root();
}

DominantLayer dominant_layer(const MBBlockShape& shape) {
  const auto layers = block_memory(shape);
  const Items exp = layers[0].total_items;
  const Items dw = layers[1].total_items;
  const Items proj = layers[2].total_items;
  if (dw >= exp && dw >= proj) return DominantLayer::Depthwise;
  if (exp >= proj) return DominantLayer::Expansion;
  return DominantLayer::Projection;
}

double select_cout(double c_in, double input_size, double kernel, double expand,
                   DominantLayer dominant) {
  if (dominant == DominantLayer::Depthwise) {
    return std::min(cout_depthwise_dominated(c_in, input_size, kernel),
                    cout_dw_to_exp(c_in, input_size, kernel, expand));
  }
  return cout_exp_dominated(c_in, input_size, expand);
}

std::vector<MBBlockShape> stage_blocks(std::int64_t width, const StageTemplate& tmpl) {
  if (tmpl.depth < 1) throw ValidationError("depth", "must be at least 1");
  std::vector<MBBlockShape> blocks;
  blocks.reserve(tmpl.depth);
  for (int i = 0; i < tmpl.depth; ++i) {
    const bool last = i + 1 == tmpl.depth;
    blocks.push_back(MBBlockShape{width, width, tmpl.expand, tmpl.kernel,
                                  (last && tmpl.downsample) ? 2 : 1, tmpl.input_size});
  }
  return blocks;
}

Items stage_peak(std::span<const MBBlockShape> blocks) {
  Items peak = 0;
  for (const auto& b : blocks) peak = std::max(peak, block_peak(b));
  return peak;
}

std::int64_t numeric_balance(std::span<const MBBlockShape> current_stage,
                             const StageTemplate& next) {
  if (current_stage.empty()) throw ValidationError("current_stage", "must not be empty");
  const Items target = stage_peak(current_stage);
  auto fits = [&](std::int64_t width) {
    return stage_peak(stage_blocks(width, next)) <= target;
  };
  if (!fits(1)) {
    throw InfeasibleError("no width >= 1 keeps the next stage under " +
                          std::to_string(target) + " items");
  }
  // Every layer total grows at least linearly in width, so doubling ends.
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::int64_t quantize(double x, std::int64_t divisor) {
  if (divisor <= 0) throw ValidationError("divisor", "must be positive");
  if (!(x >= static_cast<double>(divisor))) {
    throw InfeasibleError("width " + std::to_string(x) + " is below one quantum of " +
                          std::to_string(divisor));
  }
  const auto d = static_cast<double>(divisor);
  return static_cast<std::int64_t>(std::floor(x / d)) * divisor;
}

namespace {

const MBBlockShape& peak_block(const std::vector<MBBlockShape>& blocks) {
  return *std::max_element(blocks.begin(), blocks.end(),
                           [](const auto& a, const auto& b) { return block_peak(a) < block_peak(b); });
}

}  // namespace

ChannelSchedule plan_schedule(const ReferenceConfig& ref, std::int64_t stem_width,
                              std::int64_t divisor, PlanMode mode, int num_stages) {
  if (num_stages < 1) throw ValidationError("num_stages", "must be positive");
  if (stem_width <= 0) throw ValidationError("stem_width", "must be positive");
  if (divisor <= 0) throw ValidationError("divisor", "must be positive");
  if (ref.resolution <= 0 || ref.resolution % 2 != 0) {
    throw ResolutionError("resolution", "must be positive and even");
  }

  ChannelSchedule schedule;
  schedule.stem_width = stem_width;
  schedule.divisor = divisor;
  schedule.mode = mode;

  // The stem output is treated as a stage of reference blocks at stem width.
  StageTemplate current{ref.resolution / 2, ref.kernel, ref.expand, ref.depth, true};
  std::int64_t width = stem_width;
  auto blocks = stage_blocks(width, current);

  auto transition = [&](const StageTemplate& next, int stage) {
    double raw = 0.0;
    try {
      if (mode == PlanMode::NumericBalance) {
        raw = static_cast<double>(numeric_balance(blocks, next));
      } else if (next.input_size == current.input_size) {
        // No spatial change: the balance condition is solved by the current width.
        raw = static_cast<double>(width);
      } else {
        const auto dominant = dominant_layer(peak_block(blocks));
        raw = select_cout(static_cast<double>(width), static_cast<double>(current.input_size),
                          static_cast<double>(ref.kernel), ref.expand.value(), dominant);
      }
      return quantize(raw, divisor);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("stage " + std::to_string(stage) + ": " + e.what(), stage);
    }
  };

  for (int s = 1; s <= num_stages; ++s) {
    StageTemplate next = current;
    if (s > 1) {
      if (current.input_size % 2 != 0) {
        throw ResolutionError("resolution", "stage " + std::to_string(s) +
                                                " input size is not an even halving");
      }
      next.input_size = current.input_size / 2;
    }
    next.downsample = s < num_stages;
    width = transition(next, s);
    schedule.stage_widths.push_back(width);
    current = next;
    blocks = stage_blocks(width, current);
  }

  // Head: one more balancing step against a non-downsampling stage at half size.
  StageTemplate head = current;
  head.input_size = std::max<std::int64_t>(1, current.input_size / 2);
  head.downsample = false;
  schedule.head_width = transition(head, num_stages + 1);
  return schedule;
}

std::vector<PublishedAlignment> align_with_published(const ChannelSchedule& schedule) {
  std::vector<PublishedAlignment> rows;
  rows.push_back({"stem", kPublishedSchedule[0], schedule.stem_width});
  rows.push_back({"first_block", kPublishedSchedule[1], -1});
  for (std::size_t i = 0; i < 5; ++i) {
    const std::int64_t planned =
        i < schedule.stage_widths.size() ? schedule.stage_widths[i] : -1;
    rows.push_back({"stage" + std::to_string(i + 1), kPublishedSchedule[2 + i], planned});
  }
  rows.push_back({"head", kPublishedSchedule[7], schedule.head_width});
  return rows;
}

}  // namespace memconst
