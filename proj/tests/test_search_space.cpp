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


#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "memconst/error.hpp"
#include "memconst/search_space.hpp"
#include "support.hpp"

namespace memconst {
namespace {

const SupernetSpace& space() {
  static const SupernetSpace s = reference_space();
  return s;
}

bool cites(const std::vector<Violation>& vs, const std::string& path, const std::string& word) {
  for (const auto& v : vs) {
    if (v.path == path && v.message.find(word) != std::string::npos) return true;
  }
  return false;
}

TEST(Validate, MaximalIsOk) {
  EXPECT_TRUE(validate(maximal_config(space()), space()).empty());
}

TEST(Validate, ExpandSixCitesOptions) {
  auto c = maximal_config(space());
  c.stages[2].expands[1] = 6;
  const auto vs = validate(c, space());
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_TRUE(cites(vs, "stages[2].expands[1]", "expand_options"));
}

TEST(Validate, DepthFiveCitesOptions) {
  auto c = maximal_config(space());
  c.stages[0].depth = 5;
  EXPECT_TRUE(cites(validate(c, space()), "stages[0].depth", "depth_options"));
}

TEST(Validate, ListsEveryViolation) {
  auto c = maximal_config(space());
  c.resolution = 100;
  c.stages[1].kernels[0] = 4;
  c.stages[3].expands.pop_back();
  c.stages.pop_back();
  const auto vs = validate(c, space());
  EXPECT_TRUE(cites(vs, "resolution", "resolution_options"));
  EXPECT_TRUE(cites(vs, "stages[1].kernels[0]", "kernel_options"));
  EXPECT_TRUE(cites(vs, "stages[3].expands", "slots"));
  EXPECT_TRUE(cites(vs, "stages", "stages"));
  EXPECT_THROW(require_valid(c, space()), ValidationError);
}

TEST(Count, ReferenceSpace) {
  const BigInt n = count_subnets(space());
  EXPECT_EQ(n, boost::multiprecision::pow(BigInt(7371), 5));
  EXPECT_EQ(n.str(), testing::oracle()["count_subnets"].get<std::string>());
  EXPECT_GT(n, BigInt(2) * boost::multiprecision::pow(BigInt(10), 19));
}

TEST(Count, TinySpaces) {
  SupernetSpace s;
  s.num_stages = 1;
  s.depth_options = {1};
  s.kernel_options = {3};
  s.expand_options = {2};
  EXPECT_EQ(count_subnets(s), 1);
  s.num_stages = 2;
  s.kernel_options = {3, 5};
  EXPECT_EQ(count_subnets(s), 4);
}

// Enumerate distinct active-gene assignments for one stage.
std::size_t stage_assignments(const SupernetSpace& s) {
  std::size_t total = 0;
  for (int d : s.depth_options) {
    std::size_t per = 1;
    for (int j = 0; j < d; ++j) per *= s.kernel_options.size() * s.expand_options.size();
    total += per;
  }
  return total;
}

TEST(Count, MatchesBruteForceEnumeration) {
  SupernetSpace s;
  s.num_stages = 2;
  s.depth_options = {1, 2};
  s.kernel_options = {3, 5};
  s.expand_options = {2, 3};
  // Walk every genome over full slots, keep distinct active assignments.
  std::set<std::vector<std::int64_t>> seen;
  const std::size_t nk = 2, ne = 2, nd = 2;
  std::vector<std::int64_t> stage_codes;
  auto encode_stage = [&](std::size_t code, std::vector<std::int64_t>& out) {
    const int depth = s.depth_options[code % nd];
    code /= nd;
    out.push_back(depth);
    for (int j = 0; j < 2; ++j) {
      const auto k = s.kernel_options[code % nk];
      code /= nk;
      const auto e = s.expand_options[code % ne].num();
      code /= ne;
      if (j < depth) {
        out.push_back(k);
        out.push_back(e);
      }
    }
  };
  const std::size_t per_stage = nd * 16;
  for (std::size_t a = 0; a < per_stage; ++a) {
    for (std::size_t b = 0; b < per_stage; ++b) {
      std::vector<std::int64_t> key;
      encode_stage(a, key);
      key.push_back(-1);
      encode_stage(b, key);
      seen.insert(key);
    }
  }
  EXPECT_LE(per_stage * per_stage, 10000u);
  EXPECT_EQ(BigInt(seen.size()), count_subnets(s));
  EXPECT_EQ(seen.size(), stage_assignments(s) * stage_assignments(s));
}

TEST(Sample, DeterministicAndValid) {
  EXPECT_EQ(sample_uniform(space(), 42), sample_uniform(space(), 42));
  Rng rng(3);
  for (int n = 0; n < 1000; ++n) {
    ASSERT_TRUE(validate(sample_uniform(space(), rng), space()).empty());
  }
}

TEST(Sample, FrequenciesNearUniform) {
  Rng rng(9);
  const int n = 100000;
  std::map<std::int64_t, int> res, kernel;
  std::map<int, int> depth;
  for (int i = 0; i < n; ++i) {
    const auto c = sample_uniform(space(), rng);
    ++res[c.resolution];
    ++depth[c.stages[2].depth];
    ++kernel[c.stages[4].kernels[3]];
  }
  auto within = [&](int count, double p) {
    const double sigma = std::sqrt(n * p * (1 - p));
    return std::abs(count - n * p) <= 3 * sigma;
  };
  for (auto [k, v] : res) EXPECT_TRUE(within(v, 0.25)) << k;
  for (auto [k, v] : depth) EXPECT_TRUE(within(v, 1.0 / 3)) << k;
  for (auto [k, v] : kernel) EXPECT_TRUE(within(v, 1.0 / 3)) << k;
}

TEST(Mutate, ProbZeroIsIdentity) {
  const auto c = sample_uniform(space(), 1);
  EXPECT_EQ(mutate(c, space(), 0.0, std::uint64_t{5}), c);
}

TEST(Mutate, DeterministicAndValid) {
  const auto c = sample_uniform(space(), 1);
  EXPECT_EQ(mutate(c, space(), 0.3, std::uint64_t{5}), mutate(c, space(), 0.3, std::uint64_t{5}));
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    ASSERT_TRUE(validate(mutate(c, space(), 0.5, rng), space()).empty());
  }
}

TEST(Mutate, ProbOneResamplesEveryGene) {
  // With prob 1 every gene is drawn fresh, so the resolution follows the
  // uniform law regardless of the parent.
  const auto c = maximal_config(space());
  Rng rng(4);
  std::map<std::int64_t, int> res;
  for (int i = 0; i < 4000; ++i) ++res[mutate(c, space(), 1.0, rng).resolution];
  ASSERT_EQ(res.size(), 4u);
  for (auto [k, v] : res) EXPECT_NEAR(v, 1000, 150) << k;
}

TEST(Mutate, FreezeResolution) {
  const auto c = maximal_config(space());
  Rng rng(4);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(mutate(c, space(), 1.0, rng, true).resolution, 224);
}

TEST(Crossover, Properties) {
  const auto a = sample_uniform(space(), 10);
  const auto b = sample_uniform(space(), 11);
  EXPECT_EQ(crossover(a, a, space(), std::uint64_t{1}), a);
  EXPECT_EQ(crossover(a, b, space(), std::uint64_t{1}), crossover(a, b, space(), std::uint64_t{1}));
  Rng rng(8);
  for (int n = 0; n < 200; ++n) {
    const auto c = crossover(a, b, space(), rng);
    ASSERT_TRUE(validate(c, space()).empty());
    ASSERT_TRUE(c.resolution == a.resolution || c.resolution == b.resolution);
    for (std::size_t s = 0; s < c.stages.size(); ++s) {
      const auto& x = c.stages[s];
      ASSERT_TRUE(x.depth == a.stages[s].depth || x.depth == b.stages[s].depth);
      for (std::size_t j = 0; j < x.kernels.size(); ++j) {
        ASSERT_TRUE(x.kernels[j] == a.stages[s].kernels[j] || x.kernels[j] == b.stages[s].kernels[j]);
        ASSERT_TRUE(x.expands[j] == a.stages[s].expands[j] || x.expands[j] == b.stages[s].expands[j]);
      }
    }
  }
}

TEST(Crossover, RejectsForeignParent) {
  auto a = sample_uniform(space(), 10);
  auto b = a;
  b.stages[0].kernels[0] = 9;
  EXPECT_THROW(crossover(a, b, space(), std::uint64_t{1}), ValidationError);
}

TEST(Resolve, ReferenceStageSizes) {
  const auto net = resolve(maximal_config(space()), space());
  std::vector<std::int64_t> sizes;
  for (const auto& b : net.blocks) {
    if (b.position == 1) sizes.push_back(b.shape.input_size);
  }
  EXPECT_EQ(sizes, (std::vector<std::int64_t>{112, 56, 28, 14, 7}));
  EXPECT_EQ(net.final_size(), 7);
  EXPECT_EQ(net.blocks.size(), 20u);
  EXPECT_NO_THROW(net.validate());
}

TEST(Resolve, StrideOnLastBlockOfDownsamplingStages) {
  const auto net = resolve(maximal_config(space()), space());
  for (const auto& b : net.blocks) {
    const bool expect_stride = b.stage < 5 && b.position == 4;
    EXPECT_EQ(b.shape.stride, expect_stride ? 2 : 1) << b.label();
  }
}

TEST(Resolve, ComposesWithProfileForSamples) {
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    ASSERT_NO_THROW(profile_network(resolve(sample_uniform(space(), rng), space())));
  }
}

TEST(Resolve, InertSlotsIgnored) {
  Rng rng(12);
  for (int n = 0; n < 200; ++n) {
    auto a = sample_uniform(space(), rng);
    auto b = a;
    for (auto& st : b.stages) {
      for (int j = st.depth; j < space().max_depth(); ++j) {
        st.kernels[j] = rng.pick(space().kernel_options);
        st.expands[j] = rng.pick(space().expand_options);
      }
    }
    ASSERT_TRUE(same_active_genes(a, b));
    ASSERT_EQ(resolve(a, space()), resolve(b, space()));
  }
}

TEST(Resolve, IndivisibleResolution) {
  SupernetSpace s = space();
  s.resolution_options = {100, 224};
  auto c = maximal_config(s);
  c.resolution = 100;
  EXPECT_THROW(resolve(c, s), ResolutionError);
}

TEST(Space, ValidateChecksOrderingAndSchedule) {
  SupernetSpace s = space();
  EXPECT_NO_THROW(s.validate());
  s.kernel_options = {5, 3};
  EXPECT_THROW(s.validate(), ValidationError);
  s = space();
  s.schedule.stage_widths.pop_back();
  EXPECT_THROW(s.validate(), ValidationError);
}

}  // namespace
}  // namespace memconst
