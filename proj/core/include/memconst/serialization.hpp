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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memconst/channel_planner.hpp"
#include "memconst/evo_search.hpp"
#include "memconst/memory_model.hpp"
#include "memconst/predictor.hpp"
#include "memconst/search_space.hpp"

namespace memconst {

using Json = nlohmann::json;

void to_json(Json& j, const ExpandRatio& e);
void from_json(const Json& j, ExpandRatio& e);
void to_json(Json& j, const StageGenes& s);
void from_json(const Json& j, StageGenes& s);
void to_json(Json& j, const SubnetConfig& c);
void from_json(const Json& j, SubnetConfig& c);
void to_json(Json& j, const ChannelSchedule& s);
void from_json(const Json& j, ChannelSchedule& s);
void to_json(Json& j, const SupernetSpace& s);
void from_json(const Json& j, SupernetSpace& s);
void to_json(Json& j, const LayerMemory& l);
void to_json(Json& j, const MemoryProfile& p);
void to_json(Json& j, const PredictorModel& m);
void from_json(const Json& j, PredictorModel& m);
void to_json(Json& j, const GenerationStats& g);
void to_json(Json& j, const SearchResult& r);
void to_json(Json& j, const DatasetRow& r);
void from_json(const Json& j, DatasetRow& r);

// Shortest round-trip decimal form.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
// Writes to a sibling temp file then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

Json parse_json(const std::string& text, const std::string& what);
Json load_json(const std::filesystem::path& path);
std::string dump_json(const Json& j);

SubnetConfig load_config(const std::filesystem::path& path);
SupernetSpace load_space(const std::filesystem::path& path);
PredictorModel load_model(const std::filesystem::path& path);

std::string dataset_to_jsonl(const Dataset& dataset);
Dataset dataset_from_jsonl(const std::string& text);

std::string profile_csv(const MemoryProfile& profile);
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string compare_csv(const MemoryProfile& a, const MemoryProfile& b);

}  // namespace memconst
