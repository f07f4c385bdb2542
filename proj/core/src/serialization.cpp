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


#include "memconst/serialization.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "memconst/error.hpp"

namespace memconst {

namespace {

template <typename T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(key, "missing field");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(key, e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void to_json(Json& j, const ExpandRatio& e) {
  if (e.is_integer()) {
    j = e.num();
  } else {
    j = e.value();
  }
}

void from_json(const Json& j, ExpandRatio& e) {
  if (j.is_number_integer()) {
    e = ExpandRatio(j.get<std::int64_t>());
  } else if (j.is_number()) {
    e = ExpandRatio::from_double(j.get<double>());
  } else if (j.is_string()) {
    const auto text = j.get<std::string>();
    const auto slash = text.find('/');
    std::int64_t num = 0, den = 1;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const char* mid = slash == std::string::npos ? end : text.data() + slash;
    auto r1 = std::from_chars(begin, mid, num);
    bool ok = r1.ec == std::errc() && r1.ptr == mid;
    if (ok && mid != end) {
      auto r2 = std::from_chars(mid + 1, end, den);
      ok = r2.ec == std::errc() && r2.ptr == end;
    }
    if (!ok) throw ValidationError("expand", "cannot parse ratio '" + text + "'");
    e = ExpandRatio(num, den);
  } else {
    throw ValidationError("expand", "expected a number or 'num/den' string");
  }
}

void to_json(Json& j, const StageGenes& s) {
  j = Json{{"depth", s.depth}, {"kernels", s.kernels}, {"expands", s.expands}};
}

void from_json(const Json& j, StageGenes& s) {
  s.depth = get_field<int>(j, "depth");
  s.kernels = get_field<std::vector<std::int64_t>>(j, "kernels");
  s.expands = get_field<std::vector<ExpandRatio>>(j, "expands");
}

void to_json(Json& j, const SubnetConfig& c) {
  j = Json{{"resolution", c.resolution}, {"stages", c.stages}};
}

void from_json(const Json& j, SubnetConfig& c) {
  c.resolution = get_field<std::int64_t>(j, "resolution");
  c.stages = get_field<std::vector<StageGenes>>(j, "stages");
}

void to_json(Json& j, const ChannelSchedule& s) {
  j = Json{{"stem_width", s.stem_width},
           {"stage_widths", s.stage_widths},
           {"head_width", s.head_width},
           {"divisor", s.divisor},
           {"mode", to_string(s.mode)}};
}

void from_json(const Json& j, ChannelSchedule& s) {
  s.stem_width = get_field<std::int64_t>(j, "stem_width");
  s.stage_widths = get_field<std::vector<std::int64_t>>(j, "stage_widths");
  s.head_width = get_field<std::int64_t>(j, "head_width");
  s.divisor = j.contains("divisor") ? get_field<std::int64_t>(j, "divisor") : 1;
  s.mode = j.contains("mode") ? plan_mode_from_string(get_field<std::string>(j, "mode"))
                              : PlanMode::NumericBalance;
}

void to_json(Json& j, const SupernetSpace& s) {
  j = Json{{"num_stages", s.num_stages},
           {"depth_options", s.depth_options},
           {"kernel_options", s.kernel_options},
           {"expand_options", s.expand_options},
           {"resolution_options", s.resolution_options},
           {"num_classes", s.num_classes},
           {"schedule", s.schedule}};
}

void from_json(const Json& j, SupernetSpace& s) {
  SupernetSpace d;
  s.num_stages = j.contains("num_stages") ? get_field<int>(j, "num_stages") : d.num_stages;
  s.depth_options = get_field<std::vector<int>>(j, "depth_options");
  s.kernel_options = get_field<std::vector<std::int64_t>>(j, "kernel_options");
  s.expand_options = get_field<std::vector<ExpandRatio>>(j, "expand_options");
  s.resolution_options = get_field<std::vector<std::int64_t>>(j, "resolution_options");
  s.num_classes = j.contains("num_classes") ? get_field<std::int64_t>(j, "num_classes")
                                            : d.num_classes;
  if (j.contains("schedule")) {
    s.schedule = get_field<ChannelSchedule>(j, "schedule");
  } else {
    s.schedule = plan_schedule(s.reference(), d.schedule.stem_width, d.schedule.divisor,
                               PlanMode::NumericBalance, s.num_stages);
  }
  s.validate();
}

void to_json(Json& j, const LayerMemory& l) {
  j = Json{{"label", l.label},
           {"input_items", l.input_items},
           {"weight_items", l.weight_items},
           {"output_items", l.output_items},
           {"total_items", l.total_items}};
}

void to_json(Json& j, const MemoryProfile& p) {
  j = Json{{"peak_items", p.peak_items},
           {"peak_index", p.peak_index},
           {"peak_label", p.records.empty() ? "" : p.records[p.peak_index].label},
           {"avg_items", p.avg_items},
           {"std_items", p.std_items},
           {"classifier_excluded", p.classifier_excluded},
           {"records", p.records}};
}

void to_json(Json& j, const PredictorModel& m) {
  j = Json{{"weights", m.weights},
           {"intercept", m.intercept},
           {"l2", m.l2},
           {"seed", m.seed},
           {"rows", m.rows}};
}

void from_json(const Json& j, PredictorModel& m) {
  m.weights = get_field<std::vector<double>>(j, "weights");
  m.intercept = get_field<double>(j, "intercept");
  m.l2 = get_field<double>(j, "l2");
  m.seed = get_field<std::uint64_t>(j, "seed");
  m.rows = get_field<std::size_t>(j, "rows");
}

void to_json(Json& j, const GenerationStats& g) {
  j = Json{{"best", g.best}, {"mean", g.mean}};
}

void to_json(Json& j, const SearchResult& r) {
  j = Json{{"max_peak_items", r.max_peak_items},
           {"best_score", r.best_score},
           {"best_peak_items", r.best_peak_items},
           {"evaluations", r.evaluations},
           {"best_config", r.best_config},
           {"history", r.history}};
}

void to_json(Json& j, const DatasetRow& r) {
  j = Json{{"config", r.config}, {"peak_items", r.peak_items}, {"score", r.score}};
}

void from_json(const Json& j, DatasetRow& r) {
  r.config = get_field<SubnetConfig>(j, "config");
  r.peak_items = get_field<Items>(j, "peak_items");
  r.score = get_field<double>(j, "score");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(what, std::string("malformed JSON: ") + e.what());
  }
}

Json load_json(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

SubnetConfig load_config(const std::filesystem::path& path) {
  return load_json(path).get<SubnetConfig>();
}

SupernetSpace load_space(const std::filesystem::path& path) {
  return load_json(path).get<SupernetSpace>();
}

PredictorModel load_model(const std::filesystem::path& path) {
  return load_json(path).get<PredictorModel>();
}

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& row : dataset.rows) out += Json(row).dump() + "\n";
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  Dataset d;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    d.rows.push_back(parse_json(line, "line " + std::to_string(n)).get<DatasetRow>());
  }
  return d;
}

std::string profile_csv(const MemoryProfile& profile) {
  std::ostringstream out;
  out << "index,label,input_items,weight_items,output_items,total_items\n";
  for (std::size_t i = 0; i < profile.counted_records(); ++i) {
    const auto& r = profile.records[i];
    out << i << ',' << csv_field(r.label) << ',' << r.input_items << ',' << r.weight_items
        << ',' << r.output_items << ',' << r.total_items << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "constraint_items,best_score,best_peak_items,evaluations\n";
  for (const auto& p : points) {
    out << p.constraint << ',';
    if (p.result) {
      out << format_double(p.result->best_score) << ',' << p.result->best_peak_items << ','
          << p.result->evaluations;
    } else {
      out << ",,";
    }
    out << '\n';
  }
  return out.str();
}

std::string compare_csv(const MemoryProfile& a, const MemoryProfile& b) {
  std::ostringstream out;
  out << "index,label_a,total_items_a,label_b,total_items_b\n";
  const std::size_t na = a.counted_records();
  const std::size_t nb = b.counted_records();
  for (std::size_t i = 0; i < std::max(na, nb); ++i) {
    out << i << ',';
    if (i < na) {
      out << csv_field(a.records[i].label) << ',' << a.records[i].total_items;
    } else {
      out << ',';
    }
    out << ',';
    if (i < nb) {
      out << csv_field(b.records[i].label) << ',' << b.records[i].total_items;
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace memconst
