// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <tuple>

namespace sct::bench {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string csv_real(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
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

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix(splitmix(splitmix(splitmix(base) ^ a) ^ b) ^ c);
}

std::vector<AggregateRow> BenchReport::aggregates() const {
  using Key = std::tuple<std::string, std::string, double, std::string>;
  std::map<Key, std::size_t> slot;
  std::vector<AggregateRow> rows;
  for (const TrialRecord& r : records) {
    const Key key{r.method, r.kind, r.level, r.metric};
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, rows.size()).first;
      rows.push_back({r.method, r.kind, r.level, r.metric, 0.0, -INFINITY, 0, 0});
    }
    AggregateRow& row = rows[it->second];
    if (!std::isfinite(r.value)) {
      ++row.failed;
      continue;
    }
    row.mean += r.value;
    row.max = std::max(row.max, r.value);
    ++row.count;
  }
  for (AggregateRow& row : rows) {
    row.mean = row.count ? row.mean / static_cast<double>(row.count) : NAN;
    if (row.count == 0) row.max = NAN;
  }
  return rows;
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = "sct";
  j["tool_version"] = SCT_VERSION;
  j["command"] = command;
  j["config"] = config;
  j["passed"] = passed;
  j["summary"] = summary;
  auto& recs = j["records"] = nlohmann::json::array();
  for (const TrialRecord& r : records) {
    nlohmann::json o = {{"method", r.method}, {"kind", r.kind},   {"level", r.level},     {"seed", r.seed},
                        {"metric", r.metric}, {"value", number_or_null(r.value)}, {"cloud", r.cloud}, {"tie_free", r.tie_free}};
    if (!r.note.empty()) o["note"] = r.note;
    recs.push_back(std::move(o));
  }
  auto& aggs = j["aggregates"] = nlohmann::json::array();
  for (const AggregateRow& a : aggregates()) {
    aggs.push_back({{"method", a.method},
                    {"kind", a.kind},
                    {"level", a.level},
                    {"metric", a.metric},
                    {"mean", number_or_null(a.mean)},
                    {"max", number_or_null(a.max)},
                    {"count", a.count},
                    {"failed", a.failed}});
  }
  return j;
}

std::string BenchReport::to_csv() const {
  std::string out = "schema_version,command,method,kind,level,seed,metric,value,cloud,tie_free,note\n";
  for (const TrialRecord& r : records) {
    out += std::to_string(kReportSchemaVersion) + "," + csv_field(command) + "," + csv_field(r.method) + "," +
           csv_field(r.kind) + "," + csv_real(r.level) + "," + std::to_string(r.seed) + "," + csv_field(r.metric) + "," +
           csv_real(r.value) + "," + std::to_string(r.cloud) + "," + (r.tie_free ? "1" : "0") + "," + csv_field(r.note) +
           "\n";
  }
  return out;
}

}  // namespace sct::bench
