// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCT_REPORT_HPP
#define SCT_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace sct::bench {

inline constexpr int kReportSchemaVersion = 1;

struct TrialRecord {
  std::string method;  // cat, pca, cat+fa, fa
  std::string kind;    // perturbation or setting name
  double level = 0.0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;  // NaN when the trial failed; see note
  std::size_t cloud = 0;
  bool tie_free = true;
  std::string note;
};

struct AggregateRow {
  std::string method;
  std::string kind;
  double level = 0.0;
  std::string metric;
  double mean = 0.0;
  double max = 0.0;
  std::size_t count = 0;  // finite values only
  std::size_t failed = 0;
};

struct BenchReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<TrialRecord> records;
  nlohmann::json summary = nlohmann::json::object();
  bool passed = true;

  /// Groups records by (method, kind, level, metric) in first-seen order.
  std::vector<AggregateRow> aggregates() const;
  nlohmann::json to_json() const;
  /// One row per trial record.
  std::string to_csv() const;
};

/// Deterministic 64-bit seed derivation (splitmix64 over the inputs).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace sct::bench

#endif  // SCT_REPORT_HPP
