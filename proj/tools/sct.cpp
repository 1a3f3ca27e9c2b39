// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

// sct: command-line front end.
//
// Exit codes: 0 ok, 1 a verb's check failed, 2 input/config error,
// 3 degenerate geometry, 4 training diverged.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sct/error.hpp"
#include "sct/experiments.hpp"
#include "sct/ingest.hpp"

namespace {

using nlohmann::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  std::optional<double> tolerance;
};

int exit_code(sct::ErrorCode code) {
  using sct::ErrorCode;
  switch (code) {
    case ErrorCode::AllPointsCoincident:
    case ErrorCode::DegenerateFrame:
    case ErrorCode::InvalidCount:
    case ErrorCode::ZeroAreaMesh:
    case ErrorCode::EigenFailure:
      return 3;
    case ErrorCode::TrainingDiverged:
      return 4;
    default:
      return 2;
  }
}

// Flag, then SCT_SEED, then whatever the config says.
std::optional<std::uint64_t> effective_seed(const Globals& g) {
  if (g.seed) return g.seed;
  if (const char* env = std::getenv("SCT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw sct::Error(sct::ErrorCode::ConfigError, "SCT_SEED is not an unsigned integer");
    }
  }
  return std::nullopt;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  const std::string text = sct::ingest::read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw sct::Error(sct::ErrorCode::ConfigError, path + ": " + e.what());
  }
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    sct::ingest::write_text_file(g.out, text);
  }
}

int finish(const Globals& g, const sct::bench::BenchReport& report) {
  emit(g, g.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n");
  if (!report.passed) std::cerr << "sct " << report.command << ": check failed\n";
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotation and translation invariant point cloud transforms"};
  app.set_version_flag("--version", std::string(SCT_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed override (default: $SCT_SEED, then the config)");
  app.add_option("--out", g.out, "Write output here instead of stdout");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tolerance", g.tolerance, "Invariance tolerance override")->check(CLI::NonNegativeNumber);

  sct::bench::TransformRequest treq;
  auto* transform = app.add_subcommand("transform", "Transform an OFF or XYZ file and write XYZ");
  transform->add_option("input", treq.input, "Input .off or .xyz file")->required();
  transform->add_option("--method", treq.method, "cat, pca or cat+fa")->check(CLI::IsMember({"cat", "pca", "cat+fa"}));
  transform->add_option("--checkpoint", treq.checkpoint, "Trained model (required by cat+fa)");
  transform->add_option("--sample", treq.sample, "Sample this many surface points from an OFF mesh");
  transform->add_option("--digits", treq.digits, "Significant digits (0 = shortest round-trip)")
      ->check(CLI::Range(0, 17));
  transform->add_option("--tie-tol", treq.cat.tie_tol, "Relative tie tolerance for extremal points");

  std::string config_path;
  auto add_report_verb = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "JSON config (defaults apply when omitted)");
    return sub;
  };
  auto* verify = add_report_verb("verify-invariance", "Check CAT(RP+T) = CAT(P) over random motions");
  auto* robust = add_report_verb("robustness", "Noise, subsampling and partial-crop sweeps");
  auto* toy_e2e = add_report_verb("toy-e2e", "Train the toy classifier and compare NR/NR with NR/AR");
  auto* bench_time = add_report_verb("bench-time", "Time cat_transform against cloud size");

  CLI11_PARSE(app, argc, argv);

  const std::string context = transform->parsed() ? treq.input.string() : config_path;
  try {
    const std::optional<std::uint64_t> seed = effective_seed(g);
    if (transform->parsed()) {
      if (seed) treq.seed = *seed;
      const sct::bench::TransformOutcome r = sct::bench::run_transform(treq);
      for (const std::string& w : r.warnings) std::cerr << "warning: " << treq.input.string() << ": " << w << "\n";
      emit(g, r.xyz);
      return 0;
    }
    const json cfg_json = load_config(config_path);
    if (verify->parsed()) {
      auto cfg = sct::bench::InvarianceConfig::from_json(cfg_json);
      if (seed) cfg.seed = *seed;
      if (g.tolerance) cfg.tolerance = *g.tolerance;
      return finish(g, sct::bench::run_verify_invariance(cfg));
    }
    if (robust->parsed()) {
      auto cfg = sct::bench::RobustnessConfig::from_json(cfg_json);
      if (seed) cfg.seed = *seed;
      return finish(g, sct::bench::run_robustness(cfg));
    }
    if (toy_e2e->parsed()) {
      auto cfg = sct::bench::ToyE2EConfig::from_json(cfg_json);
      if (seed) cfg.train.seed = *seed;
      return finish(g, sct::bench::run_toy_e2e(cfg));
    }
    if (bench_time->parsed()) {
      auto cfg = sct::bench::BenchTimeConfig::from_json(cfg_json);
      if (seed) cfg.seed = *seed;
      return finish(g, sct::bench::run_bench_time(cfg));
    }
  } catch (const sct::Error& e) {
    std::cerr << "sct: " << (context.empty() ? "" : context + ": ") << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "sct: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
