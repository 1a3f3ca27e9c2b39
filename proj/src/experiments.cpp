// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "parallel.hpp"
#include "sct/error.hpp"
#include "sct/fa_net.hpp"
#include "sct/ingest.hpp"
#include "sct/pca.hpp"
#include "sct/perturb.hpp"

namespace sct::bench {
namespace {

using nlohmann::json;

class ConfigReader {
 public:
  ConfigReader(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j_.is_object()) throw Error(ErrorCode::ConfigError, scope_ + " config must be a JSON object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, scope_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw Error(ErrorCode::ConfigError, scope_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

void read_cat_options(ConfigReader& r, cat::Options& o) {
  r.get("tie_tol", o.tie_tol);
  r.get("collinear_tol", o.collinear_tol);
  if (!(o.tie_tol >= 0.0) || !(o.collinear_tol >= 0.0)) throw Error(ErrorCode::ConfigError, "tolerances must be >= 0");
}

struct Deviation {
  double max = 0.0;
  double rms = 0.0;
};

// Compares a against rows `index` of b.
Deviation deviation(const PointCloud& a, const PointCloud& b, const std::vector<std::size_t>& index) {
  Deviation d;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 diff = a[i] - b[index[i]];
    d.max = std::max(d.max, max_abs(diff));
    sq += dot(diff, diff);
  }
  d.rms = std::sqrt(sq / static_cast<double>(a.size()));
  return d;
}

bool is_off_path(const std::filesystem::path& p, const std::string& text) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return true;
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return false;
  return text.rfind("OFF", 0) == 0;
}

PointCloud load_cloud(const std::filesystem::path& path, std::optional<std::size_t> sample, std::uint64_t seed) {
  const std::string text = ingest::read_text_file(path);
  if (is_off_path(path, text)) {
    const ingest::TriMesh mesh = ingest::parse_off(text);
    if (sample) return ingest::sample_surface(mesh, *sample, seed);
    return PointCloud(mesh.vertices);
  }
  return ingest::parse_xyz(text);
}

double max_radius(const PointCloud& p) {
  double r = 0.0;
  for (const Vec3& v : p) r = std::max(r, norm(v));
  return r;
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] >= v[i - 1])) return false;
  }
  return true;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) {
    const double x = g(rng), y = g(rng), z = g(rng);
    p = {x, 0.6 * y, 0.3 * z};
  }
  return PointCloud(std::move(pts));
}

// --- transform --------------------------------------------------------------

namespace {

// Step of the last significant digit of the largest coordinate.
double output_quantum(double scale, int digits) {
  if (digits <= 0 || !(scale > 0.0)) return 0.0;
  return std::pow(10.0, std::floor(std::log10(scale)) - (digits - 1));
}

}  // namespace

TransformOutcome run_transform(const TransformRequest& req) {
  TransformOutcome out;
  const PointCloud input = load_cloud(req.input, req.sample, req.seed);
  PointCloud result;
  if (req.method == "cat" || req.method == "cat+fa") {
    cat::CatResult r = cat::cat_transform(input, req.cat);
    for (const cat::Tie& t : r.frame.ties) {
      out.warnings.push_back(std::string(t.kind == cat::Extreme::Farthest ? "farthest" : "closest") +
                             "-point tie between indices " + std::to_string(t.winner) + " and " +
                             std::to_string(t.other) + "; output is not rotation invariant");
    }
    if (r.degenerate) out.warnings.push_back("degenerate frame: " + r.degenerate_reason);
    result = std::move(r.transformed);
    if (req.method == "cat+fa") {
      if (req.checkpoint.empty()) throw Error(ErrorCode::ConfigError, "method cat+fa needs --checkpoint");
      const toy::Model model = toy::load_checkpoint(req.checkpoint);
      result = fa::fa_transform(result, model.fa);
    }
  } else if (req.method == "pca") {
    pca::PcaResult r = pca::pca_normalize(input);
    if (r.frame.near_degenerate) out.warnings.push_back("PCA eigenvalues are nearly degenerate");
    result = std::move(r.transformed);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown method '" + req.method + "' (expected cat, pca or cat+fa)");
  }
  out.xyz = ingest::write_xyz(result, {req.digits, output_quantum(max_radius(result), req.digits)});
  return out;
}

// --- verify-invariance ------------------------------------------------------

InvarianceConfig InvarianceConfig::from_json(const json& j) {
  InvarianceConfig c;
  ConfigReader r(j, "verify-invariance");
  r.get("clouds", c.clouds);
  r.get("points", c.points);
  r.get("motions", c.motions);
  r.get("translation_scale", c.translation_scale);
  r.get("tolerance", c.tolerance);
  r.get("methods", c.methods);
  r.get("identity_only", c.identity_only);
  r.get("inputs", c.inputs);
  r.get("checkpoint", c.checkpoint);
  r.get("seed", c.seed);
  read_cat_options(r, c.cat);
  r.finish();
  if (c.points.empty() && c.clouds > 0) throw Error(ErrorCode::ConfigError, "points must not be empty");
  for (std::size_t n : c.points) {
    if (n < 3) throw Error(ErrorCode::ConfigError, "clouds need at least 3 points");
  }
  for (const auto& m : c.methods) {
    if (m != "cat" && m != "pca" && m != "cat+fa") throw Error(ErrorCode::ConfigError, "unknown method '" + m + "'");
  }
  if (!(c.translation_scale >= 0.0) || !(c.tolerance >= 0.0)) {
    throw Error(ErrorCode::ConfigError, "translation_scale and tolerance must be >= 0");
  }
  return c;
}

json InvarianceConfig::to_json() const {
  return {{"clouds", clouds},       {"points", points},   {"motions", motions},
          {"translation_scale", translation_scale},     {"tolerance", tolerance},
          {"methods", methods},     {"identity_only", identity_only},
          {"inputs", inputs},       {"checkpoint", checkpoint},
          {"seed", seed},           {"tie_tol", cat.tie_tol}, {"collinear_tol", cat.collinear_tol}};
}

BenchReport run_verify_invariance(const InvarianceConfig& cfg) {
  BenchReport report;
  report.command = "verify-invariance";
  report.config = cfg.to_json();

  std::vector<PointCloud> clouds;
  std::vector<std::uint64_t> cloud_seeds;
  for (std::size_t i = 0; i < cfg.clouds; ++i) {
    const std::uint64_t s = derive_seed(cfg.seed, 1, i);
    clouds.push_back(random_cloud(cfg.points[i % cfg.points.size()], s));
    cloud_seeds.push_back(s);
  }
  for (const auto& path : cfg.inputs) {
    clouds.push_back(load_cloud(path, std::nullopt, 0));
    cloud_seeds.push_back(0);
  }

  const fa::FaParams fa_params =
      cfg.checkpoint.empty() ? fa::init_fa_params({}, derive_seed(cfg.seed, 3)) : toy::load_checkpoint(cfg.checkpoint).fa;

  auto run_method = [&](const std::string& method, const PointCloud& p, bool& tie_free) -> PointCloud {
    if (method == "pca") return pca::pca_normalize(p).transformed;
    cat::CatResult r = cat::cat_transform(p, cfg.cat);
    if (!r.frame.ties.empty() || r.degenerate) tie_free = false;
    if (method == "cat+fa") return fa::fa_transform(r.transformed, fa_params);
    return std::move(r.transformed);
  };

  std::vector<std::vector<TrialRecord>> per_cloud(clouds.size());
  detail::parallel_for(clouds.size(), [&](std::size_t c) {
    const PointCloud& p = clouds[c];
    auto& recs = per_cloud[c];
    for (const std::string& method : cfg.methods) {
      bool base_tie_free = true;
      std::optional<PointCloud> base;
      std::string base_error;
      try {
        base = run_method(method, p, base_tie_free);
      } catch (const Error& e) {
        base_error = e.what();
      }
      for (std::size_t k = 0; k < cfg.motions; ++k) {
        const std::uint64_t motion_seed = derive_seed(cfg.seed, 2, c, k);
        TrialRecord rec{method, cfg.identity_only ? "identity" : "rigid", cfg.translation_scale, motion_seed,
                        "max_abs_deviation", NAN, c, base_tie_free, base_error};
        if (base) {
          const RigidMotion m =
              cfg.identity_only ? RigidMotion::identity() : perturb::random_rigid(motion_seed, cfg.translation_scale);
          try {
            bool moved_tie_free = true;
            const PointCloud moved = run_method(method, apply_rigid(p, m), moved_tie_free);
            rec.value = max_pointwise_deviation(moved, *base);
            rec.tie_free = base_tie_free && moved_tie_free;
          } catch (const Error& e) {
            rec.note = e.what();
          }
        }
        recs.push_back(std::move(rec));
      }
    }
  });

  json per_method = json::object();
  std::size_t tie_clouds = 0;
  std::set<std::size_t> tied;
  for (auto& recs : per_cloud) {
    for (auto& r : recs) {
      if (!r.tie_free) tied.insert(r.cloud);
      report.records.push_back(std::move(r));
    }
  }
  tie_clouds = tied.size();
  for (const std::string& method : cfg.methods) {
    double worst = 0.0;
    std::size_t failed = 0, over = 0, compared = 0;
    for (const auto& r : report.records) {
      if (r.method != method || !r.tie_free) continue;
      if (!std::isfinite(r.value)) {
        ++failed;
        continue;
      }
      ++compared;
      worst = std::max(worst, r.value);
      if (r.value > 0.1) ++over;
    }
    per_method[method] = {{"max_deviation_tie_free", worst}, {"trials", compared}, {"failed", failed},
                          {"trials_over_0.1", over}};
    if (method == "cat" && (worst > cfg.tolerance || failed > 0)) report.passed = false;
  }
  report.summary = {{"methods", per_method}, {"clouds_with_ties", tie_clouds}, {"tolerance", cfg.tolerance}};
  return report;
}

// --- robustness -------------------------------------------------------------

RobustnessConfig RobustnessConfig::from_json(const json& j) {
  RobustnessConfig c;
  ConfigReader r(j, "robustness");
  r.get("trials", c.trials);
  r.get("base_points", c.base_points);
  r.get("noise_levels", c.noise_levels);
  r.get("subsample_counts", c.subsample_counts);
  r.get("partial_ratios", c.partial_ratios);
  r.get("checkpoint", c.checkpoint);
  r.get("eval_per_class", c.eval_per_class);
  r.get("seed", c.seed);
  read_cat_options(r, c.cat);
  r.finish();
  if (c.trials == 0) throw Error(ErrorCode::ConfigError, "trials must be positive");
  if (c.base_points < 3) throw Error(ErrorCode::ConfigError, "base_points must be >= 3");
  for (double s : c.noise_levels) {
    if (!(s >= 0.0)) throw Error(ErrorCode::ConfigError, "noise levels must be >= 0");
  }
  for (std::size_t n : c.subsample_counts) {
    if (n < 3 || n > c.base_points) throw Error(ErrorCode::ConfigError, "subsample counts must lie in [3, base_points]");
  }
  for (double k : c.partial_ratios) {
    if (!(k > 0.0 && k <= 1.0)) throw Error(ErrorCode::ConfigError, "partial ratios must lie in (0, 1]");
    if (perturb::partial_count(c.base_points, k) < 3) throw Error(ErrorCode::ConfigError, "partial crop keeps < 3 points");
  }
  return c;
}

json RobustnessConfig::to_json() const {
  return {{"trials", trials},
          {"base_points", base_points},
          {"noise_levels", noise_levels},
          {"subsample_counts", subsample_counts},
          {"partial_ratios", partial_ratios},
          {"checkpoint", checkpoint},
          {"eval_per_class", eval_per_class},
          {"seed", seed},
          {"tie_tol", cat.tie_tol},
          {"collinear_tol", cat.collinear_tol}};
}

BenchReport run_robustness(const RobustnessConfig& cfg) {
  BenchReport report;
  report.command = "robustness";
  report.config = cfg.to_json();

  struct Level {
    perturb::Kind kind;
    double level;
  };
  std::vector<Level> levels;
  for (double s : cfg.noise_levels) levels.push_back({perturb::Kind::Noise, s});
  for (std::size_t n : cfg.subsample_counts) levels.push_back({perturb::Kind::Subsample, static_cast<double>(n)});
  for (double k : cfg.partial_ratios) levels.push_back({perturb::Kind::Partial, k});

  std::vector<std::vector<TrialRecord>> per_trial(cfg.trials);
  detail::parallel_for(cfg.trials, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(cfg.seed, 10, t));
    const auto kind = ingest::kShapeKinds[t % ingest::kShapeKinds.size()];
    const ingest::TriMesh mesh = ingest::random_shape(kind, rng);
    const PointCloud base = ingest::normalize_unit_sphere(ingest::sample_surface(mesh, cfg.base_points, rng()));
    const cat::CatResult base_cat = cat::cat_transform(base, cfg.cat);
    const bool base_tie_free = base_cat.frame.ties.empty() && !base_cat.degenerate;

    for (std::size_t li = 0; li < levels.size(); ++li) {
      const perturb::PerturbSpec spec{levels[li].kind, levels[li].level, derive_seed(cfg.seed, 11, t, li)};
      const std::string kind_name(perturb::to_string(spec.kind));
      TrialRecord rms{"cat", kind_name, spec.level, spec.seed, "rms_deviation", NAN, t, base_tie_free, {}};
      TrialRecord mx = rms;
      mx.metric = "max_deviation";
      try {
        const perturb::Perturbed pert = perturb::apply(base, spec);
        const cat::CatResult r = cat::cat_transform(pert.cloud, cfg.cat);
        const Deviation d = deviation(r.transformed, base_cat.transformed, pert.source_index);
        rms.value = d.rms;
        mx.value = d.max;
        rms.tie_free = mx.tie_free = base_tie_free && r.frame.ties.empty() && !r.degenerate;
      } catch (const Error& e) {
        rms.note = mx.note = e.what();
      }
      per_trial[t].push_back(std::move(rms));
      per_trial[t].push_back(std::move(mx));
    }
  });
  for (auto& recs : per_trial) {
    for (auto& r : recs) report.records.push_back(std::move(r));
  }

  if (!cfg.checkpoint.empty()) {
    const toy::Model model = toy::load_checkpoint(cfg.checkpoint);
    const toy::ToyDataset eval = toy::make_toy_dataset(0, cfg.eval_per_class, cfg.base_points, derive_seed(cfg.seed, 20));
    std::vector<int> labels;
    for (const auto& s : eval.test) labels.push_back(s.label);
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const std::uint64_t seed = derive_seed(cfg.seed, 21, li);
      std::vector<PointCloud> clouds;
      for (std::size_t i = 0; i < eval.test.size(); ++i) {
        clouds.push_back(perturb::apply(eval.test[i].cloud, {levels[li].kind, levels[li].level, derive_seed(seed, i)}).cloud);
      }
      const double acc = toy::accuracy(toy::predict_all(model, clouds), labels);
      report.records.push_back({model.use_cat ? "cat+fa" : "fa", std::string(perturb::to_string(levels[li].kind)),
                                levels[li].level, seed, "accuracy", acc, 0, true, {}});
    }
  }

  // Mean rms deviation per level, in order of increasing perturbation.
  const auto aggs = report.aggregates();
  auto curve = [&](const std::string& kind, bool ascending_level) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& a : aggs) {
      if (a.method == "cat" && a.kind == kind && a.metric == "rms_deviation") pts.emplace_back(a.level, a.mean);
    }
    std::sort(pts.begin(), pts.end(), [&](const auto& x, const auto& y) {
      return ascending_level ? x.first < y.first : x.first > y.first;
    });
    std::vector<double> means;
    json levels_json = json::array(), means_json = json::array();
    bool finite = true;
    for (const auto& [lvl, mean] : pts) {
      means.push_back(mean);
      finite = finite && std::isfinite(mean);
      levels_json.push_back(lvl);
      means_json.push_back(std::isfinite(mean) ? json(mean) : json(nullptr));
    }
    return json{{"levels", levels_json}, {"mean_rms_deviation", means_json}, {"finite", finite},
                {"monotone", finite && non_decreasing(means)}};
  };
  std::size_t failed = 0;
  for (const auto& r : report.records) failed += std::isfinite(r.value) ? 0 : 1;
  report.summary = {{"noise", curve("noise", true)},
                    {"subsample", curve("subsample", false)},
                    {"partial", curve("partial", false)},
                    {"failed_trials", failed}};
  report.passed = failed == 0;
  return report;
}

// --- toy-e2e ----------------------------------------------------------------

ToyE2EConfig ToyE2EConfig::from_json(const json& j) {
  ToyE2EConfig c;
  ConfigReader r(j, "toy-e2e");
  r.get("train_per_class", c.train_per_class);
  r.get("test_per_class", c.test_per_class);
  r.get("points", c.points);
  r.get("translation_scale", c.translation_scale);
  r.get("ablation", c.ablation);
  r.get("checkpoint_out", c.checkpoint_out);
  r.get("learning_rate", c.train.learning_rate);
  r.get("epochs", c.train.epochs);
  r.get("batch_size", c.train.batch_size);
  r.get("seed", c.train.seed);
  r.get("h1", c.train.fa_shape.h1);
  r.get("h2", c.train.fa_shape.h2);
  r.get("c", c.train.fa_shape.c);
  r.get("decoder_hidden", c.train.fa_shape.decoder_hidden);
  r.get("classifier_h1", c.train.classifier_shape.h1);
  r.get("classifier_c", c.train.classifier_shape.c);
  read_cat_options(r, c.train.cat_options);
  r.finish();
  if (c.train_per_class == 0 || c.test_per_class == 0) throw Error(ErrorCode::ConfigError, "per-class counts must be positive");
  if (c.points < 3) throw Error(ErrorCode::ConfigError, "points must be >= 3");
  c.train.validate();
  return c;
}

json ToyE2EConfig::to_json() const {
  return {{"train_per_class", train_per_class},
          {"test_per_class", test_per_class},
          {"points", points},
          {"translation_scale", translation_scale},
          {"ablation", ablation},
          {"checkpoint_out", checkpoint_out},
          {"learning_rate", train.learning_rate},
          {"epochs", train.epochs},
          {"batch_size", train.batch_size},
          {"seed", train.seed},
          {"h1", train.fa_shape.h1},
          {"h2", train.fa_shape.h2},
          {"c", train.fa_shape.c},
          {"decoder_hidden", train.fa_shape.decoder_hidden},
          {"classifier_h1", train.classifier_shape.h1},
          {"classifier_c", train.classifier_shape.c},
          {"tie_tol", train.cat_options.tie_tol},
          {"collinear_tol", train.cat_options.collinear_tol}};
}

BenchReport run_toy_e2e(const ToyE2EConfig& cfg) {
  BenchReport report;
  report.command = "toy-e2e";
  report.config = cfg.to_json();

  const std::uint64_t seed = cfg.train.seed;
  const toy::ToyDataset ds = toy::make_toy_dataset(cfg.train_per_class, cfg.test_per_class, cfg.points, derive_seed(seed, 30));
  std::vector<PointCloud> nr, ar;
  std::vector<int> labels;
  std::vector<std::uint64_t> motion_seeds;
  for (std::size_t i = 0; i < ds.test.size(); ++i) {
    nr.push_back(ds.test[i].cloud);
    motion_seeds.push_back(derive_seed(seed, 31, i));
    ar.push_back(apply_rigid(ds.test[i].cloud, perturb::random_rigid(motion_seeds.back(), cfg.translation_scale)));
    labels.push_back(ds.test[i].label);
  }

  auto evaluate = [&](const std::string& method, toy::TrainConfig tc) {
    const auto start = std::chrono::steady_clock::now();
    toy::TrainResult trained = toy::train_toy(ds.train, tc);
    const std::vector<int> pred_nr = toy::predict_all(trained.model, nr);
    const std::vector<int> pred_ar = toy::predict_all(trained.model, ar);
    const double acc_nr = toy::accuracy(pred_nr, labels);
    const double acc_ar = toy::accuracy(pred_ar, labels);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.records.push_back({method, "NR/NR", 0.0, tc.seed, "accuracy", acc_nr, 0, true, {}});
    for (std::size_t i = 0; i < ar.size(); ++i) {
      report.records.push_back({method, "NR/AR", cfg.translation_scale, motion_seeds[i], "prediction_match",
                                pred_ar[i] == pred_nr[i] ? 1.0 : 0.0, i, true, {}});
    }
    report.records.push_back({method, "NR/AR", cfg.translation_scale, tc.seed, "accuracy", acc_ar, 0, true, {}});
    report.records.push_back({method, "NR/AR", cfg.translation_scale, tc.seed, "delta_acc", acc_ar - acc_nr, 0, true, {}});
    json loss = json::array(), train_acc = json::array();
    for (const auto& h : trained.history) {
      loss.push_back(h.loss);
      train_acc.push_back(h.train_accuracy);
    }
    report.summary[method] = {{"accuracy_nr_nr", acc_nr},
                              {"accuracy_nr_ar", acc_ar},
                              {"delta_acc", acc_ar - acc_nr},
                              {"identical_predictions", pred_nr == pred_ar},
                              {"train_accuracy", trained.history.back().train_accuracy},
                              {"loss_curve", loss},
                              {"train_accuracy_curve", train_acc},
                              {"seconds", seconds}};
    return std::make_pair(std::move(trained.model), pred_nr == pred_ar);
  };

  toy::TrainConfig main_cfg = cfg.train;
  main_cfg.use_cat = true;
  main_cfg.use_fa = true;
  auto [model, identical] = evaluate("cat+fa", main_cfg);
  report.passed = identical;
  if (!cfg.checkpoint_out.empty()) toy::save_checkpoint(model, cfg.checkpoint_out);

  if (cfg.ablation) {
    toy::TrainConfig ablation_cfg = cfg.train;
    ablation_cfg.use_cat = false;
    ablation_cfg.use_fa = true;
    evaluate("fa", ablation_cfg);
  }
  return report;
}

// --- bench-time -------------------------------------------------------------

BenchTimeConfig BenchTimeConfig::from_json(const json& j) {
  BenchTimeConfig c;
  ConfigReader r(j, "bench-time");
  r.get("min_log2", c.min_log2);
  r.get("max_log2", c.max_log2);
  r.get("repeats", c.repeats);
  r.get("kernel", c.kernel);
  r.get("max_ratio", c.max_ratio);
  r.get("seed", c.seed);
  r.finish();
  if (c.min_log2 < 2 || c.max_log2 > 26 || c.min_log2 > c.max_log2) {
    throw Error(ErrorCode::ConfigError, "need 2 <= min_log2 <= max_log2 <= 26");
  }
  if (c.repeats < 1) throw Error(ErrorCode::ConfigError, "repeats must be positive");
  if (c.kernel != "parallel" && c.kernel != "serial" && c.kernel != "both") {
    throw Error(ErrorCode::ConfigError, "kernel must be parallel, serial or both");
  }
  return c;
}

json BenchTimeConfig::to_json() const {
  return {{"min_log2", min_log2}, {"max_log2", max_log2}, {"repeats", repeats},
          {"kernel", kernel},     {"max_ratio", max_ratio}, {"seed", seed}};
}

BenchReport run_bench_time(const BenchTimeConfig& cfg) {
  BenchReport report;
  report.command = "bench-time";
  report.config = cfg.to_json();

  std::vector<std::string> kernels;
  if (cfg.kernel == "parallel" || cfg.kernel == "both") kernels.emplace_back("parallel");
  if (cfg.kernel == "serial" || cfg.kernel == "both") kernels.emplace_back("serial");

  const std::size_t budget = std::size_t{1} << cfg.max_log2;
  json per_kernel = json::object();
  for (const std::string& kernel : kernels) {
    std::map<int, double> ns_per_point;
    for (int l = cfg.min_log2; l <= cfg.max_log2; ++l) {
      const std::size_t n = std::size_t{1} << l;
      const std::uint64_t seed = derive_seed(cfg.seed, 40, static_cast<std::uint64_t>(l));
      const PointCloud cloud = random_cloud(n, seed);
      // Small clouds are looped so every repeat covers a similar number of points.
      const std::size_t inner = std::max<std::size_t>(1, budget / n);
      auto once = [&] {
        double sink = 0.0;
        for (std::size_t it = 0; it < inner; ++it) {
          const cat::CatResult r = kernel == "serial" ? cat::serial::cat_transform(cloud) : cat::cat_transform(cloud);
          sink += r.transformed[0].x;
        }
        return sink;
      };
      volatile double keep = once();  // warm-up
      std::vector<double> samples;
      for (int rep = 0; rep < cfg.repeats; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        keep = keep + once();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(n * inner));
      }
      const double med = median(samples);
      ns_per_point[l] = med;
      report.records.push_back({"cat", "size/" + kernel, static_cast<double>(n), seed, "ns_per_point", med, 0, true, {}});
    }
    const double smallest = ns_per_point.begin()->second;
    const double largest = ns_per_point.rbegin()->second;
    json k = {{"ratio_largest_to_smallest", largest / smallest}};
    bool ok = largest / smallest <= cfg.max_ratio;
    if (ns_per_point.count(20) && ns_per_point.count(16)) {
      const double r = ns_per_point[20] / ns_per_point[16];
      k["ratio_2^20_to_2^16"] = r;
      ok = ok && r <= cfg.max_ratio;
    }
    k["linear"] = ok;
    per_kernel[kernel] = k;
    report.passed = report.passed && ok;
  }
  report.summary = {{"kernels", per_kernel}, {"max_ratio", cfg.max_ratio}};
  return report;
}

}  // namespace sct::bench
