// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#include "sct/toy_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "sct/error.hpp"
#include "sct/ingest.hpp"

namespace sct::toy {
namespace {

using nn::Activation;

constexpr std::string_view kMagic = "sct-checkpoint";
constexpr int kCheckpointVersion = 1;

struct SampleGrad {
  fa::FaParams fa;
  ClassifierParams classifier;
  double loss = 0.0;
  bool correct = false;
};

struct ClassifierForward {
  std::vector<nn::DenseCache> shared;
  std::vector<Eigen::Index> argmax;
  nn::DenseCache head;
  Matrix logits;
};

ClassifierForward classifier_forward(const ClassifierParams& p, const Matrix& x) {
  ClassifierForward f;
  f.shared.resize(p.shared.size());
  Matrix h = x;
  for (std::size_t i = 0; i < p.shared.size(); ++i) h = nn::dense_forward(p.shared[i], h, &f.shared[i]);
  const Matrix pooled = nn::max_pool(h, f.argmax);
  f.logits = nn::dense_forward(p.head, pooled, &f.head);
  return f;
}

// Returns dL/dx.
Matrix classifier_backward(const ClassifierParams& p, const ClassifierForward& f, const Matrix& d_logits,
                           Eigen::Index rows, ClassifierParams& grad) {
  const Matrix d_pooled = nn::dense_backward(p.head, f.head, d_logits, grad.head);
  Matrix h = nn::max_pool_backward(d_pooled, f.argmax, rows);
  for (std::size_t i = p.shared.size(); i-- > 0;) h = nn::dense_backward(p.shared[i], f.shared[i], h, grad.shared[i]);
  return h;
}

Matrix cat_stage(const Model& model, const PointCloud& cloud) {
  if (!model.use_cat) return nn::to_matrix(cloud);
  return nn::to_matrix(cat::cat_transform(cloud, model.cat_options).transformed);
}

SampleGrad sample_gradient(const Model& model, const Matrix& p_prime, int label) {
  SampleGrad g{model.fa.zeros_like(), model.classifier.zeros_like(), 0.0, false};
  fa::FaForward ff;
  const Matrix* x = &p_prime;
  if (model.use_fa) {
    ff = fa::fa_forward(p_prime, model.fa);
    x = &ff.p_out;
  }
  const ClassifierForward cf = classifier_forward(model.classifier, *x);
  const Eigen::RowVectorXd z = cf.logits.row(0);
  const double m = z.maxCoeff();
  const Eigen::RowVectorXd e = (z.array() - m).exp();
  const double total = e.sum();
  g.loss = -(z(label) - m - std::log(total));
  Eigen::Index best = 0;
  z.maxCoeff(&best);
  g.correct = best == label;

  Matrix d_logits = e / total;
  d_logits(0, label) -= 1.0;
  const Matrix dx = classifier_backward(model.classifier, cf, d_logits, x->rows(), g.classifier);
  if (model.use_fa) fa::fa_backward(ff, model.fa, dx, g.fa);
  return g;
}

std::string fmt_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_layer(std::ostringstream& out, const std::string& name, const MlpLayer& l) {
  out << "layer " << name << ' ' << nn::to_string(l.activation) << ' ' << l.out_dim() << ' ' << l.in_dim() << '\n';
  for (Eigen::Index i = 0; i < l.weights.size(); ++i) out << (i ? " " : "") << fmt_real(l.weights.data()[i]);
  out << '\n';
  for (Eigen::Index i = 0; i < l.bias.size(); ++i) out << (i ? " " : "") << fmt_real(l.bias[i]);
  out << '\n';
}

}  // namespace

void ClassifierParams::validate() const {
  Eigen::Index in = 3;
  for (const MlpLayer& l : shared) {
    if (l.in_dim() != in) throw Error(ErrorCode::ConfigError, "classifier layer sizes do not chain");
    in = l.out_dim();
  }
  if (head.in_dim() != in || head.out_dim() < 2 || head.activation != Activation::None) {
    throw Error(ErrorCode::ConfigError, "classifier head must be linear with at least 2 labels");
  }
}

ClassifierParams ClassifierParams::zeros_like() const {
  ClassifierParams z;
  for (const auto& l : shared) z.shared.push_back(l.zeros_like());
  z.head = head.zeros_like();
  return z;
}

void ClassifierParams::visit(const nn::TensorVisitor& fn) {
  for (std::size_t i = 0; i < shared.size(); ++i) nn::visit_layer(shared[i], "cls.shared." + std::to_string(i), fn);
  nn::visit_layer(head, "cls.head", fn);
}

ClassifierParams& ClassifierParams::operator+=(const ClassifierParams& o) {
  for (std::size_t i = 0; i < shared.size(); ++i) {
    shared[i].weights += o.shared[i].weights;
    shared[i].bias += o.shared[i].bias;
  }
  head.weights += o.head.weights;
  head.bias += o.head.bias;
  return *this;
}

ClassifierParams init_classifier(const ClassifierShape& shape, std::size_t labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double he = std::sqrt(2.0);
  ClassifierParams p;
  p.shared.push_back(MlpLayer::random(3, shape.h1, Activation::Relu, he, rng));
  p.shared.push_back(MlpLayer::random(shape.h1, shape.c, Activation::Relu, he, rng));
  p.head = MlpLayer::random(shape.c, static_cast<Eigen::Index>(labels), Activation::None, 1.0, rng);
  return p;
}

void Model::visit(const nn::TensorVisitor& fn) {
  if (use_fa) fa.visit(fn);
  classifier.visit(fn);
}

ToyDataset make_toy_dataset(std::size_t train_per_class, std::size_t test_per_class, std::size_t points,
                            std::uint64_t seed) {
  ToyDataset ds;
  for (auto kind : ingest::kShapeKinds) ds.class_names.emplace_back(ingest::to_string(kind));
  std::mt19937_64 rng(seed);
  auto make = [&](std::size_t per_class, std::vector<LabeledCloud>& out) {
    for (std::size_t i = 0; i < per_class; ++i) {
      for (auto kind : ingest::kShapeKinds) {
        const ingest::TriMesh mesh = ingest::random_shape(kind, rng);
        const std::uint64_t sample_seed = rng();
        out.push_back({ingest::normalize_unit_sphere(ingest::sample_surface(mesh, points, sample_seed)),
                       static_cast<int>(kind)});
      }
    }
  };
  make(train_per_class, ds.train);
  make(test_per_class, ds.test);
  return ds;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::ConfigError, "learning_rate must be finite and >= 0");
  }
  if (epochs == 0 || batch_size == 0) throw Error(ErrorCode::ConfigError, "epochs and batch_size must be positive");
  if (fa_shape.h1 <= 0 || fa_shape.h2 <= 0 || fa_shape.c <= 0 || fa_shape.decoder_hidden <= 0 ||
      classifier_shape.h1 <= 0 || classifier_shape.c <= 0) {
    throw Error(ErrorCode::ConfigError, "hidden sizes must be positive");
  }
}

TrainResult train_toy(const std::vector<LabeledCloud>& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw Error(ErrorCode::ConfigError, "training set is empty");
  int max_label = 0;
  for (const auto& s : data) {
    if (s.label < 0) throw Error(ErrorCode::ConfigError, "labels must be non-negative");
    max_label = std::max(max_label, s.label);
  }
  const std::size_t labels = static_cast<std::size_t>(max_label) + 1;
  if (labels < 2) throw Error(ErrorCode::ConfigError, "training needs at least 2 classes");

  std::mt19937_64 rng(cfg.seed);
  TrainResult result;
  Model& model = result.model;
  model.use_cat = cfg.use_cat;
  model.use_fa = cfg.use_fa;
  model.cat_options = cfg.cat_options;
  model.fa = fa::init_fa_params(cfg.fa_shape, rng());
  model.classifier = init_classifier(cfg.classifier_shape, labels, rng());

  // CAT has no parameters, so each cloud is normalized once up front.
  std::vector<Matrix> inputs(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) inputs[i] = cat_stage(model, data[i].cloud);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      std::vector<SampleGrad> grads(count);
      try {
        detail::parallel_for(count, [&](std::size_t k) {
          const std::size_t idx = order[start + k];
          grads[k] = sample_gradient(model, inputs[idx], data[idx].label);
        });
      } catch (const Error& e) {
        // Overflowing weights surface first as an unnormalizable frame quaternion.
        if (e.code() != ErrorCode::InvalidQuaternion) throw;
        throw Error(ErrorCode::TrainingDiverged, "frame quaternion became non-finite at epoch " + std::to_string(epoch));
      }
      SampleGrad& total = grads[0];
      for (std::size_t k = 1; k < count; ++k) {
        total.fa += grads[k].fa;
        total.classifier += grads[k].classifier;
      }
      for (const auto& g : grads) {
        loss_sum += g.loss;
        correct += g.correct ? 1 : 0;
      }
      if (!std::isfinite(loss_sum)) {
        throw Error(ErrorCode::TrainingDiverged, "non-finite loss at epoch " + std::to_string(epoch));
      }

      const double step = -cfg.learning_rate / static_cast<double>(count);
      if (step != 0.0) {
        std::vector<std::span<double>> grad_tensors;
        auto collect = [&](const std::string&, std::span<double> v) { grad_tensors.push_back(v); };
        if (model.use_fa) total.fa.visit(collect);
        total.classifier.visit(collect);
        std::size_t t = 0;
        model.visit([&](const std::string&, std::span<double> v) {
          const auto g = grad_tensors[t++];
          for (std::size_t j = 0; j < v.size(); ++j) v[j] += step * g[j];
        });
      }
    }
    result.history.push_back(
        {epoch + 1, loss_sum / static_cast<double>(data.size()), static_cast<double>(correct) / static_cast<double>(data.size())});
  }
  return result;
}

Matrix preprocess(const Model& model, const PointCloud& cloud) {
  Matrix x = cat_stage(model, cloud);
  if (model.use_fa) x = fa::fa_forward(x, model.fa).p_out;
  return x;
}

std::vector<double> logits(const Model& model, const PointCloud& cloud) {
  const Matrix z = classifier_forward(model.classifier, preprocess(model, cloud)).logits;
  return {z.data(), z.data() + z.size()};
}

int predict(const Model& model, const PointCloud& cloud) {
  const auto z = logits(model, cloud);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

std::vector<int> predict_all(const Model& model, const std::vector<PointCloud>& clouds) {
  std::vector<int> out(clouds.size());
  detail::parallel_for(clouds.size(), [&](std::size_t i) { out[i] = predict(model, clouds[i]); });
  return out;
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || labels.empty()) {
    throw Error(ErrorCode::InvalidCount, "prediction and label counts differ");
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hit += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

std::string serialize_checkpoint(const Model& model) {
  std::ostringstream out;
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "use_cat " << (model.use_cat ? 1 : 0) << '\n';
  out << "use_fa " << (model.use_fa ? 1 : 0) << '\n';
  out << "tie_tol " << fmt_real(model.cat_options.tie_tol) << '\n';
  out << "collinear_tol " << fmt_real(model.cat_options.collinear_tol) << '\n';
  write_layer(out, "fa.contour_enc1", model.fa.contour_enc1);
  write_layer(out, "fa.contour_enc2", model.fa.contour_enc2);
  for (std::size_t i = 0; i < model.fa.encoder.size(); ++i) write_layer(out, "fa.encoder." + std::to_string(i), model.fa.encoder[i]);
  for (std::size_t i = 0; i < model.fa.decoder.size(); ++i) write_layer(out, "fa.decoder." + std::to_string(i), model.fa.decoder[i]);
  for (std::size_t i = 0; i < model.classifier.shared.size(); ++i) {
    write_layer(out, "cls.shared." + std::to_string(i), model.classifier.shared[i]);
  }
  write_layer(out, "cls.head", model.classifier.head);
  out << "end\n";
  return out.str();
}

Model parse_checkpoint(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  std::size_t at = 0;
  auto next = [&]() -> std::pair<std::size_t, std::vector<std::string>> {
    if (at >= lines.size()) throw ParseError(ErrorCode::TruncatedFile, at + 1, "unexpected end of checkpoint");
    std::istringstream ss{std::string(lines[at])};
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    ++at;
    return {at, toks};
  };
  auto real = [](const std::string& t, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw ParseError(ErrorCode::NonNumericToken, line, "bad number '" + t + "'");
    }
    return v;
  };
  auto count = [](const std::string& t, std::size_t line) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw ParseError(ErrorCode::MalformedHeader, line, "bad integer '" + t + "'");
    }
    return v;
  };

  auto [l0, head] = next();
  if (head.size() != 2 || head[0] != kMagic || head[1] != std::to_string(kCheckpointVersion)) {
    throw ParseError(ErrorCode::MalformedHeader, l0, "expected '" + std::string(kMagic) + " 1'");
  }
  Model m;
  m.fa.encoder.clear();
  m.fa.decoder.clear();
  bool have_head = false;
  for (;;) {
    auto [ln, toks] = next();
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    if (key == "end") break;
    if (key == "use_cat" && toks.size() == 2) {
      m.use_cat = count(toks[1], ln) != 0;
    } else if (key == "use_fa" && toks.size() == 2) {
      m.use_fa = count(toks[1], ln) != 0;
    } else if (key == "tie_tol" && toks.size() == 2) {
      m.cat_options.tie_tol = real(toks[1], ln);
    } else if (key == "collinear_tol" && toks.size() == 2) {
      m.cat_options.collinear_tol = real(toks[1], ln);
    } else if (key == "layer" && toks.size() == 5) {
      const std::string& name = toks[1];
      MlpLayer layer = MlpLayer::zeros(static_cast<Eigen::Index>(count(toks[4], ln)),
                                       static_cast<Eigen::Index>(count(toks[3], ln)), nn::activation_from_string(toks[2]));
      auto [lw, w] = next();
      if (w.size() != static_cast<std::size_t>(layer.weights.size())) {
        throw ParseError(ErrorCode::TruncatedFile, lw, "weight count mismatch for " + name);
      }
      for (std::size_t i = 0; i < w.size(); ++i) layer.weights.data()[i] = real(w[i], lw);
      auto [lb, b] = next();
      if (b.size() != static_cast<std::size_t>(layer.bias.size())) {
        throw ParseError(ErrorCode::TruncatedFile, lb, "bias count mismatch for " + name);
      }
      for (std::size_t i = 0; i < b.size(); ++i) layer.bias[static_cast<Eigen::Index>(i)] = real(b[i], lb);

      auto indexed = [&](std::string_view prefix, std::vector<MlpLayer>& dst) {
        if (name.rfind(prefix, 0) != 0) return false;
        const std::size_t idx = count(name.substr(prefix.size()), ln);
        if (idx != dst.size()) throw ParseError(ErrorCode::MalformedHeader, ln, "layers out of order at " + name);
        dst.push_back(std::move(layer));
        return true;
      };
      if (name == "fa.contour_enc1") {
        m.fa.contour_enc1 = std::move(layer);
      } else if (name == "fa.contour_enc2") {
        m.fa.contour_enc2 = std::move(layer);
      } else if (name == "cls.head") {
        m.classifier.head = std::move(layer);
        have_head = true;
      } else if (!indexed("fa.encoder.", m.fa.encoder) && !indexed("fa.decoder.", m.fa.decoder) &&
                 !indexed("cls.shared.", m.classifier.shared)) {
        throw ParseError(ErrorCode::MalformedHeader, ln, "unknown layer '" + name + "'");
      }
    } else {
      throw ParseError(ErrorCode::MalformedHeader, ln, "unrecognized entry '" + key + "'");
    }
  }
  if (!have_head) throw ParseError(ErrorCode::TruncatedFile, at, "checkpoint has no classifier head");
  m.fa.validate();
  m.classifier.validate();
  return m;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  ingest::write_text_file(path, serialize_checkpoint(model));
}

Model load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(ingest::read_text_file(path)); }

}  // namespace sct::toy
