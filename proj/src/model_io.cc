/*
 * Copyright 2026 The SMITE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Text persistence shared by the twin network and the baselines.
//
//   smite-model 1
//   type <smite|two_model|interaction>
//   ...type-specific sections...
//   end

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smite/baselines.h"
#include "smite/errors.h"
#include "smite/training.h"

namespace smite {
namespace {

constexpr const char* kMagic = "smite-model";
constexpr int kFormatVersion = 1;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw ParseError("cannot write '" + path + "'");
    out_ << kMagic << ' ' << kFormatVersion << '\n';
  }

  std::ostream& stream() { return out_; }

  void Values(const std::string& tag, std::span<const double> values) {
    out_ << tag;
    for (double v : values) out_ << ' ' << Num(v);
    out_ << '\n';
  }

  void Finish() {
    out_ << "end\n";
    out_.flush();
    if (!out_) throw ParseError("failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw ParseError("cannot open model file '" + path + "'");
    const auto header = Next();
    if (header.size() != 2 || header[0] != kMagic) {
      Fail("not a model file (missing '" + std::string(kMagic) + "' header)");
    }
    if (header[1] != std::to_string(kFormatVersion)) {
      Fail("unsupported model format version " + header[1] + " (expected " +
           std::to_string(kFormatVersion) + ")");
    }
  }

  // Next non-empty line split on whitespace.
  std::vector<std::string> Next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    Fail("truncated file (unexpected end of file)");
    return {};
  }

  // Next line, which must start with `tag`.
  std::vector<std::string> Expect(const std::string& tag) {
    auto tokens = Next();
    if (tokens[0] != tag) {
      Fail("expected '" + tag + "', found '" + tokens[0] + "'");
    }
    return tokens;
  }

  // Line "tag v1 .. vcount".
  Vector ExpectValues(const std::string& tag, std::size_t count,
                      const std::string& context) {
    const auto tokens = Expect(tag);
    if (tokens.size() != count + 1) {
      Fail(context + ": expected " + std::to_string(count) + " values, found " +
           std::to_string(tokens.size() - 1));
    }
    Vector out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = ToDouble(tokens[i + 1]);
    return out;
  }

  double ToDouble(const std::string& s) {
    double v;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      Fail("invalid number '" + s + "'");
    }
    return v;
  }

  std::size_t ToCount(const std::string& s) {
    std::size_t v;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      Fail("invalid count '" + s + "'");
    }
    return v;
  }

  std::uint64_t ToSeed(const std::string& s) {
    std::uint64_t v;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      Fail("invalid seed '" + s + "'");
    }
    return v;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw ParseError(path_ + ":" + std::to_string(line_no_) + ": " + message);
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

void WriteStandardizer(Writer& w, const Standardizer& s) {
  w.stream() << "standardizer " << s.mean.size() << '\n';
  w.Values("mean", s.mean);
  w.Values("scale", s.scale);
}

Standardizer ReadStandardizer(Reader& r) {
  const auto head = r.Expect("standardizer");
  if (head.size() != 2) r.Fail("malformed standardizer line");
  const std::size_t p = r.ToCount(head[1]);
  Standardizer s;
  s.mean = r.ExpectValues("mean", p, "standardizer mean");
  s.scale = r.ExpectValues("scale", p, "standardizer scale");
  return s;
}

void WriteLogistic(Writer& w, const std::string& name, const LogisticModel& m) {
  w.stream() << "logistic " << name << ' ' << m.coefficients.size() << '\n';
  w.Values("coef", m.coefficients);
  w.stream() << "intercept " << Num(m.intercept) << '\n';
}

LogisticModel ReadLogistic(Reader& r, const std::string& name,
                           std::size_t expected_size) {
  const auto head = r.Expect("logistic");
  if (head.size() != 3 || head[1] != name) {
    r.Fail("expected logistic block '" + name + "'");
  }
  const std::size_t d = r.ToCount(head[2]);
  if (d != expected_size) {
    r.Fail("logistic block '" + name + "' has " + std::to_string(d) +
           " coefficients, expected " + std::to_string(expected_size));
  }
  LogisticModel m;
  m.coefficients = r.ExpectValues("coef", d, "logistic '" + name + "'");
  m.intercept = r.ExpectValues("intercept", 1, "logistic '" + name + "'")[0];
  return m;
}

void ExpectType(Reader& r, const std::string& type) {
  const auto tokens = r.Expect("type");
  if (tokens.size() != 2 || tokens[1] != type) {
    r.Fail("model type is '" + (tokens.size() > 1 ? tokens[1] : "") +
           "', expected '" + type + "'");
  }
}

std::string FormulaName(QiniFormula f) {
  return f == QiniFormula::kCorrected ? "corrected" : "literal";
}

}  // namespace

void SaveModel(const TrainedModel& model, const std::string& path) {
  Writer w(path);
  const auto& a = model.arch;
  const auto& c = model.config;
  auto& out = w.stream();
  out << "type smite\n";
  out << "arch " << a.input_dim << ' ' << a.linear_prefix << ' '
      << Num(a.leaky_slope) << ' ' << a.hidden_widths.size();
  for (std::size_t width : a.hidden_widths) out << ' ' << width;
  out << '\n';
  out << "config " << VariantName(c.variant) << ' ' << Num(c.alpha) << ' '
      << Num(c.learning_rate) << ' ' << c.epochs << ' ' << c.batch_size << ' '
      << c.seed << ' ' << c.qini_grid << ' ' << FormulaName(c.qini_formula)
      << '\n';
  out << "selection " << model.best_epoch << ' ' << Num(model.best_valid_qini)
      << '\n';
  out << "epoch_qini " << model.epoch_valid_qini.size() << '\n';
  w.Values("values", model.epoch_valid_qini);
  WriteStandardizer(w, model.standardizer);
  for (std::size_t l = 0; l < model.params.layers.size(); ++l) {
    const auto& layer = model.params.layers[l];
    out << "layer " << l << ' ' << layer.weights.rows() << ' '
        << layer.weights.cols() << '\n';
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
      w.Values("w", layer.weights.Row(r));
    }
    w.Values("b", layer.bias);
  }
  w.Finish();
}

TrainedModel LoadModel(const std::string& path) {
  Reader r(path);
  ExpectType(r, "smite");
  TrainedModel m;

  const auto arch = r.Expect("arch");
  if (arch.size() < 5) r.Fail("malformed arch line");
  m.arch.input_dim = r.ToCount(arch[1]);
  m.arch.linear_prefix = r.ToCount(arch[2]);
  m.arch.leaky_slope = r.ToDouble(arch[3]);
  const std::size_t depth = r.ToCount(arch[4]);
  if (arch.size() != 5 + depth) r.Fail("arch line lists the wrong number of widths");
  m.arch.hidden_widths.clear();
  for (std::size_t i = 0; i < depth; ++i) {
    m.arch.hidden_widths.push_back(r.ToCount(arch[5 + i]));
  }
  try {
    m.arch.Validate();
  } catch (const UsageError& e) {
    r.Fail(std::string("invalid architecture: ") + e.what());
  }

  const auto cfg = r.Expect("config");
  if (cfg.size() != 9) r.Fail("malformed config line");
  try {
    m.config.variant = ParseVariant(cfg[1]);
  } catch (const UsageError& e) {
    r.Fail(e.what());
  }
  m.config.alpha = r.ToDouble(cfg[2]);
  m.config.learning_rate = r.ToDouble(cfg[3]);
  m.config.epochs = r.ToCount(cfg[4]);
  m.config.batch_size = r.ToCount(cfg[5]);
  m.config.seed = r.ToSeed(cfg[6]);
  m.config.qini_grid = r.ToCount(cfg[7]);
  if (cfg[8] != "corrected" && cfg[8] != "literal") r.Fail("bad qini formula");
  m.config.qini_formula =
      cfg[8] == "literal" ? QiniFormula::kLiteral : QiniFormula::kCorrected;
  m.config.hidden_widths = m.arch.hidden_widths;
  m.config.linear_prefix = m.arch.linear_prefix;
  m.config.leaky_slope = m.arch.leaky_slope;

  const auto sel = r.Expect("selection");
  if (sel.size() != 3) r.Fail("malformed selection line");
  m.best_epoch = r.ToCount(sel[1]);
  m.best_valid_qini = r.ToDouble(sel[2]);
  const auto log = r.Expect("epoch_qini");
  if (log.size() != 2) r.Fail("malformed epoch_qini line");
  m.epoch_valid_qini = r.ExpectValues("values", r.ToCount(log[1]), "epoch log");

  m.standardizer = ReadStandardizer(r);
  if (m.standardizer.mean.size() + 1 != m.arch.input_dim) {
    r.Fail("standardizer covers " + std::to_string(m.standardizer.mean.size()) +
           " features but input_dim is " + std::to_string(m.arch.input_dim));
  }

  const Parameters expected = Parameters::Zeros(m.arch);
  for (std::size_t l = 0; l < expected.layers.size(); ++l) {
    const auto head = r.Expect("layer");
    const std::size_t rows = expected.layers[l].weights.rows();
    const std::size_t cols = expected.layers[l].weights.cols();
    if (head.size() != 4 || r.ToCount(head[1]) != l) {
      r.Fail("malformed dimension line for layer " + std::to_string(l));
    }
    if (r.ToCount(head[2]) != rows || r.ToCount(head[3]) != cols) {
      r.Fail("layer " + std::to_string(l) + " is " + head[2] + "x" + head[3] +
             " but the architecture expects " + std::to_string(rows) + "x" +
             std::to_string(cols));
    }
    DenseLayer layer{Matrix(rows, cols), Vector()};
    for (std::size_t row = 0; row < rows; ++row) {
      const Vector values =
          r.ExpectValues("w", cols, "layer " + std::to_string(l) + " weights");
      std::copy(values.begin(), values.end(), layer.weights.Row(row).begin());
    }
    layer.bias = r.ExpectValues("b", cols, "layer " + std::to_string(l) + " bias");
    m.params.layers.push_back(std::move(layer));
  }
  r.Expect("end");
  return m;
}

TrainedModel LoadModel(const std::string& path, const Architecture& expected) {
  TrainedModel m = LoadModel(path);
  if (!(m.arch == expected)) {
    throw ParseError(path + ": architecture mismatch: file has {" +
                     m.arch.ToString() + "}, expected {" + expected.ToString() +
                     "}");
  }
  return m;
}

void SaveBaseline(const TwoModelBaseline& model, const std::string& path) {
  Writer w(path);
  w.stream() << "type two_model\n";
  WriteStandardizer(w, model.standardizer);
  WriteLogistic(w, "treated", model.treated);
  WriteLogistic(w, "control", model.control);
  w.Finish();
}

void SaveBaseline(const InteractionBaseline& model, const std::string& path) {
  Writer w(path);
  w.stream() << "type interaction\n";
  WriteStandardizer(w, model.standardizer);
  WriteLogistic(w, "interaction", model.model);
  w.Finish();
}

TwoModelBaseline LoadTwoModelBaseline(const std::string& path) {
  Reader r(path);
  ExpectType(r, "two_model");
  TwoModelBaseline m;
  m.standardizer = ReadStandardizer(r);
  const std::size_t p = m.standardizer.mean.size();
  m.treated = ReadLogistic(r, "treated", p);
  m.control = ReadLogistic(r, "control", p);
  r.Expect("end");
  return m;
}

InteractionBaseline LoadInteractionBaseline(const std::string& path) {
  Reader r(path);
  ExpectType(r, "interaction");
  InteractionBaseline m;
  m.standardizer = ReadStandardizer(r);
  m.model = ReadLogistic(r, "interaction", 2 * m.standardizer.mean.size() + 1);
  r.Expect("end");
  return m;
}

std::string ModelFileType(const std::string& path) {
  Reader r(path);
  const auto tokens = r.Expect("type");
  if (tokens.size() != 2 ||
      (tokens[1] != "smite" && tokens[1] != "two_model" &&
       tokens[1] != "interaction")) {
    r.Fail("unknown model type");
  }
  return tokens[1];
}

std::unique_ptr<ConditionalMeanModel> LoadAnyModel(const std::string& path) {
  const std::string type = ModelFileType(path);
  if (type == "smite") return std::make_unique<TrainedModel>(LoadModel(path));
  if (type == "two_model") {
    return std::make_unique<TwoModelBaseline>(LoadTwoModelBaseline(path));
  }
  return std::make_unique<InteractionBaseline>(LoadInteractionBaseline(path));
}

}  // namespace smite
