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

#include "smite/cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "smite/baselines.h"
#include "smite/config.h"
#include "smite/data.h"
#include "smite/errors.h"
#include "smite/metrics.h"
#include "smite/parallel.h"
#include "smite/synthetic.h"
#include "smite/training.h"

namespace smite {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ----------------------------------------------------------------------------
// Configuration helpers.

void CheckPaths(const Config& config) {
  for (const char* key : {"data", "truth", "model", "generator_model"}) {
    if (config.Has(key) && !fs::exists(config.GetString(key))) {
      throw UsageError(std::string(key) + ": no such file '" +
                       config.GetString(key) + "'");
    }
  }
}

std::size_t Workers(const Config& config) {
  const std::size_t w = config.GetSize("workers");
  return w == 0 ? DefaultWorkers() : w;
}

MetricOptions MetricsFrom(const Config& config) {
  MetricOptions m;
  m.qini_grid = config.GetSize("qini_grid");
  m.kendall_bins = config.GetSize("kendall_bins");
  m.formula = config.GetBool("qini_literal") ? QiniFormula::kLiteral
                                              : QiniFormula::kCorrected;
  if (m.qini_grid < 1) throw UsageError("qini_grid must be >= 1");
  if (m.kendall_bins < 2) throw UsageError("kendall_bins must be >= 2");
  return m;
}

SplitPlan SplitFrom(const Config& config, std::size_t repeats) {
  SplitPlan plan;
  plan.holdout_fraction = config.GetDouble("holdout_fraction");
  plan.train_fraction_of_rest = config.GetDouble("train_fraction");
  plan.repeats = repeats;
  plan.seed = config.GetSeed("seed");
  plan.Validate();
  return plan;
}

TrainConfig TrainFrom(const Config& config, LossVariant variant,
                      const std::string& alpha_key) {
  TrainConfig t;
  t.variant = variant;
  t.alpha = config.GetDouble(config.Has(alpha_key) ? alpha_key : "alpha");
  t.learning_rate = config.GetDouble("learning_rate");
  t.epochs = config.GetSize("epochs");
  t.batch_size = config.GetSize("batch_size");
  t.seed = config.GetSeed("seed");
  t.hidden_widths = config.GetSizeList("hidden_widths");
  t.linear_prefix = config.GetSize("linear_prefix");
  t.leaky_slope = config.GetDouble("leaky_slope");
  const MetricOptions m = MetricsFrom(config);
  t.qini_grid = m.qini_grid;
  t.qini_formula = m.formula;
  t.Validate();
  return t;
}

LogisticFitOptions LogisticFrom(const Config& config) {
  LogisticFitOptions o;
  o.learning_rate = config.GetDouble("logistic_rate");
  o.iterations = config.GetSize("logistic_iterations");
  o.l2 = config.GetDouble("logistic_l2");
  if (!(o.learning_rate > 0.0)) throw UsageError("logistic_rate must be > 0");
  if (o.l2 < 0.0) throw UsageError("logistic_l2 must be >= 0");
  return o;
}

SyntheticSpec SyntheticFrom(const Config& config) {
  const double base_rate = config.GetDouble("base_rate");
  if (!(base_rate > 0.0 && base_rate < 1.0)) {
    throw UsageError("base_rate must lie in (0, 1)");
  }
  SyntheticSpec spec = DefaultSyntheticSpec(
      config.GetSize("n"), config.GetSize("p"), config.GetSeed("seed"),
      config.GetDouble("sparsity"), base_rate);
  spec.Validate();
  return spec;
}

// ----------------------------------------------------------------------------
// Artifacts.

std::vector<std::string> Provenance(const Config& config,
                                    const std::string& command) {
  std::vector<std::string> lines = {"smite " + command};
  for (const auto& line : config.ResolvedLines()) lines.push_back(line);
  return lines;
}

Json ConfigJson(const Config& config, const std::string& command) {
  Json j;
  j["command"] = command;
  Json resolved = Json::object();
  for (const auto& line : config.ResolvedLines()) {
    const auto eq = line.find('=');
    resolved[line.substr(0, eq)] = line.substr(eq + 1);
  }
  j["config"] = resolved;
  return j;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw DataError("cannot write '" + path.string() + "'");
}

void WriteCommented(const fs::path& path, const Config& config,
                    const std::string& command, const std::string& body) {
  std::string text;
  for (const auto& line : Provenance(config, command)) text += "# " + line + "\n";
  WriteText(path, text + body);
}

fs::path PrepareOut(const Config& config) {
  const fs::path dir = config.GetString("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "'");
  WriteText(dir / "resolved_config.txt", config.ResolvedText());
  return dir;
}

// ----------------------------------------------------------------------------
// Inputs.

struct Input {
  UpliftDataset data;
  std::optional<Vector> truth;
};

// Two columns, row index then true uplift, one row per dataset row.
Vector ReadTruthCsv(const std::string& path, std::size_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open truth file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  Vector truth;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (comma == std::string::npos) throw ParseError(where + "expected 2 columns");
    std::size_t row = 0;
    double value = 0.0;
    const char* b = line.data();
    const auto r1 = std::from_chars(b, b + comma, row);
    const auto r2 = std::from_chars(b + comma + 1, b + line.size(), value);
    if (r1.ec != std::errc() || r1.ptr != b + comma || r2.ec != std::errc() ||
        r2.ptr != b + line.size() || !std::isfinite(value)) {
      throw ParseError(where + "malformed row '" + line + "'");
    }
    if (row != truth.size()) {
      throw ParseError(where + "expected row index " +
                       std::to_string(truth.size()));
    }
    truth.push_back(value);
  }
  if (truth.size() != expected_rows) {
    throw ParseError(path + ": " + std::to_string(truth.size()) +
                     " truth rows for a dataset of " +
                     std::to_string(expected_rows));
  }
  return truth;
}

Input LoadInput(const Config& config) {
  if (!config.Has("data")) {
    ParametricSample sample = GenerateParametric(SyntheticFrom(config));
    return Input{std::move(sample.dataset), std::move(sample.true_uplift)};
  }
  std::optional<double> propensity;
  if (config.Has("propensity")) propensity = config.GetDouble("propensity");
  Input input{LoadCsv(config.GetString("data"), config.GetString("outcome_col"),
                      config.GetString("treatment_col"), propensity),
              std::nullopt};
  if (config.Has("truth")) {
    input.truth = ReadTruthCsv(config.GetString("truth"), input.data.size());
  }
  return input;
}

Vector Gather(const Vector& v, const std::vector<std::size_t>& idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

double EmpiricalAte(const UpliftDataset& ds) {
  double yt = 0.0, yc = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.treatment()[i] == 1.0 ? yt : yc) += ds.outcome()[i];
  }
  return yt / double(ds.num_treated()) - yc / double(ds.num_control());
}

// ----------------------------------------------------------------------------
// simulate

int Simulate(const Config& config, std::ostream& out) {
  const std::string mode = config.GetString("mode");
  if (mode != "parametric" && mode != "bootstrap") {
    throw UsageError("mode: expected parametric or bootstrap, got '" + mode + "'");
  }
  if (mode == "parametric") {
    const SyntheticSpec spec = SyntheticFrom(config);
    const fs::path dir = PrepareOut(config);
    const ParametricSample sample = GenerateParametric(spec);
    WriteCsv(sample.dataset, (dir / "data.csv").string(), "y", "t",
             Provenance(config, "simulate"));
    std::string truth = "row,true_uplift\n";
    for (std::size_t i = 0; i < sample.true_uplift.size(); ++i) {
      truth += std::to_string(i) + "," + Fmt(sample.true_uplift[i]) + "\n";
    }
    WriteCommented(dir / "truth.csv", config, "simulate", truth);
    out << "n=" << spec.n << " p=" << spec.p
        << " ate=" << Fmt(EmpiricalAte(sample.dataset))
        << " true_ate=" << Fmt(Mean(sample.true_uplift))
        << " seed=" << spec.seed << "\n";
    return kExitOk;
  }

  if (!config.Has("data")) throw UsageError("data: bootstrap mode needs a source CSV");
  if (!config.Has("generator_model")) {
    throw UsageError("generator_model: bootstrap mode needs a fitted model file");
  }
  const Input input = LoadInput(config);
  const auto model = LoadAnyModel(config.GetString("generator_model"));
  const fs::path dir = PrepareOut(config);
  const UpliftDataset sample =
      GenerateBootstrap(input.data, *model, config.GetSeed("seed"));
  WriteCsv(sample, (dir / "data.csv").string(), config.GetString("outcome_col"),
           config.GetString("treatment_col"), Provenance(config, "simulate"));
  out << "n=" << sample.size() << " p=" << sample.num_features()
      << " ate=" << Fmt(EmpiricalAte(sample))
      << " seed=" << config.GetSeed("seed") << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------------------
// tune

Json TuneJson(const TuneResult& r) {
  Json j;
  j["parameter"] = r.parameter;
  j["selected"] = r.selected;
  j["fallback"] = r.fallback;
  Json candidates = Json::array();
  for (const auto& c : r.candidates) {
    Json cj;
    cj["value"] = c.value;
    cj["successful_folds"] = c.successful_folds;
    cj["excluded"] = c.excluded;
    if (!c.excluded) {
      cj["mean"] = c.mean;
      // Infinite bounds (single successful fold) are written as null.
      cj["ci_lower"] = std::isfinite(c.ci_lower) ? Json(c.ci_lower) : Json();
      cj["ci_upper"] = std::isfinite(c.ci_upper) ? Json(c.ci_upper) : Json();
    }
    Json folds = Json::array();
    for (const auto& s : c.fold_scores) folds.push_back(s ? Json(*s) : Json());
    cj["fold_scores"] = folds;
    candidates.push_back(cj);
  }
  j["candidates"] = candidates;
  j["failures"] = r.failures;
  return j;
}

void AppendTuneRows(const TuneResult& r, std::string* csv) {
  for (const auto& c : r.candidates) {
    *csv += r.parameter + "," + Fmt(c.value) + "," +
            std::to_string(c.successful_folds) + "," +
            (c.excluded ? ",," : Fmt(c.mean) + "," + Fmt(c.ci_lower) + "," +
                                     Fmt(c.ci_upper)) +
            "," + (c.excluded ? "1" : "0") + "," +
            (c.value == r.selected ? "1" : "0") + "\n";
  }
}

int Tune(const Config& config, std::ostream& out) {
  TrainConfig base =
      TrainFrom(config, ParseVariant(config.GetString("variant")), "alpha");
  const SplitPlan outer = SplitFrom(config, 1);
  SplitPlan folds = SplitFrom(config, config.GetSize("folds"));
  folds.holdout_fraction = 0.0;
  if (folds.repeats < 2) throw UsageError("folds must be >= 2");
  const std::size_t workers = Workers(config);

  const Input input = LoadInput(config);
  const fs::path dir = PrepareOut(config);
  const UpliftDataset tuning_set =
      input.data.Subset(MakeSplitIndices(input.data, outer).rest);

  const TuneResult alpha = TuneAlpha(tuning_set, folds, base, workers);
  base.alpha = alpha.selected;
  const TuneResult rate = TuneLearningRate(tuning_set, folds, base, workers);

  std::string csv =
      "parameter,value,successful_folds,mean,ci_lower,ci_upper,excluded,"
      "selected\n";
  AppendTuneRows(alpha, &csv);
  AppendTuneRows(rate, &csv);
  WriteCommented(dir / "tune.csv", config, "tune", csv);

  std::string folds_csv = "parameter,value,fold,qini\n";
  for (const TuneResult* r : {&alpha, &rate}) {
    for (const auto& c : r->candidates) {
      for (std::size_t f = 0; f < c.fold_scores.size(); ++f) {
        folds_csv += r->parameter + "," + Fmt(c.value) + "," + std::to_string(f) +
                     "," + (c.fold_scores[f] ? Fmt(*c.fold_scores[f]) : "") + "\n";
      }
    }
  }
  WriteCommented(dir / "tune_folds.csv", config, "tune", folds_csv);

  Json j = ConfigJson(config, "tune");
  j["results"] = Json::array({TuneJson(alpha), TuneJson(rate)});
  WriteText(dir / "tune.json", j.dump(2) + "\n");

  for (const TuneResult* r : {&alpha, &rate}) {
    out << r->parameter << "=" << Fmt(r->selected)
        << (r->fallback ? " (fallback: no candidate CI lower bound > 0)" : "")
        << "\n";
    for (const auto& f : r->failures) out << "  failed: " << f << "\n";
  }
  return alpha.fallback || rate.fallback ? kExitTuneFallback : kExitOk;
}

// ----------------------------------------------------------------------------
// benchmark

struct SplitEval {
  EvalReport report;
  QiniCurve curve;
};

struct ModelRun {
  std::string name;
  std::string error;  // empty on success
  std::map<std::string, SplitEval> splits;
  std::size_t best_epoch = 0;
  std::shared_ptr<ConditionalMeanModel> model;  // null for the oracle
};

struct RunResult {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<ModelRun> models;
};

struct Part {
  std::string name;
  const UpliftDataset* data;
  std::vector<std::size_t> rows;  // indices into the full dataset
};

SplitEval EvaluateScores(const Vector& scores, const UpliftDataset& ds,
                         const MetricOptions& m) {
  return SplitEval{Evaluate(scores, ds.treatment(), ds.outcome(), m),
                   ComputeQiniCurve(scores, ds.treatment(), ds.outcome(),
                                    m.qini_grid, m.formula)};
}

RunResult BenchmarkRun(const Config& config, const Input& input,
                       const SplitIndices& indices, std::size_t run) {
  const bool identical = config.GetBool("identical_runs");
  const FoldIndices& fold = indices.folds[identical ? 0 : run];
  RunResult result;
  result.run = run;
  result.seed = config.GetSeed("seed") + (identical ? 0 : run);

  const UpliftDataset train = input.data.Subset(fold.train);
  const UpliftDataset valid = input.data.Subset(fold.valid);
  std::optional<UpliftDataset> holdout;
  if (!indices.holdout.empty()) holdout = input.data.Subset(indices.holdout);
  std::vector<Part> parts = {{"train", &train, fold.train},
                             {"valid", &valid, fold.valid}};
  if (holdout) parts.push_back({"holdout", &*holdout, indices.holdout});

  const MetricOptions metrics = MetricsFrom(config);
  auto evaluate_model = [&](ModelRun& m) {
    for (const auto& part : parts) {
      m.splits[part.name] = EvaluateScores(
          m.model->PredictUplift(part.data->features()), *part.data, metrics);
    }
  };

  const std::vector<std::string> names = {"smite_to", "smite_ie", "two_model",
                                          "interaction"};
  for (const auto& name : names) {
    ModelRun m;
    m.name = name;
    try {
      if (name == "smite_to" || name == "smite_ie") {
        const bool ie = name == "smite_ie";
        TrainConfig tc =
            TrainFrom(config,
                      ie ? LossVariant::kIndirect : LossVariant::kTransformedOutcome,
                      ie ? "alpha_ie" : "alpha_to");
        tc.seed = result.seed;
        auto trained = std::make_shared<TrainedModel>(Train(tc, train, valid));
        m.best_epoch = trained->best_epoch;
        m.model = std::move(trained);
      } else if (name == "two_model") {
        m.model = std::make_shared<TwoModelBaseline>(
            FitTwoModel(train, LogisticFrom(config)));
      } else {
        m.model = std::make_shared<InteractionBaseline>(
            FitInteraction(train, LogisticFrom(config)));
      }
      evaluate_model(m);
    } catch (const Error& e) {
      m.error = e.what();
      m.splits.clear();
    }
    result.models.push_back(std::move(m));
  }

  if (input.truth) {
    ModelRun m;
    m.name = "oracle";
    try {
      for (const auto& part : parts) {
        m.splits[part.name] =
            EvaluateScores(Gather(*input.truth, part.rows), *part.data, metrics);
      }
    } catch (const Error& e) {
      m.error = e.what();
      m.splits.clear();
    }
    result.models.push_back(std::move(m));
  }
  return result;
}

std::string CsvField(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void SaveAnyModel(const ConditionalMeanModel& model, const std::string& path) {
  if (const auto* m = dynamic_cast<const TrainedModel*>(&model)) {
    SaveModel(*m, path);
  } else if (const auto* m = dynamic_cast<const TwoModelBaseline*>(&model)) {
    SaveBaseline(*m, path);
  } else if (const auto* m = dynamic_cast<const InteractionBaseline*>(&model)) {
    SaveBaseline(*m, path);
  }
}

Json SummaryJson(const Vector& values) {
  Json j;
  j["successful_runs"] = values.size();
  if (values.empty()) return j;
  j["mean"] = Mean(values);
  j["two_se"] = values.size() >= 2 ? Json(Summarize(values).two_se) : Json();
  return j;
}

int Benchmark(const Config& config, std::ostream& out) {
  const std::size_t runs = config.GetSize("runs");
  if (runs < 1) throw UsageError("runs must be >= 1");
  const SplitPlan plan = SplitFrom(config, runs);
  TrainFrom(config, LossVariant::kTransformedOutcome, "alpha_to");
  TrainFrom(config, LossVariant::kIndirect, "alpha_ie");
  LogisticFrom(config);
  MetricsFrom(config);
  const std::size_t workers = Workers(config);

  const Input input = LoadInput(config);
  const fs::path dir = PrepareOut(config);
  const SplitIndices indices = MakeSplitIndices(input.data, plan);

  std::vector<RunResult> results(runs);
  ParallelFor(runs, workers, [&](std::size_t r) {
    results[r] = BenchmarkRun(config, input, indices, r);
  });

  // Model names in first-seen order.
  std::vector<std::string> models;
  for (const auto& m : results[0].models) models.push_back(m.name);
  std::vector<std::string> splits = {"train", "valid"};
  if (!indices.holdout.empty()) splits.push_back("holdout");

  std::string per_run =
      "run,seed,model,split,qini,kendall,qini_interpolated,kendall_merged,"
      "best_epoch,status\n";
  for (const auto& r : results) {
    for (const auto& m : r.models) {
      const std::string prefix = std::to_string(r.run) + "," +
                                 std::to_string(r.seed) + "," + m.name + ",";
      if (!m.error.empty()) {
        per_run += prefix + ",,,,,," + CsvField("failed: " + m.error) + "\n";
        continue;
      }
      for (const auto& s : splits) {
        const EvalReport& e = m.splits.at(s).report;
        per_run += prefix + s + "," + Fmt(e.qini) + "," + Fmt(e.kendall) + "," +
                   (e.qini_interpolated ? "1" : "0") + "," +
                   (e.kendall_merged ? "1" : "0") + "," +
                   std::to_string(m.best_epoch) + ",ok\n";
      }
    }
  }
  WriteCommented(dir / "runs.csv", config, "benchmark", per_run);

  std::string aggregate =
      "model,split,metric,mean,two_se,successful_runs,complete\n";
  Json j = ConfigJson(config, "benchmark");
  Json agg = Json::array();
  Json failures = Json::array();
  for (std::size_t k = 0; k < models.size(); ++k) {
    for (const auto& s : splits) {
      for (const std::string metric : {"qini", "kendall"}) {
        Vector values;
        for (const auto& r : results) {
          const ModelRun& m = r.models[k];
          if (!m.error.empty()) continue;
          const EvalReport& e = m.splits.at(s).report;
          values.push_back(metric == "qini" ? e.qini : e.kendall);
        }
        Json row = SummaryJson(values);
        const bool complete = values.size() == runs;
        aggregate += models[k] + "," + s + "," + metric + "," +
                     (values.empty() ? "" : Fmt(Mean(values))) + "," +
                     (values.size() >= 2 ? Fmt(Summarize(values).two_se) : "") +
                     "," + std::to_string(values.size()) + "," +
                     (complete ? "1" : "0") + "\n";
        Json entry;
        entry["model"] = models[k];
        entry["split"] = s;
        entry["metric"] = metric;
        entry.update(row);
        entry["complete"] = complete;
        agg.push_back(entry);
      }
    }
    for (const auto& r : results) {
      const ModelRun& m = r.models[k];
      if (m.error.empty()) continue;
      failures.push_back({{"model", m.name}, {"run", r.run}, {"seed", r.seed},
                          {"error", m.error}});
    }
  }
  WriteCommented(dir / "aggregate.csv", config, "benchmark", aggregate);
  j["aggregate"] = agg;
  j["failures"] = failures;
  WriteText(dir / "aggregate.json", j.dump(2) + "\n");

  // Best run per model by validation Qini coefficient (earliest on ties).
  for (std::size_t k = 0; k < models.size(); ++k) {
    const RunResult* best = nullptr;
    for (const auto& r : results) {
      const ModelRun& m = r.models[k];
      if (!m.error.empty()) continue;
      if (best == nullptr || m.splits.at("valid").report.qini >
                                 best->models[k].splits.at("valid").report.qini) {
        best = &r;
      }
    }
    if (best == nullptr) continue;
    const ModelRun& m = best->models[k];
    std::vector<std::string> comments = Provenance(config, "benchmark");
    comments.push_back("model=" + m.name + " run=" + std::to_string(best->run) +
                       " split=valid");
    WriteQiniCurveCsv(m.splits.at("valid").curve,
                      (dir / ("curve_" + m.name + ".csv")).string(), comments);
    if (m.model) SaveAnyModel(*m.model, (dir / ("model_" + m.name + ".txt")).string());
  }

  for (const auto& entry : agg) {
    if (entry["split"] != "valid" || !entry.contains("mean")) continue;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s valid %-8s %9.5f +- %.5f (%zu runs)\n",
                  entry["model"].get<std::string>().c_str(),
                  entry["metric"].get<std::string>().c_str(),
                  entry["mean"].get<double>(),
                  entry["two_se"].is_null() ? 0.0 : entry["two_se"].get<double>(),
                  entry["successful_runs"].get<std::size_t>());
    out << line;
  }
  for (const auto& f : failures) {
    out << "failed: " << f["model"].get<std::string>() << " run "
        << f["run"].get<std::size_t>() << " seed " << f["seed"].get<std::uint64_t>()
        << ": " << f["error"].get<std::string>() << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------------------
// evaluate

int EvaluateCommand(const Config& config, std::ostream& out) {
  if (!config.Has("model")) throw UsageError("model: evaluate needs a model file");
  if (!config.Has("data")) throw UsageError("data: evaluate needs a dataset CSV");
  const MetricOptions metrics = MetricsFrom(config);
  const auto model = LoadAnyModel(config.GetString("model"));
  const Input input = LoadInput(config);
  const fs::path dir = PrepareOut(config);

  const Vector scores = model->PredictUplift(input.data.features());
  const UpliftDataset& ds = input.data;
  const EvalReport report = Evaluate(scores, ds.treatment(), ds.outcome(), metrics);
  const KendallResult kendall = KendallUpliftCorrelation(
      scores, ds.treatment(), ds.outcome(), metrics.kendall_bins);
  const QiniCurve curve = ComputeQiniCurve(scores, ds.treatment(), ds.outcome(),
                                           metrics.qini_grid, metrics.formula);

  Json j = ConfigJson(config, "evaluate");
  j["model_type"] = ModelFileType(config.GetString("model"));
  j["rows"] = ds.size();
  j["qini"] = report.qini;
  j["kendall"] = report.kendall;
  j["qini_interpolated"] = report.qini_interpolated;
  j["kendall_bins_used"] = kendall.bins_used;
  j["kendall_mean_predicted"] = kendall.mean_predicted;
  j["kendall_observed_uplift"] = kendall.observed_uplift;
  WriteText(dir / "report.json", j.dump(2) + "\n");
  WriteQiniCurveCsv(curve, (dir / "curve.csv").string(),
                    Provenance(config, "evaluate"));
  out << "qini=" << Fmt(report.qini) << " kendall=" << Fmt(report.kendall)
      << " rows=" << ds.size() << "\n";
  return kExitOk;
}

std::string Dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"SMITE twin-network uplift modelling"};
  app.name("smite");
  std::string command;
  app.add_option("command", command, "simulate | tune | benchmark | evaluate")
      ->required()
      ->check(CLI::IsMember({"simulate", "tune", "benchmark", "evaluate"}));
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : ConfigKeys()) {
    std::string help = key.help;
    if (!key.default_value.empty()) help += " [" + key.default_value + "]";
    options[key.name] =
        key.is_flag ? app.add_flag(Dashed(key.name), flags[key.name], help)
                    : app.add_option(Dashed(key.name), values[key.name], help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "smite: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Config config = values["config"].empty() ? Config()
                                             : Config::LoadFile(values["config"]);
    for (const auto& key : ConfigKeys()) {
      if (options[key.name]->count() == 0 || key.name == "config") continue;
      config.Set(key.name, key.is_flag ? (flags[key.name] ? "true" : "false")
                                       : values[key.name]);
    }
    CheckPaths(config);
    if (command == "simulate") return Simulate(config, out);
    if (command == "tune") return Tune(config, out);
    if (command == "benchmark") return Benchmark(config, out);
    return EvaluateCommand(config, out);
  } catch (const UsageError& e) {
    err << "smite: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "smite: numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "smite: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ShapeError& e) {
    err << "smite: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "smite: error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace smite
