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

#include "smite/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smite/errors.h"

namespace smite {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

const ConfigKey* FindKey(const std::string& name) {
  for (const auto& key : ConfigKeys()) {
    if (key.name == name) return &key;
  }
  return nullptr;
}

template <typename T>
T ParseInteger(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() ||
      ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key +
                     "': expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

const std::vector<ConfigKey>& ConfigKeys() {
  static const std::vector<ConfigKey> keys = {
      // Input data.
      {"data", "", "dataset CSV (synthetic data is generated when absent)"},
      {"outcome_col", "y", "outcome column name"},
      {"treatment_col", "t", "treatment column name"},
      {"propensity", "", "treatment propensity (estimated when absent)"},
      {"truth", "", "CSV of per-row true uplift enabling the oracle model"},
      // Simulation.
      {"mode", "parametric", "simulate mode: parametric or bootstrap"},
      {"n", "10000", "synthetic sample size"},
      {"p", "100", "synthetic covariate count"},
      {"sparsity", "0.1", "fraction of covariates driving the uplift"},
      {"base_rate", "0.1", "mean control response probability"},
      {"generator_model", "", "fitted model file for bootstrap simulation"},
      // Splitting and repetition.
      {"seed", "0", "master seed"},
      {"runs", "30", "repeated benchmark runs"},
      {"folds", "10", "tuning folds"},
      {"holdout_fraction", "0.3", "share of rows held out"},
      {"train_fraction", "0.6", "training share of the non-holdout rows"},
      {"identical_runs", "false", "reuse the first split and seed in every run",
       true},
      // Training.
      {"variant", "IE", "uplift loss for tune: TO, IE or L1"},
      {"alpha", "0.5", "uplift-loss weight"},
      {"alpha_to", "", "alpha for SMITE-TO in benchmark (defaults to alpha)"},
      {"alpha_ie", "", "alpha for SMITE-IE in benchmark (defaults to alpha)"},
      {"learning_rate", "0.03", "SGD step size"},
      {"epochs", "200", "training epochs"},
      {"batch_size", "256", "minibatch size"},
      {"hidden_widths", "200,200,300,100,50,10", "hidden layer widths"},
      {"linear_prefix", "2", "leading hidden layers without activation"},
      {"leaky_slope", "0.01", "leaky ReLU negative slope"},
      // Baselines.
      {"logistic_iterations", "2000", "gradient steps for baselines"},
      {"logistic_rate", "0.1", "gradient step size for baselines"},
      {"logistic_l2", "0.0001", "L2 penalty for baselines"},
      // Metrics.
      {"qini_grid", "100", "Qini curve grid size"},
      {"kendall_bins", "10", "Kendall uplift correlation bins"},
      {"qini_literal", "false",
       "use the unnormalised control term in the Qini curve", true},
      // Evaluation.
      {"model", "", "model file for evaluate"},
      // Execution.
      {"out", "out", "output directory"},
      {"workers", "0", "parallel workers (0 = available cores)"},
      {"config", "", "configuration file"},
  };
  return keys;
}

const std::set<std::string>& NonReproducibilityKeys() {
  static const std::set<std::string> keys = {"out", "workers", "config"};
  return keys;
}

Config Config::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path);
}

Config Config::Parse(const std::string& text, const std::string& origin) {
  Config config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const std::string body = Trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(where + "expected key=value, got '" + body + "'");
    }
    const std::string key = Trim(body.substr(0, eq));
    if (config.values_.count(key)) {
      throw UsageError(where + "key '" + key + "' given twice");
    }
    if (FindKey(key) == nullptr) {
      throw UsageError(where + "unknown key '" + key + "'");
    }
    config.values_[key] = Trim(body.substr(eq + 1));
  }
  return config;
}

void Config::Set(const std::string& key, const std::string& value) {
  if (FindKey(key) == nullptr) throw UsageError("unknown key '" + key + "'");
  values_[key] = value;
}

bool Config::Has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::string Config::GetString(const std::string& key) const {
  const ConfigKey* info = FindKey(key);
  if (info == nullptr) throw UsageError("unknown key '" + key + "'");
  const auto it = values_.find(key);
  return it != values_.end() ? it->second : info->default_value;
}

double Config::GetDouble(const std::string& key) const {
  const std::string value = GetString(key);
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() ||
      ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw UsageError("config key '" + key + "': expected a number, got '" +
                     value + "'");
  }
  return out;
}

std::size_t Config::GetSize(const std::string& key) const {
  return ParseInteger<std::size_t>(key, GetString(key));
}

std::uint64_t Config::GetSeed(const std::string& key) const {
  return ParseInteger<std::uint64_t>(key, GetString(key));
}

bool Config::GetBool(const std::string& key) const {
  const std::string value = GetString(key);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("config key '" + key + "': expected true or false, got '" +
                   value + "'");
}

std::vector<std::size_t> Config::GetSizeList(const std::string& key) const {
  std::vector<std::size_t> out;
  std::istringstream in(GetString(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(ParseInteger<std::size_t>(key, Trim(item)));
  }
  return out;
}

std::vector<std::string> Config::ResolvedLines() const {
  std::vector<std::string> lines;
  for (const auto& key : ConfigKeys()) {
    if (NonReproducibilityKeys().count(key.name)) continue;
    lines.push_back(key.name + "=" + GetString(key.name));
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

std::string Config::ResolvedText() const {
  std::string out;
  for (const auto& line : ResolvedLines()) out += line + "\n";
  return out;
}

}  // namespace smite
