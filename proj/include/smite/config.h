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

// Flat key=value experiment configuration.
//
//   # comment
//   n = 10000
//   hidden_widths = 200,200,300,100,50,10
//
// Every key has a registered default; unknown keys are usage errors.

#ifndef SMITE_CONFIG_H_
#define SMITE_CONFIG_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace smite {

struct ConfigKey {
  std::string name;
  std::string default_value;  // empty when the key has no default
  std::string help;
  bool is_flag = false;  // boolean switch on the command line
};

// All recognised keys, in display order.
const std::vector<ConfigKey>& ConfigKeys();

// Keys that never change results and are left out of resolved listings.
const std::set<std::string>& NonReproducibilityKeys();

class Config {
 public:
  // Throws UsageError on unreadable files, malformed lines, unknown or
  // repeated keys.
  static Config LoadFile(const std::string& path);
  // Parses the same syntax from memory; `origin` prefixes error messages.
  static Config Parse(const std::string& text, const std::string& origin);

  // Throws UsageError for unknown keys.
  void Set(const std::string& key, const std::string& value);
  // Explicitly set (not defaulted) and non-empty.
  bool Has(const std::string& key) const;

  // Typed getters fall back to the registered default and throw UsageError
  // naming the key when the value does not parse.
  std::string GetString(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  std::size_t GetSize(const std::string& key) const;
  std::uint64_t GetSeed(const std::string& key) const;
  bool GetBool(const std::string& key) const;
  std::vector<std::size_t> GetSizeList(const std::string& key) const;

  // "key=value" for every registered key with its effective value, sorted by
  // key, skipping NonReproducibilityKeys().
  std::vector<std::string> ResolvedLines() const;
  // Same content as a loadable config file.
  std::string ResolvedText() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace smite

#endif  // SMITE_CONFIG_H_
