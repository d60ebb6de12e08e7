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

// Command-line driver: simulate | tune | benchmark | evaluate.
//
// Every configuration key can come from `--config FILE` or from a
// `--dashed-key VALUE` flag; flags win. Each command writes the resolved
// configuration next to its outputs (resolved_config.txt) and embeds it in
// every CSV and JSON artifact, so `--config resolved_config.txt` reproduces
// a run exactly.

#ifndef SMITE_CLI_H_
#define SMITE_CLI_H_

#include <iosfwd>

namespace smite {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
  kExitTuneFallback = 4,  // tune finished but a selection used the fallback
};

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace smite

#endif  // SMITE_CLI_H_
