// Copyright (c) 2026 The collabtransport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLAB__CLI_HPP_
#define COLLAB__CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "collab/controller.hpp"

namespace collab
{

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUnwritable = 2;
inline constexpr int kExitIntegrity = 3;

struct RunSpec
{
  std::filesystem::path scenario;
  std::vector<Algorithm> algorithms{Algorithm::kIcMpc, Algorithm::kVanilla};
  std::size_t trials{1};
  std::uint64_t seed{0};
  std::filesystem::path out;
  /// Trials run concurrently; 0 picks the hardware concurrency.
  std::size_t jobs{0};
};

struct ReplaySpec
{
  std::filesystem::path log;
  double speed{1.0};
  bool serve{false};
  std::uint16_t port{8741};
};

/// Runs trials x algorithms x start configurations. Writes one JSON Lines log
/// per trial and manifest.json into `spec.out`.
int cmd_simulate(const RunSpec & spec, std::ostream & out, std::ostream & err);

/// Reads every log in `dir` (grouped by manifest.json when present) and writes
/// metrics.json and entropy_trace.csv next to them. The table goes to `out`.
int cmd_analyze(const std::filesystem::path & dir, std::ostream & out, std::ostream & err);

/// Verifies a log by dynamics replay, then prints one summary line per tick,
/// paced at `speed` times real time.
int cmd_replay(const ReplaySpec & spec, std::ostream & out, std::ostream & err);

/// Full command line: simulate | analyze | replay | serve.
int cli_main(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

/// Applies COLLAB_LOG_LEVEL (error, warn, info, debug) to the default logger.
void init_logging();

}  // namespace collab

#endif  // COLLAB__CLI_HPP_
