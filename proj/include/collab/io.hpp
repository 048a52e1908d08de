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

#ifndef COLLAB__IO_HPP_
#define COLLAB__IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "collab/harness.hpp"
#include "collab/scenario.hpp"

namespace collab
{

using Json = nlohmann::json;

/// A trial log parsed fine but its recorded states are physically inconsistent.
class LogIntegrityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Field-level conversions. Readers throw ConfigError naming the offending
// JSON path (e.g. "/controller/gamma").
Json to_json(const Vec2 & v);
Json to_json(const Pose2 & p);
Json to_json(const Context & c);
Json to_json(const ControllerConfig & c);
Json to_json(const InferenceParams & p);
Json to_json(const StickModel & m);
Json to_json(const HumanPolicy & h);
Json to_json(const Scenario & s);
Json to_json(const TrialConfig & t);
Json to_json(const MetricsReport & r);

Vec2 vec2_from_json(const Json & j, const std::string & path = "");
Pose2 pose_from_json(const Json & j, const std::string & path = "");
Context context_from_json(const Json & j, const std::string & path = "");
ControllerConfig controller_from_json(const Json & j, const std::string & path = "");
InferenceParams inference_from_json(const Json & j, const std::string & path = "");
StickModel model_from_json(const Json & j, const std::string & path = "");
HumanPolicy human_from_json(const Json & j, const std::string & path = "");
Scenario scenario_from_json(const Json & j);
TrialConfig trial_config_from_json(const Json & j, const std::string & path = "");

/// Parses scenario text. Syntax errors report line and column; semantic errors
/// report the field path. Both throw ConfigError.
Scenario parse_scenario(const std::string & text);
Scenario load_scenario(const std::filesystem::path & file);

/// One tick as the JSON Lines record (also the session protocol state payload).
Json tick_to_json(const TickRecord & tick);
Json outcome_to_json(const TrialLog & log);

/// JSON Lines: config record, one record per tick, outcome record.
void write_trial_log(std::ostream & out, const TrialLog & log);
std::string serialize_trial_log(const TrialLog & log);

/// Throws ConfigError on malformed content (with the line number) and
/// LogIntegrityError when a recorded state violates the rigid-stick invariants.
TrialLog read_trial_log(std::istream & in);
TrialLog load_trial_log(const std::filesystem::path & file);

/// Writes via a temporary sibling file and rename, so readers never see partial files.
void write_file_atomic(const std::filesystem::path & file, const std::string & content);

}  // namespace collab

#endif  // COLLAB__IO_HPP_
