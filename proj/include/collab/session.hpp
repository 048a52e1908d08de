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

#ifndef COLLAB__SESSION_HPP_
#define COLLAB__SESSION_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "collab/harness.hpp"
#include "collab/io.hpp"
#include "collab/scenario.hpp"

namespace collab
{

inline constexpr const char * kProtocolVersion = "1";
/// Human input older than this is treated as zero velocity.
inline constexpr std::chrono::milliseconds kStaleInput{300};
/// A plan frame accompanies every third state frame (5 Hz at the 15 Hz loop).
inline constexpr std::uint64_t kPlanEvery = 3;

struct SessionOptions
{
  /// Defaults for sessions whose hello carries no scenario.
  Scenario scenario = Scenario::study();
  std::string address{"127.0.0.1"};
  /// 0 binds an ephemeral port (see SessionServer::port).
  std::uint16_t port{8741};
  /// When set, every session streams this log instead of running a trial.
  std::optional<TrialLog> replay;
  double replay_speed{1.0};
};

// Server frames. Each is one line of JSON.
Json state_frame(const TickRecord & tick, std::uint64_t index);
Json plan_frame(const Plan & plan);
Json error_frame(const std::string & code, const std::string & text);

/// Websocket server: one deterministic 15 Hz trial loop per connection.
class SessionServer
{
public:
  /// Binds and listens immediately; throws std::system_error if the port is taken.
  explicit SessionServer(SessionOptions options);
  ~SessionServer();
  SessionServer(const SessionServer &) = delete;
  SessionServer & operator=(const SessionServer &) = delete;

  std::uint16_t port() const;
  /// Starts accepting on a background thread.
  void start();
  /// Closes the listener and all sessions, then joins every thread.
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks until SIGINT or SIGTERM.
int serve(const SessionOptions & options);

}  // namespace collab

#endif  // COLLAB__SESSION_HPP_
