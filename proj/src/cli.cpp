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

#include "collab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

#include "collab/io.hpp"
#include "collab/scenario.hpp"
#include "collab/session.hpp"

namespace collab
{

namespace fs = std::filesystem;

namespace
{

constexpr const char * kManifest = "manifest.json";

std::vector<Algorithm> parse_algorithms(const std::string & text)
{
  std::vector<Algorithm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(parse_algorithm(item));
    }
  }
  if (out.empty()) {
    throw ConfigError("no algorithm given");
  }
  return out;
}

std::string log_name(Algorithm algorithm, StartConfig start, std::size_t trial)
{
  std::ostringstream os;
  os << to_string(algorithm) << '_' << to_string(start) << '_' << std::setw(4) <<
    std::setfill('0') << trial << ".jsonl";
  return os.str();
}

// Creates the directory and proves it accepts files.
bool prepare_output(const fs::path & dir, std::string & why)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    why = ec.message();
    return false;
  }
  try {
    const fs::path probe = dir / ".write_probe";
    write_file_atomic(probe, "");
    fs::remove(probe);
  } catch (const std::exception & e) {
    why = e.what();
    return false;
  }
  return true;
}

struct Cell
{
  Algorithm algorithm;
  std::size_t start_index;
  std::size_t trial;
  std::uint64_t seed;
  std::string file;
};

}  // namespace

void init_logging()
{
  auto logger = spdlog::get("collab");
  if (!logger) {
    logger = spdlog::stderr_color_mt("collab");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char * env = std::getenv("COLLAB_LOG_LEVEL")) {
    const std::string level(env);
    if (level == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (level == "warn") {
      spdlog::set_level(spdlog::level::warn);
    } else if (level == "info") {
      spdlog::set_level(spdlog::level::info);
    } else if (level == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else {
      spdlog::warn("ignoring COLLAB_LOG_LEVEL='{}' (expected error, warn, info or debug)", level);
    }
  }
}

int cmd_simulate(const RunSpec & spec, std::ostream & out, std::ostream & err)
{
  Scenario scenario;
  try {
    scenario = load_scenario(spec.scenario);
  } catch (const ConfigError & e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (spec.trials < 1 || spec.algorithms.empty()) {
    err << "error: need at least one trial and one algorithm\n";
    return kExitUsage;
  }
  std::string why;
  if (!prepare_output(spec.out, why)) {
    err << "error: cannot write to '" << spec.out.string() << "': " << why << '\n';
    return kExitUnwritable;
  }

  std::vector<Cell> cells;
  for (auto algorithm : spec.algorithms) {
    for (std::size_t s = 0; s < scenario.starts.size(); ++s) {
      for (std::size_t k = 0; k < spec.trials; ++k) {
        cells.push_back(Cell{algorithm, s, k, trial_seed(spec.seed, algorithm, s, k),
            log_name(algorithm, scenario.starts[s], k)});
      }
    }
  }

  std::vector<Json> entries(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string write_error;
  auto worker = [&]() {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        const Cell & cell = cells[i];
        const TrialLog log =
          run_trial(make_trial(scenario, cell.algorithm, cell.start_index, cell.seed));
        try {
          write_file_atomic(spec.out / cell.file, serialize_trial_log(log));
        } catch (const std::exception & e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (write_error.empty()) {
            write_error = e.what();
          }
          return;
        }
        spdlog::debug("{}: {} after {:.2f} s", cell.file, to_string(log.outcome),
          log.final_state.time());
        entries[i] = Json{
          {"file", cell.file},
          {"algorithm", to_string(cell.algorithm)},
          {"start", to_string(scenario.starts[cell.start_index])},
          {"trial", cell.trial},
          {"seed", cell.seed},
          {"outcome", to_string(log.outcome)},
          {"label", log.final_label.name()},
          {"t", log.final_state.time()}};
      }
    };
  const std::size_t jobs = std::max<std::size_t>(
    1, std::min(cells.size(), spec.jobs ? spec.jobs : std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back(worker);
    }
  }
  if (!write_error.empty()) {
    err << "error: writing logs failed: " << write_error << '\n';
    return kExitUnwritable;
  }

  Json algorithms = Json::array();
  for (auto a : spec.algorithms) {
    algorithms.push_back(to_string(a));
  }
  const Json manifest{
    {"version", 1},
    {"scenario", to_json(scenario)},
    {"seed", spec.seed},
    {"trials", spec.trials},
    {"algorithms", algorithms},
    {"logs", entries}};
  try {
    write_file_atomic(spec.out / kManifest, manifest.dump(2) + "\n");
  } catch (const std::exception & e) {
    err << "error: writing the manifest failed: " << e.what() << '\n';
    return kExitUnwritable;
  }
  out << "wrote " << cells.size() << " trial logs and " << kManifest << " to " <<
    spec.out.string() << '\n';
  return kExitOk;
}

int cmd_analyze(const fs::path & dir, std::ostream & out, std::ostream & err)
{
  if (!fs::is_directory(dir)) {
    err << "error: '" << dir.string() << "' is not a directory\n";
    return kExitUsage;
  }
  std::map<std::string, std::string> group_of;
  if (fs::exists(dir / kManifest)) {
    try {
      std::ifstream in(dir / kManifest);
      const Json manifest = Json::parse(in);
      for (const auto & entry : manifest.at("logs")) {
        group_of[entry.at("file").get<std::string>()] = entry.at("algorithm").get<std::string>();
      }
    } catch (const std::exception & e) {
      err << "warning: ignoring unreadable " << kManifest << ": " << e.what() << '\n';
      group_of.clear();
    }
  }

  std::vector<fs::path> files;
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::vector<TrialLog>> groups;
  std::size_t skipped = 0;
  for (const auto & file : files) {
    try {
      TrialLog log = load_trial_log(file);
      const auto it = group_of.find(file.filename().string());
      const std::string group =
        it != group_of.end() ? it->second : to_string(log.config.algorithm);
      groups[group].push_back(std::move(log));
    } catch (const std::exception & e) {
      err << "warning: skipping " << file.filename().string() << ": " << e.what() << '\n';
      ++skipped;
    }
  }
  if (groups.empty()) {
    err << "error: no readable trial logs in '" << dir.string() << "'\n";
    return kExitUsage;
  }

  std::map<std::string, MetricsReport> reports;
  Json by_algorithm = Json::object();
  std::size_t total = 0;
  for (const auto & [name, logs] : groups) {
    reports[name] = compute_metrics(logs);
    by_algorithm[name] = to_json(reports[name]);
    total += logs.size();
  }

  std::ostringstream csv;
  csv << "bin,tau";
  for (const auto & [name, r] : reports) {
    csv << ',' << name;
  }
  csv << '\n' << std::setprecision(17);
  for (std::size_t b = 0; b < kTraceBins; ++b) {
    csv << b << ',' << (static_cast<double>(b) + 0.5) / static_cast<double>(kTraceBins);
    for (const auto & [name, r] : reports) {
      csv << ',' << r.entropy_trace[b];
    }
    csv << '\n';
  }
  const Json metrics{{"logs", total}, {"skipped", skipped}, {"algorithms", by_algorithm}};
  try {
    write_file_atomic(dir / "metrics.json", metrics.dump(2) + "\n");
    write_file_atomic(dir / "entropy_trace.csv", csv.str());
  } catch (const std::exception & e) {
    err << "error: cannot write results: " << e.what() << '\n';
    return kExitUnwritable;
  }

  out << render_table(reports);
  if (skipped > 0) {
    out << "skipped " << skipped << " unreadable log(s)\n";
  }
  return kExitOk;
}

int cmd_replay(const ReplaySpec & spec, std::ostream & out, std::ostream & err)
{
  if (!(spec.speed > 0.0) || !std::isfinite(spec.speed)) {
    err << "error: --speed must be a positive number\n";
    return kExitUsage;
  }
  TrialLog log;
  try {
    log = load_trial_log(spec.log);
  } catch (const LogIntegrityError & e) {
    err << "integrity: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const ConfigError & e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const ReplayCheck check = verify_log(log);
  if (!check.ok) {
    err << "integrity: replay diverges at tick " << check.mismatch_tick.value_or(0) <<
      " (max error " << check.max_error << " m)\n";
    return kExitIntegrity;
  }
  spdlog::info("replay verified: {} ticks, max error {:.3g}", log.ticks.size(), check.max_error);

  if (spec.serve) {
    SessionOptions options;
    options.port = spec.port;
    options.replay = std::move(log);
    options.replay_speed = spec.speed;
    return serve(options);
  }

  const auto period = std::chrono::duration<double>(log.config.model.dt / spec.speed);
  out << std::fixed << std::setprecision(3);
  for (std::size_t i = 0; i < log.ticks.size(); ++i) {
    const auto & t = log.ticks[i];
    const auto & p = t.state.object();
    out << "t=" << t.state.time() << " x=" << p.position().x() << " y=" << p.position().y() <<
      " heading=" << p.heading() << " a=(" << t.a.x() << ',' << t.a.y() << ") u=(" <<
      t.u.x() << ',' << t.u.y() << ") P=[";
    for (std::size_t k = 0; k < t.posterior.probs.size(); ++k) {
      out << (k ? "," : "") << t.posterior.probs[k];
    }
    out << "] H=" << t.entropy << '\n';
    std::this_thread::sleep_for(period);
  }
  out << "outcome " << to_string(log.outcome) << " at t=" << log.final_state.time() <<
    " label " << log.final_label.name() << '\n';
  return kExitOk;
}

int cli_main(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  init_logging();
  CLI::App app{"Implicit-communication collaborative transport: simulate, analyze, replay, serve"};
  app.require_subcommand(1);

  RunSpec run;
  std::string algos = "icmpc,vanilla";
  auto * simulate = app.add_subcommand("simulate", "Run seeded trials and write JSON Lines logs");
  simulate->add_option("--scenario", run.scenario, "Scenario JSON file")->required();
  simulate->add_option("--algo", algos, "Comma-separated algorithms (icmpc, vanilla)");
  simulate->add_option("--trials", run.trials, "Trials per algorithm and start configuration");
  simulate->add_option("--seed", run.seed, "Base seed");
  simulate->add_option("--out", run.out, "Output directory")->required();
  simulate->add_option("--jobs", run.jobs, "Concurrent trials (0: all cores)");

  fs::path analyze_dir;
  auto * analyze = app.add_subcommand("analyze", "Aggregate metrics over a directory of logs");
  analyze->add_option("dir", analyze_dir, "Directory written by simulate")->required();

  ReplaySpec replay;
  auto * replay_cmd = app.add_subcommand("replay", "Verify a log and play it back");
  replay_cmd->add_option("log", replay.log, "Trial log (.jsonl)")->required();
  replay_cmd->add_option("--speed", replay.speed, "Playback speed multiplier");
  replay_cmd->add_flag("--serve", replay.serve, "Stream the replay over the session protocol");
  replay_cmd->add_option("--port", replay.port, "Port for --serve");

  SessionOptions session;
  fs::path session_scenario;
  auto * serve_cmd = app.add_subcommand("serve", "Run the interactive session server");
  serve_cmd->add_option("--port", session.port, "Listening port");
  serve_cmd->add_option("--host", session.address, "Listening address");
  serve_cmd->add_option("--scenario", session_scenario, "Default scenario JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (*simulate) {
    try {
      run.algorithms = parse_algorithms(algos);
    } catch (const ConfigError & e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    return cmd_simulate(run, out, err);
  }
  if (*analyze) {
    return cmd_analyze(analyze_dir, out, err);
  }
  if (*replay_cmd) {
    return cmd_replay(replay, out, err);
  }
  if (!session_scenario.empty()) {
    try {
      session.scenario = load_scenario(session_scenario);
    } catch (const ConfigError & e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  try {
    return serve(session);
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace collab
