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

#include "collab/io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace collab
{

namespace
{

constexpr int kLogVersion = 1;

// Reads the members of one JSON object, remembering which keys were used so
// that typos surface as errors instead of silently falling back to defaults.
class Fields
{
public:
  Fields(const Json & j, std::string path)
  : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) {
      fail(path_.empty() ? "/" : path_, "expected an object");
    }
  }

  static void fail(const std::string & where, const std::string & what)
  {
    throw ConfigError(where + ": " + what);
  }

  std::string at(const std::string & key) const {return path_ + "/" + key;}

  bool has(const std::string & key) const {return j_.contains(key);}

  const Json & raw(const std::string & key)
  {
    used_.insert(key);
    if (!j_.contains(key)) {
      fail(at(key), "missing field");
    }
    return j_.at(key);
  }

  double number(const std::string & key)
  {
    const Json & v = raw(key);
    if (!v.is_number()) {
      fail(at(key), "expected a number");
    }
    return v.get<double>();
  }

  double number(const std::string & key, double fallback)
  {
    return has(key) ? number(key) : (used_.insert(key), fallback);
  }

  std::uint64_t uint(const std::string & key)
  {
    const Json & v = raw(key);
    if (!v.is_number_unsigned()) {
      fail(at(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::uint64_t uint(const std::string & key, std::uint64_t fallback)
  {
    return has(key) ? uint(key) : (used_.insert(key), fallback);
  }

  std::string text(const std::string & key)
  {
    const Json & v = raw(key);
    if (!v.is_string()) {
      fail(at(key), "expected a string");
    }
    return v.get<std::string>();
  }

  const Json & array(const std::string & key)
  {
    const Json & v = raw(key);
    if (!v.is_array()) {
      fail(at(key), "expected an array");
    }
    return v;
  }

  void finish() const
  {
    for (const auto & [key, value] : j_.items()) {
      if (!used_.contains(key)) {
        fail(at(key), "unknown field");
      }
    }
  }

private:
  const Json & j_;
  std::string path_;
  std::set<std::string> used_;
};

// Wraps invariant violations raised by value constructors with the field path.
template<typename F>
auto guarded(const std::string & path, F && f)
{
  try {
    return f();
  } catch (const DomainError & e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Json state_to_json(const TeamState & s)
{
  Json w = Json::array();
  for (double x : s.windings()) {
    w.push_back(x);
  }
  return Json{
    {"object", to_json(s.object())},
    {"human_end", to_json(s.human_end())},
    {"robot_end", to_json(s.robot_end())},
    {"human_vel", to_json(s.human_vel())},
    {"robot_vel", to_json(s.robot_vel())},
    {"windings", w},
    {"t", s.time()}};
}

std::vector<double> numbers_from_json(const Json & j, const std::string & path)
{
  if (!j.is_array()) {
    Fields::fail(path, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      Fields::fail(path + "/" + std::to_string(i), "expected a number");
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

// Builds a validated state; rigidity violations raise `Error` with the path.
template<typename Error>
TeamState make_state(
  const Pose2 & object, const Vec2 & human_end, const Vec2 & robot_end, const Vec2 & human_vel,
  const Vec2 & robot_vel, std::vector<double> windings, double t, double length,
  const std::string & path)
{
  try {
    return TeamState(object, human_end, robot_end, human_vel, robot_vel, std::move(windings), t, length);
  } catch (const DomainError & e) {
    throw Error(path + ": " + e.what());
  }
}

template<typename Error = ConfigError>
TeamState state_from_json(const Json & j, double length, const std::string & path)
{
  Fields f(j, path);
  const Pose2 object = pose_from_json(f.raw("object"), f.at("object"));
  const Vec2 human_end = vec2_from_json(f.raw("human_end"), f.at("human_end"));
  const Vec2 robot_end = vec2_from_json(f.raw("robot_end"), f.at("robot_end"));
  const Vec2 human_vel = f.has("human_vel") ? vec2_from_json(f.raw("human_vel"), f.at("human_vel")) : Vec2{};
  const Vec2 robot_vel = f.has("robot_vel") ? vec2_from_json(f.raw("robot_vel"), f.at("robot_vel")) : Vec2{};
  auto windings = numbers_from_json(f.raw("windings"), f.at("windings"));
  const double t = f.number("t", 0.0);
  f.finish();
  return make_state<Error>(
    object, human_end, robot_end, human_vel, robot_vel, std::move(windings), t, length, path);
}

Json distribution_to_json(const StrategyDistribution & d)
{
  Json out = Json::array();
  for (double p : d.probs) {
    out.push_back(p);
  }
  return out;
}

}  // namespace

Json to_json(const Vec2 & v)
{
  return Json{{"x", v.x()}, {"y", v.y()}};
}

Json to_json(const Pose2 & p)
{
  return Json{{"x", p.position().x()}, {"y", p.position().y()}, {"heading", p.heading()}};
}

Json to_json(const Context & c)
{
  Json obstacles = Json::array();
  for (const auto & o : c.obstacles) {
    obstacles.push_back(Json{{"center", to_json(o.center)}, {"half_extent", o.half_extent}});
  }
  return Json{
    {"goal", to_json(c.goal)},
    {"obstacles", obstacles},
    {"bounds", Json{{"min", to_json(c.bounds.min)}, {"max", to_json(c.bounds.max)}}},
    {"goal_radius", c.goal_radius},
    {"stick_length", c.stick_length}};
}

Json to_json(const ControllerConfig & c)
{
  return Json{
    {"horizon_steps", c.horizon_steps},
    {"rollout_dt", c.rollout_dt},
    {"samples", c.samples},
    {"gamma", c.gamma},
    {"w_obs", c.w_obs},
    {"w_ent", c.w_ent},
    {"delta", c.delta},
    {"lambda", c.lambda},
    {"noise_sigma", c.noise_sigma},
    {"speed_cap", c.speed_cap},
    {"heading_weight", c.heading_weight},
    {"seed", c.seed},
    {"threads", c.threads}};
}

Json to_json(const InferenceParams & p)
{
  return Json{
    {"beta", p.beta},
    {"passed_threshold", p.passed_threshold},
    {"approach_angle", p.approach_angle},
    {"min_informative_speed", p.min_informative_speed}};
}

Json to_json(const StickModel & m)
{
  return Json{
    {"length", m.length},
    {"dt", m.dt},
    {"robot_speed_cap", m.robot_speed_cap},
    {"human_speed_cap", m.human_speed_cap}};
}

Json to_json(const HumanPolicy & h)
{
  Json target = nullptr;
  if (h.random_target) {
    target = "random";
  } else if (h.target) {
    target = h.target->name();
  }
  return Json{
    {"kind", to_string(h.kind)},
    {"target", target},
    {"noise_sigma", h.noise_sigma},
    {"speed", h.speed},
    {"yield_clearance", h.yield_clearance},
    {"seed", h.seed}};
}

Json to_json(const Scenario & s)
{
  Json starts = Json::array();
  for (auto st : s.starts) {
    starts.push_back(to_string(st));
  }
  return Json{
    {"context", to_json(s.context)},
    {"start_position", to_json(s.start_position)},
    {"starts", starts},
    {"controller", to_json(s.controller)},
    {"inference", to_json(s.inference)},
    {"model", to_json(s.model)},
    {"human", to_json(s.human)},
    {"timeout", s.timeout}};
}

Json to_json(const TrialConfig & t)
{
  Json start;
  if (const auto * s = std::get_if<TeamState>(&t.start)) {
    start = Json{{"state", state_to_json(*s)}};
  } else {
    start = to_string(std::get<StartConfig>(t.start));
  }
  return Json{
    {"context", to_json(t.context)},
    {"start", start},
    {"start_position", to_json(t.start_position)},
    {"algorithm", to_string(t.algorithm)},
    {"human", to_json(t.human)},
    {"controller", to_json(t.controller)},
    {"inference", to_json(t.inference)},
    {"model", to_json(t.model)},
    {"timeout", t.timeout},
    {"seed", t.seed}};
}

Json to_json(const MetricsReport & r)
{
  return Json{
    {"trials", r.trials},
    {"successes", r.successes},
    {"success_rate", r.success_rate},
    {"completion_time", Json{{"mean", r.completion_time_mean}, {"sd", r.completion_time_sd}}},
    {"human_acceleration", Json{{"mean", r.acceleration_mean}, {"sd", r.acceleration_sd}}},
    {"entropy_trace", r.entropy_trace},
    {"strategy_split", r.strategy_split},
    {"outcomes", r.outcomes}};
}

Vec2 vec2_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  const double x = f.number("x");
  const double y = f.number("y");
  f.finish();
  return guarded(path, [&] {return Vec2(x, y);});
}

Pose2 pose_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  const double x = f.number("x");
  const double y = f.number("y");
  const double heading = f.number("heading", 0.0);
  f.finish();
  return guarded(path, [&] {return Pose2(Vec2(x, y), heading);});
}

Context context_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  Context c;
  c.goal = pose_from_json(f.raw("goal"), f.at("goal"));
  if (f.has("obstacles")) {
    const Json & arr = f.array("obstacles");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = f.at("obstacles") + "/" + std::to_string(i);
      Fields o(arr[i], p);
      Obstacle obstacle;
      obstacle.center = vec2_from_json(o.raw("center"), o.at("center"));
      obstacle.half_extent = o.number("half_extent", obstacle.half_extent);
      o.finish();
      c.obstacles.push_back(obstacle);
    }
  }
  if (f.has("bounds")) {
    Fields b(f.raw("bounds"), f.at("bounds"));
    c.bounds.min = vec2_from_json(b.raw("min"), b.at("min"));
    c.bounds.max = vec2_from_json(b.raw("max"), b.at("max"));
    b.finish();
  }
  c.goal_radius = f.number("goal_radius", c.goal_radius);
  c.stick_length = f.number("stick_length", c.stick_length);
  f.finish();
  try {
    c.validate();
  } catch (const ConfigError & e) {
    throw ConfigError((path.empty() ? "/" : path) + ": " + e.what());
  }
  return c;
}

ControllerConfig controller_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  ControllerConfig c;
  c.horizon_steps = f.uint("horizon_steps", c.horizon_steps);
  c.rollout_dt = f.number("rollout_dt", c.rollout_dt);
  c.samples = f.uint("samples", c.samples);
  c.gamma = f.number("gamma", c.gamma);
  c.w_obs = f.number("w_obs", c.w_obs);
  c.w_ent = f.number("w_ent", c.w_ent);
  c.delta = f.number("delta", c.delta);
  c.lambda = f.number("lambda", c.lambda);
  c.noise_sigma = f.number("noise_sigma", c.noise_sigma);
  c.speed_cap = f.number("speed_cap", c.speed_cap);
  c.heading_weight = f.number("heading_weight", c.heading_weight);
  c.seed = f.uint("seed", c.seed);
  c.threads = f.uint("threads", c.threads);
  f.finish();
  try {
    c.validate();
  } catch (const ConfigError & e) {
    throw ConfigError((path.empty() ? "/" : path) + ": " + e.what());
  }
  return c;
}

InferenceParams inference_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  InferenceParams p;
  p.beta = f.number("beta", p.beta);
  p.passed_threshold = f.number("passed_threshold", p.passed_threshold);
  p.approach_angle = f.number("approach_angle", p.approach_angle);
  p.min_informative_speed = f.number("min_informative_speed", p.min_informative_speed);
  f.finish();
  try {
    p.validate();
  } catch (const ConfigError & e) {
    throw ConfigError((path.empty() ? "/" : path) + ": " + e.what());
  }
  return p;
}

StickModel model_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  StickModel m;
  m.length = f.number("length", m.length);
  m.dt = f.number("dt", m.dt);
  m.robot_speed_cap = f.number("robot_speed_cap", m.robot_speed_cap);
  m.human_speed_cap = f.number("human_speed_cap", m.human_speed_cap);
  f.finish();
  try {
    m.validate();
  } catch (const ConfigError & e) {
    throw ConfigError((path.empty() ? "/" : path) + ": " + e.what());
  }
  return m;
}

HumanPolicy human_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  HumanPolicy h;
  try {
    h.kind = parse_human_kind(f.text("kind"));
  } catch (const ConfigError & e) {
    throw ConfigError(f.at("kind") + ": " + e.what());
  }
  if (f.has("target") && !f.raw("target").is_null()) {
    const std::string target = f.text("target");
    if (target == "random") {
      h.random_target = true;
    } else {
      try {
        h.target = StrategyLabel::parse(target);
      } catch (const ConfigError & e) {
        throw ConfigError(f.at("target") + ": " + e.what());
      }
    }
  } else {
    f.raw("target");
  }
  h.noise_sigma = f.number("noise_sigma", h.noise_sigma);
  h.speed = f.number("speed", h.speed);
  h.yield_clearance = f.number("yield_clearance", h.yield_clearance);
  h.seed = f.uint("seed", h.seed);
  f.finish();
  return h;
}

Scenario scenario_from_json(const Json & j)
{
  Fields f(j, "");
  Scenario s;
  s.context = context_from_json(f.raw("context"), "/context");
  if (f.has("start_position")) {
    s.start_position = vec2_from_json(f.raw("start_position"), "/start_position");
  }
  if (f.has("starts")) {
    const Json & arr = f.array("starts");
    s.starts.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "/starts/" + std::to_string(i);
      if (!arr[i].is_string()) {
        Fields::fail(p, "expected a start configuration name");
      }
      try {
        s.starts.push_back(parse_start_config(arr[i].get<std::string>()));
      } catch (const ConfigError & e) {
        throw ConfigError(p + ": " + e.what());
      }
    }
  }
  if (f.has("controller")) {
    s.controller = controller_from_json(f.raw("controller"), "/controller");
  }
  if (f.has("inference")) {
    s.inference = inference_from_json(f.raw("inference"), "/inference");
  }
  if (f.has("model")) {
    s.model = model_from_json(f.raw("model"), "/model");
  }
  if (f.has("human")) {
    s.human = human_from_json(f.raw("human"), "/human");
  }
  s.timeout = f.number("timeout", s.timeout);
  f.finish();
  try {
    s.validate();
  } catch (const ConfigError & e) {
    throw ConfigError(std::string("/: ") + e.what());
  }
  return s;
}

TrialConfig trial_config_from_json(const Json & j, const std::string & path)
{
  Fields f(j, path);
  TrialConfig t;
  t.context = context_from_json(f.raw("context"), f.at("context"));
  t.model = model_from_json(f.raw("model"), f.at("model"));
  const Json & start = f.raw("start");
  if (start.is_string()) {
    try {
      t.start = parse_start_config(start.get<std::string>());
    } catch (const ConfigError & e) {
      throw ConfigError(f.at("start") + ": " + e.what());
    }
  } else {
    Fields s(start, f.at("start"));
    t.start = state_from_json(s.raw("state"), t.model.length, s.at("state"));
    s.finish();
  }
  t.start_position = vec2_from_json(f.raw("start_position"), f.at("start_position"));
  try {
    t.algorithm = parse_algorithm(f.text("algorithm"));
  } catch (const ConfigError & e) {
    throw ConfigError(f.at("algorithm") + ": " + e.what());
  }
  t.human = human_from_json(f.raw("human"), f.at("human"));
  t.controller = controller_from_json(f.raw("controller"), f.at("controller"));
  t.inference = inference_from_json(f.raw("inference"), f.at("inference"));
  t.timeout = f.number("timeout");
  t.seed = f.uint("seed");
  f.finish();
  return t;
}

Scenario parse_scenario(const std::string & text)
{
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error & e) {
    // nlohmann reports a byte offset; translate it to line and column.
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(
            "syntax error at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + e.what());
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open scenario file '" + file.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError & e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

Json tick_to_json(const TickRecord & tick)
{
  Json w = Json::array();
  for (double x : tick.state.windings()) {
    w.push_back(x);
  }
  return Json{
    {"type", "tick"},
    {"t", tick.state.time()},
    {"object", to_json(tick.state.object())},
    {"human_end", to_json(tick.state.human_end())},
    {"robot_end", to_json(tick.state.robot_end())},
    {"windings", w},
    {"a", to_json(tick.a)},
    {"u", to_json(tick.u)},
    {"posterior", distribution_to_json(tick.posterior)},
    {"entropy", tick.entropy},
    {"j_obs", tick.j_obs},
    {"j_ent", tick.j_ent}};
}

Json outcome_to_json(const TrialLog & log)
{
  return Json{
    {"type", "outcome"},
    {"outcome", to_string(log.outcome)},
    {"t", log.final_state.time()},
    {"ticks", log.ticks.size()},
    {"label", log.final_label.name()},
    {"final", state_to_json(log.final_state)}};
}

void write_trial_log(std::ostream & out, const TrialLog & log)
{
  Json config = to_json(log.config);
  config["type"] = "config";
  config["version"] = kLogVersion;
  out << config.dump() << '\n';
  for (const auto & tick : log.ticks) {
    out << tick_to_json(tick).dump() << '\n';
  }
  out << outcome_to_json(log).dump() << '\n';
}

std::string serialize_trial_log(const TrialLog & log)
{
  std::ostringstream os;
  write_trial_log(os, log);
  return os.str();
}

TrialLog read_trial_log(std::istream & in)
{
  TrialLog log;
  std::string line;
  std::size_t lineno = 0;
  bool have_config = false;
  bool have_outcome = false;
  Vec2 prev_a;
  Vec2 prev_u;
  auto where = [&lineno](const std::string & field) {
      return "line " + std::to_string(lineno) + (field.empty() ? "" : " " + field);
    };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    if (have_outcome) {
      throw ConfigError(where("") + ": record after the outcome record");
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error & e) {
      throw ConfigError(where("") + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
      throw ConfigError(where("") + ": record without a type");
    }
    const std::string type = j["type"].get<std::string>();
    if (!have_config) {
      if (type != "config") {
        throw ConfigError(where("") + ": first record must be the config");
      }
      if (j.value("version", 0) != kLogVersion) {
        throw ConfigError(where("/version") + ": unsupported log version");
      }
      j.erase("type");
      j.erase("version");
      log.config = trial_config_from_json(j, where(""));
      const TeamState start = initial_state(log.config);
      prev_a = start.human_vel();
      prev_u = start.robot_vel();
      have_config = true;
      continue;
    }
    const double length = log.config.model.length;
    if (type == "tick") {
      Fields f(j, where(""));
      f.raw("type");
      const double t = f.number("t");
      const Pose2 object = pose_from_json(f.raw("object"), f.at("object"));
      const Vec2 human_end = vec2_from_json(f.raw("human_end"), f.at("human_end"));
      const Vec2 robot_end = vec2_from_json(f.raw("robot_end"), f.at("robot_end"));
      auto windings = numbers_from_json(f.raw("windings"), f.at("windings"));
      TickRecord rec;
      rec.a = vec2_from_json(f.raw("a"), f.at("a"));
      rec.u = vec2_from_json(f.raw("u"), f.at("u"));
      rec.posterior.probs = numbers_from_json(f.raw("posterior"), f.at("posterior"));
      rec.entropy = f.number("entropy");
      rec.j_obs = f.number("j_obs");
      rec.j_ent = f.number("j_ent");
      f.finish();
      rec.state = make_state<LogIntegrityError>(
        object, human_end, robot_end, prev_a, prev_u, std::move(windings), t, length, where(""));
      prev_a = rec.a;
      prev_u = rec.u;
      log.ticks.push_back(std::move(rec));
    } else if (type == "outcome") {
      Fields f(j, where(""));
      f.raw("type");
      try {
        log.outcome = parse_outcome(f.text("outcome"));
        log.final_label = StrategyLabel::parse(f.text("label"));
      } catch (const ConfigError & e) {
        throw ConfigError(where("") + ": " + e.what());
      }
      f.number("t");
      f.uint("ticks");
      log.final_state = state_from_json<LogIntegrityError>(f.raw("final"), length, f.at("final"));
      f.finish();
      have_outcome = true;
    } else {
      throw ConfigError(where("/type") + ": unknown record type '" + type + "'");
    }
  }
  if (!have_config) {
    throw ConfigError("log has no config record");
  }
  if (!have_outcome) {
    throw ConfigError("log has no outcome record");
  }
  return log;
}

TrialLog load_trial_log(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open log file '" + file.string() + "'");
  }
  try {
    return read_trial_log(in);
  } catch (const ConfigError & e) {
    throw ConfigError(file.string() + ": " + e.what());
  } catch (const LogIntegrityError & e) {
    throw LogIntegrityError(file.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path & file, const std::string & content)
{
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::filesystem::filesystem_error(
              "cannot write", tmp, std::make_error_code(std::errc::permission_denied));
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::filesystem::filesystem_error(
              "short write", tmp, std::make_error_code(std::errc::io_error));
    }
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace collab
