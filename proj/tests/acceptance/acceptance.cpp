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

// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is
// non-zero when any primary criterion fails. Secondary criteria are reported
// but do not affect the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "collab/cli.hpp"
#include "collab/controller.hpp"
#include "collab/dynamics.hpp"
#include "collab/harness.hpp"
#include "collab/inference.hpp"
#include "collab/io.hpp"
#include "collab/scenario.hpp"
#include "collab/session.hpp"
#include "collab/topology.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <boost/asio/connect.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace fs = std::filesystem;
using collab::Algorithm;
using collab::Context;
using collab::InferenceParams;
using collab::Pose2;
using collab::StrategyLabel;
using collab::TeamState;
using collab::Vec2;
using Clock = std::chrono::steady_clock;

namespace
{

struct Verdict
{
  bool pass;
  std::string detail;
};

int g_primary_failures = 0;

void report(const std::string & name, bool primary, const std::function<Verdict()> & check,
  double runtime_limit_s = 0.0)
{
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception & e) {
    v = Verdict{false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (runtime_limit_s > 0.0 && secs >= runtime_limit_s) {
    v.pass = false;
    v.detail += "; runtime over " + std::to_string(runtime_limit_s) + " s";
  }
  if (!v.pass && primary) {
    ++g_primary_failures;
  }
  char time_text[32];
  std::snprintf(time_text, sizeof(time_text), "%.2f s", secs);
  std::cout << (v.pass ? "PASS" : "FAIL") << (primary ? "  " : "  (secondary) ") << name <<
    ": " << v.detail << " [" << time_text << "]" << std::endl;
}

std::string fmt(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

Context study_context()
{
  return collab::Scenario::study().context;
}

TeamState at(Vec2 p, double w, double heading = 0.0)
{
  return TeamState::from_pose(Pose2(p, heading), 0.914, Vec2{}, Vec2{}, {w}, 0.0);
}

const std::vector<collab::Obstacle> kCenter{collab::Obstacle{Vec2(0.0, 0.0), 0.075}};

Verdict winding_oracle()
{
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto path = gen::polyline(rng, {0.0, 0.0}, 0.05);
    const double dense = oracle::dense_winding(path, {0.0, 0.0}, 1000);
    worst = std::max(worst, std::abs(collab::path_windings(gen::to_vec(path), kCenter)[0] - dense));
  }
  std::vector<Vec2> half;
  for (int k = 0; k <= 100; ++k) {
    const double t = -std::numbers::pi / 2 + std::numbers::pi * k / 100;
    half.emplace_back(std::cos(t), std::sin(t));
  }
  const double w = collab::path_windings(half, kCenter)[0];
  const bool pass = worst <= 1e-9 && std::abs(w - 0.5) <= 1e-12;
  return {pass, "max |incremental - dense| " + fmt(worst) + " over 200 polylines; half loop " +
    std::to_string(w)};
}

Verdict homotopy_invariance()
{
  std::mt19937_64 rng(1002);
  int families = 0;
  int mismatches = 0;
  int mirror_mismatches = 0;
  for (int f = 0; f < 50; ++f) {
    const int side = f % 2 ? +1 : -1;
    const StrategyLabel base = collab::strategy_label(gen::to_vec(gen::detour(rng, side, 0.0)),
        kCenter);
    for (int m = 0; m < 10; ++m) {
      const auto path = gen::detour(rng, side, 0.3);
      const auto label = collab::strategy_label(gen::to_vec(path), kCenter);
      mismatches += label != base;
      const auto mirror = collab::strategy_label(gen::to_vec(gen::mirrored(path)), kCenter);
      mirror_mismatches += mirror.signs[0] != -label.signs[0];
    }
    ++families;
  }
  return {mismatches == 0 && mirror_mismatches == 0,
    std::to_string(families) + " families x 10 members: " + std::to_string(mismatches) +
    " label changes, " + std::to_string(mirror_mismatches) + " mirror sign errors"};
}

Verdict inference_pins()
{
  const InferenceParams params;
  bool pins = collab::prior(0.0, params).probs == std::vector<double>{0.5, 0.5};
  const auto p1 = collab::prior(-0.1, params).probs;
  pins = pins && std::abs(p1[0] - 0.7) <= 1e-15 && std::abs(p1[1] - 0.3) <= 1e-15;
  pins = pins && collab::prior(0.25, params).probs == std::vector<double>{0.0, 1.0};

  InferenceParams unit;
  unit.beta = 1.0;
  const Context c = study_context();
  const auto s = at(Vec2(0.0, -1.0), 0.0);
  const Vec2 left = collab::strategy_mode_direction(-1, 0, s, c, unit);
  const double want = std::exp(2.0) / (std::exp(2.0) + std::exp(-1.0));
  const double example_err = std::abs(collab::posterior(left, left, s, c, unit).probs[0] - want);
  const double h_err = std::abs(collab::entropy(collab::StrategyDistribution{{0.5, 0.5}}) -
      std::log(2.0));

  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> px(-1.3, 1.3);
  std::uniform_real_distribution<double> py(-2.7, 2.7);
  std::uniform_real_distribution<double> w(-0.6, 0.6);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  double worst_sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto d = collab::posterior(Vec2(v(rng), v(rng)), Vec2(v(rng), v(rng)),
        at(Vec2(px(rng), py(rng)), w(rng)), c, params);
    worst_sum = std::max(worst_sum, std::abs(d.probs[0] + d.probs[1] - 1.0));
  }
  const bool pass = pins && example_err <= 1e-12 && h_err <= 1e-12 && worst_sum <= 1e-9;
  return {pass, std::string("prior pins ") + (pins ? "exact" : "WRONG") + "; example error " +
    fmt(example_err) + "; ln2 error " + fmt(h_err) + "; worst |sum - 1| " + fmt(worst_sum) +
    " over 1e5 inputs"};
}

Verdict mirror_symmetry()
{
  const Context c = study_context();
  const InferenceParams params;
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> px(-1.3, 1.3);
  std::uniform_real_distribution<double> py(-2.7, 2.7);
  std::uniform_real_distribution<double> w(-0.3, 0.3);
  std::uniform_real_distribution<double> v(-0.5, 0.5);
  std::uniform_real_distribution<double> h(-3.0, 3.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p(px(rng), py(rng));
    const double wi = w(rng);
    const double heading = h(rng);
    const Vec2 a(v(rng), v(rng));
    const Vec2 u(v(rng), v(rng));
    const auto d = collab::posterior(a, u, at(p, wi, heading), c, params);
    const auto m = collab::posterior(Vec2(-a.x(), a.y()), Vec2(-u.x(), u.y()),
        at(Vec2(-p.x(), p.y()), -wi, std::numbers::pi - heading), c, params);
    bad += m.probs[0] != d.probs[1] || m.probs[1] != d.probs[0];
  }
  return {bad == 0, std::to_string(bad) + " of 1000 reflected scenes not bitwise swapped"};
}

Verdict dynamics_rigidity()
{
  const collab::StickModel model;
  Context c;
  c.bounds.min = Vec2(-1e6, -1e6);
  c.bounds.max = Vec2(1e6, 1e6);
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> v(-1.5, 1.5);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  auto s = TeamState::from_pose(Pose2(Vec2{}, 0.0), model.length, Vec2{}, Vec2{}, {}, 0.0);
  double length_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    s = collab::step(s, Vec2(v(rng), v(rng)), Vec2(v(rng), v(rng)), model, c);
    length_err = std::max(length_err,
        std::abs((s.human_end() - s.robot_end()).norm() - model.length));
  }
  double closed_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = pos(rng);
    const double y = pos(rng);
    const double h = ang(rng);
    const auto s0 = TeamState::from_pose(Pose2(Vec2(x, y), h), model.length, Vec2{}, Vec2{}, {},
        0.0);
    // Translation at a common velocity.
    const Vec2 vel = Vec2(v(rng), v(rng)).clamped(model.robot_speed_cap);
    const auto t = collab::step(s0, vel, vel, model, c);
    closed_err = std::max({closed_err,
        std::abs(t.object().position().x() - (x + vel.x() * model.dt)),
        std::abs(t.object().position().y() - (y + vel.y() * model.dt)),
        std::abs(collab::normalize_angle(t.object().heading() - h))});
    // Rotation: opposite velocities normal to the stick.
    const double speed = std::abs(v(rng)) * model.robot_speed_cap / 1.5;
    const Vec2 normal(-std::sin(h), std::cos(h));
    const auto r = collab::step(s0, normal * speed, normal * -speed, model, c);
    const double omega = 2.0 * speed / model.length;
    closed_err = std::max({closed_err, std::abs(r.object().position().x() - x),
        std::abs(r.object().position().y() - y),
        std::abs(collab::normalize_angle(r.object().heading() - (h + omega * model.dt)))});
  }
  return {length_err <= 1e-9 && closed_err <= 1e-12, "length drift " + fmt(length_err) +
    " over 1e4 steps; closed-form error " + fmt(closed_err) + " over 400 cases"};
}

Verdict controller_sanity()
{
  const collab::Scenario scenario = collab::Scenario::obstacle_free();
  const double distance = (scenario.context.goal.position() - scenario.start_position).norm();
  const double limit = 1.5 * distance / scenario.model.robot_speed_cap;
  int late = 0;
  double slowest = 0.0;
  for (std::size_t start = 0; start < scenario.starts.size(); ++start) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto log = collab::run_trial(collab::make_trial(scenario, Algorithm::kIcMpc, start,
          seed));
      const double t = log.final_state.time();
      slowest = std::max(slowest, t);
      late += log.outcome != collab::Outcome::kSuccess || t > limit;
    }
  }

  const Context c = study_context();
  const collab::StickModel model;
  const InferenceParams params;
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> px(-1.0, 1.0);
  std::uniform_real_distribution<double> py(-2.4, -0.5);
  int differ = 0;
  for (int i = 0; i < 10; ++i) {
    collab::ControllerConfig config;
    config.seed = rng();
    const auto s = at(Vec2(px(rng), py(rng)), 0.0, px(rng));
    const std::vector<Vec2> history{Vec2(px(rng), 0.3)};
    const auto a = collab::plan(s, c, history, collab::Plan{}, config, params, model);
    const auto b = collab::plan(s, c, history, collab::Plan{}, config, params, model);
    differ += a.controls != b.controls || a.expected_cost != b.expected_cost ||
      a.path != b.path;
  }
  return {late == 0 && differ == 0, std::to_string(late) + " of 30 obstacle-free runs late or "
    "failed (slowest " + fmt(slowest) + " s, limit " + fmt(limit) + " s); " +
    std::to_string(differ) + " of 10 repeated plans differ"};
}

std::vector<collab::TrialLog> g_logs;

Verdict comparative_claim()
{
  constexpr std::size_t kTrials = 50;
  constexpr std::size_t kMidBin = 50;
  bool pass = true;
  std::string detail;
  for (auto kind : {collab::HumanKind::kCommitted, collab::HumanKind::kStubborn}) {
    collab::Scenario scenario = collab::Scenario::study();
    scenario.human.kind = kind;
    collab::MetricsReport reports[2];
    for (int k = 0; k < 2; ++k) {
      const Algorithm algo = k == 0 ? Algorithm::kIcMpc : Algorithm::kVanilla;
      std::vector<collab::TrialLog> logs;
      for (std::size_t trial = 0; trial < kTrials; ++trial) {
        const std::size_t start = trial % scenario.starts.size();
        logs.push_back(collab::run_trial(collab::make_trial(scenario, algo, start,
          collab::trial_seed(2026, algo, start, trial))));
      }
      reports[k] = collab::compute_metrics(logs);
      g_logs.insert(g_logs.end(), logs.begin(), logs.end());
    }
    const double gap = reports[1].entropy_trace[kMidBin] - reports[0].entropy_trace[kMidBin];
    const bool success_ok = reports[0].success_rate >= reports[1].success_rate;
    const bool gap_ok = gap >= 0.05;
    pass = pass && success_ok && gap_ok;
    detail += (detail.empty() ? "" : "; ") + collab::to_string(kind) + ": success IC " +
      fmt(100 * reports[0].success_rate) + "% vs vanilla " + fmt(100 * reports[1].success_rate) +
      "% (" + (success_ok ? "ok" : "violated") + "), H50 IC " +
      fmt(reports[0].entropy_trace[kMidBin]) + " vs vanilla " +
      fmt(reports[1].entropy_trace[kMidBin]) + " nats, gap " + fmt(gap) + " (need >= 0.05)";
  }
  return {pass, detail};
}

Verdict log_integrity()
{
  double worst = 0.0;
  int bad = 0;
  for (const auto & log : g_logs) {
    std::istringstream in(collab::serialize_trial_log(log));
    const auto check = collab::verify_log(collab::read_trial_log(in));
    worst = std::max(worst, check.max_error);
    bad += !check.ok || check.max_error > 1e-9;
  }

  const fs::path dir = fs::temp_directory_path() /
    ("collab_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const auto & log = g_logs.front();
  int tamper_missed = 0;
  std::ostringstream sink;
  // Perturb one field of a mid-trial record per trial; every edit must be caught.
  const std::vector<std::string> fields{"a", "u", "object", "human_end"};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    std::istringstream lines(collab::serialize_trial_log(log));
    std::ostringstream edited;
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      if (n++ == 10 + 7 * i) {
        auto rec = collab::Json::parse(line);
        auto & f = rec[fields[i]];
        f["x"] = f["x"].get<double>() + 1e-3;
        line = rec.dump();
      }
      edited << line << '\n';
    }
    const fs::path file = dir / ("tampered_" + fields[i] + ".jsonl");
    std::ofstream(file) << edited.str();
    collab::ReplaySpec spec;
    spec.log = file;
    spec.speed = 1e9;
    tamper_missed += collab::cmd_replay(spec, sink, sink) != collab::kExitIntegrity;
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return {bad == 0 && tamper_missed == 0 && !g_logs.empty(),
    std::to_string(g_logs.size()) + " logs replayed, max error " + fmt(worst) + ", " +
    std::to_string(bad) + " mismatches; " + std::to_string(tamper_missed) + " of " +
    std::to_string(fields.size()) + " tampered logs not rejected with exit 3"};
}

Verdict throughput()
{
  const Context c = study_context();
  const collab::StickModel model;
  const InferenceParams params;
  const collab::ControllerConfig config;
  auto s = at(Vec2(0.05, -1.8), 0.0, 0.2);
  const std::vector<Vec2> history{Vec2(0.1, 0.28)};
  collab::Plan nominal = collab::plan(s, c, history, collab::Plan{}, config, params, model);
  std::vector<double> ms;
  for (int i = 0; i < 30; ++i) {
    const auto t0 = Clock::now();
    nominal = collab::plan(s, c, history, nominal, config, params, model);
    ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return {ms.back() < 66.0, std::to_string(config.samples) + " x " +
    std::to_string(config.horizon_steps) + " plan: median " + fmt(ms[ms.size() / 2]) +
    " ms, worst " + fmt(ms.back()) + " ms of 30 (limit 66 ms)"};
}

// Minimal synchronous websocket client for the secondary checks.
class Client
{
public:
  explicit Client(std::uint16_t port)
  : ws_(ioc_)
  {
    boost::asio::ip::tcp::resolver resolver(ioc_);
    boost::asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }
  void send(const collab::Json & msg)
  {
    ws_.text(true);
    ws_.write(boost::asio::buffer(msg.dump() + "\n"));
  }
  collab::Json read()
  {
    boost::beast::flat_buffer buffer;
    ws_.read(buffer);
    return collab::Json::parse(boost::beast::buffers_to_string(buffer.data()));
  }
  collab::Json read_type(const std::string & type)
  {
    for (;;) {
      auto frame = read();
      if (frame["type"] == type) {
        return frame;
      }
    }
  }

private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
};

collab::Json hello(std::uint64_t seed, bool lockstep)
{
  return {{"type", "hello"}, {"protocol_version", collab::kProtocolVersion}, {"seed", seed},
    {"algorithm", "icmpc"}, {"start", "side-by-side"}, {"lockstep", lockstep}};
}

Verdict online_offline()
{
  const auto offline = collab::run_trial(collab::make_trial(collab::Scenario::study(),
    Algorithm::kIcMpc, 0, 77));
  collab::SessionOptions options;
  options.port = 0;
  collab::SessionServer server(options);
  server.start();
  Client client(server.port());
  client.send(hello(77, true));
  double worst = 0.0;
  for (const auto & tick : offline.ticks) {
    client.send({{"type", "human_input"}, {"vx", tick.a.x()}, {"vy", tick.a.y()}});
    const auto frame = client.read_type("state");
    worst = std::max({worst,
        (collab::vec2_from_json(frame["human_end"]) - tick.state.human_end()).norm(),
        (collab::vec2_from_json(frame["robot_end"]) - tick.state.robot_end()).norm()});
  }
  server.stop();
  return {worst <= 1e-6, std::to_string(offline.ticks.size()) + " lockstep ticks, max deviation " +
    fmt(worst) + " m"};
}

Verdict ui_timing()
{
  collab::SessionOptions options;
  options.port = 0;
  collab::SessionServer server(options);
  server.start();
  Client client(server.port());
  const auto t0 = Clock::now();
  client.send(hello(5, false));
  client.read_type("state");
  const double first_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  client.send({{"type", "human_input"}, {"vx", 0.0}, {"vy", 0.3}});
  const auto sent = Clock::now();
  double hold_ms = -1.0;
  bool seen_motion = false;
  while (Clock::now() - sent < std::chrono::seconds(1)) {
    const auto frame = client.read_type("state");
    const bool moving = frame["a"]["y"].get<double>() != 0.0;
    seen_motion = seen_motion || moving;
    if (seen_motion && !moving) {
      hold_ms = std::chrono::duration<double, std::milli>(Clock::now() - sent).count();
      break;
    }
  }
  server.stop();
  const double tick_ms = 1000.0 / 15.0;
  const bool pass = first_ms < 200.0 && hold_ms >= 300.0 && hold_ms < 300.0 + 2 * tick_ms;
  return {pass, "hello to first frame " + fmt(first_ms) + " ms; stale hold after " +
    fmt(hold_ms) + " ms"};
}

}  // namespace

int main()
{
  std::cout << "collabtransport acceptance" << std::endl;
  report("[1] winding oracle", true, winding_oracle, 5.0);
  report("[2] homotopy invariance", true, homotopy_invariance, 5.0);
  report("[3] inference pins", true, inference_pins);
  report("[4] mirror symmetry", true, mirror_symmetry);
  report("[5] dynamics rigidity", true, dynamics_rigidity);
  report("[6] controller sanity", true, controller_sanity);
  report("[7] comparative claim", true, comparative_claim, 600.0);
  report("[8] log integrity", true, log_integrity);
  report("[9] throughput", true, throughput);
  report("[S1] online/offline equivalence", false, online_offline);
  report("[S2] session timing", false, ui_timing);
  std::cout << (g_primary_failures == 0 ? "ALL PRIMARY CRITERIA PASS" :
    std::to_string(g_primary_failures) + " PRIMARY CRITERIA FAIL") << std::endl;
  return g_primary_failures == 0 ? 0 : 1;
}
