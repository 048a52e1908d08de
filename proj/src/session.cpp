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

#include "collab/session.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <stop_token>
#include <system_error>
#include <thread>
#include <vector>

#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "spdlog/spdlog.h"

namespace collab
{

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

Json state_frame(const TickRecord & tick, std::uint64_t index)
{
  Json j = tick_to_json(tick);
  j["type"] = "state";
  j["tick"] = index;
  return j;
}

Json plan_frame(const Plan & plan)
{
  Json path = Json::array();
  for (const auto & p : plan.path) {
    path.push_back(to_json(p));
  }
  Json controls = Json::array();
  for (const auto & u : plan.controls) {
    controls.push_back(to_json(u));
  }
  return Json{
    {"type", "plan"},
    {"t", plan.time},
    {"path", path},
    {"controls", controls},
    {"expected_cost", plan.expected_cost}};
}

Json error_frame(const std::string & code, const std::string & text)
{
  return Json{{"type", "error"}, {"code", code}, {"text", text}};
}

namespace
{

// Outgoing frames in send order. A droppable frame replaces any unsent frame
// of the same kind, so a slow client sees the newest state rather than a backlog.
class Outbox
{
public:
  void push(const std::string & kind, std::string text, bool droppable)
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (droppable) {
      std::erase_if(queue_, [&](const auto & e) {return e.first == kind;});
    }
    queue_.emplace_back(kind, std::move(text));
  }

  std::optional<std::string> pop()
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (queue_.empty()) {
      return std::nullopt;
    }
    std::string text = std::move(queue_.front().second);
    queue_.pop_front();
    return text;
  }

private:
  std::mutex mutex_;
  std::deque<std::pair<std::string, std::string>> queue_;
};

class Session : public std::enable_shared_from_this<Session>
{
public:
  Session(tcp::socket socket, std::shared_ptr<const SessionOptions> options)
  : ws_(std::move(socket)), options_(std::move(options))
  {
  }

  ~Session() {stop_loop();}

  void run()
  {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(
      [self = shared_from_this()](beast::error_code ec) {
        if (!ec) {
          self->do_read();
        }
      });
  }

  // Called on the io thread.
  void shutdown()
  {
    stop_loop();
    if (ws_.is_open()) {
      beast::error_code ec;
      beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
      beast::get_lowest_layer(ws_).socket().close(ec);
    }
  }

private:
  void do_read()
  {
    ws_.async_read(
      buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->on_read(ec);
      });
  }

  void on_read(beast::error_code ec)
  {
    if (ec) {
      stop_loop();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::size_t begin = 0;
    while (begin <= text.size()) {
      std::size_t end = text.find('\n', begin);
      if (end == std::string::npos) {
        end = text.size();
      }
      const std::string line = text.substr(begin, end - begin);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        handle(line);
      }
      begin = end + 1;
    }
    if (!closing_) {
      do_read();
    }
  }

  void handle(const std::string & line)
  {
    Json msg;
    try {
      msg = Json::parse(line);
    } catch (const Json::parse_error & e) {
      send_error("malformed", std::string("not JSON: ") + e.what());
      return;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      send_error("malformed", "message needs a string 'type'");
      return;
    }
    const std::string type = msg["type"].get<std::string>();
    try {
      if (type != "hello" && type != "human_input" && type != "reset" && type != "pause" &&
        type != "resume")
      {
        send_error("unknown_type", "unknown message type '" + type + "'");
      } else if (type == "hello") {
        on_hello(msg);
      } else if (!started_) {
        send_error("no_session", "send hello first");
      } else if (type == "human_input") {
        on_input(msg);
      } else if (type == "reset") {
        on_reset(msg);
      } else if (type == "pause" || type == "resume") {
        std::lock_guard<std::mutex> lock(mutex_);
        paused_ = type == "pause";
        cv_.notify_all();
      }
    } catch (const Json::exception & e) {
      send_error("malformed", e.what());
    } catch (const ConfigError & e) {
      send_error("bad_request", e.what());
    } catch (const DomainError & e) {
      send_error("bad_request", e.what());
    }
  }

  void on_hello(const Json & msg)
  {
    const auto version = msg.find("protocol_version");
    if (version == msg.end() || *version != kProtocolVersion) {
      send_error("protocol_version",
        std::string("unsupported protocol_version; this server speaks \"") + kProtocolVersion +
        "\"");
      closing_ = true;
      flush();
      return;
    }
    if (options_->replay) {
      std::lock_guard<std::mutex> lock(mutex_);
      replay_index_ = 0;
      paused_ = false;
      started_ = true;
      cv_.notify_all();
      ensure_loop();
      return;
    }

    Scenario scenario = options_->scenario;
    if (msg.contains("scenario") && !msg["scenario"].is_null()) {
      try {
        scenario = scenario_from_json(msg["scenario"]);
      } catch (const ConfigError & e) {
        send_error("bad_scenario", e.what());
        return;
      }
    }
    const Algorithm algorithm = parse_algorithm(msg.value("algorithm", std::string("icmpc")));
    std::size_t start_index = 0;
    if (msg.contains("start")) {
      const auto wanted = parse_start_config(msg["start"].get<std::string>());
      const auto it = std::find(scenario.starts.begin(), scenario.starts.end(), wanted);
      if (it == scenario.starts.end()) {
        throw ConfigError("start configuration not offered by the scenario");
      }
      start_index = static_cast<std::size_t>(it - scenario.starts.begin());
    }
    const std::uint64_t seed = msg.value("seed", std::uint64_t{0});
    TrialConfig config = make_trial(scenario, algorithm, start_index, seed);
    auto runner = std::make_unique<TrialRunner>(config);

    std::lock_guard<std::mutex> lock(mutex_);
    base_ = config;
    runner_ = std::move(runner);
    lockstep_ = msg.value("lockstep", false);
    pending_.clear();
    last_input_.reset();
    paused_ = false;
    started_ = true;
    cv_.notify_all();
    ensure_loop();
  }

  Vec2 read_velocity(const Json & msg) const
  {
    const auto & vx = msg.at("vx");
    const auto & vy = msg.at("vy");
    if (!vx.is_number() || !vy.is_number()) {
      throw ConfigError("vx and vy must be numbers");
    }
    return Vec2(vx.get<double>(), vy.get<double>());
  }

  void on_input(const Json & msg)
  {
    const Vec2 v = read_velocity(msg);
    std::lock_guard<std::mutex> lock(mutex_);
    const double cap = runner_ ? runner_->config().model.human_speed_cap :
      options_->scenario.model.human_speed_cap;
    if (lockstep_) {
      pending_.push_back(v.clamped(cap));
    } else {
      last_input_ = std::make_pair(v.clamped(cap), Clock::now());
    }
    cv_.notify_all();
  }

  void on_reset(const Json & msg)
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (options_->replay) {
      replay_index_ = 0;
    } else {
      TrialConfig config = base_;
      if (msg.contains("seed")) {
        config.seed = msg.at("seed").get<std::uint64_t>();
      }
      base_ = config;
      runner_ = std::make_unique<TrialRunner>(config);
      pending_.clear();
      last_input_.reset();
    }
    paused_ = false;
    cv_.notify_all();
  }

  void ensure_loop()
  {
    if (!loop_.joinable()) {
      loop_ = std::jthread([this](std::stop_token st) {loop(st);});
    }
  }

  void stop_loop()
  {
    if (loop_.joinable() && loop_.get_id() != std::this_thread::get_id()) {
      loop_.request_stop();
      cv_.notify_all();
      loop_.join();
    }
  }

  bool runnable() const
  {
    if (paused_) {
      return false;
    }
    if (options_->replay) {
      return replay_index_ <= options_->replay->ticks.size();
    }
    return runner_ && !runner_->finished() && (!lockstep_ || !pending_.empty());
  }

  void loop(std::stop_token st)
  {
    const bool replay = options_->replay.has_value();
    const double dt = replay ? options_->replay->config.model.dt / options_->replay_speed :
      options_->scenario.model.dt;
    const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(dt));
    auto next = Clock::now();
    std::unique_lock<std::mutex> lock(mutex_);
    while (!st.stop_requested()) {
      if (!runnable()) {
        cv_.wait(lock, st, [&] {return runnable();});
        next = Clock::now();
        continue;
      }
      if (!lockstep_) {
        const TrialRunner * before = runner_.get();
        const std::size_t before_index = replay_index_;
        if (cv_.wait_until(lock, st, next, [&] {
            return runner_.get() != before || replay_index_ != before_index || paused_;
          }))
        {
          continue;
        }
        if (st.stop_requested()) {
          break;
        }
        next += period;
        // After a stall, resume the cadence instead of bursting to catch up.
        if (Clock::now() - next > std::chrono::seconds(1)) {
          next = Clock::now();
        }
      }
      if (replay) {
        replay_step();
      } else {
        trial_step();
      }
    }
  }

  void replay_step()
  {
    const TrialLog & log = *options_->replay;
    if (replay_index_ < log.ticks.size()) {
      send("state", state_frame(log.ticks[replay_index_], replay_index_).dump(), true);
    } else {
      send("outcome", outcome_to_json(log).dump(), false);
    }
    ++replay_index_;
  }

  void trial_step()
  {
    Vec2 a;
    if (lockstep_) {
      a = pending_.front();
      pending_.pop_front();
    } else if (last_input_ && Clock::now() - last_input_->second <= kStaleInput) {
      a = last_input_->first;
    }
    const std::uint64_t index = runner_->tick_index();
    const TickRecord & rec = runner_->advance(a);
    const bool droppable = !lockstep_;
    send("state", state_frame(rec, index).dump(), droppable);
    if (index % kPlanEvery == 0) {
      send("plan", plan_frame(runner_->last_plan()).dump(), droppable);
    }
    if (runner_->finished()) {
      send("outcome", outcome_to_json(runner_->log()).dump(), false);
    }
  }

  void send_error(const std::string & code, const std::string & text)
  {
    send("error", error_frame(code, text).dump(), false);
  }

  // Any thread. The write itself happens on the io thread.
  void send(const std::string & kind, std::string text, bool droppable)
  {
    outbox_.push(kind, std::move(text) + "\n", droppable);
    net::post(ws_.get_executor(), [weak = weak_from_this()] {
        if (auto self = weak.lock()) {
          self->flush();
        }
      });
  }

  void flush()
  {
    if (writing_) {
      return;
    }
    auto next = outbox_.pop();
    if (!next) {
      if (closing_ && ws_.is_open()) {
        ws_.async_close(websocket::close_code::policy_error,
          [self = shared_from_this()](beast::error_code) {self->stop_loop();});
      }
      return;
    }
    writing_ = true;
    current_ = std::move(*next);
    ws_.text(true);
    ws_.async_write(
      net::buffer(current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->writing_ = false;
        if (ec) {
          self->stop_loop();
          return;
        }
        self->flush();
      });
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<const SessionOptions> options_;
  beast::flat_buffer buffer_;
  Outbox outbox_;
  std::string current_;
  bool writing_{false};
  bool closing_{false};
  bool started_{false};

  // Shared between the io thread and the loop thread.
  std::mutex mutex_;
  std::condition_variable_any cv_;
  TrialConfig base_;
  std::unique_ptr<TrialRunner> runner_;
  bool lockstep_{false};
  bool paused_{false};
  std::deque<Vec2> pending_;
  std::optional<std::pair<Vec2, Clock::time_point>> last_input_;
  std::size_t replay_index_{0};
  std::jthread loop_;
};

}  // namespace

struct SessionServer::Impl
{
  explicit Impl(SessionOptions opts)
  : options(std::make_shared<const SessionOptions>(std::move(opts))), acceptor(ioc)
  {
    try {
      const tcp::endpoint endpoint(net::ip::make_address(options->address), options->port);
      acceptor.open(endpoint.protocol());
      acceptor.set_option(net::socket_base::reuse_address(true));
      acceptor.bind(endpoint);
      acceptor.listen(net::socket_base::max_listen_connections);
    } catch (const boost::system::system_error & e) {
      throw std::system_error(static_cast<std::error_code>(e.code()), e.what());
    }
  }

  void accept()
  {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
          return;
        }
        auto session = std::make_shared<Session>(std::move(socket), options);
        sessions.push_back(session);
        std::erase_if(sessions, [](const auto & w) {return w.expired();});
        session->run();
        accept();
      });
  }

  std::shared_ptr<const SessionOptions> options;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  std::vector<std::weak_ptr<Session>> sessions;
  std::thread io_thread;
  bool running{false};
};

SessionServer::SessionServer(SessionOptions options)
: impl_(std::make_unique<Impl>(std::move(options)))
{
}

SessionServer::~SessionServer()
{
  stop();
}

std::uint16_t SessionServer::port() const
{
  return impl_->acceptor.local_endpoint().port();
}

void SessionServer::start()
{
  if (impl_->running) {
    return;
  }
  impl_->running = true;
  impl_->accept();
  impl_->io_thread = std::thread([this] {impl_->ioc.run();});
}

void SessionServer::stop()
{
  if (!impl_->running) {
    return;
  }
  impl_->running = false;
  net::post(impl_->ioc, [this] {
      beast::error_code ec;
      impl_->acceptor.close(ec);
      for (auto & weak : impl_->sessions) {
        if (auto s = weak.lock()) {
          s->shutdown();
        }
      }
    });
  // Let the close handlers drain, then stop.
  net::post(impl_->ioc, [this] {impl_->ioc.stop();});
  if (impl_->io_thread.joinable()) {
    impl_->io_thread.join();
  }
}

int serve(const SessionOptions & options)
{
  SessionServer server(options);
  net::io_context signals_ioc;
  net::signal_set signals(signals_ioc, SIGINT, SIGTERM);
  signals.async_wait([](beast::error_code, int) {});
  server.start();
  spdlog::info("session server listening on {}:{} (protocol {})", options.address, server.port(),
    kProtocolVersion);
  signals_ioc.run();
  spdlog::info("shutting down");
  server.stop();
  return 0;
}

}  // namespace collab
