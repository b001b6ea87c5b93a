#pragma once

// Transport between the control loop and the robot: an in-process simulator,
// or the HTTP command interface a hardware relay exposes
// (POST /command, GET /feedback). RobotServer serves that interface backed by
// the simulator so the two are interchangeable.

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "headimit/commands.hpp"
#include "headimit/error.hpp"
#include "headimit/robot_sim.hpp"

namespace headimit {

class RobotLink {
 public:
  virtual ~RobotLink() = default;
  virtual void start(std::int64_t t_ms) = 0;
  virtual void send(const RobotCommand& cmd) = 0;
  // Lets `dt_ms` of robot time pass and returns the sensed state.
  virtual RobotFeedback advance(double dt_ms) = 0;
};

class SimRobotLink final : public RobotLink {
 public:
  explicit SimRobotLink(SimRobot& sim) : sim_(sim) {}

  void start(std::int64_t t_ms) override { sim_.set_clock(static_cast<double>(t_ms)); }
  void send(const RobotCommand& cmd) override { sim_.apply(cmd); }

  // Integrates in tick-sized substeps.
  RobotFeedback advance(double dt_ms) override {
    const double tick = sim_.params().tick_ms;
    double remaining = dt_ms;
    while (remaining > 1e-9) {
      const double h = std::min(tick, remaining);
      sim_.step(h);
      remaining -= h;
    }
    return sim_.read_feedback();
  }

 private:
  SimRobot& sim_;
};

namespace detail {

inline std::pair<std::string, int> split_host_port(const std::string& addr, int default_port) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) return {addr, default_port};
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad address '" + addr + "'");
  }
}

}  // namespace detail

// The remote robot runs on its own clock; advance() only polls feedback.
class HttpRobotLink final : public RobotLink {
 public:
  explicit HttpRobotLink(const std::string& endpoint) {
    auto [host, port] = detail::split_host_port(endpoint, 80);
    client_ = std::make_unique<httplib::Client>(host, port);
    client_->set_connection_timeout(2, 0);
    client_->set_read_timeout(2, 0);
  }

  void start(std::int64_t) override {}

  void send(const RobotCommand& cmd) override {
    auto res = client_->Post("/command", to_json(cmd).dump(), "application/json");
    if (!res) throw Error("robot relay unreachable: " + httplib::to_string(res.error()));
    if (res->status >= 300) throw Rejected("robot relay rejected command: " + res->body);
  }

  RobotFeedback advance(double) override {
    auto res = client_->Get("/feedback");
    if (!res || res->status != 200) throw Error("robot relay feedback unavailable");
    return robot_feedback_from_json(nlohmann::json::parse(res->body));
  }

 private:
  std::unique_ptr<httplib::Client> client_;
};

// Serves a simulator over HTTP. Command handlers and the stepping thread are
// serialized on one mutex; the stepping thread advances the simulator by
// tick_ms per wall-clock tick.
class RobotServer {
 public:
  explicit RobotServer(SimRobot sim) : sim_(std::move(sim)) {
    server_.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        RobotCommand cmd = robot_command_from_json(nlohmann::json::parse(req.body));
        std::lock_guard lock(mutex_);
        sim_.apply(cmd);
        feedback_ = sim_.read_feedback();
        res.status = 204;
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", "Rejected"}, {"reason", e.what()}}.dump(),
                        "application/json");
      }
    });
    server_.Get("/feedback", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      res.set_content(to_json(feedback_).dump(), "application/json");
    });
  }

  ~RobotServer() { stop(); }

  // Binds and starts serving; returns the bound port.
  int start(const std::string& host, int port) {
    const int bound =
        port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    running_ = true;
    http_thread_ = std::thread([this] { server_.listen_after_bind(); });
    step_thread_ = std::thread([this] { step_loop(); });
    server_.wait_until_ready();
    return bound;
  }

  void stop() {
    if (!running_.exchange(false)) return;
    server_.stop();
    if (http_thread_.joinable()) http_thread_.join();
    if (step_thread_.joinable()) step_thread_.join();
  }

  void wait() {
    if (http_thread_.joinable()) http_thread_.join();
  }

 private:
  void step_loop() {
    const auto tick = std::chrono::duration<double, std::milli>(sim_.params().tick_ms);
    auto next = std::chrono::steady_clock::now();
    while (running_) {
      {
        std::lock_guard lock(mutex_);
        feedback_ = sim_.step(sim_.params().tick_ms);
      }
      next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(tick);
      std::this_thread::sleep_until(next);
    }
  }

  SimRobot sim_;
  httplib::Server server_;
  std::mutex mutex_;
  RobotFeedback feedback_{};
  std::atomic<bool> running_{false};
  std::thread http_thread_;
  std::thread step_thread_;
};

}  // namespace headimit
