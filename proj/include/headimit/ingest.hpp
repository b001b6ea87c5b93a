#pragma once

// Live landmark ingest: POST /frame and GET /health over HTTP, feeding a
// single-slot latest-wins handoff consumed by the control loop.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "headimit/error.hpp"
#include "headimit/pipeline.hpp"
#include "headimit/wire.hpp"

namespace headimit {

// Single-producer single-consumer slot. A put() over an unconsumed value
// replaces it.
template <typename T>
class LatestWinsSlot {
 public:
  // Returns true when an unconsumed value was overwritten.
  bool put(T value) {
    bool replaced = false;
    {
      std::lock_guard lock(mutex_);
      replaced = value_.has_value();
      value_ = std::move(value);
    }
    cv_.notify_one();
    return replaced;
  }

  std::optional<T> try_take() {
    std::lock_guard lock(mutex_);
    return std::exchange(value_, std::nullopt);
  }

  template <typename Rep, typename Period>
  std::optional<T> take_for(std::chrono::duration<Rep, Period> timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [this] { return value_.has_value(); });
    return std::exchange(value_, std::nullopt);
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::optional<T> value_;
};

struct IngestCounters {
  std::atomic<std::uint64_t> received{0};
  std::atomic<std::uint64_t> dropped{0};
  std::atomic<std::uint64_t> processed{0};
  std::atomic<std::uint64_t> rejected{0};  // well-formed frames the pipeline refused
};

class IngestServer {
 public:
  IngestServer() {
    server_.Post("/frame", [this](const httplib::Request& req, httplib::Response& res) {
      if (!loop_running_) {
        res.status = 503;
        res.set_content(R"({"error":"control loop not running"})", "application/json");
        return;
      }
      try {
        LandmarkFrame f = parse_frame_record(req.body);
        counters_.received++;
        if (slot_.put(std::move(f))) counters_.dropped++;
        res.status = 204;
      } catch (const SchemaError& e) {
        res.status = 400;
        res.set_content(
            nlohmann::json{{"error", "SchemaError"}, {"field", e.field()}, {"message", e.what()}}
                .dump(),
            "application/json");
      }
    });
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(health().dump(), "application/json");
    });
  }

  ~IngestServer() { stop(); }

  int start(const std::string& host, int port) {
    const int bound =
        port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  nlohmann::json health() const {
    return {{"status", loop_running_ ? "running" : "idle"},
            {"frames_received", counters_.received.load()},
            {"frames_processed", counters_.processed.load()},
            {"frames_dropped", counters_.dropped.load()},
            {"frames_rejected", counters_.rejected.load()}};
  }

  LatestWinsSlot<LandmarkFrame>& slot() noexcept { return slot_; }
  IngestCounters& counters() noexcept { return counters_; }
  void set_loop_running(bool running) noexcept { loop_running_ = running; }
  bool loop_running() const noexcept { return loop_running_; }

 private:
  httplib::Server server_;
  LatestWinsSlot<LandmarkFrame> slot_;
  IngestCounters counters_;
  std::atomic<bool> loop_running_{false};
  std::thread thread_;
};

// Consumer side: drains the ingest slot through the pipeline and owns the
// session log writer.
class LiveLoop {
 public:
  LiveLoop(IngestServer& ingest, Pipeline& pipeline, std::ostream& log)
      : ingest_(ingest), pipeline_(pipeline), log_(log) {}

  ~LiveLoop() { stop(); }

  void start() {
    running_ = true;
    ingest_.set_loop_running(true);
    thread_ = std::thread([this] { run(); });
  }

  // Stops consuming, settles the last record and flushes the log.
  void stop() {
    if (!running_.exchange(false)) return;
    ingest_.set_loop_running(false);
    if (thread_.joinable()) thread_.join();
    if (auto leftover = ingest_.slot().try_take()) consume(*leftover);
    if (auto rec = pipeline_.finish()) write_record(log_, *rec);
    log_.flush();
  }

 private:
  void run() {
    while (running_) {
      if (auto f = ingest_.slot().take_for(std::chrono::milliseconds(20))) consume(*f);
    }
  }

  void consume(const LandmarkFrame& f) {
    try {
      if (auto rec = pipeline_.process(f)) {
        write_record(log_, *rec);
        log_.flush();
      }
      ingest_.counters().processed++;
    } catch (const Error&) {
      ingest_.counters().rejected++;
    }
  }

  IngestServer& ingest_;
  Pipeline& pipeline_;
  std::ostream& log_;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace headimit
