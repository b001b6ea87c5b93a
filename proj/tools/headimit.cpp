// Command-line entry points for the head-imitation pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "headimit/config.hpp"
#include "headimit/geometry.hpp"
#include "headimit/ingest.hpp"
#include "headimit/joint_limits.hpp"
#include "headimit/metrics.hpp"
#include "headimit/pipeline.hpp"
#include "headimit/robot_link.hpp"
#include "headimit/robot_sim.hpp"
#include "headimit/session_log.hpp"
#include "headimit/synth.hpp"
#include "headimit/wire.hpp"

namespace fs = std::filesystem;
using namespace headimit;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

void write_json_file(const fs::path& p, const nlohmann::ordered_json& j) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

struct ReplayArgs {
  std::string input;
  std::string config;
  std::string log;
  bool safe_margin = false;
};

int cmd_replay(const ReplayArgs& a) {
  PipelineConfig cfg = load_pipeline_config(a.config);
  if (a.safe_margin) cfg.margin = MarginMode::kTowardZero;
  SimRobot sim(load_limit_table(cfg.limits_table), cfg.actuator);
  SimRobotLink link(sim);
  Pipeline pipeline(settings_from_config(cfg), load_or_fit_limit_model(cfg),
                    load_response_map(cfg.responses), link);
  std::ifstream in(a.input);
  if (!in) throw ConfigError("cannot open " + a.input);
  auto log = open_out(a.log);
  const ReplayStats stats = run_replay(in, pipeline, log);
  std::cerr << "replayed " << stats.frames << " frames, " << stats.records << " records\n";
  return 0;
}

struct RunArgs {
  std::string listen;
  std::string robot;
  std::string config;
  std::string log;
  bool safe_margin = false;
};

int cmd_run(const RunArgs& a) {
  PipelineConfig cfg = load_pipeline_config(a.config);
  if (a.safe_margin) cfg.margin = MarginMode::kTowardZero;
  const std::string listen = a.listen.empty() ? cfg.listen : a.listen;
  const std::string robot = a.robot.empty() ? cfg.robot : a.robot;

  std::unique_ptr<SimRobot> sim;
  std::unique_ptr<RobotLink> link;
  if (robot == "sim") {
    sim = std::make_unique<SimRobot>(load_limit_table(cfg.limits_table), cfg.actuator);
    link = std::make_unique<SimRobotLink>(*sim);
  } else if (robot.rfind("http:", 0) == 0) {
    link = std::make_unique<HttpRobotLink>(robot.substr(5));
  } else {
    throw ConfigError("--robot must be 'sim' or 'http:<host>:<port>'");
  }

  Pipeline pipeline(settings_from_config(cfg), load_or_fit_limit_model(cfg),
                    load_response_map(cfg.responses), *link);
  auto log = open_out(a.log);
  IngestServer ingest;
  auto [host, port] = detail::split_host_port(listen, 8080);
  const int bound = ingest.start(host, port);
  LiveLoop loop(ingest, pipeline, log);
  loop.start();
  std::cerr << "listening on " << host << ':' << bound << " (robot: " << robot << ")\n";

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));

  ingest.stop();
  loop.stop();
  std::cerr << ingest.health().dump() << '\n';
  return 0;
}

int cmd_serve_robot(const std::string& listen, const std::string& config) {
  PipelineConfig cfg = load_pipeline_config(config);
  RobotServer server(SimRobot(load_limit_table(cfg.limits_table), cfg.actuator));
  auto [host, port] = detail::split_host_port(listen, 9559);
  const int bound = server.start(host, port);
  std::cerr << "robot simulator on " << host << ':' << bound << '\n';
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  return 0;
}

struct AnalyzeArgs {
  std::string log;
  std::string out;
  std::string csv_dir;
  int min_blink_frames = 2;
  double bin_width = 1.0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto records = read_session_log(a.log);
  const MetricsReport rep = build_report(records, a.min_blink_frames, a.bin_width);
  write_json_file(a.out, to_json(rep));
  if (!a.csv_dir.empty()) {
    fs::create_directories(a.csv_dir);
    write_series_csv(fs::path(a.csv_dir) / "yaw.csv", rep.yaw_series);
    write_series_csv(fs::path(a.csv_dir) / "pitch.csv", rep.pitch_series);
  }
  for (const auto& [name, j] : {std::pair{"yaw", &rep.yaw}, std::pair{"pitch", &rep.pitch}}) {
    if (j->r_squared)
      std::cerr << name << " R^2 score " << *j->r_squared * 100.0 << '\n';
    else
      std::cerr << name << " R^2 undefined (constant human series)\n";
  }
  return 0;
}

struct FitArgs {
  std::string table;
  std::string out;
  svr::Hyperparams hp;
};

int cmd_fit_limits(const FitArgs& a) {
  const PitchLimitModel model = fit_pitch_limit_model(load_limit_table(a.table), a.hp);
  auto out = open_out(a.out);
  out << to_json(model).dump(2) << '\n';
  return 0;
}

struct SynthArgs {
  std::string kind;
  std::size_t frames = 0;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t blink_events = 50;
  std::size_t noise_blinks = 10;
};

int cmd_synth(const SynthArgs& a) {
  synth::Options o;
  o.kind = synth::parse_kind(a.kind);
  if (a.frames > 0)
    o.frames = a.frames;
  else if (o.kind != synth::Kind::sinusoid)
    o.frames = 1;  // script length decides
  o.seed = a.seed;
  o.blink_events = a.blink_events;
  o.noise_blinks = a.noise_blinks;
  auto out = open_out(a.out);
  synth::write_trace(out, synth::synthesize(o));
  return 0;
}

int cmd_calibrate(const std::string& input, const std::string& out_path) {
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot open " + input);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // Accept either a single JSON object or the first record of a replay file.
  if (!nlohmann::json::accept(text)) text = text.substr(0, text.find('\n'));
  const BaselineConfig b = calibrate_baseline(parse_frame_record(text));
  auto out = open_out(out_path);
  out << to_json(b).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time head imitation pipeline"};
  app.require_subcommand(1);

  ReplayArgs replay;
  auto* sc_replay = app.add_subcommand("replay", "Run a frame file through the closed loop");
  sc_replay->add_option("--input", replay.input, "Newline-delimited frame records")->required();
  sc_replay->add_option("--config", replay.config, "Pipeline config")->required();
  sc_replay->add_option("--log", replay.log, "Session log to write")->required();
  sc_replay->add_flag("--safe-margin", replay.safe_margin, "Shrink both pitch bounds toward zero");

  RunArgs run;
  auto* sc_run = app.add_subcommand("run", "Serve live ingest and drive the robot");
  sc_run->add_option("--listen", run.listen, "host:port for POST /frame");
  sc_run->add_option("--robot", run.robot, "sim | http:<host>:<port>");
  sc_run->add_option("--config", run.config, "Pipeline config")->required();
  sc_run->add_option("--log", run.log, "Session log to write")->required();
  sc_run->add_flag("--safe-margin", run.safe_margin, "Shrink both pitch bounds toward zero");

  std::string robot_listen = "127.0.0.1:9559", robot_config;
  auto* sc_robot = app.add_subcommand("serve-robot", "Expose the simulator over HTTP");
  sc_robot->add_option("--listen", robot_listen, "host:port");
  sc_robot->add_option("--config", robot_config, "Pipeline config")->required();

  AnalyzeArgs analyze;
  auto* sc_analyze = app.add_subcommand("analyze", "Compute fidelity metrics from a session log");
  sc_analyze->add_option("--log", analyze.log)->required();
  sc_analyze->add_option("--out", analyze.out, "Report JSON")->required();
  sc_analyze->add_option("--csv-dir", analyze.csv_dir, "Directory for yaw.csv/pitch.csv");
  sc_analyze->add_option("--min-blink-frames", analyze.min_blink_frames)->check(CLI::PositiveNumber);
  sc_analyze->add_option("--bin-width", analyze.bin_width)->check(CLI::PositiveNumber);

  FitArgs fit;
  auto* sc_fit = app.add_subcommand("fit-limits", "Fit the pitch-limit SVR pair");
  sc_fit->add_option("--table", fit.table, "limits.json")->required();
  sc_fit->add_option("--c", fit.hp.c)->check(CLI::PositiveNumber);
  sc_fit->add_option("--epsilon", fit.hp.epsilon)->check(CLI::NonNegativeNumber);
  sc_fit->add_option("--gamma", fit.hp.gamma)->check(CLI::PositiveNumber);
  sc_fit->add_option("--out", fit.out, "Model JSON")->required();

  SynthArgs synth_args;
  auto* sc_synth = app.add_subcommand("synth", "Generate a synthetic replay trace");
  sc_synth->add_option("--kind", synth_args.kind)
      ->required()
      ->check(CLI::IsMember({"sinusoid", "blinks", "emotions"}));
  sc_synth->add_option("--frames", synth_args.frames)->check(CLI::PositiveNumber);
  sc_synth->add_option("--out", synth_args.out)->required();
  sc_synth->add_option("--seed", synth_args.seed);
  sc_synth->add_option("--blink-events", synth_args.blink_events);
  sc_synth->add_option("--noise-blinks", synth_args.noise_blinks);

  std::string cal_input, cal_out;
  auto* sc_cal = app.add_subcommand("calibrate", "Capture neutral-pose baselines from a frame");
  sc_cal->add_option("--input", cal_input)->required();
  sc_cal->add_option("--out", cal_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sc_replay) return cmd_replay(replay);
    if (*sc_run) return cmd_run(run);
    if (*sc_robot) return cmd_serve_robot(robot_listen, robot_config);
    if (*sc_analyze) return cmd_analyze(analyze);
    if (*sc_fit) return cmd_fit_limits(fit);
    if (*sc_synth) return cmd_synth(synth_args);
    if (*sc_cal) return cmd_calibrate(cal_input, cal_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
