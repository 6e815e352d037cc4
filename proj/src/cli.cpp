#include "tnm/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "tnm/error.hpp"
#include "tnm/graph.hpp"
#include "tnm/persistence.hpp"
#include "tnm/service.hpp"

namespace tnm {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs `write` against the file at `path`, or against `out` when empty.
template <class F>
void with_sink(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::io_error, "cannot write '" + path + "'");
  write(file);
  file.close();
  if (!file) throw Error(Errc::io_error, "error writing '" + path + "'");
}

ObjectId resolve(const Model& model, const std::string& path) {
  auto id = model.find_object(path);
  if (!id || *id == kRootId) throw Error(Errc::not_found, "no object at path '" + path + "'");
  return *id;
}

void print_summary(const RunSummary& s, const Model& model, std::ostream& out) {
  out << "scenario " << s.scenario << "  seed " << s.seed << "  duration " << format_number(s.duration)
      << " s\n";
  out << "records " << s.total_records << "  sent " << s.messages_sent << "  delivered " << s.messages_delivered
      << "  dropped " << s.messages_dropped << "\n\n";

  std::size_t width = 5;
  for (const auto& l : s.labels) width = std::max(width, l.label.size());
  out << std::left << std::setw(static_cast<int>(width)) << "label" << std::right << std::setw(7) << "sent"
      << std::setw(10) << "delivered" << std::setw(8) << "dropped" << std::setw(6) << "acks" << std::setw(10)
      << "min s" << std::setw(10) << "mean s" << std::setw(10) << "max s" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& l : s.labels) {
    out << std::left << std::setw(static_cast<int>(width)) << l.label << std::right << std::setw(7) << l.sent
        << std::setw(10) << l.delivered << std::setw(8) << l.dropped << std::setw(6) << l.acks_delivered
        << std::setw(10) << l.min_delivery << std::setw(10) << l.mean_delivery << std::setw(10) << l.max_delivery
        << '\n';
  }
  if (!s.resources.empty()) {
    std::size_t rwidth = 8;
    for (const auto& r : s.resources) rwidth = std::max(rwidth, model.path_string(r.object).size());
    out << '\n'
        << std::left << std::setw(static_cast<int>(rwidth)) << "resource" << std::right << std::setw(10) << "acquired"
        << std::setw(6) << "peak" << std::setw(12) << "busy s" << std::setw(8) << "util" << '\n';
    for (const auto& r : s.resources) {
      const double util = s.duration > 0 ? r.busy_time / s.duration : 0.0;
      out << std::left << std::setw(static_cast<int>(rwidth)) << model.path_string(r.object) << std::right
          << std::setw(10) << r.acquisitions << std::setw(6) << r.peak_concurrent << std::setw(12) << r.busy_time
          << std::setw(8) << util << '\n';
    }
  }
  out << std::defaultfloat;
}

int serve(const std::string& file, const std::string& host, int port, std::ostream& out, std::ostream& err) {
  ApiService service(load_file(file));
  if (!service.bind(host, port)) {
    err << "tnm: cannot listen on " << host << ":" << port << "\n";
    return kExitDomain;
  }
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
  std::thread server([&] { service.listen(); });
  out << "listening on http://" << host << ":" << port << std::endl;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  service.stop();
  server.join();
  pthread_sigmask(SIG_UNBLOCK, &stop_signals, nullptr);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical tactical network modeller", "tnm"};
  app.require_subcommand(1);

  std::string file, out_path, from, to, scenario, format_text = "jsonl", label, host = "127.0.0.1";
  bool all = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  int port = 8080;

  auto* validate = app.add_subcommand("validate", "Check a model file and report every violation");
  validate->add_option("file", file, "Model XML")->required();

  auto* graph = app.add_subcommand("graph", "Export the connection graph as DOT");
  graph->add_option("file", file, "Model XML")->required();
  graph->add_option("-o,--out", out_path, "Output file (default stdout)");

  auto* paths = app.add_subcommand("paths", "Routes between two objects");
  paths->add_option("file", file, "Model XML")->required();
  paths->add_option("--from", from, "Source object path, e.g. Platoon/AFV/Terminal")->required();
  paths->add_option("--to", to, "Destination object path")->required();
  paths->add_flag("--all", all, "List every simple path instead of the shortest");

  auto* run_cmd = app.add_subcommand("run", "Execute a scenario and write its log");
  run_cmd->add_option("file", file, "Model XML")->required();
  run_cmd->add_option("-s,--scenario", scenario, "Scenario name")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--duration", duration, "Override the scenario duration in seconds");
  run_cmd->add_option("-o,--out", out_path, "Log file (default: no log)");
  run_cmd->add_option("-f,--format", format_text, "Log format")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* report = app.add_subcommand("report", "Delivery times of one task label from a log");
  report->add_option("log", file, "CSV or JSONL log")->required();
  report->add_option("-l,--label", label, "Task label")->required();
  report->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the model over HTTP");
  serve_cmd->add_option("file", file, "Model XML")->required();
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("-p,--port", port, "Listen port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      const Project project = load_file(file);
      out << "ok: " << project.model.object_count() << " objects, " << project.model.connection_count()
          << " connections, " << project.scenarios.size() << " scenarios\n";
    } else if (*graph) {
      const Project project = load_file(file);
      const ConnectionGraph g(project.model);
      with_sink(out_path, out, [&](std::ostream& sink) { write_dot(g, sink); });
    } else if (*paths) {
      const Project project = load_file(file);
      const ConnectionGraph g(project.model);
      const ObjectId src = resolve(project.model, from);
      const ObjectId dst = resolve(project.model, to);
      std::vector<Path> found;
      if (all) {
        found = all_paths(g, src, dst);
      } else if (auto p = shortest_path(g, src, dst)) {
        found.push_back(*p);
      }
      if (found.empty()) out << "no path\n";
      for (const auto& p : found) out << p.hops() << "  " << format_path(g, p) << '\n';
    } else if (*run_cmd) {
      const Project project = load_file(file);
      const ScenarioSpec* found = project.find_scenario(scenario);
      if (!found) throw Error(Errc::not_found, "no scenario named '" + scenario + "'");
      ScenarioSpec spec = *found;
      if (seed) spec.seed = *seed;
      if (duration) spec.duration = *duration;
      const SimLog log = run(bind(project.model, spec));
      if (!out_path.empty()) {
        const LogFormat format = *parse_log_format(format_text);
        with_sink(out_path, out, [&](std::ostream& sink) { export_log(log, format, sink); });
      }
      print_summary(summarize(log), project.model, out);
    } else if (*report) {
      const std::string text = read_text(file);
      SimLog log;
      log.records = parse_log(text, sniff_log_format(text));
      const auto samples = delivery_times(log, label);
      if (samples.empty()) err << "tnm: warning: no delivered messages labelled '" << label << "'\n";
      with_sink(out_path, out, [&](std::ostream& sink) {
        sink << "send_time,delivery_seconds\n";
        for (const auto& s : samples) sink << format_number(s.send_time) << ',' << format_number(s.delivery_seconds) << '\n';
      });
    } else if (*serve_cmd) {
      return serve(file, host, port, out, err);
    }
  } catch (const Error& e) {
    err << "tnm: " << e.what() << '\n';
    for (const auto& v : e.violations()) err << "  " << to_string(v.code) << ": " << v.message << '\n';
    return e.code() == Errc::io_error ? kExitUsage : kExitDomain;
  }
  return kExitOk;
}

}  // namespace tnm
