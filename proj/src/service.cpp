#include "tnm/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>

#include "tnm/error.hpp"
#include "tnm/json_projection.hpp"
#include "tnm/persistence.hpp"

namespace tnm {

using nlohmann::json;

namespace {

enum class RunStatus { Pending, Running, Done, Failed };

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Pending: return "pending";
    case RunStatus::Running: return "running";
    case RunStatus::Done: return "done";
    case RunStatus::Failed: return "failed";
  }
  return "pending";
}

struct RunEntry {
  std::string id;
  RunStatus status = RunStatus::Pending;
  std::string scenario;
  std::uint64_t seed = 0;
  double duration = 0.0;
  std::string created_at;
  std::string error;
  std::optional<SimLog> log;
  bool evicted = false;
};

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int http_status(Errc code) {
  switch (code) {
    case Errc::not_found: return 404;
    case Errc::parse_error: return 400;
    case Errc::io_error: return 500;
    default: return 422;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::vector<Violation>& violations = {}) {
  json list = json::array();
  for (const auto& v : violations) list.push_back({{"code", to_string(v.code)}, {"message", v.message}});
  send_json(res, status, {{"error", code}, {"message", message}, {"violations", list}});
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, http_status(e.code()), to_string(e.code()), e.what(), e.violations());
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("request body is not valid JSON: ") + e.what());
  }
}

template <class T>
T body_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::parse_error, std::string("missing or mistyped field '") + key + "'");
  }
}

std::uint64_t path_id(const httplib::Request& req) {
  try {
    return std::stoull(req.matches[1].str());
  } catch (const std::out_of_range&) {
    throw Error(Errc::not_found, "id " + req.matches[1].str());
  }
}

}  // namespace

struct ApiService::Impl {
  explicit Impl(Project p, Options o) : project(std::move(p)), options(o) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, options.workers); ++i) {
      workers.emplace_back([this] { work(); });
    }
    routes();
  }

  ~Impl() {
    stop_server();
    {
      std::lock_guard lock(jobs_mutex);
      shutting_down = true;
    }
    jobs_cv.notify_all();
    for (auto& t : workers) t.join();
  }

  // A stop that races a listen() still in startup waits for it to run.
  enum class Listen { Idle, Running, Stopped };
  std::mutex listen_mutex;
  Listen listen_state = Listen::Idle;

  bool start_listening() {
    std::lock_guard lock(listen_mutex);
    if (listen_state == Listen::Stopped) return false;
    listen_state = Listen::Running;
    return true;
  }

  void stop_server() {
    Listen was;
    {
      std::lock_guard lock(listen_mutex);
      was = std::exchange(listen_state, Listen::Stopped);
    }
    if (was == Listen::Running) {
      server.wait_until_ready();
      server.stop();
    }
  }

  // ---- model state ---------------------------------------------------------

  mutable std::mutex model_mutex;
  Project project;
  std::uint64_t version = 1;
  Options options;

  std::string etag() const { return "\"" + std::to_string(version) + "\""; }

  // Runs `edit` on a copy and commits only on success. Honors If-Match.
  void mutate(const httplib::Request& req, httplib::Response& res,
              const std::function<void(Project&, httplib::Response&)>& edit) {
    std::lock_guard lock(model_mutex);
    if (req.has_header("If-Match") && req.get_header_value("If-Match") != etag()) {
      send_error(res, 409, "conflict", "model version is " + etag() + ", request expected " +
                                           req.get_header_value("If-Match"));
      return;
    }
    Project draft = project;
    try {
      edit(draft, res);
    } catch (const Error& e) {
      send_error(res, e);
      return;
    }
    project = std::move(draft);
    ++version;
    res.set_header("ETag", etag());
  }

  // ---- runs ----------------------------------------------------------------

  std::mutex runs_mutex;
  std::map<std::string, RunEntry> runs;
  std::deque<std::string> completed;
  std::uint64_t next_run = 1;

  std::mutex jobs_mutex;
  std::condition_variable jobs_cv;
  std::deque<std::function<void()>> jobs;
  bool shutting_down = false;
  std::vector<std::thread> workers;

  void work() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(jobs_mutex);
        jobs_cv.wait(lock, [&] { return shutting_down || !jobs.empty(); });
        if (shutting_down) return;
        job = std::move(jobs.front());
        jobs.pop_front();
      }
      job();
    }
  }

  json handle_json(const RunEntry& r) const {
    return {{"run_id", r.id},     {"status", to_string(r.status)}, {"scenario", r.scenario},
            {"seed", r.seed},     {"duration", r.duration},        {"created_at", r.created_at},
            {"error", r.error}};
  }

  void finish(const std::string& id, std::optional<SimLog> log, std::string error) {
    std::lock_guard lock(runs_mutex);
    RunEntry& r = runs.at(id);
    r.status = log ? RunStatus::Done : RunStatus::Failed;
    r.log = std::move(log);
    r.error = std::move(error);
    completed.push_back(id);
    while (completed.size() > options.retained_runs) {
      RunEntry& old = runs.at(completed.front());
      old.log.reset();
      old.evicted = true;
      completed.pop_front();
    }
  }

  void start_run(const httplib::Request& req, httplib::Response& res) {
    json body = parse_body(req);
    const auto name = body_field<std::string>(body, "scenario");
    std::optional<Project> snap;
    ScenarioSpec spec;
    {
      std::lock_guard lock(model_mutex);
      const ScenarioSpec* found = project.find_scenario(name);
      if (!found) throw Error(Errc::not_found, "scenario '" + name + "'");
      spec = *found;
      snap.emplace(project);
    }
    if (body.contains("seed")) spec.seed = body_field<std::uint64_t>(body, "seed");
    if (body.contains("duration")) spec.duration = body_field<double>(body, "duration");
    // Validate now so bad specs fail the request rather than the run.
    auto bound = std::make_shared<BoundScenario>(snap->model, spec);

    RunEntry entry;
    entry.scenario = spec.name;
    entry.seed = spec.seed;
    entry.duration = spec.duration;
    entry.created_at = utc_now();
    json handle;
    {
      std::lock_guard lock(runs_mutex);
      entry.id = "run-" + std::to_string(next_run++);
      handle = handle_json(entry);
      runs.emplace(entry.id, entry);
    }
    const std::string id = entry.id;
    {
      std::lock_guard lock(jobs_mutex);
      jobs.push_back([this, id, bound] {
        {
          std::lock_guard lock(runs_mutex);
          runs.at(id).status = RunStatus::Running;
        }
        try {
          finish(id, run(*bound), {});
        } catch (const std::exception& e) {
          finish(id, std::nullopt, e.what());
        }
      });
    }
    jobs_cv.notify_one();
    res.set_header("Location", "/runs/" + id);
    send_json(res, 202, handle);
  }

  // Looks up a run for read access; answers 404 / 410 itself.
  template <class F>
  void with_run(const httplib::Request& req, httplib::Response& res, F&& f) {
    std::lock_guard lock(runs_mutex);
    auto it = runs.find(req.matches[1].str());
    if (it == runs.end()) {
      send_error(res, 404, "not-found", "run " + req.matches[1].str());
      return;
    }
    f(it->second);
  }

  // A finished run's log, or an error response.
  const SimLog* finished_log(RunEntry& r, httplib::Response& res) {
    if (r.evicted) {
      send_error(res, 410, "gone", "run " + r.id + " was evicted from the log cache");
      return nullptr;
    }
    if (r.status == RunStatus::Failed) {
      send_error(res, 500, "run-failed", r.error);
      return nullptr;
    }
    if (r.status != RunStatus::Done) {
      send_json(res, 409, {{"error", "run-not-finished"}, {"message", "run " + r.id + " is " +
                                                                          std::string(to_string(r.status))}});
      return nullptr;
    }
    return &*r.log;
  }

  // ---- routes --------------------------------------------------------------

  httplib::Server server;

  template <class Handler>
  httplib::Server::Handler guarded(Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes() {
    // Plain address reuse only: a port held by another process must fail to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server.Get("/model", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(model_mutex);
      res.set_header("ETag", etag());
      const std::string accept = req.get_header_value("Accept");
      if (accept.find("application/json") != std::string::npos) {
        send_json(res, 200, to_json(project));
      } else {
        res.set_content(save(project), "application/xml");
      }
    }));

    server.Put("/model", guarded([this](const httplib::Request& req, httplib::Response& res) {
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        const std::string type = req.get_header_value("Content-Type");
        if (type.find("application/json") != std::string::npos) {
          draft = project_from_json(parse_body(req));
        } else {
          draft = load(req.body);
        }
        send_json(out, 200, {{"objects", draft.model.object_count()},
                             {"connections", draft.model.connection_count()},
                             {"scenarios", draft.scenarios.size()}});
      });
    }));

    server.Post("/objects", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = parse_body(req);
      const auto parent = ObjectId{body.contains("parent") ? body_field<std::uint64_t>(body, "parent") : 0};
      const auto kind_text = body_field<std::string>(body, "kind");
      const auto name = body_field<std::string>(body, "name");
      auto kind = parse_object_kind(kind_text);
      if (!kind) throw Error(Errc::invalid_argument, "unknown object kind '" + kind_text + "'");
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        ObjectId id = draft.model.add_object(parent, *kind, name);
        send_json(out, 201, object_json(draft.model, id));
      });
    }));

    server.Post(R"(/objects/(\d+)/interfaces)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const ObjectId owner{path_id(req)};
      const auto name = body_field<std::string>(parse_body(req), "name");
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        InterfaceId iid = draft.model.add_interface(owner, name);
        send_json(out, 201, {{"id", iid.value}, {"owner", owner.value}, {"name", name}});
      });
    }));

    server.Post(R"(/objects/(\d+)/copy)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const ObjectId source{path_id(req)};
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        CopyResult copy = draft.copy_subtree(source);
        json objects = json::array();
        for (const auto& [from, to] : copy.objects) objects.push_back(to.value);
        std::sort(objects.begin(), objects.end());
        json connections = json::array();
        for (ConnectionId c : copy.connections) connections.push_back(c.value);
        send_json(out, 201, {{"root", object_json(draft.model, copy.root)},
                             {"objects", objects},
                             {"connections", connections}});
      });
    }));

    server.Delete(R"(/objects/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const ObjectId id{path_id(req)};
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        if (id == kRootId) throw Error(Errc::invalid_argument, "the model root cannot be removed");
        if (!draft.model.contains(id)) throw Error(Errc::not_found, "object " + id.str());
        draft.remove_object(id);
        out.status = 204;
      });
    }));

    server.Post("/connections", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = parse_body(req);
      const InterfaceId a{body_field<std::uint64_t>(body, "a_interface")};
      const InterfaceId b{body_field<std::uint64_t>(body, "b_interface")};
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        ConnectionId cid = draft.model.connect(a, b);
        send_json(out, 201, {{"id", cid.value}, {"a_interface", a.value}, {"b_interface", b.value}});
      });
    }));

    server.Delete(R"(/connections/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const ConnectionId id{path_id(req)};
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        draft.model.disconnect(id);
        out.status = 204;
      });
    }));

    server.Get("/scenarios", guarded([this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(model_mutex);
      json list = json::array();
      for (const auto& s : project.scenarios) list.push_back(to_json(s));
      send_json(res, 200, list);
    }));

    server.Put(R"(/scenarios/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = parse_body(req);
      if (body.is_object()) body["name"] = req.matches[1].str();
      ScenarioSpec spec = scenario_from_json(body);
      mutate(req, res, [&](Project& draft, httplib::Response& out) {
        tnm::bind(draft.model, spec);
        if (ScenarioSpec* existing = draft.find_scenario(spec.name)) {
          *existing = spec;
          send_json(out, 200, to_json(spec));
        } else {
          draft.scenarios.push_back(spec);
          send_json(out, 201, to_json(spec));
        }
      });
    }));

    server.Post("/runs", guarded([this](const httplib::Request& req, httplib::Response& res) { start_run(req, res); }));

    server.Get(R"(/runs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      with_run(req, res, [&](RunEntry& r) { send_json(res, 200, handle_json(r)); });
    }));

    server.Get(R"(/runs/([^/]+)/summary)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      with_run(req, res, [&](RunEntry& r) {
        if (const SimLog* log = finished_log(r, res)) send_json(res, 200, to_json(summarize(*log)));
      });
    }));

    server.Get(R"(/runs/([^/]+)/log)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string format_text = req.has_param("format") ? req.get_param_value("format") : "jsonl";
      auto format = parse_log_format(format_text);
      if (!format) throw Error(Errc::parse_error, "format must be csv or jsonl");
      with_run(req, res, [&](RunEntry& r) {
        if (const SimLog* log = finished_log(r, res)) {
          res.status = 200;
          res.set_content(export_log(*log, *format), *format == LogFormat::Csv ? "text/csv" : "application/x-ndjson");
        }
      });
    }));
  }
};

ApiService::ApiService(Project project) : ApiService(std::move(project), Options{}) {}

ApiService::ApiService(Project project, Options options)
    : impl_(std::make_unique<Impl>(std::move(project), options)) {}

ApiService::~ApiService() = default;

bool ApiService::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

int ApiService::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

void ApiService::listen() {
  if (impl_->start_listening()) impl_->server.listen_after_bind();
}

void ApiService::stop() { impl_->stop_server(); }

Project ApiService::snapshot() const {
  std::lock_guard lock(impl_->model_mutex);
  return impl_->project;
}

std::uint64_t ApiService::version() const {
  std::lock_guard lock(impl_->model_mutex);
  return impl_->version;
}

}  // namespace tnm
