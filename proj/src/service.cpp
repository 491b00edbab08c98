#include "curveot/service.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "content_hash.hpp"
#include "curveot/error.hpp"
#include "curveot/io.hpp"
#include "curveot/json_codec.hpp"

namespace curveot {
namespace fs = std::filesystem;
using Json = nlohmann::json;
namespace codec = curveot::json;

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::string detail;
};

[[noreturn]] void not_found(const std::string& what, const std::string& id) {
  throw HttpError{404, "NotFound", what + " '" + id + "' does not exist", id};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFailure:
    case ErrorCode::PairFailure:
      return 500;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const std::string& detail) {
  send_json(res, {{"code", code}, {"message", message}, {"detail", detail}}, status);
}

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         id.find_first_not_of("0123456789abcdef") == std::string::npos;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json body_json(const httplib::Request& req) {
  if (req.body.empty()) throw HttpError{400, "Parse", "request body is empty", ""};
  return codec::parse(req.body, "request body");
}

std::string query(const httplib::Request& req, const std::string& key, bool required = true) {
  if (!req.has_param(key)) {
    if (required) throw HttpError{400, "MissingParameter", "query parameter '" + key + "' is required", key};
    return {};
  }
  return req.get_param_value(key);
}

PipelineConfig config_from(const Json& j, const std::string& experiment_key = "experiment") {
  if (j.contains(experiment_key) && !j[experiment_key].is_null()) {
    if (!j[experiment_key].is_number_integer()) throw Error(ErrorCode::InvalidConfig, "experiment must be an integer");
    return experiment_preset(j[experiment_key].get<int>());
  }
  if (j.contains("config") && !j["config"].is_null()) return codec::decode_config(j["config"]);
  return PipelineConfig{};
}

PipelineConfig config_from_query(const httplib::Request& req) {
  if (req.has_param("experiment")) {
    try {
      return experiment_preset(std::stoi(req.get_param_value("experiment")));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidConfig, "experiment must be an integer");
    }
  }
  if (req.has_param("config")) return io::parse_config(req.get_param_value("config"));
  return PipelineConfig{};
}

Json sparse(const Matrix& m) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) entries.push_back({i, j, m(i, j)});
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

}  // namespace

std::pair<std::string, int> parse_address(const std::string& text) {
  std::string host = "127.0.0.1";
  std::string port = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  int p = -1;
  try {
    std::size_t used = 0;
    p = std::stoi(port, &used);
    if (used != port.size()) p = -1;
  } catch (const std::logic_error&) {
  }
  if (p < 0 || p > 65535) throw Error(ErrorCode::InvalidConfig, "bad listen address '" + text + "'");
  return {host, p};
}

struct Service::Impl {
  enum class State { Queued, Running, Done, Failed };

  struct Dataset {
    std::string id;
    io::DatasetManifest manifest;
    std::vector<Curve2D> curves;
  };

  struct Job {
    std::string id;
    std::string dataset;
    PipelineConfig config;
    State state = State::Queued;
    std::size_t done = 0;
    std::size_t total = 0;
    Json error;
  };

  Options opt;
  httplib::Server server;
  std::mutex mu;
  std::condition_variable cv;
  std::condition_variable idle_cv;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::deque<std::shared_ptr<Job>> queue;
  std::size_t running = 0;
  bool stopping = false;
  std::vector<std::thread> workers;

  explicit Impl(Options o) : opt(std::move(o)) {
    fs::create_directories(opt.data_dir / "datasets");
    fs::create_directories(opt.data_dir / "jobs");
    fs::create_directories(opt.data_dir / "matrices");
    routes();
    for (unsigned w = 0; w < std::max(1u, opt.workers); ++w) workers.emplace_back([this] { work(); });
  }

  ~Impl() {
    {
      std::lock_guard lock(mu);
      stopping = true;
    }
    cv.notify_all();
    server.stop();
    for (auto& t : workers) t.join();
  }

  static std::string_view state_name(State s) {
    switch (s) {
      case State::Queued:
        return "queued";
      case State::Running:
        return "running";
      case State::Done:
        return "done";
      case State::Failed:
        return "failed";
    }
    return "unknown";
  }

  Json job_json(const Job& job) const {
    Json j{{"id", job.id},
           {"kind", "matrix"},
           {"state", state_name(job.state)},
           {"dataset", job.dataset},
           {"config", codec::encode(job.config)},
           {"progress", {{"done", job.done}, {"total", job.total}}}};
    j["result"] = job.state == State::Done ? Json("/matrices/" + job.id) : Json(nullptr);
    if (job.state == State::Failed) j["error"] = job.error;
    return j;
  }

  // ---- datasets -----------------------------------------------------------

  fs::path dataset_dir(const std::string& id) const { return opt.data_dir / "datasets" / id; }

  std::shared_ptr<const Dataset> find_dataset(const std::string& id) {
    if (!valid_id(id)) not_found("dataset", id);
    {
      std::lock_guard lock(mu);
      if (auto it = datasets.find(id); it != datasets.end()) return it->second;
    }
    const auto manifest_path = dataset_dir(id) / "manifest.json";
    if (!fs::exists(manifest_path)) not_found("dataset", id);
    auto ds = std::make_shared<Dataset>();
    ds->id = id;
    ds->manifest = io::load_manifest(manifest_path);
    ds->curves = io::load_dataset(manifest_path);
    std::lock_guard lock(mu);
    return datasets.try_emplace(id, ds).first->second;
  }

  const Curve2D& find_curve(const Dataset& ds, const std::string& curve) {
    for (const auto& c : ds.curves) {
      if (c.id() == curve) return c;
    }
    not_found("curve", curve);
  }

  std::shared_ptr<const Dataset> store_dataset(std::string name, std::vector<Curve2D> curves) {
    if (curves.empty()) throw HttpError{400, "InvalidDataset", "a dataset needs at least one curve", ""};
    if (curves.size() > opt.max_curves) {
      throw HttpError{400, "PayloadTooLarge",
                      "at most " + std::to_string(opt.max_curves) + " curves per dataset", ""};
    }
    Json canonical{{"name", name}, {"curves", Json::array()}};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const auto& c = curves[i];
      if (c.size() > opt.max_points) {
        throw HttpError{400, "PayloadTooLarge",
                        "curve '" + c.id() + "' has more than " + std::to_string(opt.max_points) + " points", c.id()};
      }
      for (std::size_t k = 0; k < i; ++k) {
        if (curves[k].id() == c.id()) throw Error(ErrorCode::ManifestParse, "duplicate curve id '" + c.id() + "'");
      }
      canonical["curves"].push_back({{"id", c.id()}, {"points", codec::encode_points(c)}});
    }
    const std::string id = detail::content_hash(canonical.dump());
    const fs::path dir = dataset_dir(id);
    if (!fs::exists(dir / "manifest.json")) {
      fs::create_directories(dir / "curves");
      io::DatasetManifest m{std::move(name), {}, utc_now()};
      for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string rel = "curves/" + std::to_string(i) + ".csv";
        io::write_file(dir / rel, io::format_curve_csv(curves[i]));
        m.curves.push_back({curves[i].id(), rel});
      }
      io::write_file(dir / "manifest.json", io::format_manifest(m));
    }
    return find_dataset(id);
  }

  Json dataset_json(const Dataset& ds, bool with_points) const {
    Json curves = Json::array();
    for (const auto& c : ds.curves) {
      Json cj{{"id", c.id()}, {"points", c.size()}};
      if (with_points) cj["coordinates"] = codec::encode_points(c);
      curves.push_back(cj);
    }
    return {{"id", ds.id}, {"name", ds.manifest.name}, {"created", ds.manifest.created}, {"curves", curves}};
  }

  void post_dataset(const httplib::Request& req, httplib::Response& res) {
    std::string name;
    std::vector<Curve2D> curves;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("manifest")) throw HttpError{400, "InvalidDataset", "multipart upload needs a 'manifest' part", ""};
      const auto m = io::parse_manifest(req.get_file_value("manifest").content);
      name = m.name;
      for (const auto& e : m.curves) {
        const httplib::MultipartFormData* part = nullptr;
        for (const auto& [key, f] : req.files) {
          if (key != "manifest" && (f.filename == e.path || key == e.path)) part = &f;
        }
        if (!part) throw Error(ErrorCode::MissingFile, "no uploaded file for '" + e.path + "' (curve '" + e.id + "')");
        curves.push_back(io::parse_curve_csv(part->content, e.id));
      }
    } else {
      const Json j = body_json(req);
      if (!j.is_object() || !j.contains("curves") || !j["curves"].is_array()) {
        throw Error(ErrorCode::ManifestParse, "dataset body needs a 'curves' array");
      }
      name = j.value("name", "dataset");
      for (const auto& cj : j["curves"]) {
        if (!cj.is_object() || !cj.contains("id") || !cj["id"].is_string()) {
          throw Error(ErrorCode::ManifestParse, "every curve needs a string 'id'");
        }
        const std::string id = cj["id"].get<std::string>();
        if (cj.contains("csv")) {
          curves.push_back(io::parse_curve_csv(cj["csv"].get<std::string>(), id));
        } else if (cj.contains("points") && cj["points"].is_array()) {
          std::vector<Point2> pts;
          for (const auto& p : cj["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
              throw Error(ErrorCode::Parse, "curve '" + id + "': points must be [x1, x2] pairs");
            }
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
          }
          curves.push_back(validate_curve(std::move(pts), id));
        } else {
          throw Error(ErrorCode::ManifestParse, "curve '" + id + "' needs 'points' or 'csv'");
        }
      }
    }
    const auto ds = store_dataset(std::move(name), std::move(curves));
    send_json(res, dataset_json(*ds, false), 201);
  }

  // ---- jobs ---------------------------------------------------------------

  fs::path job_path(const std::string& id) const { return opt.data_dir / "jobs" / (id + ".json"); }
  fs::path matrix_path(const std::string& id) const { return opt.data_dir / "matrices" / (id + ".json"); }

  // Terminal jobs from an earlier run, read back from disk.
  std::shared_ptr<Job> load_job(const std::string& id) {
    if (!fs::exists(job_path(id))) return nullptr;
    const Json j = codec::parse(io::read_file(job_path(id)), "job record");
    auto job = std::make_shared<Job>();
    job->id = id;
    job->dataset = j.at("dataset").get<std::string>();
    job->config = codec::decode_config(j.at("config"));
    job->state = j.at("state") == "done" ? State::Done : State::Failed;
    job->done = j.at("progress").at("done").get<std::size_t>();
    job->total = j.at("progress").at("total").get<std::size_t>();
    if (j.contains("error")) job->error = j["error"];
    return job;
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    if (!valid_id(id)) not_found("job", id);
    {
      std::lock_guard lock(mu);
      if (auto it = jobs.find(id); it != jobs.end()) return it->second;
    }
    auto job = load_job(id);
    if (!job) not_found("job", id);
    std::lock_guard lock(mu);
    return jobs.try_emplace(id, job).first->second;
  }

  void post_matrix_job(const httplib::Request& req, httplib::Response& res) {
    const Json j = body_json(req);
    if (!j.is_object() || !j.contains("dataset") || !j["dataset"].is_string()) {
      throw HttpError{400, "InvalidRequest", "body needs a string 'dataset'", "dataset"};
    }
    const auto ds = find_dataset(j["dataset"].get<std::string>());
    PipelineConfig cfg = config_from(j);
    cfg.validate();
    if (cfg.variant == Variant::Partial) {
      throw Error(ErrorCode::InvalidConfig, "distance matrices need the balanced or relaxed variant");
    }
    if (ds->curves.size() < 2) throw Error(ErrorCode::InvalidConfig, "a distance matrix needs at least two curves");
    const std::string id = detail::content_hash("matrix\n" + ds->id + "\n" + codec::encode(cfg).dump());

    std::unique_lock lock(mu);
    auto it = jobs.find(id);
    if (it == jobs.end()) {
      lock.unlock();
      auto loaded = load_job(id);
      lock.lock();
      if (loaded) it = jobs.try_emplace(id, loaded).first;
    }
    if (it != jobs.end() && it->second->state != State::Failed) {
      Json body = job_json(*it->second);
      body["cached"] = true;
      send_json(res, body, 200);
      return;
    }
    if (queue.size() >= opt.queue_capacity) {
      throw HttpError{409, "QueueFull", "the job queue is full; retry later", ""};
    }
    auto job = std::make_shared<Job>();
    job->id = id;
    job->dataset = ds->id;
    job->config = cfg;
    job->total = ds->curves.size() * (ds->curves.size() - 1) / 2;
    jobs[id] = job;
    queue.push_back(job);
    Json body = job_json(*job);
    body["cached"] = false;
    lock.unlock();
    cv.notify_one();
    send_json(res, body, 202);
  }

  void persist_job(const Job& job) {
    Json j = job_json(job);
    io::write_file(job_path(job.id), j.dump(2) + "\n");
  }

  void work() {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        job = queue.front();
        queue.pop_front();
        job->state = State::Running;
        ++running;
      }
      run_job(*job);
      {
        std::lock_guard lock(mu);
        --running;
      }
      idle_cv.notify_all();
    }
  }

  void run_job(Job& job) {
    try {
      const auto ds = find_dataset(job.dataset);
      const auto matrix = pairwise_matrix(ds->curves, job.config, opt.pair_jobs, [&](std::size_t done, std::size_t) {
        std::lock_guard lock(mu);
        job.done = std::max(job.done, done);
      });
      Json out = codec::encode(matrix);
      out["id"] = job.id;
      io::write_file(matrix_path(job.id), out.dump() + "\n");
      std::lock_guard lock(mu);
      job.done = job.total;
      job.state = State::Done;
      persist_job(job);
    } catch (const Error& e) {
      std::lock_guard lock(mu);
      job.state = State::Failed;
      job.error = {{"code", to_string(e.code())}, {"message", e.what()}};
      persist_job(job);
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      job.state = State::Failed;
      job.error = {{"code", "InternalError"}, {"message", e.what()}};
      persist_job(job);
    }
  }

  DistanceMatrix load_result(const std::string& id) {
    const auto job = find_job(id);
    {
      std::lock_guard lock(mu);
      if (job->state == State::Failed) {
        throw HttpError{409, "JobFailed", "job '" + id + "' failed", job->error.value("message", "")};
      }
      if (job->state != State::Done) {
        throw HttpError{409, "JobNotDone", "job '" + id + "' is " + std::string(state_name(job->state)), id};
      }
    }
    Json j = codec::parse(io::read_file(matrix_path(id)), "stored matrix");
    j.erase("id");
    return codec::decode_distance_matrix(j);
  }

  // ---- routes -------------------------------------------------------------

  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.message, e.detail);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), std::string(to_string(e.code())), e.what(), "");
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "Parse", "malformed JSON structure", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "InternalError", e.what(), "");
      }
    };
  }

  void routes() {
    server.Post("/datasets", guarded([this](const auto& req, auto& res) { post_dataset(req, res); }));

    server.Get("/datasets/:id", guarded([this](const auto& req, auto& res) {
                 const auto ds = find_dataset(req.path_params.at("id"));
                 send_json(res, dataset_json(*ds, req.has_param("points") && req.get_param_value("points") != "0"));
               }));

    server.Post("/jobs/matrix", guarded([this](const auto& req, auto& res) { post_matrix_job(req, res); }));

    server.Get("/jobs/:id", guarded([this](const auto& req, auto& res) {
                 const auto job = find_job(req.path_params.at("id"));
                 std::lock_guard lock(mu);
                 send_json(res, job_json(*job));
               }));

    server.Get("/matrices/:id", guarded([this](const auto& req, auto& res) {
                 const std::string id = req.path_params.at("id");
                 const auto m = load_result(id);
                 if (req.has_param("format") && req.get_param_value("format") == "csv") {
                   res.set_content(io::format_matrix_csv(m), "text/csv");
                   return;
                 }
                 Json body = codec::encode(m);
                 body["id"] = id;
                 send_json(res, body);
               }));

    server.Post("/cluster", guarded([this](const auto& req, auto& res) {
                  const Json j = body_json(req);
                  if (!j.is_object()) throw HttpError{400, "InvalidRequest", "body must be a JSON object", ""};
                  DistanceMatrix d;
                  if (j.contains("matrix") && j["matrix"].is_string()) {
                    d = load_result(j["matrix"].get<std::string>());
                  } else if (j.contains("distances")) {
                    d = codec::decode_distance_matrix(j["distances"]);
                  } else {
                    throw HttpError{400, "InvalidRequest", "body needs 'matrix' (id) or 'distances'", "matrix"};
                  }
                  const Linkage linkage = linkage_from_string(j.value("linkage", std::string("average")));
                  const auto dg = hierarchical_cluster(d, linkage);
                  Json body = codec::encode(dg);
                  body["newick"] = to_newick(dg);
                  body["leaf_order"] = leaf_order(dg);
                  if (j.value("svg", false)) body["svg"] = to_svg(dg);
                  send_json(res, body);
                }));

    server.Get("/plan", guarded([this](const auto& req, auto& res) {
                 const auto ds = find_dataset(query(req, "dataset"));
                 const auto& a = find_curve(*ds, query(req, "a"));
                 const auto& b = find_curve(*ds, query(req, "b"));
                 const auto cfg = config_from_query(req);
                 const auto r = run_pair(a, b, cfg);
                 const auto& p = r.prepared;
                 const auto report = dual_feasibility_check(r.plan, r.plan.dual, p.cost, p.beta.weights,
                                                            p.alpha.weights, cfg.variant,
                                                            p.penalties ? &*p.penalties : nullptr);
                 Json body{{"a", a.id()},
                           {"b", b.id()},
                           {"variant", to_string(cfg.variant)},
                           {"objective", r.plan.objective},
                           {"distance", r.distance},
                           {"transported_mass", r.plan.transported_mass},
                           {"coupling", sparse(r.plan.pi)},
                           {"beta", p.beta.weights},
                           {"alpha", p.alpha.weights},
                           {"a_points", codec::encode_points(p.a)},
                           {"b_points", codec::encode_points(p.b)},
                           {"verification", codec::encode(report)}};
                 if (p.penalties) body["penalties"] = codec::encode(*p.penalties);
                 send_json(res, body);
               }));

    server.Get("/schemes/preview", guarded([this](const auto& req, auto& res) {
                 const auto ds = find_dataset(query(req, "dataset"));
                 const auto& c = find_curve(*ds, query(req, "curve"));
                 const WeightScheme scheme = io::parse_scheme_text(query(req, "scheme"));
                 const Curve2D shaped =
                     req.has_param("config") || req.has_param("experiment") ? preprocess(c, config_from_query(req)) : c;
                 const auto m = build_measure(shaped, scheme);
                 Json body{{"curve", c.id()},
                           {"scheme", codec::encode(scheme)},
                           {"weights", m.weights},
                           {"total", m.total},
                           {"points", codec::encode_points(shaped)}};
                 if (is_support_kind(scheme.kind)) {
                   const auto w = resolve_support(shaped, scheme.support.value_or(HeightFraction{kDefaultSupportFraction}));
                   body["support"] = {w.k1, w.k2};
                 }
                 send_json(res, body);
               }));

    if (opt.static_dir) server.set_mount_point("/", opt.static_dir->string());

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) {
        send_error(res, 404, "NotFound", "no resource at '" + req.path + "'", req.path);
      } else {
        send_error(res, res.status, "HttpError", "request failed with status " + std::to_string(res.status), "");
      }
    });
  }
};

Service::Service(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void Service::serve() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::drain() {
  std::unique_lock lock(impl_->mu);
  impl_->idle_cv.wait(lock, [&] { return impl_->queue.empty() && impl_->running == 0; });
}

}  // namespace curveot
