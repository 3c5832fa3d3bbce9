#include "precog/http_api.hpp"

#include "httplib.h"

namespace precog {

using nlohmann::json;

namespace {

HttpResponse error(int status, const std::string& message) { return {status, {{"error", message}}}; }

/// Maps exceptions to status codes: bad JSON and bad input 400, missing things 404.
template <typename F>
HttpResponse guarded(F&& f) {
  try {
    return f();
  } catch (const json::parse_error& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  } catch (const json::exception& e) {
    return error(400, std::string("bad request: ") + e.what());
  } catch (const NotFound& e) {
    return error(404, e.what());
  } catch (const Error& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

json parse_object(const std::string& body) {
  auto j = json::parse(body);
  if (!j.is_object()) throw Error("request body must be a JSON object");
  return j;
}

}  // namespace

Service::Service(ModelStore& store, std::optional<ddl::Validator> validator, ddl::Catalog catalog)
    : store_(store), validator_(std::move(validator)), catalog_(std::move(catalog)) {}

Service::~Service() { wait_idle(); }

void Service::wait_idle() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(jobsMutex_);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

HttpResponse Service::feedback(const std::string& body) const {
  return guarded([&] {
    const auto req = parse_object(body);
    const auto corpus = req.at("corpus").get<std::string>();
    const auto text = req.at("text").get<std::string>();
    return HttpResponse{200, get_feedback(*store_.get(corpus), text)};
  });
}

HttpResponse Service::validate(const std::string& body) const {
  return guarded([&] {
    if (!validator_) return error(503, "no DDL configured");
    const auto req = parse_object(body);
    json violations = json::array();
    for (const auto& v : validator_->validate(req.at("table").get<std::string>(), req.at("record"), catalog_))
      violations.push_back(v.to_json());
    return HttpResponse{200, {{"violations", violations}}};
  });
}

HttpResponse Service::train(const std::string& body) {
  return guarded([&] {
    const auto req = parse_object(body);
    const auto name = req.at("corpus").get<std::string>();
    LabeledCorpus corpus;
    if (req.contains("jsonl")) {
      corpus = parse_corpus_jsonl(req["jsonl"].get<std::string>());
    } else {
      std::string lines;
      for (const auto& d : req.at("documents")) lines += d.dump() + "\n";
      corpus = parse_corpus_jsonl(lines);
    }
    const auto config = TrainConfig::from_json(req.value("params", json::object()));

    std::lock_guard lock(jobsMutex_);
    const std::string id = "job-" + std::to_string(nextJob_++);
    jobs_[id] = {{"job", id}, {"corpus", name}, {"status", "running"}};
    workers_.emplace_back([this, id, name, corpus = std::move(corpus), config] {
      json result;
      try {
        const int version = store_.publish(train_bundle(name, corpus, config));
        result = {{"status", "succeeded"}, {"version", version}, {"bundle", name + "/v" + std::to_string(version)}};
      } catch (const std::exception& e) {
        result = {{"status", "failed"}, {"error", e.what()}};
      }
      std::lock_guard inner(jobsMutex_);
      jobs_[id].update(result);
    });
    return HttpResponse{202, jobs_[id]};
  });
}

HttpResponse Service::job(const std::string& id) const {
  std::lock_guard lock(jobsMutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return error(404, "unknown job " + id);
  return {200, it->second};
}

HttpResponse Service::models() const {
  return guarded([&] { return HttpResponse{200, {{"models", store_.describe()}}}; });
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;
  explicit Impl(Service& s) : service(s) {}
};

HttpServer::HttpServer(Service& service, std::string staticDir) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Post("/feedback", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, impl_->service.feedback(req.body));
  });
  srv.Post("/validate", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, impl_->service.validate(req.body));
  });
  srv.Post("/train", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, impl_->service.train(req.body));
  });
  srv.Get(R"(/jobs/([A-Za-z0-9-]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, impl_->service.job(req.matches[1]));
  });
  srv.Get("/models", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, impl_->service.models());
  });
  if (!staticDir.empty() && !srv.set_mount_point("/", staticDir)) throw Error("static directory not found: " + staticDir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error("could not bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() {
  if (!impl_->server.listen_after_bind()) throw Error("server stopped with an error");
}

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace precog
