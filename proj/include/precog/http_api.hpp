#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "precog/ddl.hpp"
#include "precog/pipeline.hpp"

namespace precog {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// Request handlers, independent of the transport.
class Service {
 public:
  explicit Service(ModelStore& store, std::optional<ddl::Validator> validator = std::nullopt, ddl::Catalog catalog = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// POST /feedback {"corpus": ..., "text": ...}
  HttpResponse feedback(const std::string& body) const;
  /// POST /validate {"table": ..., "record": {...}}
  HttpResponse validate(const std::string& body) const;
  /// POST /train {"corpus": ..., "jsonl": ... | "documents": [...], "params": {...}}; 202 with a job id.
  HttpResponse train(const std::string& body);
  /// GET /jobs/<id>
  HttpResponse job(const std::string& id) const;
  /// GET /models
  HttpResponse models() const;

  /// Blocks until every background training job has finished.
  void wait_idle();

 private:
  ModelStore& store_;
  std::optional<ddl::Validator> validator_;
  ddl::Catalog catalog_;
  mutable std::mutex jobsMutex_;
  std::map<std::string, nlohmann::json> jobs_;
  std::vector<std::thread> workers_;
  int nextJob_ = 1;
};

class HttpServer {
 public:
  explicit HttpServer(Service& service, std::string staticDir = {});
  ~HttpServer();

  /// Binds and returns the port; port 0 picks an ephemeral one.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void start();  // listen() on a background thread
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace precog
