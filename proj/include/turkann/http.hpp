#pragma once

// HTTP front end for AnnotationService. Endpoints and payloads are
// documented in docs/api.md.

#include <memory>
#include <string>

#include "turkann/service.hpp"

namespace turkann {

class HttpServer {
 public:
  explicit HttpServer(AnnotationService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound
  /// port. Throws std::runtime_error on failure.
  int bind(const std::string& host, int port);

  /// Serves until stop() is called. Requires a prior bind().
  void listen();

  void stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace turkann
