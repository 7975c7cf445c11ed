#pragma once

#include <string>

#include "geoctx/ragctx.hpp"

namespace geoctx {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Request handlers behind the HTTP service, usable without a socket.
///   POST /query   {"prompt", "k"?, "time"?}  -> query_result_json
///   POST /compute {"op", "a", "b"?, "center"?, "radius_m"?, "speed_mps"?}
///                 with inline FeatureCollections -> result_to_json
///   GET  /healthz -> {"status": "ok", "records": n}
/// Failures answer {"error_code", "message"} with 400 (bad request) or 422.
class QueryService {
 public:
  explicit QueryService(const Engine& engine) : engine_(engine) {}

  HttpReply query(const std::string& body) const;
  HttpReply compute(const std::string& body) const;
  HttpReply healthz() const;

  /// Blocks serving on host:port until the process is stopped.
  /// Throws Error{io_error} when the address cannot be bound.
  void serve(const std::string& host, int port) const;

 private:
  const Engine& engine_;
};

}  // namespace geoctx
