#include "geoctx/service.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "geoctx/error.hpp"
#include "geoctx/geocompute.hpp"

namespace geoctx {

using json = nlohmann::json;

namespace {

HttpReply error_reply(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error_code", code}, {"message", message}}.dump()};
}

HttpReply from_error(const Error& e) {
  const bool bad_request = e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::empty_prompt ||
                           e.code() == ErrorCode::parse_error || e.code() == ErrorCode::invalid_n;
  return error_reply(bad_request ? 400 : 422, error_code_name(e.code()), e.what());
}

json parse_body(const std::string& body) {
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
  return j;
}

}  // namespace

HttpReply QueryService::query(const std::string& body) const {
  try {
    const auto j = parse_body(body);
    if (!j.contains("prompt") || !j["prompt"].is_string()) {
      throw Error(ErrorCode::invalid_argument, "\"prompt\" must be a string");
    }
    std::optional<std::size_t> k;
    if (j.contains("k")) {
      if (!j["k"].is_number_unsigned()) throw Error(ErrorCode::invalid_argument, "\"k\" must be a positive integer");
      k = j["k"].get<std::size_t>();
    }
    std::optional<std::int64_t> time;
    if (j.contains("time")) {
      time = j["time"].is_number_integer() ? j["time"].get<std::int64_t>()
                                           : parse_utc_instant(j["time"].get<std::string>());
    }
    return {200, query_result_json(engine_.query(j["prompt"].get<std::string>(), k, time))};
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return error_reply(400, "invalid_argument", e.what());
  }
}

HttpReply QueryService::compute(const std::string& body) const {
  try {
    const auto j = parse_body(body);
    ComputeRequest req;
    req.op = j.value("op", "");
    if (!j.contains("a")) throw Error(ErrorCode::invalid_argument, "\"a\" must be a FeatureCollection");
    req.a = parse_feature_collection(j["a"].dump());
    if (j.contains("b")) req.b = parse_feature_collection(j["b"].dump());
    if (j.contains("center")) {
      const auto& c = j["center"];
      req.center = GeoPoint::make(c.at("lat").get<double>(), c.at("lon").get<double>());
    }
    if (j.contains("radius_m")) req.radius_m = j["radius_m"].get<double>();
    if (j.contains("speed_mps")) req.speed_mps = j["speed_mps"].get<double>();
    const auto result = run_compute(req, engine_.config().earth_radius_m);
    return {200, result_to_json(result, req.a)};
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return error_reply(400, "invalid_argument", e.what());
  }
}

HttpReply QueryService::healthz() const {
  return {200, json{{"status", "ok"}, {"records", engine_.store().size()}}.dump()};
}

void QueryService::serve(const std::string& host, int port) const {
  httplib::Server server;
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Post("/query", [&](const httplib::Request& req, httplib::Response& res) { send(res, query(req.body)); });
  server.Post("/compute", [&](const httplib::Request& req, httplib::Response& res) { send(res, compute(req.body)); });
  server.Get("/healthz", [&](const httplib::Request&, httplib::Response& res) { send(res, healthz()); });
  if (!server.listen(host, port)) throw Error(ErrorCode::io_error, fmt::format("cannot listen on {}:{}", host, port));
}

}  // namespace geoctx
