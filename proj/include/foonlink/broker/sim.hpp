#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "foonlink/ngsi/http.hpp"

namespace foonlink::broker {

using ngsi::HttpRequest;
using ngsi::HttpResponse;
using Json = nlohmann::ordered_json;

struct LogEntry {
  std::uint64_t seq = 0;
  std::string method;
  std::string target;
  double at_ms = 0;  // since simulator start
  int status = 0;
  std::string body;  // request body, kept for replay
};

/// NGSI-LD context-broker subset: create, attribute patch, batch upsert,
/// query by type and fetch by id. Every request is serialized through one
/// mutex and appended to the request log in that order.
class BrokerSim {
 public:
  static constexpr std::string_view kEntities = "/ngsi-ld/v1/entities";
  static constexpr std::string_view kUpsert = "/ngsi-ld/v1/entityOperations/upsert";
  static constexpr std::string_view kLog = "/_sim/log";

  HttpResponse handle(const HttpRequest& req) {
    std::lock_guard lock(mu_);
    auto res = dispatch(req);
    if (req.target != kLog) {
      log_.push_back({next_seq_++, req.method, req.target,
                      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started_).count(),
                      res.status, req.body});
    }
    return res;
  }

  std::vector<LogEntry> log() const {
    std::lock_guard lock(mu_);
    return log_;
  }

  std::map<std::string, Json> entities() const {
    std::lock_guard lock(mu_);
    return store_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return store_.size();
  }

  /// Rebuilds a store by re-issuing every logged request.
  static std::map<std::string, Json> replay(const std::vector<LogEntry>& log) {
    BrokerSim sim;
    for (const auto& e : log) sim.handle({e.method, e.target, e.body, {}});
    return sim.entities();
  }

 private:
  static HttpResponse json_response(int status, const Json& j) {
    return {status, j.dump(), {{"Content-Type", "application/ld+json"}}};
  }

  static HttpResponse problem(int status, std::string_view kind, const std::string& detail) {
    Json j;
    j["type"] = "https://uri.etsi.org/ngsi-ld/errors/" + std::string(kind);
    j["title"] = std::string(kind);
    j["detail"] = detail;
    return {status, j.dump(), {{"Content-Type", "application/problem+json"}}};
  }

  static bool reserved(const std::string& key) { return key == "id" || key == "type" || key == "@context"; }

  static std::optional<std::string> attribute_problem(const std::string& name, const Json& a) {
    auto one = [&](const Json& inst) -> std::optional<std::string> {
      if (!inst.is_object()) return "attribute '" + name + "' is not an object";
      auto t = inst.find("type");
      if (t == inst.end() || !t->is_string()) return "attribute '" + name + "' lacks a type";
      const auto type = t->get<std::string>();
      if (type == "Property" || type == "GeoProperty" || type == "LanguageProperty") {
        if (!inst.contains("value")) return "property '" + name + "' lacks a value";
      } else if (type == "Relationship") {
        auto o = inst.find("object");
        if (o == inst.end() || !o->is_string()) return "relationship '" + name + "' lacks an object URI";
      } else {
        return "attribute '" + name + "' has unknown type '" + type + "'";
      }
      return std::nullopt;
    };
    if (a.is_array()) {
      if (a.empty()) return "attribute '" + name + "' is an empty array";
      for (const auto& inst : a)
        if (auto p = one(inst)) return p;
      return std::nullopt;
    }
    return one(a);
  }

  static std::optional<std::string> fragment_problem(const Json& body) {
    if (!body.is_object()) return std::string("body is not a JSON object");
    for (const auto& [k, v] : body.items())
      if (!reserved(k))
        if (auto p = attribute_problem(k, v)) return p;
    return std::nullopt;
  }

  static std::optional<std::string> entity_problem(const Json& body) {
    if (!body.is_object()) return std::string("body is not a JSON object");
    auto id = body.find("id");
    if (id == body.end() || !id->is_string() || id->get<std::string>().empty()) return std::string("missing entity id");
    auto type = body.find("type");
    if (type == body.end() || !type->is_string() || type->get<std::string>().empty()) return std::string("missing entity type");
    return fragment_problem(body);
  }

  static void merge_attrs(Json& entity, const Json& fragment) {
    for (const auto& [k, v] : fragment.items()) {
      if (reserved(k)) continue;
      auto it = entity.find(k);
      if (it != entity.end() && it->is_object() && v.is_object()) {
        it->merge_patch(v);
      } else {
        entity[k] = v;
      }
    }
  }

  HttpResponse dispatch(const HttpRequest& req) {
    auto qpos = req.target.find('?');
    const std::string path = ngsi::percent_decode(req.target.substr(0, qpos));
    const auto query = ngsi::parse_query(qpos == std::string::npos ? "" : std::string_view(req.target).substr(qpos + 1));

    if (path == kLog && req.method == "GET") return log_response();
    if (path == kUpsert && req.method == "POST") return upsert(req.body, query);
    if (path == kEntities) {
      if (req.method == "POST") return create(req.body);
      if (req.method == "GET") return list(query);
      return problem(405, "MethodNotAllowed", req.method + " " + path);
    }
    const std::string prefix = std::string(kEntities) + "/";
    if (path.rfind(prefix, 0) == 0) {
      auto rest = path.substr(prefix.size());
      constexpr std::string_view attrs = "/attrs";
      if (rest.size() > attrs.size() && rest.compare(rest.size() - attrs.size(), attrs.size(), attrs) == 0) {
        if (req.method == "PATCH") return patch_attrs(rest.substr(0, rest.size() - attrs.size()), req.body);
        return problem(405, "MethodNotAllowed", req.method + " " + path);
      }
      if (req.method == "GET") return fetch(rest);
      if (req.method == "DELETE") {
        if (store_.erase(rest) == 0) return problem(404, "ResourceNotFound", rest);
        return {204, "", {}};
      }
      return problem(405, "MethodNotAllowed", req.method + " " + path);
    }
    return problem(404, "ResourceNotFound", path);
  }

  HttpResponse create(const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) return problem(400, "InvalidRequest", "body is not valid JSON");
    if (auto p = entity_problem(j)) return problem(400, "BadRequestData", *p);
    auto id = j["id"].get<std::string>();
    if (store_.count(id)) return problem(409, "AlreadyExists", id);
    store_.emplace(id, std::move(j));
    return {201, "", {{"Location", std::string(kEntities) + "/" + ngsi::percent_encode(id)}}};
  }

  HttpResponse patch_attrs(const std::string& id, const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) return problem(400, "InvalidRequest", "body is not valid JSON");
    if (auto p = fragment_problem(j)) return problem(400, "BadRequestData", *p);
    auto it = store_.find(id);
    if (it == store_.end()) return problem(404, "ResourceNotFound", id);
    merge_attrs(it->second, j);
    return {204, "", {}};
  }

  HttpResponse upsert(const std::string& body, const std::map<std::string, std::string>& query) {
    Json arr = Json::parse(body, nullptr, false);
    if (arr.is_discarded() || !arr.is_array()) return problem(400, "InvalidRequest", "body must be a JSON array");
    const bool update = query.count("options") && query.at("options") == "update";
    Json created = Json::array();
    Json errors = Json::array();
    Json success = Json::array();
    for (auto& e : arr) {
      if (auto p = entity_problem(e)) {
        Json err;
        err["entityId"] = e.is_object() && e.contains("id") ? e["id"] : Json(nullptr);
        err["error"] = {{"type", "https://uri.etsi.org/ngsi-ld/errors/BadRequestData"}, {"detail", *p}};
        errors.push_back(std::move(err));
        continue;
      }
      auto id = e["id"].get<std::string>();
      auto it = store_.find(id);
      if (it == store_.end()) {
        store_.emplace(id, e);
        created.push_back(id);
      } else if (update) {
        merge_attrs(it->second, e);
      } else {
        it->second = e;
      }
      success.push_back(id);
    }
    if (!errors.empty()) return json_response(207, Json{{"success", success}, {"errors", errors}});
    if (!created.empty()) return json_response(201, created);
    return {204, "", {}};
  }

  HttpResponse list(const std::map<std::string, std::string>& query) const {
    Json out = Json::array();
    auto type = query.find("type");
    for (const auto& [id, e] : store_)
      if (type == query.end() || e.value("type", "") == type->second) out.push_back(e);
    return json_response(200, out);
  }

  HttpResponse fetch(const std::string& id) const {
    auto it = store_.find(id);
    if (it == store_.end()) return problem(404, "ResourceNotFound", id);
    return json_response(200, it->second);
  }

  HttpResponse log_response() const {
    Json out = Json::array();
    for (const auto& e : log_) {
      out.push_back(Json{{"seq", e.seq}, {"method", e.method}, {"path", e.target}, {"at_ms", e.at_ms}, {"status", e.status}});
    }
    return json_response(200, out);
  }

  mutable std::mutex mu_;
  std::map<std::string, Json> store_;
  std::vector<LogEntry> log_;
  std::uint64_t next_seq_ = 0;
  std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();
};

/// Socket-free transport that hands requests straight to a simulator.
class InProcessTransport final : public ngsi::Transport {
 public:
  explicit InProcessTransport(BrokerSim& sim) : sim_(sim) {}
  HttpResponse send(const HttpRequest& req) override { return sim_.handle(req); }

 private:
  BrokerSim& sim_;
};

}  // namespace foonlink::broker
