#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "foonlink/error.hpp"
#include "foonlink/ngsi/entities.hpp"
#include "foonlink/ngsi/http.hpp"

namespace foonlink::ngsi {

inline constexpr std::string_view kEntitiesPath = "/ngsi-ld/v1/entities";
inline constexpr std::string_view kUpsertPath = "/ngsi-ld/v1/entityOperations/upsert";
inline constexpr std::string_view kLdJson = "application/ld+json";

struct BrokerConfig {
  std::string base_url;
  std::string context_url = std::string(kDefaultContext);
  double timeout = 10.0;  // seconds
  int retries = 3;
  double backoff_base = 0.5;  // seconds; retry n waits base * 2^(n-1)
  std::string run_id = "run-0";
  std::optional<std::string> bearer_token;
  bool batch_upsert = false;

  /// Defaults overridden by FOON_BROKER_URL / FOON_CONTEXT_URL when set.
  static BrokerConfig from_env() {
    BrokerConfig c;
    if (const char* u = std::getenv("FOON_BROKER_URL"); u && *u) c.base_url = u;
    if (const char* u = std::getenv("FOON_CONTEXT_URL"); u && *u) c.context_url = u;
    return c;
  }

  void check() const {
    if (base_url.empty()) throw std::invalid_argument("broker base_url is empty");
    if (retries < 0) throw std::invalid_argument("retries must be >= 0");
  }
};

enum class Outcome { created, updated };

inline std::string_view to_string(Outcome o) { return o == Outcome::created ? "created" : "updated"; }

struct EntityReceipt {
  std::string id;
  std::string type;
  Outcome outcome = Outcome::created;
  int status = 0;  // status of the final request for this entity
  int attempts = 0;
};

struct PublishReceipt {
  std::vector<EntityReceipt> entities;

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entities) {
      nlohmann::ordered_json j;
      j["id"] = e.id;
      j["type"] = e.type;
      j["outcome"] = std::string(ngsi::to_string(e.outcome));
      j["status"] = e.status;
      j["attempts"] = e.attempts;
      arr.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"entities", std::move(arr)}};
  }
};

class BrokerUnreachable : public Error {
 public:
  BrokerUnreachable(const std::string& what, int attempts) : Error(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class BrokerRejected : public Error {
 public:
  BrokerRejected(int status, std::string body, const std::string& entity)
      : Error("broker rejected " + entity + " with HTTP " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class PartialPublish : public Error {
 public:
  PartialPublish(PublishReceipt succeeded, std::vector<std::string> failed, const std::string& cause)
      : Error("partial publish: " + std::to_string(succeeded.entities.size()) + " succeeded, " +
              std::to_string(failed.size()) + " failed (" + cause + ")"),
        succeeded_(std::move(succeeded)),
        failed_(std::move(failed)) {}
  const PublishReceipt& succeeded() const noexcept { return succeeded_; }
  const std::vector<std::string>& failed() const noexcept { return failed_; }

 private:
  PublishReceipt succeeded_;
  std::vector<std::string> failed_;
};

/// cpp-httplib backed transport. Each request uses its own connection, so one
/// instance can serve concurrent publishers.
class HttplibTransport final : public Transport {
 public:
  HttplibTransport(const std::string& base_url, double timeout_s, std::optional<std::string> bearer = {})
      : timeout_(timeout_s), bearer_(std::move(bearer)) {
    auto scheme = base_url.find("://");
    auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    auto slash = base_url.find('/', host_start);
    origin_ = base_url.substr(0, slash);
    if (slash != std::string::npos) prefix_ = base_url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  HttpResponse send(const HttpRequest& req) override {
    httplib::Client cli(origin_);
    cli.set_url_encode(false);
    auto secs = static_cast<time_t>(timeout_);
    auto usecs = static_cast<time_t>((timeout_ - std::floor(timeout_)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    for (const auto& [k, v] : req.headers)
      if (k != "Content-Type") headers.emplace(k, v);
    if (bearer_) headers.emplace("Authorization", "Bearer " + *bearer_);
    auto ct_it = req.headers.find("Content-Type");
    const std::string ct = ct_it == req.headers.end() ? std::string(kLdJson) : ct_it->second;
    const std::string target = prefix_ + req.target;

    httplib::Result res;
    if (req.method == "GET") {
      res = cli.Get(target, headers);
    } else if (req.method == "POST") {
      res = cli.Post(target, headers, req.body, ct);
    } else if (req.method == "PATCH") {
      res = cli.Patch(target, headers, req.body, ct);
    } else if (req.method == "DELETE") {
      res = cli.Delete(target, headers);
    } else {
      throw std::invalid_argument("unsupported method " + req.method);
    }
    if (!res) throw TransportError(origin_ + ": " + httplib::to_string(res.error()));
    HttpResponse out{res->status, res->body, {}};
    for (const auto& [k, v] : res->headers) out.headers[k] = v;
    return out;
  }

 private:
  std::string origin_;
  std::string prefix_;
  double timeout_;
  std::optional<std::string> bearer_;
};

/// Publishes FOON2ont output to an NGSI-LD broker.
class BrokerClient {
 public:
  BrokerClient(BrokerConfig cfg, std::shared_ptr<Transport> transport)
      : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (cfg_.retries < 0) throw std::invalid_argument("retries must be >= 0");
  }

  explicit BrokerClient(BrokerConfig cfg)
      : BrokerClient(cfg, std::make_shared<HttplibTransport>((cfg.check(), cfg.base_url), cfg.timeout, cfg.bearer_token)) {}

  const BrokerConfig& config() const { return cfg_; }

  /// Resources first, then the task. A create that reports 409 becomes an
  /// attribute patch, so republishing the same run updates in place.
  PublishReceipt publish(const TaskEntity& task, const std::vector<ResourceEntity>& resources) const {
    std::vector<std::pair<std::string, nlohmann::ordered_json>> bodies;
    for (const auto& r : resources) bodies.emplace_back(r.type, serialize_entity(r, cfg_.context_url));
    bodies.emplace_back(std::string(TaskEntity::type), serialize_entity(task, cfg_.context_url));

    PublishReceipt receipt;
    if (cfg_.batch_upsert) {
      std::vector<nlohmann::ordered_json> res_bodies;
      for (std::size_t i = 0; i + 1 < bodies.size(); ++i) res_bodies.push_back(bodies[i].second);
      run_step(receipt, bodies, 0, [&] { return upsert(res_bodies); });
      run_step(receipt, bodies, res_bodies.size(), [&] { return upsert({bodies.back().second}); });
      return receipt;
    }
    for (std::size_t i = 0; i < bodies.size(); ++i)
      run_step(receipt, bodies, i, [&] { return std::vector<EntityReceipt>{create_or_update(bodies[i].second)}; });
    return receipt;
  }

  std::vector<nlohmann::json> query(const std::string& type) const {
    auto res = send({"GET", std::string(kEntitiesPath) + "?type=" + percent_encode(type), "", {{"Accept", "application/ld+json"}}});
    if (res.status != 200) throw BrokerRejected(res.status, res.body, "query type=" + type);
    auto j = nlohmann::json::parse(res.body);
    return {j.begin(), j.end()};
  }

  std::optional<nlohmann::json> fetch(const std::string& id) const {
    auto res = send({"GET", std::string(kEntitiesPath) + "/" + percent_encode(id), "", {{"Accept", "application/ld+json"}}});
    if (res.status == 404) return std::nullopt;
    if (res.status != 200) throw BrokerRejected(res.status, res.body, id);
    return nlohmann::json::parse(res.body);
  }

 private:
  struct Sent {
    HttpResponse response;
    int attempts;
  };

  // Retries connection failures and 5xx responses.
  Sent send_counted(const HttpRequest& req) const {
    std::string last_error;
    std::optional<HttpResponse> last_5xx;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      if (attempt > 0 && cfg_.backoff_base > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.backoff_base * std::pow(2.0, attempt - 1)));
      try {
        auto res = transport_->send(req);
        if (res.status >= 500) {
          last_5xx = res;
          continue;
        }
        return {res, attempt + 1};
      } catch (const TransportError& e) {
        last_error = e.what();
        last_5xx.reset();
      }
    }
    if (last_5xx) return {*last_5xx, cfg_.retries + 1};
    throw BrokerUnreachable("broker unreachable after " + std::to_string(cfg_.retries + 1) + " attempts: " + last_error,
                            cfg_.retries + 1);
  }

  HttpResponse send(const HttpRequest& req) const { return send_counted(req).response; }

  EntityReceipt create_or_update(const nlohmann::ordered_json& body) const {
    const std::string id = body.at("id").get<std::string>();
    const std::string type = body.at("type").get<std::string>();
    auto created = send_counted({"POST", std::string(kEntitiesPath), body.dump(), {{"Content-Type", std::string(kLdJson)}}});
    if (created.response.status == 201) return {id, type, Outcome::created, 201, created.attempts};
    if (created.response.status != 409) throw BrokerRejected(created.response.status, created.response.body, id);

    auto fragment = body;
    fragment.erase("id");
    fragment.erase("type");
    auto patched = send_counted({"PATCH", std::string(kEntitiesPath) + "/" + percent_encode(id) + "/attrs",
                                 fragment.dump(), {{"Content-Type", std::string(kLdJson)}}});
    if (patched.response.status != 204) throw BrokerRejected(patched.response.status, patched.response.body, id);
    return {id, type, Outcome::updated, 204, created.attempts + patched.attempts};
  }

  std::vector<EntityReceipt> upsert(const std::vector<nlohmann::ordered_json>& entities) const {
    std::vector<EntityReceipt> out;
    if (entities.empty()) return out;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entities) arr.push_back(e);
    auto sent = send_counted({"POST", std::string(kUpsertPath) + "?options=update", arr.dump(),
                              {{"Content-Type", std::string(kLdJson)}}});
    const auto& res = sent.response;
    if (res.status != 201 && res.status != 204) throw BrokerRejected(res.status, res.body, "batch upsert");
    std::vector<std::string> created_ids;
    if (res.status == 201 && !res.body.empty()) created_ids = nlohmann::json::parse(res.body).get<std::vector<std::string>>();
    for (const auto& e : entities) {
      auto id = e.at("id").get<std::string>();
      bool created = std::find(created_ids.begin(), created_ids.end(), id) != created_ids.end();
      out.push_back({id, e.at("type").get<std::string>(), created ? Outcome::created : Outcome::updated, res.status,
                     sent.attempts});
    }
    return out;
  }

  template <typename Step>
  void run_step(PublishReceipt& receipt, const std::vector<std::pair<std::string, nlohmann::ordered_json>>& bodies,
                std::size_t first_pending, Step&& step) const {
    try {
      auto done = step();
      receipt.entities.insert(receipt.entities.end(), done.begin(), done.end());
    } catch (const Error& e) {
      if (receipt.entities.empty()) throw;
      std::vector<std::string> failed;
      for (std::size_t i = first_pending; i < bodies.size(); ++i) failed.push_back(bodies[i].second.at("id").get<std::string>());
      throw PartialPublish(receipt, std::move(failed), e.what());
    }
  }

  BrokerConfig cfg_;
  std::shared_ptr<Transport> transport_;
};

}  // namespace foonlink::ngsi
