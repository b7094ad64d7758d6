#pragma once

#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>

#include "foonlink/broker/sim.hpp"

namespace foonlink::broker {

/// Serves a BrokerSim over HTTP on a background thread.
class BrokerSimServer {
 public:
  explicit BrokerSimServer(BrokerSim& sim) : sim_(sim) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest r{req.method, req.target, req.body, {}};
      for (const auto& [k, v] : req.headers) r.headers[k] = v;
      auto out = sim_.handle(r);
      res.status = out.status;
      std::string ct = "application/ld+json";
      for (const auto& [k, v] : out.headers) {
        if (k == "Content-Type") {
          ct = v;
        } else {
          res.set_header(k, v);
        }
      }
      if (!out.body.empty()) res.set_content(out.body, ct);
    };
    server_.Get(".*", handler);
    server_.Post(".*", handler);
    server_.Patch(".*", handler);
    server_.Delete(".*", handler);
  }

  BrokerSimServer(const BrokerSimServer&) = delete;
  BrokerSimServer& operator=(const BrokerSimServer&) = delete;

  ~BrokerSimServer() { stop(); }

  /// Binds and starts serving; port 0 picks a free port. Returns the port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw std::runtime_error("cannot bind broker simulator to " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    host_ = host;
    return port_;
  }

  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw std::runtime_error("cannot bind broker simulator to " + host + ":" + std::to_string(port));
  }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string url() const { return "http://" + host_ + ":" + std::to_string(port_); }

 private:
  BrokerSim& sim_;
  httplib::Server server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
};

}  // namespace foonlink::broker
