#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "foonlink/foon/types.hpp"
#include "foonlink/ngsi/client.hpp"
#include "foonlink/ngsi/entities.hpp"
#include "foonlink/recognition/matcher.hpp"
#include "foonlink/recognition/simulate.hpp"

namespace foonlink::pipeline {

struct RoundtripOptions {
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double fps = 30.0;
  recognition::RecognizerConfig recognizer;
  ngsi::MappingOptions mapping;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RoundtripReport {
  std::vector<std::size_t> expected;
  std::vector<std::size_t> observed;
  std::vector<recognition::RecognizedUnit> units;
  std::vector<ngsi::PublishReceipt> receipts;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }

  std::string summary() const {
    std::ostringstream out;
    for (const auto& c : checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name;
      if (!c.detail.empty()) out << " - " << c.detail;
      out << '\n';
    }
    out << (pass() ? "roundtrip: PASS" : "roundtrip: FAIL") << '\n';
    return out.str();
  }
};

inline std::string format_sequence(const std::vector<std::size_t>& seq) {
  std::string s = "[";
  for (std::size_t i = 0; i < seq.size(); ++i) s += (i ? ", " : "") + std::to_string(seq[i]);
  return s + "]";
}

/// simulate -> recognize -> FOON2ont -> publish, then checks the broker
/// contents against the subgraph.
inline RoundtripReport run_roundtrip(const Subgraph& g, const ngsi::BrokerClient& client, const RoundtripOptions& opt) {
  RoundtripReport rep;
  for (const auto& u : g.units) rep.expected.push_back(u.unit_index);

  recognition::SimulationOptions sim;
  sim.fps = opt.fps;
  sim.noise_sigma = opt.noise_sigma;
  sim.seed = opt.seed;
  sim.k_confirm = opt.recognizer.k_confirm;
  auto frames = recognition::simulate_stream(g, sim);
  rep.units = recognition::recognize_stream(frames, g, opt.recognizer);
  for (const auto& u : rep.units) rep.observed.push_back(u.unit.unit_index);

  for (const auto& u : rep.units) {
    auto [task, resources] = ngsi::foon2ont(u, g, opt.mapping);
    rep.receipts.push_back(client.publish(task, resources));
  }

  rep.checks.push_back({"unit sequence", rep.observed == rep.expected,
                        "expected " + format_sequence(rep.expected) + ", observed " + format_sequence(rep.observed)});

  const std::string& run = opt.mapping.run_id;
  auto ends_with_run = [&](const std::string& id) {
    const std::string suffix = ":" + run;
    return id.size() >= suffix.size() && id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  const std::string task_prefix = "urn:ngsi-ld:Task:" + g.name + ":";

  std::map<std::string, ngsi::TaskEntity> tasks;
  for (const auto& j : client.query("Task")) {
    auto id = j.at("id").get<std::string>();
    if (id.rfind(task_prefix, 0) == 0 && ends_with_run(id)) tasks.emplace(id, ngsi::parse_task_entity(j));
  }
  rep.checks.push_back({"task count", tasks.size() == g.units.size(),
                        std::to_string(tasks.size()) + " Task entities, expected " + std::to_string(g.units.size())});

  std::size_t bad_defs = 0, bad_involves = 0;
  std::set<std::string> labels;
  for (const auto& u : g.units) {
    const auto& objects = opt.mapping.selection == ngsi::ObjectSelection::outputs ? u.outputs : u.inputs;
    for (const auto& o : objects) labels.insert(o.label);
    auto it = tasks.find(ngsi::task_urn(g.name, u.unit_index, run));
    if (it == tasks.end() || it->second.is_defined_by != ngsi::unit_definition_id(g.name, u.unit_index)) ++bad_defs;
    if (it == tasks.end() || it->second.involves.size() != objects.size()) ++bad_involves;
  }
  rep.checks.push_back({"isDefinedBy", bad_defs == 0, std::to_string(bad_defs) + " tasks missing or mismatched"});
  rep.checks.push_back({"involves count", bad_involves == 0,
                        std::to_string(bad_involves) + " tasks whose involves count differs from their unit"});

  std::set<std::string> resources;
  for (const char* type : {"Material", "Device"})
    for (const auto& j : client.query(type)) {
      auto id = j.at("id").get<std::string>();
      if (ends_with_run(id)) resources.insert(id);
    }
  rep.checks.push_back({"resource count", resources.size() == labels.size(),
                        std::to_string(resources.size()) + " Resource entities, expected " + std::to_string(labels.size())});
  return rep;
}

}  // namespace foonlink::pipeline
