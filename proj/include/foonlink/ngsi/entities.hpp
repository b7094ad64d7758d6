#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "foonlink/error.hpp"
#include "foonlink/foon/types.hpp"
#include "foonlink/kb/industrial.hpp"
#include "foonlink/recognition/matcher.hpp"
#include "foonlink/text.hpp"

namespace foonlink::ngsi {

using Clock = std::chrono::system_clock;
using Timestamp = std::chrono::time_point<Clock, std::chrono::milliseconds>;

inline constexpr std::string_view kDefaultContext =
    "https://raw.githubusercontent.com/shop4cf/data-models/master/docs/shop4cfcontext.jsonld";

struct TaskEntity {
  std::string id;
  std::vector<std::string> involves;  // Resource URNs
  std::string is_defined_by;
  std::string status = "completed";
  Timestamp observed_at{};

  static constexpr std::string_view type = "Task";

  friend bool operator==(const TaskEntity&, const TaskEntity&) = default;
};

struct ResourceEntity {
  std::string id;
  std::string type = "Material";  // Material or Device
  std::vector<StateDescriptor> state;
  Timestamp observed_at{};

  friend bool operator==(const ResourceEntity&, const ResourceEntity&) = default;
};

/// Which side of the functional unit feeds the Resource list.
enum class ObjectSelection { outputs, inputs };

struct MappingOptions {
  std::string run_id = "run-0";
  Timestamp stream_epoch{};  // wall-clock time of stream t = 0
  ObjectSelection selection = ObjectSelection::outputs;
};

inline std::string task_urn(std::string_view subgraph, std::size_t unit_index, std::string_view run_id) {
  return "urn:ngsi-ld:Task:" + std::string(subgraph) + ":" + std::to_string(unit_index) + ":" + std::string(run_id);
}

inline std::string resource_type_for(std::string_view label) {
  if (const auto* part = kb::find_part(label)) return std::string(kb::to_string(part->resource_type));
  return "Material";
}

inline std::string resource_urn(std::string_view label, std::string_view run_id) {
  return "urn:ngsi-ld:" + resource_type_for(label) + ":" + text::slug(label) + ":" + std::string(run_id);
}

/// Sequential functional-unit ID used as the Task's isDefinedBy value.
inline std::string unit_definition_id(std::string_view subgraph, std::size_t unit_index) {
  return "foon:" + std::string(subgraph) + "#unit/" + std::to_string(unit_index);
}

// `name[:related]` entries joined with ';'. State names and labels containing
// ':' or ';' do not survive the round trip.
inline std::string encode_state(const std::vector<StateDescriptor>& states) {
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) out += ';';
    out += states[i].name;
    if (states[i].related_object) out += ":" + *states[i].related_object;
  }
  return out;
}

inline std::vector<StateDescriptor> decode_state(std::string_view value) {
  std::vector<StateDescriptor> out;
  if (value.empty()) return out;
  for (auto part : text::split(value, ';')) {
    auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      out.push_back({std::string(part), std::nullopt});
    } else {
      out.push_back({std::string(part.substr(0, colon)), std::string(part.substr(colon + 1))});
    }
  }
  return out;
}

inline Timestamp observation_time(Timestamp epoch, double t_seconds) {
  return epoch + std::chrono::milliseconds(static_cast<long long>(std::llround(t_seconds * 1000.0)));
}

inline std::string format_time(Timestamp ts) {
  auto ms = ts.time_since_epoch().count();
  auto secs = static_cast<std::time_t>(ms >= 0 ? ms / 1000 : (ms - 999) / 1000);
  auto frac = static_cast<int>(ms - static_cast<long long>(secs) * 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

inline std::optional<Timestamp> parse_time(std::string_view s) {
  int y, mo, d, h, mi, sec, ms = 0;
  std::string str(s);
  int n = std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &y, &mo, &d, &h, &mi, &sec, &ms);
  if (n < 6) return std::nullopt;
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = sec;
  auto secs = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<long long>(secs) * 1000 + ms));
}

/// FOON2ont: one Task for the recognized unit and one Resource per object of
/// the selected side, each Resource carrying that object's state.
inline std::pair<TaskEntity, std::vector<ResourceEntity>> foon2ont(const recognition::RecognizedUnit& predicted,
                                                                   const Subgraph& foon,
                                                                   const MappingOptions& opt = {}) {
  if (predicted.unit.subgraph != foon.name || predicted.unit.unit_index >= foon.units.size())
    throw UnresolvedUnit("unit " + unit_definition_id(predicted.unit.subgraph, predicted.unit.unit_index) +
                         " does not exist in subgraph '" + foon.name + "'");
  const auto& unit = foon.units[predicted.unit.unit_index];
  const auto when = observation_time(opt.stream_epoch, predicted.t_end);

  std::vector<ResourceEntity> resources;
  TaskEntity task;
  task.id = task_urn(foon.name, unit.unit_index, opt.run_id);
  task.observed_at = when;
  const auto& objects = opt.selection == ObjectSelection::outputs ? unit.outputs : unit.inputs;
  for (const auto& obj : objects) {
    ResourceEntity r;
    r.id = resource_urn(obj.label, opt.run_id);
    r.type = resource_type_for(obj.label);
    r.state = obj.states;
    r.observed_at = when;
    resources.push_back(std::move(r));
    task.involves.push_back(resource_urn(obj.label, opt.run_id));
  }
  task.is_defined_by = unit_definition_id(foon.name, unit.unit_index);
  return {std::move(task), std::move(resources)};
}

// --- JSON-LD wire form -----------------------------------------------------

inline nlohmann::ordered_json property(nlohmann::ordered_json value, std::optional<Timestamp> observed = std::nullopt) {
  nlohmann::ordered_json p;
  p["type"] = "Property";
  p["value"] = std::move(value);
  if (observed) p["observedAt"] = format_time(*observed);
  return p;
}

inline nlohmann::ordered_json relationship(const std::string& object, std::optional<std::string> dataset = std::nullopt) {
  nlohmann::ordered_json r;
  r["type"] = "Relationship";
  r["object"] = object;
  if (dataset) r["datasetId"] = *dataset;
  return r;
}

inline nlohmann::ordered_json context_array(std::string_view context_url) {
  return nlohmann::ordered_json::array({std::string(context_url)});
}

/// Task body. `involves` is a multi-attribute: one Relationship instance per
/// resource, told apart by datasetId. It is omitted when there are no objects.
inline nlohmann::ordered_json serialize_entity(const TaskEntity& t, std::string_view context_url = kDefaultContext) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["type"] = std::string(TaskEntity::type);
  if (!t.involves.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.involves.size(); ++i)
      arr.push_back(relationship(t.involves[i], "urn:ngsi-ld:Dataset:involves:" + std::to_string(i)));
    j["involves"] = std::move(arr);
  }
  j["isDefinedBy"] = property(t.is_defined_by);
  j["status"] = property(t.status, t.observed_at);
  j["@context"] = context_array(context_url);
  return j;
}

inline nlohmann::ordered_json serialize_entity(const ResourceEntity& r, std::string_view context_url = kDefaultContext) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["type"] = r.type;
  j["state"] = property(encode_state(r.state), r.observed_at);
  j["@context"] = context_array(context_url);
  return j;
}

namespace detail {

inline std::optional<Timestamp> observed(const nlohmann::json& attr) {
  if (auto it = attr.find("observedAt"); it != attr.end() && it->is_string()) return parse_time(it->get<std::string>());
  return std::nullopt;
}

inline const nlohmann::json& attribute(const nlohmann::json& j, const char* name, const char* type) {
  const auto& a = j.at(name);
  if (!a.is_object() || a.value("type", "") != type)
    throw Error(std::string("attribute '") + name + "' is not a " + type);
  return a;
}

}  // namespace detail

inline TaskEntity parse_task_entity(const nlohmann::json& j) {
  if (j.at("type") != "Task") throw Error("entity is not a Task");
  TaskEntity t;
  t.id = j.at("id").get<std::string>();
  if (auto it = j.find("involves"); it != j.end()) {
    auto one = [&](const nlohmann::json& a) {
      if (!a.is_object() || a.value("type", "") != "Relationship") throw Error("involves entry is not a Relationship");
      t.involves.push_back(a.at("object").get<std::string>());
    };
    if (it->is_array()) {
      for (const auto& a : *it) one(a);
    } else {
      one(*it);
    }
  }
  t.is_defined_by = detail::attribute(j, "isDefinedBy", "Property").at("value").get<std::string>();
  const auto& st = detail::attribute(j, "status", "Property");
  t.status = st.at("value").get<std::string>();
  t.observed_at = detail::observed(st).value_or(Timestamp{});
  return t;
}

inline ResourceEntity parse_resource_entity(const nlohmann::json& j) {
  ResourceEntity r;
  r.id = j.at("id").get<std::string>();
  r.type = j.at("type").get<std::string>();
  const auto& st = detail::attribute(j, "state", "Property");
  r.state = decode_state(st.at("value").get<std::string>());
  r.observed_at = detail::observed(st).value_or(Timestamp{});
  return r;
}

}  // namespace foonlink::ngsi
