#include <gtest/gtest.h>

#include <thread>

#include "foonlink/broker/sim.hpp"

using namespace foonlink;
using foonlink::broker::BrokerSim;
using Json = nlohmann::ordered_json;

namespace {

const std::string kEntities = "/ngsi-ld/v1/entities";

Json material(const std::string& id, const std::string& state) {
  return Json{{"id", id},
              {"type", "Material"},
              {"state", {{"type", "Property"}, {"value", state}}},
              {"@context", Json::array({"https://example.org/ctx.jsonld"})}};
}

ngsi::HttpResponse post(BrokerSim& sim, const Json& body) { return sim.handle({"POST", kEntities, body.dump(), {}}); }

}  // namespace

TEST(BrokerSim, CreateAndConflict) {
  BrokerSim sim;
  auto res = post(sim, material("urn:ngsi-ld:Material:nut:r", "loose"));
  EXPECT_EQ(res.status, 201);
  EXPECT_EQ(res.headers.at("Location"), kEntities + "/urn:ngsi-ld:Material:nut:r");
  EXPECT_EQ(post(sim, material("urn:ngsi-ld:Material:nut:r", "loose")).status, 409);
  EXPECT_EQ(sim.size(), 1u);
}

TEST(BrokerSim, BadRequests) {
  BrokerSim sim;
  EXPECT_EQ(sim.handle({"POST", kEntities, "{not json", {}}).status, 400);
  auto no_id = material("x", "loose");
  no_id.erase("id");
  EXPECT_EQ(post(sim, no_id).status, 400);
  auto no_type = material("x", "loose");
  no_type.erase("type");
  EXPECT_EQ(post(sim, no_type).status, 400);
  auto bad_attr = material("x", "loose");
  bad_attr["state"] = "plain string";
  auto res = post(sim, bad_attr);
  EXPECT_EQ(res.status, 400);
  auto problem = Json::parse(res.body);
  EXPECT_TRUE(problem.contains("type"));
  EXPECT_TRUE(problem.contains("title") || problem.contains("detail"));
  auto bad_rel = material("x", "loose");
  bad_rel["involves"] = {{"type", "Relationship"}};
  EXPECT_EQ(post(sim, bad_rel).status, 400);
  EXPECT_EQ(sim.size(), 0u);
}

TEST(BrokerSim, FetchAndNotFound) {
  BrokerSim sim;
  post(sim, material("urn:a", "loose"));
  auto res = sim.handle({"GET", kEntities + "/urn:a", "", {}});
  ASSERT_EQ(res.status, 200);
  EXPECT_EQ(Json::parse(res.body)["state"]["value"], "loose");
  EXPECT_EQ(sim.handle({"GET", kEntities + "/urn:b", "", {}}).status, 404);
  EXPECT_EQ(sim.handle({"PATCH", kEntities + "/urn:b/attrs", "{}", {}}).status, 404);
  EXPECT_EQ(sim.handle({"GET", "/nowhere", "", {}}).status, 404);
}

TEST(BrokerSim, PercentEncodedIds) {
  BrokerSim sim;
  post(sim, material("urn:ngsi-ld:Material:strut-profile:r", "empty-slot"));
  EXPECT_EQ(sim.handle({"GET", kEntities + "/urn%3Angsi-ld%3AMaterial%3Astrut-profile%3Ar", "", {}}).status, 200);
}

TEST(BrokerSim, PatchMergesAttributes) {
  BrokerSim sim;
  auto e = material("urn:a", "loose");
  e["extra"] = {{"type", "Property"}, {"value", 1}};
  post(sim, e);
  Json fragment{{"state", {{"type", "Property"}, {"value", "secured to:t-bolt"}}},
                {"@context", Json::array({"https://example.org/other.jsonld"})}};
  EXPECT_EQ(sim.handle({"PATCH", kEntities + "/urn:a/attrs", fragment.dump(), {}}).status, 204);
  auto stored = sim.entities().at("urn:a");
  EXPECT_EQ(stored["state"]["value"], "secured to:t-bolt");
  EXPECT_EQ(stored["extra"]["value"], 1);
  EXPECT_EQ(stored["@context"][0], "https://example.org/ctx.jsonld");
}

TEST(BrokerSim, QueryByType) {
  BrokerSim sim;
  post(sim, material("urn:b", "x"));
  post(sim, material("urn:a", "x"));
  Json task{{"id", "urn:t"}, {"type", "Task"}, {"status", {{"type", "Property"}, {"value", "completed"}}}};
  post(sim, task);
  auto res = sim.handle({"GET", kEntities + "?type=Material", "", {}});
  ASSERT_EQ(res.status, 200);
  auto arr = Json::parse(res.body);
  ASSERT_EQ(arr.size(), 2u);
  EXPECT_EQ(arr[0]["id"], "urn:a");
  EXPECT_EQ(arr[1]["id"], "urn:b");
  EXPECT_EQ(Json::parse(sim.handle({"GET", kEntities + "?type=Task", "", {}}).body).size(), 1u);
  EXPECT_EQ(Json::parse(sim.handle({"GET", kEntities, "", {}}).body).size(), 3u);
}

TEST(BrokerSim, Delete) {
  BrokerSim sim;
  post(sim, material("urn:a", "x"));
  EXPECT_EQ(sim.handle({"DELETE", kEntities + "/urn:a", "", {}}).status, 204);
  EXPECT_EQ(sim.handle({"DELETE", kEntities + "/urn:a", "", {}}).status, 404);
}

TEST(BrokerSim, BatchUpsert) {
  BrokerSim sim;
  const std::string target = "/ngsi-ld/v1/entityOperations/upsert?options=update";
  Json batch = Json::array({material("urn:a", "x"), material("urn:b", "y")});
  auto res = sim.handle({"POST", target, batch.dump(), {}});
  ASSERT_EQ(res.status, 201);
  EXPECT_EQ(Json::parse(res.body), Json::array({"urn:a", "urn:b"}));
  EXPECT_EQ(sim.handle({"POST", target, batch.dump(), {}}).status, 204);
  batch.push_back(Json{{"type", "Material"}});
  EXPECT_EQ(sim.handle({"POST", target, batch.dump(), {}}).status, 207);
  EXPECT_EQ(sim.handle({"POST", target, "{}", {}}).status, 400);
}

TEST(BrokerSim, LogRecordsEveryRequestInOrder) {
  BrokerSim sim;
  post(sim, material("urn:a", "x"));
  post(sim, material("urn:a", "x"));
  sim.handle({"GET", kEntities + "/urn:a", "", {}});
  auto log_res = sim.handle({"GET", "/_sim/log", "", {}});
  EXPECT_EQ(log_res.status, 200);
  auto log = sim.log();
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0].status, 201);
  EXPECT_EQ(log[1].status, 409);
  EXPECT_EQ(log[2].method, "GET");
  for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(log[i].seq, i);
  EXPECT_EQ(Json::parse(log_res.body).size(), 3u);
}

TEST(BrokerSim, ReplayReproducesStore) {
  BrokerSim sim;
  post(sim, material("urn:a", "x"));
  post(sim, material("urn:b", "x"));
  sim.handle({"PATCH", kEntities + "/urn:a/attrs", Json{{"state", {{"type", "Property"}, {"value", "z"}}}}.dump(), {}});
  sim.handle({"DELETE", kEntities + "/urn:b", "", {}});
  post(sim, material("urn:c", "x"));
  EXPECT_EQ(BrokerSim::replay(sim.log()), sim.entities());
}

TEST(BrokerSim, ConcurrentCreatesSerialize) {
  BrokerSim sim;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&sim, t] {
      for (int i = 0; i < 50; ++i) post(sim, material("urn:" + std::to_string(i % 25), std::to_string(t)));
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(sim.size(), 25u);
  auto log = sim.log();
  ASSERT_EQ(log.size(), 400u);
  int created = 0;
  for (const auto& e : log) created += e.status == 201;
  EXPECT_EQ(created, 25);
}
