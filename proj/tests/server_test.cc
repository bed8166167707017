#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "json.hpp"
#include "support/synthetic.h"
#include "vague/server.h"

using namespace vague;
using nlohmann::json;

TEST_CASE("api handlers") {
  const auto trace = testing::random_trace(12, 16, 3);
  const ExplorerApi api(trace);

  SUBCASE("meta") {
    const auto r = api.meta();
    CHECK(r.status == 200);
    const auto j = json::parse(r.body);
    CHECK(j["token_count"] == 12);
    CHECK(j["l"] == 16);
    CHECK(j["format_version"] == "VLTRACE1");
    CHECK(j["vague_token_count"] == trace.vague_count());
  }
  SUBCASE("tokens") {
    auto j = json::parse(api.tokens(0, 5).body);
    CHECK(j["tokens"].size() == 5);
    CHECK(j["tokens"][0]["vector"].size() == 16);
    CHECK(j["tokens"][0]["vector"][3].get<float>() == trace.value(0, 3));
    j = json::parse(api.tokens(11, 10).body);
    CHECK(j["tokens"].size() == 1);
    const auto r = api.tokens(12, 1);
    CHECK(r.status == 400);
    CHECK(json::parse(r.body).contains("error"));
  }
  SUBCASE("select") {
    auto j = json::parse(api.select(R"({"phrase":[2,3]})").body);
    CHECK(j["query_dims"] == j["s1"]);
    CHECK(j["tau"] == 0.3);
    CHECK(j["mode"] == "intersection");
    CHECK(j["s1"].get<DimensionSet>() == on_dimensions(trace, {2, 3}, 0.3));
    j = json::parse(api.select(R"({"phrase":[2,3],"context":[0,5],"tau":0.1,"mode":"phrase_only"})").body);
    CHECK(j["tau"] == 0.1);
    CHECK(api.select(R"({"phrase":[2,30]})").status == 400);
    CHECK(api.select(R"({"phrase":[2,3],"context":[3,5]})").status == 400);
    CHECK(api.select("not json").status == 400);
  }
  SUBCASE("select with disjoint sets") {
    const HiddenTrace t({{"a", false, false}, {"b", false, true}}, 2, {0.9f, 0.0f, 0.0f, 0.9f});
    const ExplorerApi a(t);
    const auto j = json::parse(a.select(R"({"phrase":[0,0],"context":[0,1]})").body);
    CHECK(j["query_dims"].empty());
  }
  SUBCASE("match") {
    const std::string body = R"({"query_dims":[1,4],"tau":0.1})";
    const auto a = api.match(body), b = api.match(body);
    CHECK(a.status == 200);
    CHECK(a.body == b.body);
    const auto j = json::parse(a.body);
    MatchOptions opt;
    opt.threshold = 0.1;
    CHECK(j["matches"].size() == find_matches(trace, {1, 4}, opt).size());
    CHECK(j.contains("length_histogram"));
    CHECK(api.match(R"({"query_dims":[]})").status == 400);
    CHECK(api.match(R"({"query_dims":[99]})").status == 400);
    CHECK(api.match(R"({"tau":0.3})").status == 400);
    const auto one = json::parse(api.match(R"({"query_dims":[1],"top_k":1})").body);
    CHECK(one["matches"].size() <= 1);
  }
}

TEST_CASE("live http round trip and bind conflict") {
  const auto trace = testing::random_trace(40, 4, 9);
  const ExplorerApi api(trace);
  ExplorerServer server(api);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/meta");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(json::parse(res->body)["token_count"] == 40);
  res = client.Post("/api/match", R"({"query_dims":[0]})", "application/json");
  REQUIRE(res);
  CHECK(res->body == api.match(R"({"query_dims":[0]})").body);
  res = client.Get("/api/tokens?offset=abc");
  REQUIRE(res);
  CHECK(res->status == 400);

  ExplorerServer second(api);
  CHECK_THROWS_AS(second.bind("127.0.0.1", port), BindError);

  server.stop();
  worker.join();
}
