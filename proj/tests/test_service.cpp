#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "anxmap/json_io.hpp"
#include "anxmap/service.hpp"
#include "anxmap/synth.hpp"
#include "support/fixtures.hpp"
#include "support/geo_oracle.hpp"

using namespace anxmap;
using json = nlohmann::ordered_json;

namespace {

std::shared_ptr<const ClassifierModel> synthetic_model() {
  static const auto model = std::make_shared<const ClassifierModel>(
      train(labeled_sequences(synth::generate_corpus({.documents = 1500}, 2), default_pos_filter())));
  return model;
}

struct Fixture {
  std::vector<CorpusRecord> records = synth::generate_corpus({.documents = 400, .boundary_fraction = 0.2}, 31);
  std::shared_ptr<Store> store = std::make_shared<Store>(synthetic_model());
  Service service{store, synthetic_model()};

  Fixture() { store->ingest(records); }
};

json body(const ApiResponse& r) { return json::parse(r.body); }

std::string error_code(const ApiResponse& r) { return body(r)["error"]["code"].get<std::string>(); }

// Runs an HttpServer on a free loopback port for the lifetime of the object.
struct LiveServer {
  HttpServer server;
  int port;
  std::thread thread;

  LiveServer(const Service& service, ServerOptions opts)
      : server(service, [&] {
          opts.host = "127.0.0.1";
          opts.port = 0;
          return opts;
        }()),
        port(server.bind()),
        thread([this] { server.listen(); }) {
    while (!server.running()) std::this_thread::yield();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
};

}  // namespace

TEST_CASE("meta reflects the snapshot") {
  auto model = synthetic_model();
  auto unloaded = std::make_shared<Store>(model);
  CHECK(Service(unloaded, model).meta().status == 503);

  std::istringstream nothing("");
  unloaded->ingest(nothing);
  const auto empty = body(Service(unloaded, model).meta());
  CHECK(empty["record_count"] == 0);
  CHECK(empty["time_min"].is_null());
  CHECK(empty["time_max"].is_null());
  CHECK(empty["global_ratio"].is_null());

  Fixture f;
  const auto meta = body(f.service.meta());
  CHECK(meta["record_count"] == 400);
  const oracle::GeoOracle brute(f.records, *model);
  std::uint64_t anx = 0;
  for (const auto& r : brute.rows) anx += r.anxious;
  CHECK(meta["global_ratio"].get<double>() == static_cast<double>(anx) / 400.0);
  CHECK(meta["zooms"][1]["name"] == "county");
  CHECK(meta["model_config"]["threshold"] == 2.5);
}

TEST_CASE("regions mirror geostore.aggregate") {
  Fixture f;
  const auto snap = f.store->snapshot();
  const QueryParams params{{"from", "2016-06-01T00:00:00Z"}, {"to", "2017-03-01T00:00:00Z"}, {"zoom", "county"}};
  const auto r = f.service.regions(params);
  CHECK(r.status == 200);
  const auto range = TimeRange::make(parse_utc("2016-06-01T00:00:00Z"), parse_utc("2017-03-01T00:00:00Z"));
  CHECK(r.body == json_io::regions(snap->aggregate(range, Zoom::County)).dump());
  CHECK(f.service.regions(params).body == r.body);

  // open range covers the whole store
  const auto all = body(f.service.regions({}));
  std::uint64_t total = 0;
  for (const auto& a : all) total += a["total"].get<std::uint64_t>();
  CHECK(total == 400);

  auto bad = f.service.regions({{"from", "2017-03-01T00:00:00Z"}, {"to", "2017-03-01T00:00:00Z"}});
  CHECK(bad.status == 400);
  CHECK(error_code(bad) == "BadRange");
  bad = f.service.regions({{"zoom", "city"}});
  CHECK(bad.status == 400);
  CHECK(error_code(bad) == "BadZoom");
  bad = f.service.regions({{"from", "yesterday"}});
  CHECK(bad.status == 400);
  CHECK(error_code(bad) == "BadTimestamp");
}

TEST_CASE("tweets mirror geostore.region_messages") {
  Fixture f;
  const auto snap = f.store->snapshot();
  const auto& pick = f.records[7];
  const auto cell = cell_of(pick.lat, pick.lon, Zoom::Province);
  const QueryParams params{{"row", std::to_string(cell.row)}, {"col", std::to_string(cell.col)},
                           {"zoom", "province"}, {"limit", "5"}, {"offset", "1"}};
  const auto r = f.service.tweets(params);
  CHECK(r.status == 200);
  CHECK(r.body == json_io::message_page(snap->region_messages(cell, *snap->full_range(), {}, 1, 5)).dump());
  const auto page = body(r);
  CHECK(page["limit"] == 5);
  CHECK(page["region"] == cell.id());

  const auto word = pick.tokens.front().surface;
  auto filtered = body(f.service.tweets({{"row", std::to_string(cell.row)}, {"col", std::to_string(cell.col)},
                                         {"q", word}}));
  CHECK(filtered["total"].get<std::uint64_t>() >= 1);
  CHECK(filtered["limit"] == kDefaultPageLimit);

  auto over = f.service.tweets({{"row", "37"}, {"col", "127"}, {"limit", "501"}});
  CHECK(over.status == 400);
  CHECK(error_code(over) == "BadPage");
  CHECK(f.service.tweets({{"row", "37"}, {"col", "127"}, {"limit", "500"}}).status == 200);
  CHECK(f.service.tweets({{"row", "37"}, {"col", "127"}, {"offset", "-1"}}).status == 400);
  CHECK(error_code(f.service.tweets({{"row", "37"}})) == "BadCell");
  CHECK(error_code(f.service.tweets({{"row", "a"}, {"col", "1"}})) == "BadCell");

  const auto unknown = body(f.service.tweets({{"row", "-80"}, {"col", "-170"}}));
  CHECK(unknown["total"] == 0);
  CHECK(unknown["messages"].empty());
}

TEST_CASE("wordcloud mirrors geostore.word_cloud") {
  Fixture f;
  const auto snap = f.store->snapshot();
  const auto range = *snap->full_range();
  CHECK(f.service.wordcloud({{"k", "7"}}).body == json_io::word_cloud(snap->word_cloud(std::nullopt, range, 7)).dump());
  CHECK(body(f.service.wordcloud({})).size() == std::min<std::size_t>(kDefaultCloudSize, snap->word_cloud(std::nullopt, range, 1000).size()));
  const auto one = body(f.service.wordcloud({{"k", "1"}}));
  CHECK(one.size() == 1);
  const auto zero = f.service.wordcloud({{"k", "0"}});
  CHECK(zero.status == 400);
  CHECK(body(f.service.wordcloud({{"row", "-80"}, {"col", "-170"}})).empty());
  CHECK(f.service.wordcloud({{"row", "1"}}).status == 400);
}

TEST_CASE("classify endpoint") {
  auto model = std::make_shared<const ClassifierModel>(anxmap::testing::table_model(Smoothing::Off, 1.0));
  auto store = std::make_shared<Store>(model);
  Service service(store, model);

  auto r = service.classify(R"({"tokens":[["w_A","NNG"],["w_B","VV"],["w_D","NNG"]]})");
  CHECK(r.status == 200);
  auto j = body(r);
  CHECK(j["label"] == "Anxiety");
  CHECK(j["ratio"].get<double>() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(j["method"] == "ML-ratio");
  CHECK(r.body == json_io::classification(classify_ratio(*model, anxmap::testing::seq({"w_A", "w_B", "w_D"}), 1.0,
                                                         Smoothing::Off)).dump());

  j = body(service.classify(R"({"tokens":"w_B/VV w_D/NNG w_F/MAG"})"));
  CHECK(j["label"] == "NonAnxiety");

  j = body(service.classify(R"({"tokens":[]})"));
  CHECK(j["label"] == "NonAnxiety");
  CHECK(j["ratio"] == 1.0);

  // text path tags everything NNG, so "w_B" (a VV in the model) is out of vocabulary
  j = body(service.classify(R"({"text":"w_A w_B"})"));
  CHECK(j["ratio"].get<double>() == doctest::Approx(1.5));

  // A+C+E without smoothing zeroes both classes
  j = body(service.classify(R"({"tokens":"w_A/NNG w_C/VA w_E/VV"})"));
  CHECK(j["degenerate"] == true);
  j = body(service.classify(R"({"tokens":"w_A/NNG w_C/VA w_E/VV","smoothing":true})"));
  CHECK(j["label"] == "Anxiety");
  j = body(service.classify(R"({"tokens":"w_E/VV"})"));
  CHECK(j["ratio"] == "Infinity");
  CHECK(j["log_lik"]["NonAnxiety"] == "-Infinity");
  j = body(service.classify(R"({"tokens":"w_A/NNG w_B/VV w_D/NNG","threshold":3.5})"));
  CHECK(j["label"] == "NonAnxiety");

  CHECK(service.classify(R"({"text":"a","tokens":[]})").status == 400);
  CHECK(service.classify(R"({})").status == 400);
  CHECK(service.classify("nope").status == 400);
  CHECK(error_code(service.classify(R"({"tokens":"bad"})")) == "MalformedToken");
  CHECK(service.classify(R"({"tokens":[["a"]]})").status == 400);
  CHECK(service.classify(R"({"text":"a","threshold":-1})").status == 400);
}

TEST_CASE("HTTP front end serves the same bytes") {
  Fixture f;
  const auto ui = std::filesystem::temp_directory_path() / ("anxmap-ui-" + std::to_string(::getpid()));
  std::filesystem::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>dashboard</html>";

  std::atomic<int> logged{0};
  ServerOptions opts;
  opts.cors_origin = "http://localhost:5173";
  opts.ui_dir = ui;
  opts.logger = [&](const std::string&) { ++logged; };
  LiveServer live(f.service, opts);
  httplib::Client client("127.0.0.1", live.port);

  auto res = client.Get("/api/meta");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == f.service.meta().body);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  CHECK(res->get_header_value("Content-Type") == "application/json");

  res = client.Get("/api/regions?zoom=county&from=2016-06-01T00:00:00Z&to=2017-03-01T00:00:00Z");
  REQUIRE(res);
  const QueryParams params{{"from", "2016-06-01T00:00:00Z"}, {"to", "2017-03-01T00:00:00Z"}, {"zoom", "county"}};
  CHECK(res->body == f.service.regions(params).body);
  auto again = client.Get("/api/regions?zoom=county&from=2016-06-01T00:00:00Z&to=2017-03-01T00:00:00Z");
  CHECK(again->body == res->body);

  res = client.Get("/api/regions?zoom=city");
  CHECK(res->status == 400);
  res = client.Get("/api/tweets?row=37&col=127&limit=501");
  CHECK(res->status == 400);
  res = client.Get("/api/wordcloud?k=3");
  CHECK(json::parse(res->body).size() == 3);
  res = client.Post("/api/classify", R"({"text":""})", "application/json");
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["label"] == "NonAnxiety");
  res = client.Get("/api/nothing");
  CHECK(res->status == 404);
  CHECK(json::parse(res->body)["error"]["code"] == "NotFound");

  res = client.Get("/index.html");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "<html>dashboard</html>");
  CHECK(logged.load() >= 9);
  std::filesystem::remove_all(ui);
}

TEST_CASE("readers see whole snapshots while a writer ingests") {
  auto model = synthetic_model();
  auto store = std::make_shared<Store>(model);
  std::istringstream nothing("");
  store->ingest(nothing);
  Service service(store, model);
  const auto batches = synth::generate_corpus({.documents = 2000}, 55);

  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&] {
      std::uint64_t last = 0;
      while (!done) {
        const auto meta = json::parse(service.meta().body);
        const auto n = meta["record_count"].get<std::uint64_t>();
        // batches are 200 records; a reader must never see a partial batch
        if (n % 200 != 0 || n < last) ++bad;
        last = n;
      }
    });
  }
  for (std::size_t i = 0; i < batches.size(); i += 200) {
    store->ingest(std::vector<CorpusRecord>(batches.begin() + i, batches.begin() + i + 200));
  }
  done = true;
  for (auto& t : readers) t.join();
  CHECK(bad.load() == 0);
  CHECK(json::parse(service.meta().body)["record_count"] == 2000);
}

TEST_CASE("bind address parsing") {
  CHECK(parse_bind_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK(parse_bind_address("0.0.0.0:0").second == 0);
  CHECK_THROWS(parse_bind_address("localhost"));
  CHECK_THROWS(parse_bind_address("host:99999"));
}
