#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "kornlab/experiment.hpp"
#include "kornlab/report.hpp"
#include "kornlab/version.hpp"

using namespace kornlab;
using report::json;

TEST_CASE("canonical float rendering is pinned") {
  CHECK(report::canonical_float(1.0) == "1.000000000000e0");
  CHECK(report::canonical_float(0.0) == "0.000000000000e0");
  CHECK(report::canonical_float(-0.0) == "0.000000000000e0");
  CHECK(report::canonical_float(-2.5e-7) == "-2.500000000000e-7");
  CHECK(report::canonical_float(1.5e-5) == "1.500000000000e-5");
  CHECK(report::canonical_float(1.0 / 3.0) == "3.333333333333e-1");
  CHECK(report::canonical_float(-12345.678) == "-1.234567800000e4");
  CHECK(report::canonical_float(6.02e23) == "6.020000000000e23");
  CHECK(report::canonical_float(1e100) == "1.000000000000e100");
  CHECK(report::canonical_float(1e-300) == "1.000000000000e-300");
  CHECK(report::canonical_float(-1.0) == "-1.000000000000e0");
}

TEST_CASE("canonical float refuses non-finite values") {
  double inf = std::numeric_limits<double>::infinity();
  double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(report::canonical_float(inf), std::runtime_error);
  CHECK_THROWS_AS(report::canonical_float(-inf), std::runtime_error);
  CHECK_THROWS_AS(report::canonical_float(nan), std::runtime_error);
}

TEST_CASE("canonical json sorts keys and fixes formatting") {
  json doc;
  doc["zebra"] = 1;
  doc["apple"] = 2.5;
  doc["mid"] = json::array({true, nullptr, "text"});
  CHECK(report::canonical_json(doc) ==
        "{\"apple\":2.500000000000e0,\"mid\":[true,null,\"text\"],"
        "\"zebra\":1}");

  json nested;
  nested["outer"]["b"] = json::array({1, 2});
  nested["outer"]["a"] = false;
  CHECK(report::canonical_json(nested) ==
        "{\"outer\":{\"a\":false,\"b\":[1,2]}}");

  // Integers stay integers; only genuine floating values get the
  // exponent form.
  json ints;
  ints["n"] = 100000;
  ints["neg"] = -7;
  ints["u"] = std::uint64_t(1) << 40;
  CHECK(report::canonical_json(ints) ==
        "{\"n\":100000,\"neg\":-7,\"u\":1099511627776}");
}

TEST_CASE("canonical json escapes strings") {
  json doc;
  doc["k"] = "a\"b\\c\nd\te";
  CHECK(report::canonical_json(doc) == "{\"k\":\"a\\\"b\\\\c\\nd\\te\"}");

  json ctl;
  ctl["c"] = std::string("x\x01y", 3);
  CHECK(report::canonical_json(ctl) == "{\"c\":\"x\\u0001y\"}");
}

TEST_CASE("canonical json survives a parse round trip") {
  json doc;
  doc["floats"] = json::array({0.1, -3.25e-9, 7.0, 1234.5});
  doc["flag"] = true;
  doc["name"] = "round trip";
  doc["nested"]["count"] = 12;
  std::string once = report::canonical_json(doc);
  std::string twice = report::canonical_json(json::parse(once));
  CHECK(once == twice);
}

TEST_CASE("config hash matches a hand-rolled fnv-1a") {
  json cfg;
  cfg["field"] = "bump";
  cfg["s"] = 0.4;
  std::string canon = report::canonical_json(cfg);

  std::uint64_t h = 14695981039346656037ull;
  for (char c : canon) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));

  CHECK(report::config_hash(cfg) == std::string(buf));
  CHECK(report::config_hash(cfg).size() == 16);

  // Key order in the source object must not matter.
  json flipped;
  flipped["s"] = 0.4;
  flipped["field"] = "bump";
  CHECK(report::config_hash(flipped) == report::config_hash(cfg));
}

TEST_CASE("report envelope carries the run metadata") {
  json cfg;
  cfg["radius"] = 2.0;
  json results;
  results["value"] = 1.5;
  json rep = report::make_report("seminorm", cfg, 99, 4, results);

  CHECK(rep["command"] == "seminorm");
  CHECK(rep["config"] == cfg);
  CHECK(rep["config_hash"] == report::config_hash(cfg));
  CHECK(rep["seed"] == 99);
  CHECK(rep["threads"] == 4);
  CHECK(rep["version"] == KORNLAB_VERSION);
  CHECK(rep["results"] == results);
  CHECK(rep.size() == 7);
}

TEST_CASE("csv table emits rfc 4180 bytes") {
  report::CsvTable tab;
  tab.header = {"name", "value"};
  tab.add_row({"plain", "1"});
  tab.add_row({"comma,inside", "2"});
  tab.add_row({"quote \"hi\"", "3"});
  tab.add_row({"line\nbreak", "4"});
  CHECK(tab.serialize() ==
        "name,value\r\n"
        "plain,1\r\n"
        "\"comma,inside\",2\r\n"
        "\"quote \"\"hi\"\"\",3\r\n"
        "\"line\nbreak\",4\r\n");
}

TEST_CASE("csv table rejects ragged rows") {
  report::CsvTable tab;
  tab.header = {"a", "b"};
  CHECK_THROWS_AS(tab.add_row({"only one"}), std::runtime_error);
}

TEST_CASE("write_text_file creates missing directories") {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "kornlab_report_test";
  fs::remove_all(base);
  fs::path target = base / "deep" / "nested" / "out.txt";
  report::write_text_file(target.string(), "payload\n");

  std::ifstream in(target, std::ios::binary);
  std::stringstream got;
  got << in.rdbuf();
  CHECK(got.str() == "payload\n");
  fs::remove_all(base);
}

TEST_CASE("experiment params reject unknown and mistyped fields") {
  using experiment::UsageError;
  using experiment::detail::Params;

  json p;
  p["bogus"] = 1;
  CHECK_THROWS_WITH(Params(p, {"real"}),
                    Catch::Matchers::ContainsSubstring("unknown field"));

  json q;
  q["n"] = "seventeen";
  Params P(q, {"n"});
  CHECK_THROWS_WITH(P.count("n", 23),
                    Catch::Matchers::ContainsSubstring("positive integer"));

  json r;
  r["n"] = 2.5;
  Params R(r, {"n"});
  CHECK_THROWS_AS(R.count("n", 23), UsageError);
}

TEST_CASE("solve and caccioppoli accept disjoint extras") {
  using experiment::UsageError;
  using experiment::detail::Params;

  json field_dump;
  field_dump["write_field"] = true;
  CHECK_NOTHROW(Params(field_dump, experiment::detail::solve_keys(true,
                                                                  false)));
  CHECK_THROWS_AS(Params(field_dump, experiment::detail::solve_keys(false,
                                                                    true)),
                  UsageError);

  json ball;
  ball["plateau"] = 0.3;
  CHECK_NOTHROW(Params(ball, experiment::detail::solve_keys(false, true)));
  CHECK_THROWS_AS(Params(ball, experiment::detail::solve_keys(true, false)),
                  UsageError);
}

TEST_CASE("experiment run validates command and threads") {
  experiment::ExperimentConfig cfg;
  cfg.command = "no-such-command";
  CHECK_THROWS_AS(experiment::run(cfg), experiment::UsageError);

  cfg.command = "seminorm";
  cfg.threads = 0;
  CHECK_THROWS_AS(experiment::run(cfg), experiment::UsageError);
}

TEST_CASE("experiment reports are byte identical across reruns") {
  experiment::ExperimentConfig cfg;
  cfg.command = "seminorm";
  cfg.params["pair_budget"] = 4000;
  cfg.params["lp_budget"] = 2000;
  cfg.seed = 7;

  auto a = experiment::run(cfg);
  auto b = experiment::run(cfg);
  CHECK(report::canonical_json(a.report) == report::canonical_json(b.report));
  CHECK(a.report["results"]["x_p"]["value"].get<double>() > 0.0);
}
