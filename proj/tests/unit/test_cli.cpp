#include <doctest.h>

#include "fpl_app/app.hpp"

#include <sstream>

using nlohmann::json;
using namespace fpl::app;

namespace {

struct Outcome
{
  int code;
  json doc;
  std::string text;
  std::string err;
};

Outcome run_with(std::string sub, std::vector<std::string> sets, std::string format = "json", int jobs = 1)
{
  RunOptions o;
  o.subcommand = std::move(sub);
  o.overrides = std::move(sets);
  o.format = std::move(format);
  o.jobs = jobs;
  std::ostringstream out, err;
  const int code = run(o, out, err);
  Outcome r{code, json(), out.str(), err.str()};
  if (o.format == "json" || code != 0)
    r.doc = json::parse(r.text);
  return r;
}

} // namespace

TEST_SUITE("cli")
{
  TEST_CASE("solve produces a report with metadata")
  {
    const auto r = run_with("solve", {"domain=square:8", "n_max_exp=3", "g=1"});
    REQUIRE(r.code == kSuccess);
    CHECK(r.doc["report"]["solve"]["history"].size() == 4);
    CHECK(r.doc["metadata"]["subcommand"] == "solve");
    CHECK(r.doc["metadata"].contains("timestamp"));
    CHECK(r.doc["metadata"].contains("version"));
  }

  TEST_CASE("reports are reproducible")
  {
    const auto a = run_with("solve", {"domain=square:8", "n_max_exp=3", "seed=4"});
    const auto b = run_with("solve", {"domain=square:8", "n_max_exp=3", "seed=4"});
    CHECK(a.doc["report"].dump() == b.doc["report"].dump());
  }

  TEST_CASE("csv history")
  {
    const auto r = run_with("solve", {"domain=square:6", "n_max_exp=2"}, "csv");
    REQUIRE(r.code == kSuccess);
    std::istringstream is(r.text);
    std::string line;
    int lines = 0;
    while (std::getline(is, line))
      ++lines;
    CHECK(lines == 4);
  }

  TEST_CASE("exit codes and error records")
  {
    auto r = run_with("solve", {"p=abc"});
    CHECK(r.code == kConfigError);
    CHECK(r.doc["error"]["key"] == "p");
    CHECK(r.err.find("p") != std::string::npos);

    r = run_with("solve", {"bogus=1"});
    CHECK(r.code == kConfigError);
    CHECK(r.doc["error"]["key"] == "bogus");

    r = run_with("solve", {"delta=1.5", "domain=square:4"});
    CHECK(r.code == kGateViolation);

    r = run_with("solve", {"f=0", "g=0", "domain=square:4"});
    CHECK(r.code == kGateViolation);
    CHECK(r.doc["error"]["type"] == "input_error");

    r = run_with("solve", {"p=1.5", "norm=lt:4", "domain=square:4"});
    CHECK(r.code == kGateViolation);
    CHECK(r.doc["error"]["type"] == "gate_violation");

    r = run_with("solve", {"domain=square:8", "n_max_exp=3", "max_inner_iters=2"});
    CHECK(r.code == kConvergenceFailure);
    CHECK(r.doc["error"].contains("partial"));

    r = run_with("nope", {});
    CHECK(r.code == kConfigError);
  }

  TEST_CASE("sweep covers the grid in order")
  {
    const auto r = run_with("sweep",
                            {"domain=square:8", "sweep_p=2,3", "sweep_delta=0.25,0.5", "restarts=1", "trials=4"}, "json",
                            2);
    REQUIRE(r.code == kSuccess);
    const auto& rows = r.doc["report"]["rows"];
    REQUIRE(rows.size() == 4);
    CHECK(rows[0]["p"] == 2.0);
    CHECK(rows[1]["delta"] == 0.5);
    CHECK(rows[2]["p"] == 3.0);
    for (const auto& row : rows) {
      CHECK(row["converged"] == true);
      CHECK(row["rel_gap"].get<double>() < 0.02);
    }
  }

  TEST_CASE("check-norms")
  {
    const auto r = run_with("check-norms", {"trials=200"});
    CHECK(r.code == kSuccess);
    CHECK(r.doc["report"]["norms"].size() == 5);
    CHECK(r.doc["report"]["passed"] == true);
  }
}
