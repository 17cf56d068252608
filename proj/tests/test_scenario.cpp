#include <doctest.h>

#include <string>

#include "helpers.hpp"
#include "humanet/runner.hpp"
#include "humanet/scenario.hpp"

using namespace humanet;
using namespace humanet::test;

namespace {

std::string fixture(const std::string& name) {
    return std::string(HUMANET_SCENARIO_DIR) + "/" + name;
}

std::string validationMessage(const std::string& text) {
    try {
        Scenario s = parseScenario(text, "inline");
        validateScenario(s);
    } catch (const Error& e) {
        CHECK(e.code() == Err::ValidationError);
        return e.what();
    }
    return "";
}

const char* kTinyHeader = "humanet-scenario v1\nname tiny\nduration 10\nradio_range 1.2\n";

} // namespace

TEST_CASE("the bundled four-node scenario loads and cross-checks") {
    Scenario s = loadScenario(fixture("fig5.scenario"));
    CHECK(s.nodes.size() == 4);
    CHECK(s.radioRange == doctest::Approx(1.2));
    CHECK(s.events.size() == 4);
    CHECK(s.displayName(0) == "N1");
}

TEST_CASE("an event past the duration is rejected with its line") {
    std::string msg = validationMessage(std::string(kTinyHeader) +
                                        "node 0 0 0\n"
                                        "at 99 start_service 0 F as c\n");
    CHECK(msg.find("after scenario duration") != std::string::npos);
}

TEST_CASE("unknown references are rejected") {
    CHECK(validationMessage(std::string(kTinyHeader) + "node 0 0 0\n"
                                                       "at 1 start_service 7 F as c\n")
              .find("unknown node") != std::string::npos);
    CHECK(validationMessage(std::string(kTinyHeader) + "node 0 0 0\n"
                                                       "at 1 start_service 0 Zed as c\n")
              .find("unknown culture") != std::string::npos);
    CHECK(validationMessage(std::string(kTinyHeader) + "node 0 0 0\n"
                                                       "at 1 join 0 ghost\n")
              .find("unknown community") != std::string::npos);
    CHECK(validationMessage(std::string(kTinyHeader) +
                            "node 0 0 0\nnode 1 1 0\n"
                            "at 1 start_service 0 F as c\n"
                            "at 2 ftp_put 0 1 c missing\n")
              .find("unknown file") != std::string::npos);
}

TEST_CASE("the header line is mandatory") {
    CHECK_THROWS_AS(parseScenario("name x\n", "inline"), Error);
}

TEST_CASE("parse diagnostics carry the line number") {
    std::string msg = validationMessage(std::string(kTinyHeader) + "node 0 zero 0\n");
    CHECK(msg.find("inline:5") != std::string::npos);
}

TEST_CASE("scenario-defined arts and cultures participate in validation") {
    Scenario s = parseScenario(std::string(kTinyHeader) +
                                   "art Ping application layer ops=ping\n"
                                   "culture P FreeSpace CSMA AODV UDP Ping\n"
                                   "node 0 0 0\n"
                                   "at 1 start_service 0 P as pingers\n",
                               "inline");
    validateScenario(s);
    Registry reg = buildRegistry(s);
    CHECK(reg.culture("P").declaredOps().count("ping") == 1);
}

TEST_CASE("running the four-node scenario reproduces the published table") {
    RunResult r = runScenario(loadScenario(fixture("fig5.scenario")), {});
    CHECK(r.exitCode == 0);
    const auto& comm = r.report["communities"][0];
    REQUIRE(comm["initiator_table"].size() == 3);
    CHECK(comm["initiator_table"][0]["member"] == "N2");
    CHECK(comm["initiator_table"][0]["path"] == "N1-N2");
    CHECK(comm["initiator_table"][1]["member"] == "N3");
    CHECK(comm["initiator_table"][1]["path"] == "N1-N3");
    CHECK(comm["initiator_table"][2]["member"] == "N4");
    CHECK(comm["initiator_table"][2]["path"] == "N1-N2-N4");
    CHECK(r.report["floods"]["started"]["MCSTART"] == 1);
    CHECK(r.report["floods"]["tx_by_kind"]["MCSTART"] == 4);
}

TEST_CASE("equal seeds give byte-identical reports and traces") {
    Scenario s = loadScenario(fixture("fig5.scenario"));
    RunResult a = runScenario(s, {});
    RunResult b = runScenario(s, {});
    CHECK(dumpReport(a.report) == dumpReport(b.report));
    CHECK(a.sim->traceText() == b.sim->traceText());
}

TEST_CASE("a flagged dropper steers an undeclared environment to the add-on stack") {
    Scenario s = parseScenario(std::string(kTinyHeader) +
                                   "node 0 0 0\nnode 1 1 0 misbehaving\n"
                                   "at 1 start_service 0 F as c\n",
                               "inline");
    validateScenario(s);
    RunResult r = runScenario(s, {});
    CHECK(r.report["protocol"]["name"] == "P2");
    CHECK(r.report["protocol"]["addon"] == "watchdog");

    RunOverrides closed;
    closed.environment = Environment::Closed;
    RunResult r1 = runScenario(s, closed);
    CHECK(r1.report["protocol"]["name"] == "P1");
}

TEST_CASE("the baseline comparator matches its closed form on a line") {
    // five nodes, duration 20, one flood round per node every 5s:
    // 5 rounds x 5 originators x 5 transmissions each
    std::string text = "humanet-scenario v1\nname line5\nduration 20\nradio_range 1.2\n";
    for (int i = 0; i < 5; ++i)
        text += "node " + std::to_string(i) + " " + std::to_string(i) + " 0\n";
    Scenario s = parseScenario(text, "inline");
    validateScenario(s);
    nlohmann::json b = runBaseline(s, 0);
    CHECK(b["rounds"] == 5);
    CHECK(b["control_tx"] == 125);
}

TEST_CASE("a duration shorter than the period still floods the initial round") {
    std::string text = "humanet-scenario v1\nname tiny3\nduration 2\nradio_range 1.2\n";
    for (int i = 0; i < 3; ++i)
        text += "node " + std::to_string(i) + " " + std::to_string(i) + " 0\n";
    Scenario s = parseScenario(text, "inline");
    nlohmann::json b = runBaseline(s, 0);
    CHECK(b["rounds"] == 1);
    CHECK(b["control_tx"] == 9);
}

TEST_CASE("an empty event script has zero humanistic control overhead") {
    std::string text = "humanet-scenario v1\nname idle\nduration 20\nradio_range 1.2\n";
    for (int i = 0; i < 5; ++i)
        text += "node " + std::to_string(i) + " " + std::to_string(i) + " 0\n";
    Scenario s = parseScenario(text, "inline");
    RunOverrides ov;
    ov.withBaseline = true;
    RunResult r = runScenario(s, ov);
    CHECK(r.report["baseline_comparison"]["humanistic"]["control_tx"] == 0);
    CHECK(r.report["baseline_comparison"]["control_ratio"].is_null());
}

TEST_CASE("community control stays under the baseline on the bundled scenarios") {
    for (const char* name : {"overhead20.scenario", "twocommunities.scenario"}) {
        Scenario s = loadScenario(fixture(name));
        REQUIRE(s.nodes.size() >= 5);
        REQUIRE(s.duration >= 20);
        RunOverrides ov;
        ov.withBaseline = true;
        RunResult r = runScenario(s, ov);
        std::uint64_t h = r.report["baseline_comparison"]["humanistic"]["control_tx"];
        std::uint64_t b = r.report["baseline_comparison"]["baseline"]["control_tx"];
        CHECK(h < b);
    }
}

TEST_CASE("idle nodes transmit no data") {
    // nodes 3 and 4 never join anything; members sit on a straight path
    std::string text = std::string("humanet-scenario v1\nname idlefolk\nduration 10\n") +
                       "radio_range 1.2\n"
                       "node 0 0 0\nnode 1 1 0\nnode 2 2 0\nnode 3 0 5\nnode 4 1 5\n"
                       "file f size=2048\n"
                       "at 0 start_service 0 F as c\n"
                       "at 0.3 join 1 c\nat 0.32 join 2 c\n"
                       "at 2 ftp_put 0 2 c f\n";
    Scenario s = parseScenario(text, "inline");
    validateScenario(s);
    RunResult r = runScenario(s, {});
    CHECK(r.report["counters"]["per_node"]["N3"]["data_tx"] == 0);
    CHECK(r.report["counters"]["per_node"]["N4"]["data_tx"] == 0);
    CHECK(r.report["transfers"][0]["completed"] == true);
}

TEST_CASE("run outcomes surface in the exit code") {
    // a join for a community that was never announced on that node
    std::string text = std::string(kTinyHeader) +
                       "node 0 0 0\nnode 1 50 50\n"
                       "at 0 start_service 0 F as c\n"
                       "at 1 join 1 c\n";
    Scenario s = parseScenario(text, "inline");
    validateScenario(s);
    RunResult r = runScenario(s, {});
    CHECK(r.exitCode == 1);
    CHECK(!r.report["outcomes"].empty());
}
