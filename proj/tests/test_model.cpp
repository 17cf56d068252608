#include <doctest.h>

#include "helpers.hpp"
#include "humanet/arts.hpp"
#include "humanet/error.hpp"
#include "humanet/sim.hpp"

using namespace humanet;
using namespace humanet::test;

namespace {

Err codeOf(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Err::ValidationError;
}

} // namespace

TEST_CASE("defining arts registers them once") {
    Registry r;
    const ArtSpec& ftp = r.defineArt("FTP", Slot::Application, ArtCategory::Layer,
                                     {"put", "get", "ack"});
    CHECK(ftp.declaredOps.size() == 3);
    const ArtSpec& wd = r.defineArt("Watchdog", Slot::Addon, ArtCategory::Security, {"observe"});
    CHECK(wd.category == ArtCategory::Security);
    CHECK(codeOf([&] { r.defineArt("FTP", Slot::Application, ArtCategory::Layer, {"x"}); }) ==
          Err::DuplicateArt);
}

TEST_CASE("category and slot must agree") {
    Registry r;
    CHECK(codeOf([&] { r.defineArt("bad", Slot::Addon, ArtCategory::Layer, {}); }) ==
          Err::BadCategory);
    CHECK(codeOf([&] {
              r.defineArt("alsoBad", Slot::Application, ArtCategory::Security, {"x"});
          }) == Err::BadCategory);
}

TEST_CASE("application, transport and routing arts need operations") {
    Registry r;
    CHECK(codeOf([&] { r.defineArt("mute", Slot::Routing, ArtCategory::Layer, {}); }) ==
          Err::MissingOps);
    // physical and mac arts may stay silent
    r.defineArt("radio", Slot::Physical, ArtCategory::Layer, {});
    r.defineArt("link", Slot::Mac, ArtCategory::Layer, {});
}

TEST_CASE("the stock cultures compose") {
    Registry r = Registry::withBuiltins();
    for (const char* name : {"C1", "C2", "C3", "F", "N"}) {
        const CultureSpec& c = r.culture(name);
        CHECK(c.arts.size() == 5);
    }
    CHECK(r.culture("F").hasArt("DSDV"));
    CHECK(r.culture("F").proactiveRouting());
    CHECK(r.culture("C3").hasArt("AODV"));
    CHECK_FALSE(r.culture("C3").proactiveRouting());
    CHECK(r.culture("C2").rangeFactor() == doctest::Approx(0.8));
    CHECK(r.culture("F").rangeFactor() == doctest::Approx(1.0));
    CHECK(r.culture("C2").hopDelay() == doctest::Approx(0.02));
}

TEST_CASE("removing any single art from a stock culture breaks the stack") {
    Registry r = Registry::withBuiltins();
    const std::map<std::string, std::vector<std::string>> stacks = {
        {"C1", {"FreeSpace", "CSMA", "BellmanFord", "TCP", "FTP"}},
        {"C2", {"TwoRay", "802.11", "DSR", "TCP", "CBR"}},
        {"C3", {"TwoRay", "CSMA", "AODV", "TCP", "Telnet"}},
    };
    for (const auto& [name, arts] : stacks) {
        for (std::size_t skip = 0; skip < arts.size(); ++skip) {
            std::vector<std::string> partial;
            for (std::size_t i = 0; i < arts.size(); ++i)
                if (i != skip) partial.push_back(arts[i]);
            CHECK(codeOf([&] { r.composeCulture("broken", partial); }) == Err::IncompleteStack);
        }
    }
}

TEST_CASE("slot conflicts and unknown arts are rejected") {
    Registry r = Registry::withBuiltins();
    CHECK(codeOf([&] {
              r.composeCulture("twoRouters",
                               {"FreeSpace", "CSMA", "DSDV", "AODV", "TCP", "FTP"});
          }) == Err::SlotConflict);
    CHECK(codeOf([&] {
              r.composeCulture("mystery", {"FreeSpace", "CSMA", "Nope", "TCP", "FTP"});
          }) == Err::UnknownArt);
}

TEST_CASE("an operation name may appear only once per culture") {
    Registry r = Registry::withBuiltins();
    r.defineArt("EchoApp", Slot::Application, ArtCategory::Layer, {"stream_open"});
    CHECK(codeOf([&] {
              r.composeCulture("clash", {"FreeSpace", "CSMA", "DSDV", "TCP", "EchoApp"});
          }) == Err::DuplicateOp);
}

TEST_CASE("registry revalidation passes for the stock set") {
    Registry r = Registry::withBuiltins();
    r.revalidate();
}

TEST_CASE("machines instantiate per culture per host") {
    Simulation sim(Registry::withBuiltins(), fourNodeTopology(), quickParams());
    Machine& m = sim.instantiateMachine("F", 0);
    CHECK(m.mid == kProvisionalMid);
    CHECK(m.host == 0);
    // second culture on the same host is fine (multi-community hosting)
    sim.instantiateMachine("C3", 0);
    // the same culture twice on one host is not
    CHECK(codeOf([&] { sim.instantiateMachine("F", 0); }) == Err::DuplicateMachine);
    CHECK(codeOf([&] { sim.instantiateMachine("nope", 1); }) == Err::UnknownCulture);
}

TEST_CASE("the invoke gate admits declared ops and nothing else") {
    Simulation sim(Registry::withBuiltins(), fourNodeTopology(), quickParams());
    Machine& m = sim.instantiateMachine("F", 0);

    CHECK(sim.invoke(m, "stream_open", {}) == InvokeStatus::Dispatched);
    CHECK(m.state.kv.at("streams") == "1");

    std::string before = serializeState(m.state);
    CHECK(sim.invoke(m, "login", {{"user", "x"}}) == InvokeStatus::NotExposed);
    CHECK(serializeState(m.state) == before); // rejection leaves no trace

    CHECK(sim.invoke(m, "put", {{"file", "f"}}) == InvokeStatus::BadArgs); // args missing
    CHECK(serializeState(m.state) == before);
}

TEST_CASE("gate decisions agree with the declared-op set oracle") {
    Simulation sim(Registry::withBuiltins(), fourNodeTopology(), quickParams());
    Machine& m = sim.instantiateMachine("F", 0);
    std::set<std::string> declared = sim.registry().culture("F").declaredOps();

    std::vector<std::string> pool(declared.begin(), declared.end());
    std::uint64_t s = 99;
    for (int i = 0; i < 300; ++i) {
        std::string op;
        if (nextRand(s) % 3 == 0) {
            op = pool[nextRand(s) % pool.size()];
        } else {
            std::size_t len = 1 + nextRand(s) % 10;
            for (std::size_t k = 0; k < len; ++k)
                op.push_back(char('a' + nextRand(s) % 26));
        }
        std::string before = serializeState(m.state);
        InvokeStatus got = sim.invoke(m, op, {});
        if (declared.count(op)) {
            CHECK(got != InvokeStatus::NotExposed);
        } else {
            CHECK(got == InvokeStatus::NotExposed);
            CHECK(serializeState(m.state) == before);
        }
    }
}

TEST_CASE("packet serialization is stable") {
    Packet p;
    p.kind = PacketKind::Data;
    p.id = {2, 7};
    p.cid = {0, 1};
    p.srcMid = 1;
    p.dstMid = 3;
    p.ttl = 9;
    p.trace = {2, 1};
    p.payload = {{"op", "put"}, {"seq", "0"}};
    p.route = {2, 1, 0};
    CHECK(serializePacket(p) ==
          "DATA id=2:7 cid=C0.1 mc=- src_mid=1 dst_mid=3 ttl=9 trace=[2-1] "
          "payload={op=put,seq=0} inner=- route=[2-1-0]");
    Packet f;
    f.kind = PacketKind::Friend;
    f.id = {1, 0};
    f.cid = {0, 1};
    f.ttl = 8;
    f.trace = {1};
    f.inner = std::make_shared<Packet>(p);
    CHECK(serializePacket(f) ==
          "FRIEND id=1:0 cid=C0.1 mc=- src_mid=- dst_mid=- ttl=8 trace=[1] payload={} "
          "inner={DATA id=2:7 cid=C0.1 mc=- src_mid=1 dst_mid=3 ttl=9 trace=[2-1] "
          "payload={op=put,seq=0} inner=- route=[2-1-0]}");
}

TEST_CASE("loop removal cuts revisits back to the first visit") {
    CHECK(removeLoops({3, 1, 0, 0, 2}) == Path{3, 1, 0, 2});
    CHECK(removeLoops({0, 1, 1, 0, 2}) == Path{0, 2});
    CHECK(removeLoops({5}) == Path{5});
    CHECK(removeLoops({}) == Path{});
    CHECK(rerootPath({3, 1, 0}, {0, 2}) == Path{3, 1, 0, 2});
    CHECK(rerootPath({2, 0}, {0, 2, 4}) == Path{2, 4});
}
