#include "humanet/arts.hpp"

#include "humanet/error.hpp"

namespace humanet {

const char* slotName(Slot s) {
    switch (s) {
        case Slot::Physical: return "physical";
        case Slot::Mac: return "mac";
        case Slot::Routing: return "routing";
        case Slot::Transport: return "transport";
        case Slot::Application: return "application";
        case Slot::Addon: return "addon";
    }
    return "?";
}

const char* categoryName(ArtCategory c) {
    switch (c) {
        case ArtCategory::Layer: return "layer";
        case ArtCategory::Energy: return "energy";
        case ArtCategory::Privacy: return "privacy";
        case ArtCategory::Security: return "security";
    }
    return "?";
}

std::optional<Slot> slotFromName(const std::string& s) {
    if (s == "physical") return Slot::Physical;
    if (s == "mac") return Slot::Mac;
    if (s == "routing") return Slot::Routing;
    if (s == "transport") return Slot::Transport;
    if (s == "application") return Slot::Application;
    if (s == "addon") return Slot::Addon;
    return std::nullopt;
}

std::optional<ArtCategory> categoryFromName(const std::string& s) {
    if (s == "layer") return ArtCategory::Layer;
    if (s == "energy") return ArtCategory::Energy;
    if (s == "privacy") return ArtCategory::Privacy;
    if (s == "security") return ArtCategory::Security;
    return std::nullopt;
}

double ArtSpec::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

const ArtSpec* CultureSpec::artInSlot(Slot s) const {
    for (const ArtSpec& a : arts)
        if (a.slot == s) return &a;
    return nullptr;
}

std::set<std::string> CultureSpec::declaredOps() const {
    std::set<std::string> out;
    for (const ArtSpec& a : arts) out.insert(a.declaredOps.begin(), a.declaredOps.end());
    return out;
}

double CultureSpec::rangeFactor() const {
    const ArtSpec* p = artInSlot(Slot::Physical);
    return p ? p->param("range_factor", 1.0) : 1.0;
}

double CultureSpec::hopDelay() const {
    const ArtSpec* m = artInSlot(Slot::Mac);
    return m ? m->param("hop_delay", 0.01) : 0.01;
}

bool CultureSpec::proactiveRouting() const {
    const ArtSpec* r = artInSlot(Slot::Routing);
    return r && r->param("proactive", 0.0) != 0.0;
}

bool CultureSpec::reliableTransport() const {
    const ArtSpec* t = artInSlot(Slot::Transport);
    return t && t->param("reliable", 0.0) != 0.0;
}

bool CultureSpec::hasArt(const std::string& artName) const {
    for (const ArtSpec& a : arts)
        if (a.name == artName) return true;
    return false;
}

const ArtSpec& Registry::defineArt(const std::string& name, Slot slot, ArtCategory category,
                                   std::set<std::string> declaredOps,
                                   std::map<std::string, double> params) {
    if (arts_.count(name)) throw Error(Err::DuplicateArt, name);
    if (slot == Slot::Addon) {
        if (category == ArtCategory::Layer)
            throw Error(Err::BadCategory, name + ": add-on art cannot be a layer");
    } else if (category != ArtCategory::Layer) {
        throw Error(Err::BadCategory, name + ": layer slot requires layer category");
    }
    bool needsOps = slot == Slot::Application || slot == Slot::Transport || slot == Slot::Routing;
    if (needsOps && declaredOps.empty())
        throw Error(Err::MissingOps, name + ": " + slotName(slot) + " art declares no operations");

    ArtSpec art;
    art.name = name;
    art.slot = slot;
    art.category = category;
    art.declaredOps = std::move(declaredOps);
    art.params = std::move(params);
    return arts_.emplace(name, std::move(art)).first->second;
}

void Registry::validateCulture(const CultureSpec& c) {
    const Slot required[] = {Slot::Physical, Slot::Mac, Slot::Routing, Slot::Transport,
                             Slot::Application};
    for (Slot s : required) {
        int count = 0;
        for (const ArtSpec& a : c.arts)
            if (a.slot == s) count++;
        if (count == 0)
            throw Error(Err::IncompleteStack, c.name + ": missing " + slotName(s) + " art");
        if (count > 1)
            throw Error(Err::SlotConflict, c.name + ": more than one " + slotName(s) + " art");
    }
    std::set<std::string> ops;
    for (const ArtSpec& a : c.arts) {
        for (const std::string& op : a.declaredOps)
            if (!ops.insert(op).second)
                throw Error(Err::DuplicateOp, c.name + ": operation " + op + " declared twice");
    }
}

const CultureSpec& Registry::composeCulture(const std::string& name,
                                            const std::vector<std::string>& artNames) {
    CultureSpec c;
    c.name = name;
    for (const std::string& an : artNames) {
        auto it = arts_.find(an);
        if (it == arts_.end()) throw Error(Err::UnknownArt, an);
        c.arts.push_back(it->second);
    }
    validateCulture(c);
    cultures_[name] = std::move(c);
    return cultures_[name];
}

const ArtSpec& Registry::art(const std::string& name) const {
    auto it = arts_.find(name);
    if (it == arts_.end()) throw Error(Err::UnknownArt, name);
    return it->second;
}

const CultureSpec& Registry::culture(const std::string& name) const {
    auto it = cultures_.find(name);
    if (it == cultures_.end()) throw Error(Err::UnknownCulture, name);
    validateCulture(it->second); // cultures stay valid for the run's lifetime
    return it->second;
}

std::vector<std::string> Registry::cultureNames() const {
    std::vector<std::string> out;
    for (const auto& [name, c] : cultures_) out.push_back(name);
    return out;
}

void Registry::revalidate() const {
    for (const auto& [name, c] : cultures_) validateCulture(c);
}

Registry Registry::withBuiltins() {
    Registry r;

    // physical: named propagation presets realized as disc radii
    r.defineArt("FreeSpace", Slot::Physical, ArtCategory::Layer, {}, {{"range_factor", 1.0}});
    r.defineArt("TwoRay", Slot::Physical, ArtCategory::Layer, {}, {{"range_factor", 0.8}});

    // mac: fixed per-hop delays
    r.defineArt("CSMA", Slot::Mac, ArtCategory::Layer, {}, {{"hop_delay", 0.01}});
    r.defineArt("802.11", Slot::Mac, ArtCategory::Layer, {}, {{"hop_delay", 0.02}});
    r.defineArt("MACA", Slot::Mac, ArtCategory::Layer, {}, {{"hop_delay", 0.015}});
    r.defineArt("TSMA", Slot::Mac, ArtCategory::Layer, {}, {{"hop_delay", 0.015}});

    // routing: proactive stacks refresh their community table, reactive
    // ones rely on on-demand recovery
    for (const char* n : {"BellmanFord", "DSDV", "FSR", "OSPF", "WRP"})
        r.defineArt(n, Slot::Routing, ArtCategory::Layer, {"route_refresh"}, {{"proactive", 1.0}});
    for (const char* n : {"DSR", "AODV", "LAR"})
        r.defineArt(n, Slot::Routing, ArtCategory::Layer, {"route_discover"}, {{"proactive", 0.0}});

    // transport
    r.defineArt("TCP", Slot::Transport, ArtCategory::Layer, {"stream_open", "stream_close"},
                {{"reliable", 1.0}});
    r.defineArt("UDP", Slot::Transport, ArtCategory::Layer, {"dgram"}, {{"reliable", 0.0}});

    // application
    r.defineArt("FTP", Slot::Application, ArtCategory::Layer, {"put", "get", "ack"});
    r.defineArt("Telnet", Slot::Application, ArtCategory::Layer, {"login", "echo"});
    r.defineArt("CBR", Slot::Application, ArtCategory::Layer, {"cbr_push"});
    r.defineArt("NameService", Slot::Application, ArtCategory::Layer,
                {"register", "resolve", "resolve_reply"});

    // add-on
    r.defineArt("Watchdog", Slot::Addon, ArtCategory::Security, {"observe"});

    r.composeCulture("C1", {"FreeSpace", "CSMA", "BellmanFord", "TCP", "FTP"});
    r.composeCulture("C2", {"TwoRay", "802.11", "DSR", "TCP", "CBR"});
    r.composeCulture("C3", {"TwoRay", "CSMA", "AODV", "TCP", "Telnet"});
    r.composeCulture("F", {"FreeSpace", "CSMA", "DSDV", "TCP", "FTP"});
    r.composeCulture("N", {"FreeSpace", "CSMA", "AODV", "UDP", "NameService"});
    return r;
}

} // namespace humanet
