#ifndef HUMANET_ARTS_HPP
#define HUMANET_ARTS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "humanet/types.hpp"

namespace humanet {

enum class Slot { Physical, Mac, Routing, Transport, Application, Addon };
enum class ArtCategory { Layer, Energy, Privacy, Security };

const char* slotName(Slot s);
const char* categoryName(ArtCategory c);
std::optional<Slot> slotFromName(const std::string& s);
std::optional<ArtCategory> categoryFromName(const std::string& s);

// Capability descriptor: a named unit of work occupying one layer slot
// (or an add-on category slot). Application, transport and routing arts
// must declare at least one operation; the declared set is what the
// invoke gate admits.
struct ArtSpec {
    std::string name;
    Slot slot = Slot::Application;
    ArtCategory category = ArtCategory::Layer;
    std::set<std::string> declaredOps;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const;
};

// A validated stack: exactly one art per layer slot, any number of
// add-ons, no operation name declared twice.
struct CultureSpec {
    std::string name;
    std::vector<ArtSpec> arts; // in registration order

    const ArtSpec* artInSlot(Slot s) const;
    std::set<std::string> declaredOps() const;

    double rangeFactor() const;   // physical art preset
    double hopDelay() const;      // mac art preset, seconds
    bool proactiveRouting() const;
    bool reliableTransport() const;
    bool hasArt(const std::string& artName) const;
};

// Write-once registry of arts and cultures. Populated during setup,
// read-only while a run executes.
class Registry {
public:
    Registry() = default;

    const ArtSpec& defineArt(const std::string& name, Slot slot, ArtCategory category,
                             std::set<std::string> declaredOps,
                             std::map<std::string, double> params = {});

    const CultureSpec& composeCulture(const std::string& name,
                                      const std::vector<std::string>& artNames);

    bool hasArt(const std::string& name) const { return arts_.count(name) != 0; }
    bool hasCulture(const std::string& name) const { return cultures_.count(name) != 0; }
    const ArtSpec& art(const std::string& name) const;
    const CultureSpec& culture(const std::string& name) const;
    std::vector<std::string> cultureNames() const;

    // Re-checks the five-slot invariant of every registered culture.
    void revalidate() const;

    // Installs the stock arts (the usual radio/mac/routing/transport/
    // application suspects) and the example cultures C1, C2, C3, F, N.
    static Registry withBuiltins();

private:
    static void validateCulture(const CultureSpec& c);

    std::map<std::string, ArtSpec> arts_;
    std::map<std::string, CultureSpec> cultures_;
};

} // namespace humanet

#endif
