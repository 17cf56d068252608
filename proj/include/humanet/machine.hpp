#ifndef HUMANET_MACHINE_HPP
#define HUMANET_MACHINE_HPP

#include <functional>
#include <map>
#include <set>
#include <string>

#include "humanet/arts.hpp"
#include "humanet/packet.hpp"
#include "humanet/service_state.hpp"
#include "humanet/types.hpp"

namespace humanet {

// A running service instance: one culture, one host, one community.
// The mid stays provisional until the community protocol commits it.
struct Machine {
    std::string mc;
    Mid mid = kProvisionalMid;
    NodeId host = 0;
    CommunityId cid = kNoCommunity;
    ServiceState state;
};

using OpArgs = std::map<std::string, std::string>;

enum class InvokeStatus { Dispatched, NotExposed, BadArgs };

const char* invokeStatusName(InvokeStatus s);

// Operation handlers keyed by name. Each op lists its required argument
// keys; validation happens before the handler runs, so a rejected call
// cannot have touched the machine.
class OpDispatcher {
public:
    using Handler = std::function<void(Machine&, const OpArgs&, const Packet*)>;

    void registerOp(const std::string& op, std::set<std::string> requiredArgs, Handler fn);
    bool has(const std::string& op) const { return handlers_.count(op) != 0; }

    // The gate: dispatches iff op is in the declared set of the machine's
    // culture; otherwise the machine is untouched.
    InvokeStatus invoke(const Registry& reg, Machine& m, const std::string& op,
                        const OpArgs& args, const Packet* src = nullptr) const;

private:
    struct Entry {
        std::set<std::string> required;
        Handler fn;
    };
    std::map<std::string, Entry> handlers_;
};

} // namespace humanet

#endif
