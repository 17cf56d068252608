#include "humanet/machine.hpp"

namespace humanet {

const char* invokeStatusName(InvokeStatus s) {
    switch (s) {
        case InvokeStatus::Dispatched: return "dispatched";
        case InvokeStatus::NotExposed: return "not-exposed";
        case InvokeStatus::BadArgs: return "bad-args";
    }
    return "?";
}

void OpDispatcher::registerOp(const std::string& op, std::set<std::string> requiredArgs,
                              Handler fn) {
    handlers_[op] = Entry{std::move(requiredArgs), std::move(fn)};
}

InvokeStatus OpDispatcher::invoke(const Registry& reg, Machine& m, const std::string& op,
                                  const OpArgs& args, const Packet* src) const {
    const CultureSpec& culture = reg.culture(m.mc);
    std::set<std::string> declared = culture.declaredOps();
    if (declared.count(op) == 0) return InvokeStatus::NotExposed;

    auto it = handlers_.find(op);
    if (it == handlers_.end()) {
        // Declared but wired to nothing: treat as a no-op dispatch so
        // custom scenario arts can declare inert capabilities.
        return InvokeStatus::Dispatched;
    }
    for (const std::string& key : it->second.required)
        if (args.count(key) == 0) return InvokeStatus::BadArgs;
    it->second.fn(m, args, src);
    return InvokeStatus::Dispatched;
}

} // namespace humanet
