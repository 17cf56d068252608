#ifndef HUMANET_ERROR_HPP
#define HUMANET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace humanet {

enum class Err {
    // sim-core
    UnknownNode,
    CausalityViolation,
    NotAdjacent,
    // model
    DuplicateArt,
    BadCategory,
    MissingOps,
    DuplicateOp,
    IncompleteStack,
    SlotConflict,
    UnknownArt,
    UnknownCulture,
    DuplicateMachine,
    OpNotExposed,
    BadArgs,
    // protocol
    NotAnnounced,
    UnknownMember,
    TtlExpired,
    RecoveryFailed,
    FriendUndeliverable,
    JoinFailed,
    // services
    GatewayMissing,
    NotFound,
    TransferFailed,
    // scenario
    ValidationError,
};

const char* errName(Err e);

// Thrown by API-level contract violations (bad ids, bad compositions,
// scheduling into the past). Protocol outcomes that happen in simulated
// time are recorded as run events instead, never thrown across the loop.
class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what)
        : std::runtime_error(std::string(errName(code)) + ": " + what), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

} // namespace humanet

#endif
