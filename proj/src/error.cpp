#include "humanet/error.hpp"

namespace humanet {

const char* errName(Err e) {
    switch (e) {
        case Err::UnknownNode: return "UnknownNode";
        case Err::CausalityViolation: return "CausalityViolation";
        case Err::NotAdjacent: return "NotAdjacent";
        case Err::DuplicateArt: return "DuplicateArt";
        case Err::BadCategory: return "BadCategory";
        case Err::MissingOps: return "MissingOps";
        case Err::DuplicateOp: return "DuplicateOp";
        case Err::IncompleteStack: return "IncompleteStack";
        case Err::SlotConflict: return "SlotConflict";
        case Err::UnknownArt: return "UnknownArt";
        case Err::UnknownCulture: return "UnknownCulture";
        case Err::DuplicateMachine: return "DuplicateMachine";
        case Err::OpNotExposed: return "OpNotExposed";
        case Err::BadArgs: return "BadArgs";
        case Err::NotAnnounced: return "NotAnnounced";
        case Err::UnknownMember: return "UnknownMember";
        case Err::TtlExpired: return "TtlExpired";
        case Err::RecoveryFailed: return "RecoveryFailed";
        case Err::FriendUndeliverable: return "FriendUndeliverable";
        case Err::JoinFailed: return "JoinFailed";
        case Err::GatewayMissing: return "GatewayMissing";
        case Err::NotFound: return "NotFound";
        case Err::TransferFailed: return "TransferFailed";
        case Err::ValidationError: return "ValidationError";
    }
    return "UnknownError";
}

} // namespace humanet
