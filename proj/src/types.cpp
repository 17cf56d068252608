#include "humanet/types.hpp"

#include <sstream>

namespace humanet {

std::string str(const CommunityId& cid) {
    if (cid == kNoCommunity) return "-";
    std::ostringstream os;
    os << "C" << cid.si << "." << cid.seq;
    return os.str();
}

std::string str(const PacketId& pid) {
    std::ostringstream os;
    os << pid.origin << ":" << pid.seq;
    return os.str();
}

std::string str(const Path& path) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) os << "-";
        os << path[i];
    }
    os << "]";
    return os.str();
}

std::string hexEncode(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

std::string hexDecode(const std::string& hex) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return 0;
    };
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2)
        out.push_back(static_cast<char>((nib(hex[i]) << 4) | nib(hex[i + 1])));
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::ostream& operator<<(std::ostream& os, const CommunityId& cid) {
    return os << str(cid);
}

std::ostream& operator<<(std::ostream& os, const PacketId& pid) {
    return os << str(pid);
}

} // namespace humanet
