#include "phigamma/report.hpp"

#include <sstream>

namespace phigamma {

std::string verdict_str(Claim::Verdict v) {
    switch (v) {
        case Claim::Verdict::ok: return "ok";
        case Claim::Verdict::fail: return "fail";
        case Claim::Verdict::uncertified: return "uncertified";
    }
    return "?";
}

std::string Claim::line() const {
    std::ostringstream os;
    os << "CLAIM " << name << " VERDICT " << verdict_str(verdict);
    if (!lhs.empty()) os << " LHS " << lhs;
    if (!rhs.empty()) os << " RHS " << rhs;
    return os.str();
}

void Report::add(std::string name, Claim::Verdict v, std::string lhs, std::string rhs) {
    claims.push_back({std::move(name), v, std::move(lhs), std::move(rhs)});
}

bool Report::all_ok() const {
    for (const auto& c : claims)
        if (c.verdict != Claim::Verdict::ok) return false;
    return true;
}

bool Report::any_fail() const {
    for (const auto& c : claims)
        if (c.verdict == Claim::Verdict::fail) return true;
    return false;
}

std::string Report::str() const {
    std::ostringstream os;
    for (const auto& c : claims) os << c.line() << "\n";
    return os.str();
}

RunConfig RunConfig::make(const FieldParams& p, const PrecisionProfile& prof) {
    RunConfig cfg;
    cfg.params = p;
    cfg.profile = prof;
    cfg.weight = Rat(p.q(), p.q() - 1);
    return cfg;
}

RunConfig RunConfig::from_parsed(const ParsedConfig& parsed) {
    RunConfig cfg = make(parsed.params, parsed.profile);
    if (parsed.weight) cfg.weight = *parsed.weight;
    return cfg;
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << params.str() << " " << profile.str() << " w=" << weight.str() << " fmt=" << format_version;
    return os.str();
}

std::uint64_t RunConfig::hash() const {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string RunConfig::header() const {
    std::ostringstream os;
    os << "# config " << std::hex << hash() << std::dec << " " << canonical();
    return os.str();
}

}  // namespace phigamma
