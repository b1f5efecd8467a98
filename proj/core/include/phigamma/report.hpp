#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phigamma/local_field.hpp"
#include "phigamma/rational.hpp"

namespace phigamma {

// One verifiable statement, printed as a single stable line:
//   CLAIM <name> VERDICT <ok|fail|uncertified> LHS <value> RHS <value>
struct Claim {
    enum class Verdict { ok, fail, uncertified };

    std::string name;
    Verdict verdict = Verdict::ok;
    std::string lhs;
    std::string rhs;

    std::string line() const;
};

struct Report {
    std::vector<Claim> claims;

    void add(std::string name, Claim::Verdict v, std::string lhs = "", std::string rhs = "");
    bool all_ok() const;
    bool any_fail() const;
    std::string str() const;
};

// Everything a run depends on; the hash goes into every report header so
// results are reproducible byte for byte given the same configuration.
struct RunConfig {
    FieldParams params;
    PrecisionProfile profile;
    Rat weight;  // flat-norm weight, default q/(q-1)
    int format_version = 1;

    static RunConfig make(const FieldParams& p, const PrecisionProfile& prof);
    static RunConfig from_parsed(const ParsedConfig& cfg);

    std::string canonical() const;
    std::uint64_t hash() const;
    std::string header() const;  // "# config <hex hash> <canonical>"
};

std::string verdict_str(Claim::Verdict v);

}  // namespace phigamma
