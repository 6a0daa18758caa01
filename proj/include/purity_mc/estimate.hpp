#pragma once

#include <cstdint>
#include <string>

namespace purity_mc {

enum class IntegratorId { plain, miser };

inline std::string to_string(IntegratorId id) {
    return id == IntegratorId::plain ? "plain" : "miser";
}

// Result of one Monte Carlo integration.
// The uncertainty field is `std_error` rather than `stderr`: the latter is a
// macro in <cstdio> and cannot be used as an identifier portably.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t calls = 0;
    std::uint64_t seed = 0;
    IntegratorId integrator = IntegratorId::plain;
};

// Result of an accuracy-targeted integration: the last estimate plus a flag
// telling whether the requested relative error was actually reached before
// the call budget ran out.
struct TargetedEstimate {
    McEstimate estimate;
    bool target_reached = false;
};

}  // namespace purity_mc
