#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace purity_mc {

// A dimensionless integrand over an axis-aligned box, carrying its own
// prefactor so that the integral over the box is the target quantity
// directly. `alpha` records the family parameter used to build it (purely
// informational for reporting). Instances are immutable after construction
// and safe to evaluate concurrently from any number of threads.
struct Integrand {
    std::size_t dimension = 0;
    std::string label;
    double alpha = 0.0;
    std::function<double(std::span<const double>)> evaluate;
};

}  // namespace purity_mc
