#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace purity_mc {

// Axis-aligned integration box.
class Domain {
  public:
    Domain(std::vector<double> lower, std::vector<double> upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.empty() || lower_.size() != upper_.size())
            throw std::invalid_argument("Domain: bounds must be nonempty and equal-sized");
        for (std::size_t i = 0; i < lower_.size(); ++i)
            if (!(lower_[i] < upper_[i]))
                throw std::invalid_argument("Domain: lower[i] < upper[i] required");
    }

    // [lo, hi]^dims
    static Domain cube(std::size_t dims, double lo, double hi) {
        return Domain(std::vector<double>(dims, lo), std::vector<double>(dims, hi));
    }
    // [-1, 1]^dims
    static Domain unit_box(std::size_t dims) { return cube(dims, -1.0, 1.0); }

    std::size_t dims() const { return lower_.size(); }
    double lower(std::size_t i) const { return lower_[i]; }
    double upper(std::size_t i) const { return upper_[i]; }
    double width(std::size_t i) const { return upper_[i] - lower_[i]; }

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < lower_.size(); ++i) v *= width(i);
        return v;
    }

    // Split along `axis` at lower + frac*width; both halves share the cut.
    std::pair<Domain, Domain> split(std::size_t axis, double frac) const {
        if (axis >= dims()) throw std::invalid_argument("Domain::split: axis out of range");
        if (!(frac > 0.0 && frac < 1.0))
            throw std::invalid_argument("Domain::split: frac must be in (0,1)");
        const double cut = lower_[axis] + frac * width(axis);
        Domain left = *this;
        Domain right = *this;
        left.upper_[axis] = cut;
        right.lower_[axis] = cut;
        return {std::move(left), std::move(right)};
    }

  private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

}  // namespace purity_mc
