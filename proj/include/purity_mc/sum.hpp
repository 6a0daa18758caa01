#pragma once

#include <cmath>

namespace purity_mc {

// Neumaier compensated accumulator. Deterministic for a fixed add order;
// two accumulators merge exactly by adding (sum, compensation) of one into
// the other, again in a fixed order.
class CompensatedSum {
  public:
    CompensatedSum() = default;
    explicit CompensatedSum(double v) : sum_(v) {}

    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    void merge(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace purity_mc
