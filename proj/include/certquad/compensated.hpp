#pragma once

#include <cmath>

namespace certquad {

/// Neumaier-compensated accumulator. Deterministic for a fixed order of adds;
/// used everywhere subinterval contributions are summed.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace certquad
