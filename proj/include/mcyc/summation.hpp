#pragma once

#include <cmath>

namespace mcyc {

/// Neumaier's variant of Kahan summation; also exact when a large term is
/// followed by small ones.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace mcyc
