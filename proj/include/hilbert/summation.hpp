#pragma once

#include <cmath>
#include <complex>

namespace hilbert {

/// Neumaier (improved Kahan) summation. Order-dependent but deterministic.
template <class T = double>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

/// Component-wise compensated sum of complex values.
template <class T = double>
class ComplexCompensatedSum {
 public:
  void add(const std::complex<T>& z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<T> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<T> re_;
  CompensatedSum<T> im_;
};

}  // namespace hilbert
