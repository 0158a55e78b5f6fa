// Coefficients p(nu), p(mu) of a Hilbert Poincare series over Q(sqrt 5).

#include <cstdio>

#include "hilbert/fourier.hpp"
#include "hilbert/poincare.hpp"

int main() {
  using namespace hilbert;
  const auto f = RealQuadraticField::make(5);
  const auto nu = DualIndex::from_element(f, f.omega() / f.sqrt_disc());
  const auto mu = DualIndex::from_element(f, (f.omega() - f.one()) / f.sqrt_disc());

  const PoincareSpec spec{f, {12, 12}, nu, IdealHNF::unit_ideal(f)};
  const PoincareEvaluand series(spec, TruncationPolicy{});
  const SamplingDomain domain{f, {1.1, 1.0}, 32};

  for (const auto& c : extract_many(series, {nu, mu}, domain)) {
    std::printf("mu = %s/sqrt5: p = %.12f %+.3ei  (quadrature %.1e, truncation %.1e)\n", c.mu.beta().str().c_str(),
                c.value.real(), c.value.imag(), c.quad_error, c.trunc_error);
  }
}
