// Reference values for the one-period integrals
//   I0(beta) = integral_0^1 e^{beta (t - t_ref)} dt
//   I1(beta) = integral_0^1 (t / sqrt(2)) e^{beta (t - t_ref)} dt
// with t_ref = 1 for beta >= 0 and t_ref = 0 otherwise (so the integrand is
// bounded by one), computed by composite Simpson quadrature in extended
// precision. The second form carries the 1/sqrt(2) projection factor of a
// unit-amplitude single-mode forcing. The printed values are frozen into the
// unit tests.
#include <cmath>
#include <cstdio>

namespace {

long double integrand(long double t, long double beta, bool linear) {
  const long double t_ref = beta >= 0.0L ? 1.0L : 0.0L;
  const long double weight = linear ? t / std::sqrt(2.0L) : 1.0L;
  return weight * std::exp(beta * (t - t_ref));
}

long double simpson(long double beta, bool linear, int n_intervals) {
  const long double h = 1.0L / n_intervals;
  long double sum =
      integrand(0.0L, beta, linear) + integrand(1.0L, beta, linear);
  for (int i = 1; i < n_intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0L : 2.0L) * integrand(i * h, beta, linear);
  }
  return sum * h / 3.0L;
}

}  // namespace

int main() {
  const long double betas[] = {0.0L,
                               1e-6L,
                               1.0L,
                               5.0L,
                               4.0L * M_PIl * M_PIl,
                               -1.0L,
                               -M_PIl * M_PIl};
  for (const long double beta : betas) {
    std::printf("beta=%.17Lg: constant=%.17Lg linear/sqrt2=%.17Lg\n", beta,
                simpson(beta, false, 1 << 20), simpson(beta, true, 1 << 20));
  }
  return 0;
}
