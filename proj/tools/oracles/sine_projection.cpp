// Reference values for the sine-series coefficients of x(1-x) on (0,1)
// against the orthonormal modes sqrt(2) sin(k pi x), computed by composite
// Simpson quadrature in extended precision. The printed values are frozen
// into the unit tests.
#include <cmath>
#include <cstdio>

namespace {

long double integrand(long double x, int k) {
  return x * (1.0L - x) * std::sqrt(2.0L) *
         std::sin(static_cast<long double>(k) * M_PIl * x);
}

long double simpson(int k, int n_intervals) {
  const long double h = 1.0L / n_intervals;
  long double sum = integrand(0.0L, k) + integrand(1.0L, k);
  for (int i = 1; i < n_intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0L : 2.0L) * integrand(i * h, k);
  }
  return sum * h / 3.0L;
}

}  // namespace

int main() {
  std::printf("coefficients of x(1-x) against sqrt(2) sin(k pi x):\n");
  for (int k = 1; k <= 6; ++k) {
    std::printf("k=%d: %.17Lg\n", k, simpson(k, 1 << 20));
  }
  std::printf("closed form for odd k: 4 sqrt(2) / (k pi)^3\n");
  for (int k = 1; k <= 5; k += 2) {
    const long double closed =
        4.0L * std::sqrt(2.0L) / std::pow(k * M_PIl, 3.0L);
    std::printf("k=%d closed: %.17Lg\n", k, closed);
  }
  return 0;
}
