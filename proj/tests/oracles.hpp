#pragma once

// Test-only reference computations. Nothing here shares code with the
// library paths it is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::pair<int, int> trial_division(std::uint64_t n) {
  int distinct = 0;
  int total = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    ++distinct;
    while (n % p == 0) {
      n /= p;
      ++total;
    }
  }
  if (n > 1) {
    ++distinct;
    ++total;
  }
  return {distinct, total};
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

/// sum_{k>=0} (-1)^k a(k) by the Cohen / Rodriguez Villegas / Zagier
/// acceleration of alternating series.
inline cplx alternating_sum(const std::function<cplx(int)>& a, int n = 60) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = (d + 1.0 / d) / 2.0;
  double b = -1.0;
  double c = -d;
  cplx s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a(k);
    b = (static_cast<double>(k) + n) * (static_cast<double>(k) - n) * b /
        ((k + 0.5) * (k + 1.0));
  }
  return s / d;
}

/// Riemann zeta via the alternating eta series.
inline cplx zeta(cplx s) {
  const cplx eta = alternating_sum([&](int k) { return std::pow(cplx(k + 1.0), -s); });
  return eta / (1.0 - std::pow(cplx(2.0), 1.0 - s));
}

/// L(s, chi_{-4}) = sum (-1)^k (2k+1)^{-s}.
inline cplx beta(cplx s, int n = 60) {
  return alternating_sum([&](int k) { return std::pow(cplx(2.0 * k + 1.0), -s); }, n);
}

/// Five-point central difference.
inline cplx derivative(const std::function<cplx(cplx)>& f, cplx s, double h) {
  return (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h);
}

/// Smallest f | q such that chi(a) depends only on a mod f on the units,
/// given the value table (complex, 0 off units).
inline std::uint32_t brute_conductor(const std::vector<cplx>& values) {
  const auto q = static_cast<std::uint32_t>(values.size());
  for (std::uint32_t f = 1; f <= q; ++f) {
    if (q % f != 0) continue;
    bool induced = true;
    for (std::uint32_t a = 0; a < q && induced; ++a) {
      if (std::gcd(a, q) != 1) continue;
      for (std::uint32_t b = a % f; b < q; b += f) {
        if (std::gcd(b, q) != 1) continue;
        if (std::abs(values[a] - values[b]) > 1e-9) {
          induced = false;
          break;
        }
      }
    }
    if (induced) return f;
  }
  return q;
}

}  // namespace oracle
