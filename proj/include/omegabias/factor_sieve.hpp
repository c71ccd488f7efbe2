#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "omegabias/characters.hpp"

namespace omegabias {

inline constexpr std::uint64_t kSieveCeiling = std::uint64_t{1} << 40;

/// Geometric grid round(start * ratio^k) restricted to [start, x_max],
/// deduplicated, with x_max appended when it is not already the last point.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t x_max, double ratio = 1.02,
                                                 std::uint64_t start = 1000);

struct SieveConfig {
  std::uint64_t x_max = 100'000'000;
  std::uint64_t segment_size = std::uint64_t{1} << 20;
  std::uint32_t modulus = 1;
  std::vector<std::uint64_t> checkpoints;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Exact per-residue-class sums S_f(x; a) = sum_{n <= x, n = a mod q} f(n)
/// for f in {omega, Omega}, one row of q entries per checkpoint.
struct ClassSums {
  std::uint32_t modulus = 1;
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint64_t> omega;  // [k * modulus + a]
  std::vector<std::uint64_t> Omega;

  std::size_t checkpoint_index(std::uint64_t x) const;  // DomainError if absent
  std::uint64_t omega_at(std::size_t k, std::uint32_t a) const { return omega[k * modulus + a]; }
  std::uint64_t Omega_at(std::size_t k, std::uint32_t a) const { return Omega[k * modulus + a]; }
  std::uint64_t omega_total(std::size_t k) const;
  std::uint64_t Omega_total(std::size_t k) const;

  friend bool operator==(const ClassSums&, const ClassSums&) = default;
};

struct TwistedSums {
  std::complex<double> omega;
  std::complex<double> Omega;
};

/// psi_f(x, chi) = sum_a chi(a) S_f(x; a) at a stored checkpoint x.
TwistedSums twist(const ClassSums& sums, const DirichletCharacter& chi, std::uint64_t x);

/// Exact integer twist for a real character.
struct RealTwistedSums {
  std::int64_t omega;
  std::int64_t Omega;
};
RealTwistedSums twist_real(const ClassSums& sums, const DirichletCharacter& chi, std::uint64_t x);

struct DensityPoint {
  std::uint64_t x;
  std::int64_t psi_omega;
  std::int64_t psi_Omega;
  double delta_omega;
  double delta_Omega;

  friend bool operator==(const DensityPoint&, const DensityPoint&) = default;
};

/// Harmonic measure of the sign sets {N : psi_omega(N) < 0} and
/// {N : psi_Omega(N) > 0} for a real character, normalized by log X.
struct EmpiricalDensity {
  std::uint32_t modulus = 1;
  std::uint32_t char_index = 0;
  std::uint64_t X = 0;
  double H_omega = 0.0;
  double H_Omega = 0.0;
  double delta_omega = 0.0;
  double delta_Omega = 0.0;
  std::vector<DensityPoint> trace;  // one entry per checkpoint

  friend bool operator==(const EmpiricalDensity&, const EmpiricalDensity&) = default;
};

struct SievePassResult {
  ClassSums sums;
  EmpiricalDensity density;  // populated only when a character was given
};

/// One segmented pass producing the class sums and, when `density_char` is
/// non-null, the empirical densities for that (real, non-principal) character.
/// Results are bit-identical for every thread count and segment size.
SievePassResult sieve_pass(const SieveConfig& cfg, const DirichletCharacter* density_char,
                           unsigned threads = 1);

ClassSums sieve_run(const SieveConfig& cfg, unsigned threads = 1);

EmpiricalDensity density_scan(const SieveConfig& cfg, const DirichletCharacter& chi,
                              unsigned threads = 1);

/// Primes up to and including `limit`.
std::vector<std::uint32_t> primes_up_to(std::uint64_t limit);

/// omega(n), Omega(n) for n in [lo, hi), lo >= 1, using the given base primes
/// (all primes up to at least sqrt(hi - 1)).
void factor_counts(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
                   std::span<std::uint8_t> omega, std::span<std::uint8_t> Omega);

}  // namespace omegabias
