#include "omegabias/factor_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omegabias/errors.hpp"
#include "omegabias/parallel.hpp"

namespace omegabias {

namespace {

using u128 = unsigned __int128;

// Harmonic sums are accumulated exactly in fixed point: each 1/n is
// floor(2^96 / n) units, so the total is independent of summation order.
constexpr int kHarmonicShift = 96;

u128 harmonic_units(std::uint64_t n) { return (u128{1} << kHarmonicShift) / n; }

double harmonic_value(u128 units) {
  return std::ldexp(static_cast<double>(units), -kHarmonicShift);
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("class sum accumulator overflow");
  return out;
}

template <typename Cofactor>
void strike(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
            std::span<std::uint8_t> omega, std::span<std::uint8_t> Omega) {
  const std::size_t len = hi - lo;
  std::vector<Cofactor> cofactor(len);
  for (std::size_t i = 0; i < len; ++i) cofactor[i] = static_cast<Cofactor>(lo + i);
  std::fill(omega.begin(), omega.begin() + len, 0);
  std::fill(Omega.begin(), Omega.begin() + len, 0);

  for (const std::uint64_t p : primes) {
    if (p * p >= hi) break;
    const auto prime = static_cast<Cofactor>(p);
    std::uint64_t start = (lo + p - 1) / p * p;
    for (std::uint64_t m = start - lo; m < len; m += p) {
      ++omega[m];
      ++Omega[m];
      cofactor[m] /= prime;
    }
    // Higher powers peel one further factor of p each.
    for (std::uint64_t pk = p * p; pk < hi; pk *= p) {
      start = (lo + pk - 1) / pk * pk;
      for (std::uint64_t m = start - lo; m < len; m += pk) {
        ++Omega[m];
        cofactor[m] /= prime;
      }
      if (pk > (hi - 1) / p) break;
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (cofactor[i] > 1) {
      ++omega[i];
      ++Omega[i];
    }
  }
}

struct SegmentWork {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::size_t first_checkpoint = 0;
  std::size_t end_checkpoint = 0;
  std::vector<std::uint8_t> omega;
  std::vector<std::uint8_t> Omega;
  std::vector<std::uint64_t> omega_totals;
  std::vector<std::uint64_t> Omega_totals;
  // Segment-local class sums at each interior checkpoint.
  std::vector<std::uint64_t> omega_snapshots;
  std::vector<std::uint64_t> Omega_snapshots;
  // Density pass.
  std::int64_t psi_omega_entry = 0;
  std::int64_t psi_Omega_entry = 0;
  u128 H_omega = 0;
  u128 H_Omega = 0;
  std::vector<std::int64_t> psi_omega_at;
  std::vector<std::int64_t> psi_Omega_at;
  std::vector<u128> H_omega_at;
  std::vector<u128> H_Omega_at;
};

void count_segment(SegmentWork& w, const SieveConfig& cfg,
                   std::span<const std::uint32_t> primes) {
  const std::size_t len = w.hi - w.lo;
  const std::uint32_t q = cfg.modulus;
  w.omega.resize(len);
  w.Omega.resize(len);
  factor_counts(w.lo, w.hi, primes, w.omega, w.Omega);

  w.omega_totals.assign(q, 0);
  w.Omega_totals.assign(q, 0);
  const std::size_t n_snap = w.end_checkpoint - w.first_checkpoint;
  w.omega_snapshots.assign(n_snap * q, 0);
  w.Omega_snapshots.assign(n_snap * q, 0);

  std::uint32_t r = static_cast<std::uint32_t>(w.lo % q);
  std::size_t next_cp = w.first_checkpoint;
  for (std::size_t i = 0; i < len; ++i) {
    w.omega_totals[r] += w.omega[i];
    w.Omega_totals[r] += w.Omega[i];
    if (next_cp < w.end_checkpoint && cfg.checkpoints[next_cp] == w.lo + i) {
      const std::size_t s = (next_cp - w.first_checkpoint) * q;
      std::copy(w.omega_totals.begin(), w.omega_totals.end(), w.omega_snapshots.begin() + s);
      std::copy(w.Omega_totals.begin(), w.Omega_totals.end(), w.Omega_snapshots.begin() + s);
      ++next_cp;
    }
    if (++r == q) r = 0;
  }
}

void weigh_segment(SegmentWork& w, const SieveConfig& cfg, std::span<const int> chi_table) {
  const std::uint32_t q = cfg.modulus;
  const std::size_t len = w.hi - w.lo;
  const std::size_t n_snap = w.end_checkpoint - w.first_checkpoint;
  w.psi_omega_at.assign(n_snap, 0);
  w.psi_Omega_at.assign(n_snap, 0);
  w.H_omega_at.assign(n_snap, 0);
  w.H_Omega_at.assign(n_snap, 0);

  std::int64_t psi_omega = w.psi_omega_entry;
  std::int64_t psi_Omega = w.psi_Omega_entry;
  u128 H_omega = 0;
  u128 H_Omega = 0;
  std::uint32_t r = static_cast<std::uint32_t>(w.lo % q);
  std::size_t next_cp = w.first_checkpoint;
  for (std::size_t i = 0; i < len; ++i) {
    const int c = chi_table[r];
    psi_omega += c * w.omega[i];
    psi_Omega += c * w.Omega[i];
    const std::uint64_t n = w.lo + i;
    if (psi_omega < 0 || psi_Omega > 0) {
      const u128 units = harmonic_units(n);
      if (psi_omega < 0) H_omega += units;
      if (psi_Omega > 0) H_Omega += units;
    }
    if (next_cp < w.end_checkpoint && cfg.checkpoints[next_cp] == n) {
      const std::size_t s = next_cp - w.first_checkpoint;
      w.psi_omega_at[s] = psi_omega;
      w.psi_Omega_at[s] = psi_Omega;
      w.H_omega_at[s] = H_omega;
      w.H_Omega_at[s] = H_Omega;
      ++next_cp;
    }
    if (++r == q) r = 0;
  }
  w.H_omega = H_omega;
  w.H_Omega = H_Omega;
}

double normalized(u128 units, std::uint64_t x) {
  if (x < 2) return 0.0;
  return harmonic_value(units) / std::log(static_cast<double>(x));
}

}  // namespace

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t x_max, double ratio,
                                                 std::uint64_t start) {
  if (!(ratio > 1.0)) throw DomainError("checkpoint ratio must exceed 1");
  if (start == 0) throw DomainError("checkpoint grid must start at 1 or above");
  std::vector<std::uint64_t> grid;
  if (x_max == 0) return grid;
  for (int k = 0;; ++k) {
    const double v = std::round(static_cast<double>(start) * std::pow(ratio, k));
    if (v > static_cast<double>(x_max)) break;
    const auto x = static_cast<std::uint64_t>(v);
    if (x >= start && (grid.empty() || x > grid.back())) grid.push_back(x);
  }
  if (grid.empty() || grid.back() != x_max) grid.push_back(x_max);
  return grid;
}

void SieveConfig::validate() const {
  if (x_max > kSieveCeiling) throw DomainError("x_max exceeds the 2^40 design ceiling");
  if (segment_size < 2) throw DomainError("segment_size must be at least 2");
  if (modulus < 1) throw DomainError("modulus must be at least 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > x_max) {
      throw DomainError("checkpoint outside [1, x_max]");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw DomainError("checkpoints must be strictly increasing");
    }
  }
}

std::size_t ClassSums::checkpoint_index(std::uint64_t x) const {
  const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), x);
  if (it == checkpoints.end() || *it != x) throw DomainError("not a stored checkpoint");
  return static_cast<std::size_t>(it - checkpoints.begin());
}

std::uint64_t ClassSums::omega_total(std::size_t k) const {
  std::uint64_t s = 0;
  for (std::uint32_t a = 0; a < modulus; ++a) s += omega_at(k, a);
  return s;
}

std::uint64_t ClassSums::Omega_total(std::size_t k) const {
  std::uint64_t s = 0;
  for (std::uint32_t a = 0; a < modulus; ++a) s += Omega_at(k, a);
  return s;
}

TwistedSums twist(const ClassSums& sums, const DirichletCharacter& chi, std::uint64_t x) {
  if (chi.modulus() != sums.modulus) throw DomainError("character modulus does not match sums");
  if (chi.is_real()) {
    const auto r = twist_real(sums, chi, x);
    return {static_cast<double>(r.omega), static_cast<double>(r.Omega)};
  }
  const std::size_t k = sums.checkpoint_index(x);
  // Collect exact integer weights per root of unity, then combine.
  std::vector<std::uint64_t> by_exp_omega(chi.order(), 0);
  std::vector<std::uint64_t> by_exp_Omega(chi.order(), 0);
  for (std::uint32_t a = 0; a < sums.modulus; ++a) {
    const auto e = chi.exponent(a);
    if (e == DirichletCharacter::kNonCoprime) continue;
    by_exp_omega[e] += sums.omega_at(k, a);
    by_exp_Omega[e] += sums.Omega_at(k, a);
  }
  TwistedSums out{};
  for (std::uint32_t e = 0; e < chi.order(); ++e) {
    const auto root = chi.root(e);
    out.omega += static_cast<double>(by_exp_omega[e]) * root;
    out.Omega += static_cast<double>(by_exp_Omega[e]) * root;
  }
  return out;
}

RealTwistedSums twist_real(const ClassSums& sums, const DirichletCharacter& chi, std::uint64_t x) {
  if (chi.modulus() != sums.modulus) throw DomainError("character modulus does not match sums");
  if (!chi.is_real()) throw DomainError("exact twist requires a real character");
  const std::size_t k = sums.checkpoint_index(x);
  RealTwistedSums out{0, 0};
  for (std::uint32_t a = 0; a < sums.modulus; ++a) {
    const auto e = chi.exponent(a);
    if (e == DirichletCharacter::kNonCoprime) continue;
    const std::int64_t sign = e == 0 ? 1 : -1;
    out.omega += sign * static_cast<std::int64_t>(sums.omega_at(k, a));
    out.Omega += sign * static_cast<std::int64_t>(sums.Omega_at(k, a));
  }
  return out;
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

void factor_counts(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
                   std::span<std::uint8_t> omega, std::span<std::uint8_t> Omega) {
  if (lo < 1 || hi < lo) throw DomainError("factor_counts needs 1 <= lo <= hi");
  if (omega.size() < hi - lo || Omega.size() < hi - lo) {
    throw DomainError("factor_counts output spans too short");
  }
  if (hi <= (std::uint64_t{1} << 32)) {
    strike<std::uint32_t>(lo, hi, primes, omega, Omega);
  } else {
    strike<std::uint64_t>(lo, hi, primes, omega, Omega);
  }
}

SievePassResult sieve_pass(const SieveConfig& cfg, const DirichletCharacter* density_char,
                           unsigned threads) {
  cfg.validate();
  const std::uint32_t q = cfg.modulus;
  std::vector<int> chi_table;
  if (density_char != nullptr) {
    if (density_char->modulus() != q) throw DomainError("density character modulus mismatch");
    if (!density_char->is_real() || density_char->is_principal()) {
      throw DomainError("density scan needs a real non-principal character");
    }
    chi_table.resize(q);
    for (std::uint32_t a = 0; a < q; ++a) chi_table[a] = evaluate_real(*density_char, a);
  }

  SievePassResult result;
  ClassSums& sums = result.sums;
  sums.modulus = q;
  sums.checkpoints = cfg.checkpoints;
  const std::size_t n_cp = cfg.checkpoints.size();
  sums.omega.assign(n_cp * q, 0);
  sums.Omega.assign(n_cp * q, 0);

  EmpiricalDensity& density = result.density;
  if (density_char != nullptr) {
    density.modulus = q;
    density.char_index = density_char->index();
    density.X = cfg.x_max;
    density.trace.resize(n_cp);
  }
  if (cfg.x_max == 0) return result;

  const auto primes = primes_up_to(isqrt(cfg.x_max));
  const std::uint64_t n_segments = (cfg.x_max + cfg.segment_size - 1) / cfg.segment_size;
  const std::size_t batch = std::max(threads, 1u);

  std::vector<std::uint64_t> running_omega(q, 0);
  std::vector<std::uint64_t> running_Omega(q, 0);
  u128 H_omega = 0;
  u128 H_Omega = 0;

  for (std::uint64_t first = 0; first < n_segments; first += batch) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, n_segments - first));
    std::vector<SegmentWork> work(count);
    for (std::size_t j = 0; j < count; ++j) {
      auto& w = work[j];
      w.lo = 1 + (first + j) * cfg.segment_size;
      w.hi = std::min(w.lo + cfg.segment_size, cfg.x_max + 1);
      w.first_checkpoint = static_cast<std::size_t>(
          std::lower_bound(cfg.checkpoints.begin(), cfg.checkpoints.end(), w.lo) -
          cfg.checkpoints.begin());
      w.end_checkpoint = static_cast<std::size_t>(
          std::lower_bound(cfg.checkpoints.begin(), cfg.checkpoints.end(), w.hi) -
          cfg.checkpoints.begin());
    }

    parallel_for(count, threads, [&](std::size_t j) { count_segment(work[j], cfg, primes); });

    // Ordered merge; fixes each segment's entry state for the density pass.
    for (auto& w : work) {
      if (!chi_table.empty()) {
        for (std::uint32_t a = 0; a < q; ++a) {
          w.psi_omega_entry += chi_table[a] * static_cast<std::int64_t>(running_omega[a]);
          w.psi_Omega_entry += chi_table[a] * static_cast<std::int64_t>(running_Omega[a]);
        }
      }
      for (std::size_t cp = w.first_checkpoint; cp < w.end_checkpoint; ++cp) {
        const std::size_t s = (cp - w.first_checkpoint) * q;
        for (std::uint32_t a = 0; a < q; ++a) {
          sums.omega[cp * q + a] = checked_add(running_omega[a], w.omega_snapshots[s + a]);
          sums.Omega[cp * q + a] = checked_add(running_Omega[a], w.Omega_snapshots[s + a]);
        }
      }
      for (std::uint32_t a = 0; a < q; ++a) {
        running_omega[a] = checked_add(running_omega[a], w.omega_totals[a]);
        running_Omega[a] = checked_add(running_Omega[a], w.Omega_totals[a]);
      }
    }

    if (chi_table.empty()) continue;

    parallel_for(count, threads, [&](std::size_t j) { weigh_segment(work[j], cfg, chi_table); });

    for (auto& w : work) {
      for (std::size_t cp = w.first_checkpoint; cp < w.end_checkpoint; ++cp) {
        const std::size_t s = cp - w.first_checkpoint;
        const std::uint64_t x = cfg.checkpoints[cp];
        density.trace[cp] = DensityPoint{x, w.psi_omega_at[s], w.psi_Omega_at[s],
                                         normalized(H_omega + w.H_omega_at[s], x),
                                         normalized(H_Omega + w.H_Omega_at[s], x)};
      }
      H_omega += w.H_omega;
      H_Omega += w.H_Omega;
    }
  }

  if (!chi_table.empty()) {
    density.H_omega = harmonic_value(H_omega);
    density.H_Omega = harmonic_value(H_Omega);
    density.delta_omega = normalized(H_omega, cfg.x_max);
    density.delta_Omega = normalized(H_Omega, cfg.x_max);
  }
  return result;
}

ClassSums sieve_run(const SieveConfig& cfg, unsigned threads) {
  return sieve_pass(cfg, nullptr, threads).sums;
}

EmpiricalDensity density_scan(const SieveConfig& cfg, const DirichletCharacter& chi,
                              unsigned threads) {
  return sieve_pass(cfg, &chi, threads).density;
}

}  // namespace omegabias
