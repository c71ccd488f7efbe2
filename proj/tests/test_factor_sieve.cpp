#include <cmath>
#include <numeric>

#include "doctest.h"
#include "omegabias/errors.hpp"
#include "omegabias/factor_sieve.hpp"
#include "oracles.hpp"

using namespace omegabias;

namespace {

SieveConfig small_config(std::uint64_t x_max, std::uint32_t q, std::vector<std::uint64_t> cps,
                         std::uint64_t segment = 1 << 20) {
  SieveConfig cfg;
  cfg.x_max = x_max;
  cfg.modulus = q;
  cfg.segment_size = segment;
  cfg.checkpoints = std::move(cps);
  return cfg;
}

}  // namespace

TEST_CASE("segmented counts equal trial division for n <= 10^5") {
  const std::uint64_t limit = 100'000;
  const auto primes = primes_up_to(400);
  for (std::uint64_t segment : {std::uint64_t{7}, std::uint64_t{4096}, limit}) {
    for (std::uint64_t lo = 1; lo <= limit; lo += segment) {
      const std::uint64_t hi = std::min(lo + segment, limit + 1);
      std::vector<std::uint8_t> w(hi - lo), W(hi - lo);
      factor_counts(lo, hi, primes, w, W);
      for (std::uint64_t n = lo; n < hi; ++n) {
        const auto [d, t] = oracle::trial_division(n);
        if (w[n - lo] != d || W[n - lo] != t) {
          FAIL("mismatch at n=" << n);
        }
      }
    }
  }
}

TEST_CASE("toy sums mod 4 up to 10") {
  const auto sums = sieve_run(small_config(10, 4, {10}));
  CHECK(sums.omega_at(0, 1) == 2);
  CHECK(sums.omega_at(0, 3) == 2);
  CHECK(sums.Omega_at(0, 1) == 3);
  CHECK(sums.Omega_at(0, 3) == 2);

  const auto chi = make_character(4, 1);
  const auto t = twist(sums, chi, 10);
  CHECK(t.omega == std::complex<double>(0.0, 0.0));
  CHECK(t.Omega == std::complex<double>(1.0, 0.0));
  const auto r = twist_real(sums, chi, 10);
  CHECK(r.omega == 0);
  CHECK(r.Omega == 1);
}

TEST_CASE("x_max = 1 gives zero sums, x_max = 0 is empty") {
  const auto one = sieve_run(small_config(1, 3, {1}));
  for (std::uint32_t a = 0; a < 3; ++a) {
    CHECK(one.omega_at(0, a) == 0);
    CHECK(one.Omega_at(0, a) == 0);
  }
  const auto empty = sieve_run(small_config(0, 4, {}));
  CHECK(empty.checkpoints.empty());
  CHECK(empty.omega.empty());
}

TEST_CASE("untwisted sum of omega to 1000 matches the trial-division oracle") {
  std::uint64_t brute = 0;
  for (std::uint64_t n = 1; n <= 1000; ++n) brute += oracle::trial_division(n).first;
  CHECK(brute == 2126);
  const auto sums = sieve_run(small_config(1000, 1, {1000}));
  const auto t = twist(sums, make_character(1, 0), 1000);
  CHECK(t.omega.real() == 2126.0);
}

TEST_CASE("sum of omega equals sum over primes of floor(x/p)") {
  const auto sums = sieve_run(small_config(10'000, 12, {100, 1000, 10'000}));
  for (std::uint64_t x : {100u, 1000u, 10'000u}) {
    std::uint64_t expected = 0;
    for (std::uint64_t p = 2; p <= x; ++p) {
      if (oracle::is_prime(p)) expected += x / p;
    }
    CHECK(sums.omega_total(sums.checkpoint_index(x)) == expected);
  }
}

TEST_CASE("class sums are monotone and Omega dominates omega strictly beyond 3") {
  std::vector<std::uint64_t> cps(60);
  std::iota(cps.begin(), cps.end(), 1);
  const auto sums = sieve_run(small_config(60, 5, cps, 8));
  for (std::size_t k = 0; k < cps.size(); ++k) {
    if (k > 0) {
      for (std::uint32_t a = 0; a < 5; ++a) {
        CHECK(sums.omega_at(k, a) >= sums.omega_at(k - 1, a));
        CHECK(sums.Omega_at(k, a) >= sums.Omega_at(k - 1, a));
      }
    }
    const bool equal = sums.Omega_total(k) == sums.omega_total(k);
    CHECK(equal == (cps[k] <= 3));
  }
}

TEST_CASE("results are independent of segment size and thread count") {
  const auto cps = geometric_checkpoints(200'000, 1.05, 100);
  const auto reference = sieve_run(small_config(200'000, 7, cps, 1 << 20), 1);
  for (std::uint64_t segment : {std::uint64_t{2}, std::uint64_t{997}, std::uint64_t{65536}}) {
    if (segment == 2) {
      // Tiny segments are slow; use a shorter range for them.
      const auto cps_short = geometric_checkpoints(3000, 1.05, 100);
      CHECK(sieve_run(small_config(3000, 7, cps_short, 2), 1) ==
            sieve_run(small_config(3000, 7, cps_short, 1 << 20), 1));
      continue;
    }
    for (unsigned threads : {1u, 3u, 4u}) {
      CHECK(sieve_run(small_config(200'000, 7, cps, segment), threads) == reference);
    }
  }
}

TEST_CASE("twist of the conjugate character is the conjugate twist") {
  const auto cps = geometric_checkpoints(50'000, 1.1, 100);
  const auto sums = sieve_run(small_config(50'000, 15, cps));
  const auto chars = enumerate_characters(15);
  for (const auto& chi : chars) {
    const auto& bar = chars[chi.conjugate_index()];
    for (auto x : cps) {
      const auto a = twist(sums, chi, x);
      const auto b = twist(sums, bar, x);
      CHECK(std::abs(a.omega - std::conj(b.omega)) <= 1e-12 * (1.0 + std::abs(a.omega)));
      CHECK(std::abs(a.Omega - std::conj(b.Omega)) <= 1e-12 * (1.0 + std::abs(a.Omega)));
    }
  }
}

TEST_CASE("twist errors") {
  const auto sums = sieve_run(small_config(100, 4, {50, 100}));
  CHECK_THROWS_AS(twist(sums, make_character(5, 1), 100), DomainError);
  CHECK_THROWS_AS(twist(sums, make_character(4, 1), 99), DomainError);
  CHECK_THROWS_AS(twist_real(sums, make_character(4, 1), 51), DomainError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(sieve_run(small_config(100, 4, {50, 40})), DomainError);
  CHECK_THROWS_AS(sieve_run(small_config(100, 4, {101})), DomainError);
  CHECK_THROWS_AS(sieve_run(small_config(100, 4, {50}, 1)), DomainError);
  CHECK_THROWS_AS(sieve_run(small_config(100, 0, {50})), DomainError);
  CHECK_THROWS_AS(sieve_run(small_config(kSieveCeiling + 1, 4, {})), DomainError);
}

TEST_CASE("geometric checkpoint grid") {
  const auto grid = geometric_checkpoints(100'000);
  REQUIRE(grid.size() > 100);
  CHECK(grid.front() == 1000);
  CHECK(grid[1] == 1020);
  CHECK(grid.back() == 100'000);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK(geometric_checkpoints(10) == std::vector<std::uint64_t>{10});
  CHECK(geometric_checkpoints(0).empty());
  CHECK_THROWS_AS(geometric_checkpoints(100, 1.0), DomainError);
}

TEST_CASE("density scan on the toy range") {
  const auto chi = make_character(4, 1);
  const auto d10 = density_scan(small_config(10, 4, {10}), chi);
  CHECK(d10.H_Omega == doctest::Approx(1.0 / 9.0 + 1.0 / 10.0).epsilon(1e-15));
  CHECK(d10.delta_Omega == doctest::Approx((1.0 / 9.0 + 1.0 / 10.0) / std::log(10.0)).epsilon(1e-15));
  // psi_omega: 0 at 1..2, -1 at 3..4, 0 at 5..6, -1 at 7..8, 0 at 9..10.
  CHECK(d10.H_omega == doctest::Approx(1.0 / 3 + 1.0 / 4 + 1.0 / 7 + 1.0 / 8).epsilon(1e-15));
  REQUIRE(d10.trace.size() == 1);
  CHECK(d10.trace[0].psi_Omega == 1);
  CHECK(d10.trace[0].psi_omega == 0);

  const auto d2 = density_scan(small_config(2, 4, {2}), chi);
  CHECK(d2.delta_omega == 0.0);
  CHECK(d2.delta_Omega == 0.0);
}

TEST_CASE("density scan agrees with a brute-force running sum") {
  const auto chi = make_character(12, 3);  // some real character mod 12
  REQUIRE(chi.is_real());
  const std::uint64_t X = 5000;
  long psi_w = 0, psi_W = 0;
  double Hw = 0.0, HW = 0.0;
  for (std::uint64_t n = 1; n <= X; ++n) {
    const auto [w, W] = oracle::trial_division(n);
    const int c = evaluate_real(chi, n);
    psi_w += c * w;
    psi_W += c * W;
    if (psi_w < 0) Hw += 1.0 / n;
    if (psi_W > 0) HW += 1.0 / n;
  }
  const auto d = density_scan(small_config(X, 12, {1000, X}, 333), chi, 2);
  CHECK(d.H_omega == doctest::Approx(Hw).epsilon(1e-13));
  CHECK(d.H_Omega == doctest::Approx(HW).epsilon(1e-13));
  CHECK(d.trace.back().psi_omega == psi_w);
  CHECK(d.trace.back().psi_Omega == psi_W);
  CHECK(d.delta_Omega >= 0.0);
  CHECK(d.delta_Omega <= 1.0 + 1e-12);
}

TEST_CASE("density scan is bit-identical across segment sizes and threads") {
  const auto chi = make_character(4, 1);
  const auto cps = geometric_checkpoints(300'000);
  const auto reference = density_scan(small_config(300'000, 4, cps, 1 << 20), chi, 1);
  for (std::uint64_t segment : {std::uint64_t{1000}, std::uint64_t{65536}}) {
    for (unsigned threads : {1u, 4u}) {
      CHECK(density_scan(small_config(300'000, 4, cps, segment), chi, threads) == reference);
    }
  }
}

TEST_CASE("density scan rejects complex and principal characters") {
  CHECK_THROWS_AS(density_scan(small_config(100, 5, {100}), make_character(5, 1)), DomainError);
  CHECK_THROWS_AS(density_scan(small_config(100, 4, {100}), make_character(4, 0)), DomainError);
  CHECK_THROWS_AS(density_scan(small_config(100, 3, {100}), make_character(4, 1)), DomainError);
}
