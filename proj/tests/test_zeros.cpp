#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "omegabias/csv.hpp"
#include "omegabias/errors.hpp"
#include "omegabias/zeros.hpp"
#include "oracles.hpp"

using namespace omegabias;

namespace {

const DirichletCharacter& chi4() {
  static const auto chi = make_character(4, 1);
  return chi;
}

const ZeroCache& chi4_cache_15() {
  static const auto cache = scan_zeros(chi4(), 15.0);
  return cache;
}

const ZeroCache& chi4_cache_50() {
  static const auto cache = scan_zeros(chi4(), 50.0);
  return cache;
}

// Ordinates in (0, T] where |beta(1/2 + it)| has a near-zero local minimum,
// located on a 1e-2 grid and then pinned on a 1e-4 grid.
std::vector<double> oracle_zeros_chi4(double T) {
  auto mag = [](double t) { return std::abs(oracle::beta(oracle::cplx(0.5, t))); };
  std::vector<double> out;
  const double coarse = 1e-2;
  double prev = mag(0.0), cur = mag(coarse);
  for (double t = coarse; t + coarse <= T; t += coarse) {
    const double next = mag(t + coarse);
    if (cur < prev && cur <= next && cur < 0.05) {
      double best_t = t, best = cur;
      for (double u = t - coarse; u <= t + coarse; u += 1e-4) {
        const double m = mag(u);
        if (m < best) {
          best = m;
          best_t = u;
        }
      }
      out.push_back(best_t);
    }
    prev = cur;
    cur = next;
  }
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("omegabias_test_" + name);
}

}  // namespace

TEST_CASE("chi_-4 zeros up to T = 15 match an independent oracle") {
  const auto& cache = chi4_cache_15();
  REQUIRE(cache.count() == 6);
  const double expected[] = {6.0209, 10.2437, 12.9880};
  const auto oracle_zeros = oracle_zeros_chi4(15.0);
  REQUIRE(oracle_zeros.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const double pos = cache.records[3 + i].gamma;
    const double neg = cache.records[2 - i].gamma;
    CHECK(std::abs(pos - expected[i]) < 1e-3);
    CHECK(std::abs(pos - oracle_zeros[i]) < 1e-3);
    CHECK(neg == -pos);
  }
  CHECK(cache.q == 4);
  CHECK(cache.char_index == 1);
  CHECK(cache.T_scanned == 15.0);
  CHECK(cache.warnings.empty());
}

TEST_CASE("no zeros of chi_-4 below 5") {
  const auto cache = scan_zeros(chi4(), 5.0);
  CHECK(cache.count() == 0);
  CHECK(cache.T_scanned == 5.0);
}

TEST_CASE("scan preconditions") {
  CHECK_THROWS_AS(scan_zeros(make_character(4, 0), 10.0), DomainError);
  CHECK_THROWS_AS(scan_zeros(make_character(12, 1), 10.0), DomainError);
  CHECK_THROWS_AS(scan_zeros(chi4(), 0.0), DomainError);
  CHECK_THROWS_AS(scan_zeros(chi4(), 1000.5), DomainError);
}

TEST_CASE("cache invariants for real and complex characters") {
  std::vector<DirichletCharacter> chars{chi4()};
  for (auto& chi : enumerate_characters(5)) {
    if (!chi.is_principal()) chars.push_back(chi);
  }
  chars.push_back(make_character(7, 1));
  for (const auto& chi : chars) {
    CAPTURE(chi.modulus());
    CAPTURE(chi.index());
    const auto cache = scan_zeros(chi, 40.0);
    const LFunction L(chi);
    for (std::size_t i = 0; i < cache.count(); ++i) {
      const auto& r = cache.records[i];
      CHECK(std::abs(r.gamma) <= 40.0);
      CHECK(r.refine_residual < 1e-9);
      CHECK(std::abs(L.value(Complex(0.5, r.gamma)).value) < 1e-9);
      CHECK(std::abs(r.l_prime) > 1e-6);
      if (i > 0) CHECK(r.gamma - cache.records[i - 1].gamma > 1e-6);
    }
    const auto report = count_check(cache);
    CHECK(report.passed);
    REQUIRE(report.argument_count.has_value());
    CHECK(*report.argument_count == static_cast<long>(cache.count()));
    if (chi.is_real()) {
      const auto& rs = cache.records;
      for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& mirror = rs[rs.size() - 1 - i];
        CHECK(mirror.gamma == -rs[i].gamma);
        CHECK(std::abs(mirror.l_prime - std::conj(rs[i].l_prime)) < 1e-8);
        // Paired zero-sum terms are real.
        const Complex pair = rs[i].l_prime / Complex(0.5, rs[i].gamma) +
                             mirror.l_prime / Complex(0.5, mirror.gamma);
        CHECK(std::abs(pair.imag()) < 1e-8);
      }
    }
  }
}

TEST_CASE("complex characters are scanned on both sides and differ from their conjugates") {
  const auto chars = enumerate_characters(5);
  const auto& chi = chars[1];
  REQUIRE(!chi.is_real());
  const auto a = scan_zeros(chi, 30.0);
  const auto b = scan_zeros(chars[chi.conjugate_index()], 30.0);
  REQUIRE(a.count() == b.count());
  // Zeros of the conjugate character are the reflected ordinates.
  for (std::size_t i = 0; i < a.count(); ++i) {
    CHECK(std::abs(a.records[i].gamma + b.records[a.count() - 1 - i].gamma) < 1e-9);
  }
  bool asymmetric = false;
  for (std::size_t i = 0; i < a.count(); ++i) {
    if (std::abs(a.records[i].gamma + a.records[a.count() - 1 - i].gamma) > 1e-3) asymmetric = true;
  }
  CHECK(asymmetric);
}

TEST_CASE("scan is independent of the thread count") {
  ScanOptions four;
  four.threads = 4;
  CHECK(scan_zeros(chi4(), 50.0, four) == chi4_cache_50());
}

TEST_CASE("count check") {
  const auto r15 = count_check(chi4_cache_15());
  CHECK(r15.passed);
  CHECK(r15.smooth_count == doctest::Approx(15.0 / M_PI * std::log(60.0 / (2.0 * M_PI * M_E))));
  CHECK(r15.deviation <= r15.deviation_limit);

  ZeroCache empty;
  empty.q = 4;
  empty.char_index = 1;
  empty.T_scanned = 1.0;
  const auto r1 = count_check(empty);
  CHECK(r1.smooth_count < 1.0);
  CHECK(r1.passed);

  auto damaged = chi4_cache_50();
  REQUIRE(count_check(damaged).passed);
  damaged.records.erase(damaged.records.begin() + static_cast<long>(damaged.count() / 2 + 3));
  const auto r = count_check(damaged);
  CHECK_FALSE(r.passed);
  CHECK_FALSE(r.argument_ok);
  CHECK_FALSE(r.symmetric_ok);
}

TEST_CASE("argument-principle count tracks the smooth count") {
  const LFunction L(chi4());
  for (double T : {20.0, 100.0, 300.0}) {
    const double n = argument_zero_count(L, T);
    CHECK(std::abs(n - std::round(n)) < 0.05);
    CHECK(std::abs(n - smooth_zero_count(4, T)) < 2.0 + std::log(4.0 * T));
  }
}

TEST_CASE("cache round trip") {
  const auto& cache = chi4_cache_15();
  const auto path = temp_path("zeros_roundtrip.csv");
  store_cache(cache, path);
  CHECK(load_cache(path) == cache);
  const auto text = read_file(path);
  CHECK(text.starts_with("# q=4 chi=1 T=15 count=6 version=1\n"));

  ZeroCache empty;
  empty.q = 7;
  empty.char_index = 2;
  empty.T_scanned = 0.5;
  store_cache(empty, path);
  CHECK(load_cache(path) == empty);
  std::filesystem::remove(path);

  CHECK(cache_filename(4, 1) == "zeros_q4_chi1.csv");
}

TEST_CASE("cache parse errors") {
  const std::string good = serialize_cache(chi4_cache_15());
  CHECK(parse_cache(good) == chi4_cache_15());
  // Truncated mid-row and missing final rows.
  CHECK_THROWS_AS(parse_cache(good.substr(0, good.size() - 5)), ParseError);
  const auto cut = good.rfind('\n', good.size() - 2);
  CHECK_THROWS_AS(parse_cache(good.substr(0, cut + 1)), ParseError);
  // Version mismatch.
  std::string v2 = good;
  v2.replace(v2.find("version=1"), 9, "version=2");
  CHECK_THROWS_AS(parse_cache(v2), ParseError);
  // Malformed header.
  CHECK_THROWS_AS(parse_cache("q=4 chi=1 T=15 count=0 version=1\ngamma,re_lprime,im_lprime,residual\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_cache("# q=4 chi=1 T=abc count=0 version=1\ngamma,re_lprime,im_lprime,residual\n"),
                  ParseError);
  // Unsorted rows.
  const std::string unsorted =
      "# q=4 chi=1 T=15 count=2 version=1\ngamma,re_lprime,im_lprime,residual\n"
      "6,0,0,0\n-6,0,0,0\n";
  CHECK_THROWS_AS(parse_cache(unsorted), ParseError);
  CHECK_THROWS_AS(load_cache(temp_path("does_not_exist.csv")), IoError);
}
