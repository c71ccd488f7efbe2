#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "omegabias/characters.hpp"
#include "omegabias/errors.hpp"
#include "oracles.hpp"

using namespace omegabias;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> value_table(const DirichletCharacter& chi) {
  std::vector<cplx> v(chi.modulus());
  for (std::uint32_t a = 0; a < chi.modulus(); ++a) v[a] = evaluate(chi, a);
  return v;
}

std::uint32_t euler_phi(std::uint32_t q) {
  std::uint32_t count = 0;
  for (std::uint32_t a = 0; a < q; ++a) count += std::gcd(a, q) == 1;
  return count;
}

}  // namespace

TEST_CASE("mod 4 has the principal character and chi_{-4}") {
  const auto chars = enumerate_characters(4);
  REQUIRE(chars.size() == 2);
  CHECK(chars[0].is_principal());
  const auto& chi = chars[1];
  CHECK(evaluate_real(chi, 1) == 1);
  CHECK(evaluate_real(chi, 3) == -1);
  CHECK(evaluate(chi, 3) == cplx(-1.0, 0.0));
  CHECK(evaluate(chi, 6) == cplx(0.0, 0.0));
  CHECK(chi.parity() == 1);
  CHECK(chi.is_real());
  CHECK(chi.is_primitive());
}

TEST_CASE("mod 1 is the trivial group") {
  const auto chars = enumerate_characters(1);
  REQUIRE(chars.size() == 1);
  for (std::uint64_t n : {0u, 1u, 2u, 17u, 1000u}) CHECK(evaluate(chars[0], n) == cplx(1.0, 0.0));
  CHECK(chars[0].is_primitive());
  CHECK(gauss_sum(chars[0]) == cplx(1.0, 0.0));
}

TEST_CASE("mod 7 has exactly one real non-principal character, the residue symbol") {
  std::set<std::uint32_t> squares;
  for (std::uint32_t x = 1; x < 7; ++x) squares.insert(x * x % 7);
  REQUIRE(squares == std::set<std::uint32_t>{1, 2, 4});

  const auto chars = enumerate_characters(7);
  REQUIRE(chars.size() == 6);
  int real_nonprincipal = 0;
  for (const auto& chi : chars) {
    if (!chi.is_real() || chi.is_principal()) continue;
    ++real_nonprincipal;
    for (std::uint32_t a = 1; a < 7; ++a) {
      CHECK(evaluate_real(chi, a) == (squares.count(a) ? 1 : -1));
    }
    CHECK(evaluate_real(chi, 3) == -1);
  }
  CHECK(real_nonprincipal == 1);
}

TEST_CASE("modulus 0 and out-of-range indices are domain errors") {
  CHECK_THROWS_AS(enumerate_characters(0), DomainError);
  CHECK_THROWS_AS(make_character(5, 4), DomainError);
  CHECK_THROWS_AS(enumerate_characters(10001), DomainError);
}

TEST_CASE("chi(1) = 1 and complex evaluation at 1") {
  for (std::uint32_t q : {1u, 5u, 12u, 16u, 63u}) {
    for (const auto& chi : enumerate_characters(q)) CHECK(evaluate(chi, 1) == cplx(1.0, 0.0));
  }
}

TEST_CASE("Gauss sums of small primitive characters") {
  const auto chi4 = make_character(4, 1);
  const auto tau4 = gauss_sum(chi4);
  CHECK(std::abs(tau4 - cplx(0.0, 2.0)) < 1e-14);

  const auto chi3 = make_character(3, 1);
  CHECK(chi3.is_real());
  CHECK(std::abs(gauss_sum(chi3) - cplx(0.0, std::sqrt(3.0))) < 1e-14);

  CHECK_THROWS_AS(gauss_sum(make_character(4, 0)), DomainError);
  CHECK_THROWS_AS(root_number(make_character(8, 0)), DomainError);
}

TEST_CASE("root numbers") {
  CHECK(std::abs(root_number(make_character(4, 1)) - cplx(1.0, 0.0)) < 1e-14);

  for (std::uint32_t q : {3u, 4u, 5u, 7u, 8u, 11u}) {
    int seen = 0;
    for (const auto& chi : enumerate_characters(q)) {
      if (!chi.is_real() || !chi.is_primitive()) continue;
      ++seen;
      const auto eps = root_number(chi);
      CHECK(std::abs(eps.imag()) < 1e-12);
      CHECK(eps.real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(seen >= 1);
  }

  // Complex character mod 5 sending the generator 2 to i.
  bool found = false;
  for (const auto& chi : enumerate_characters(5)) {
    if (std::abs(evaluate(chi, 2) - cplx(0.0, 1.0)) > 1e-15) continue;
    found = true;
    // Direct four-term sum.
    cplx tau = 0.0;
    for (int a = 1; a < 5; ++a) tau += evaluate(chi, a) * std::polar(1.0, 2.0 * std::numbers::pi * a / 5.0);
    CHECK(std::abs(gauss_sum(chi) - tau) < 1e-13);
    CHECK(std::abs(std::abs(root_number(chi)) - 1.0) < 1e-12);
  }
  CHECK(found);
}

TEST_CASE("enumeration size, principal first, deterministic") {
  for (std::uint32_t q = 1; q <= 120; ++q) {
    const auto chars = enumerate_characters(q);
    REQUIRE(chars.size() == euler_phi(q));
    CHECK(chars[0].is_principal());
    const auto again = enumerate_characters(q);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      CHECK(chars[i].index() == i);
      CHECK(chars[i].value_exponents() == again[i].value_exponents());
    }
  }
}

TEST_CASE("table invariants: multiplicativity, zeros off units, reality, parity") {
  std::mt19937_64 rng(20240601);
  for (std::uint32_t q = 1; q <= 150; ++q) {
    for (const auto& chi : enumerate_characters(q)) {
      const auto e = chi.value_exponents();
      const auto d = static_cast<std::int64_t>(chi.order());
      CHECK(chi.exponent(1 % q) == 0);
      bool all_half = true;
      for (std::uint32_t a = 0; a < q; ++a) {
        const bool unit = std::gcd(a, q) == 1;
        CHECK((e[a] == DirichletCharacter::kNonCoprime) == !unit);
        if (unit && e[a] != 0 && 2 * e[a] != d) all_half = false;
      }
      CHECK(chi.is_real() == all_half);
      // chi^2 principal <=> real
      bool square_principal = true;
      for (std::uint32_t a = 0; a < q; ++a) {
        if (e[a] >= 0 && (2 * e[a]) % d != 0) square_principal = false;
      }
      CHECK(chi.is_real() == square_principal);
      if (q > 2) CHECK((e[q - 1] == 0) == (chi.parity() == 0));

      std::uniform_int_distribution<std::uint32_t> pick(0, q - 1);
      for (int trial = 0; trial < 20; ++trial) {
        const auto a = pick(rng);
        const auto b = pick(rng);
        if (e[a] < 0 || e[b] < 0) continue;
        const auto ab = static_cast<std::uint64_t>(a) * b % q;
        CHECK((e[ab] - e[a] - e[b]) % d == 0);
      }
    }
  }
}

TEST_CASE("real characters evaluate to exact integers") {
  for (std::uint32_t q : {3u, 4u, 8u, 12u, 24u, 105u}) {
    for (const auto& chi : enumerate_characters(q)) {
      if (!chi.is_real()) continue;
      for (std::uint64_t n = 0; n < 3 * q; ++n) {
        const auto v = evaluate(chi, n);
        CHECK(v.imag() == 0.0);
        CHECK((v.real() == 0.0 || v.real() == 1.0 || v.real() == -1.0));
        CHECK(v.real() == static_cast<double>(evaluate_real(chi, n)));
      }
    }
  }
}

TEST_CASE("orthogonality for q <= 200") {
  for (std::uint32_t q = 1; q <= 200; ++q) {
    const auto chars = enumerate_characters(q);
    std::vector<std::vector<cplx>> tables;
    for (const auto& chi : chars) tables.push_back(value_table(chi));
    const double phi = static_cast<double>(chars.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      for (std::size_t j = 0; j < chars.size(); ++j) {
        cplx s = 0.0;
        for (std::uint32_t a = 0; a < q; ++a) s += tables[i][a] * std::conj(tables[j][a]);
        worst = std::max(worst, std::abs(s / phi - (i == j ? 1.0 : 0.0)));
      }
    }
    CHECK_MESSAGE(worst < 1e-12, "q=" << q);
  }
}

TEST_CASE("conductor matches the brute-force inducing modulus for q <= 60") {
  for (std::uint32_t q = 1; q <= 60; ++q) {
    for (const auto& chi : enumerate_characters(q)) {
      const auto f = oracle::brute_conductor(value_table(chi));
      CHECK_MESSAGE(chi.conductor() == f, "q=" << q << " index=" << chi.index());
      CHECK(chi.is_primitive() == (f == q));
    }
  }
}

TEST_CASE("|tau|^2 = q for primitive characters, q <= 100") {
  for (std::uint32_t q = 1; q <= 100; ++q) {
    for (const auto& chi : enumerate_characters(q)) {
      if (!chi.is_primitive()) continue;
      CHECK(std::abs(std::norm(gauss_sum(chi)) - q) < 1e-10);
      CHECK(std::abs(std::abs(root_number(chi)) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("conjugate index gives the conjugate values") {
  for (std::uint32_t q : {5u, 7u, 15u, 16u, 21u, 40u}) {
    const auto chars = enumerate_characters(q);
    for (const auto& chi : chars) {
      const auto& bar = chars[chi.conjugate_index()];
      for (std::uint32_t a = 0; a < q; ++a) {
        CHECK(std::abs(evaluate(bar, a) - std::conj(evaluate(chi, a))) < 1e-15);
      }
      CHECK(bar.conjugate_index() == chi.index());
    }
  }
}
