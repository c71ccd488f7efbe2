#include "omegabias/characters.hpp"

#include <numbers>
#include <numeric>

#include "omegabias/errors.hpp"

namespace omegabias {

namespace {


std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

std::vector<std::uint32_t> prime_divisors(std::uint32_t n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint32_t smallest_primitive_root(std::uint32_t p, std::uint32_t power) {
  const std::uint32_t phi = power / p * (p - 1);
  const auto divisors = prime_divisors(phi);
  for (std::uint32_t g = 2; g < power; ++g) {
    if (g % p == 0) continue;
    bool primitive = true;
    for (auto r : divisors) {
      if (pow_mod(g, phi / r, power) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) return g;
  }
  return 1;  // power == 2 has the trivial group
}

// x = r mod m, x = 1 mod (q / m).
std::uint32_t crt_lift(std::uint32_t r, std::uint32_t m, std::uint32_t q) {
  const std::uint32_t rest = q / m;
  for (std::uint32_t x = r; x < q; x += m) {
    if (x % rest == 1 % rest) return x;
  }
  throw DomainError("CRT lift failed");
}

}  // namespace

CharacterGroup::CharacterGroup(std::uint32_t modulus) : modulus_(modulus) {
  if (modulus == 0) throw DomainError("character modulus must be >= 1");
  if (modulus > kMaxModulus) throw DomainError("character modulus above 10^4");

  std::uint32_t n = modulus;
  for (std::uint32_t p = 2; n > 1; ++p) {
    if (p * p > n) p = n;
    if (n % p != 0) continue;
    PrimePowerPart part{p, 0, 1, {}, {}};
    while (n % p == 0) {
      n /= p;
      ++part.exponent;
      part.power *= p;
    }
    parts_.push_back(std::move(part));
  }

  // Local generators per prime power (as residues mod the prime power).
  std::vector<std::vector<std::uint32_t>> local_gens(parts_.size());
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    auto& part = parts_[k];
    std::vector<std::uint32_t> orders;
    if (part.prime == 2) {
      if (part.exponent == 2) {
        local_gens[k] = {3};
        orders = {2};
      } else if (part.exponent >= 3) {
        local_gens[k] = {part.power - 1, 5};
        orders = {2, part.power / 4};
      }
    } else {
      local_gens[k] = {smallest_primitive_root(part.prime, part.power)};
      orders = {part.power / part.prime * (part.prime - 1)};
    }
    for (std::size_t j = 0; j < orders.size(); ++j) {
      part.factors.push_back(orders_.size());
      orders_.push_back(orders[j]);
      generators_.push_back(crt_lift(local_gens[k][j], part.power, modulus));
      size_ *= orders[j];
    }

    const std::size_t f = part.factors.size();
    part.local_logs.assign(static_cast<std::size_t>(part.power) * std::max<std::size_t>(f, 1), -1);
    if (f == 0) {
      part.local_logs[1] = 0;  // residue 1 mod 2
    } else if (f == 1) {
      std::uint64_t x = 1;
      for (std::uint32_t e = 0; e < orders[0]; ++e) {
        part.local_logs[x] = static_cast<std::int32_t>(e);
        x = x * local_gens[k][0] % part.power;
      }
    } else {
      std::uint64_t x = 1;
      for (std::uint32_t u = 0; u < orders[0]; ++u) {
        std::uint64_t y = x;
        for (std::uint32_t v = 0; v < orders[1]; ++v) {
          part.local_logs[y * 2] = static_cast<std::int32_t>(u);
          part.local_logs[y * 2 + 1] = static_cast<std::int32_t>(v);
          y = y * local_gens[k][1] % part.power;
        }
        x = x * local_gens[k][0] % part.power;
      }
    }
  }

  stride_ = 1 + orders_.size();
  logs_.assign(static_cast<std::size_t>(modulus) * stride_, -1);
  for (std::uint32_t a = 0; a < modulus; ++a) {
    if (std::gcd(a, modulus) != 1) continue;
    std::int32_t* row = &logs_[static_cast<std::size_t>(a) * stride_];
    row[0] = 0;
    for (const auto& part : parts_) {
      const std::size_t f = part.factors.size();
      const std::uint32_t r = a % part.power;
      for (std::size_t j = 0; j < f; ++j) {
        row[1 + part.factors[j]] = part.local_logs[r * f + j];
      }
    }
  }
}

DirichletCharacter::DirichletCharacter(std::shared_ptr<const CharacterGroup> group,
                                       std::uint32_t index)
    : group_(std::move(group)), index_(index) {
  const auto& orders = group_->factor_orders();
  if (index >= group_->size()) throw DomainError("character index out of range");

  coords_.assign(orders.size(), 0);
  std::uint32_t rest = index;
  for (std::size_t i = orders.size(); i-- > 0;) {
    coords_[i] = rest % orders[i];
    rest /= orders[i];
  }

  for (std::size_t i = 0; i < orders.size(); ++i) {
    const std::uint32_t g = std::gcd(coords_[i], orders[i]);
    order_ = std::lcm(order_, orders[i] / g);
  }
  scale_.resize(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const std::uint32_t g = std::gcd(coords_[i], orders[i]);
    scale_[i] = (coords_[i] / g) * (order_ / (orders[i] / g)) % order_;
  }

  const std::uint32_t q = group_->modulus();
  parity_ = exponent(q - 1) == 0 ? 0 : 1;

  // Conductor: per prime power, the least p^j such that the local component
  // is trivial on units congruent to 1 mod p^j.
  for (const auto& part : group_->parts()) {
    const std::size_t f = part.factors.size();
    std::uint32_t local_order = 1;
    for (auto i : part.factors) local_order = std::lcm(local_order, orders[i]);
    auto local_exponent = [&](std::uint32_t r) {
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < f; ++j) {
        const auto i = part.factors[j];
        acc += static_cast<std::uint64_t>(coords_[i]) * (local_order / orders[i]) *
               static_cast<std::uint64_t>(part.local_logs[r * f + j]);
      }
      return acc % local_order;
    };
    std::uint32_t level = 1;
    for (std::uint32_t j = 0; j <= part.exponent; ++j, level *= part.prime) {
      bool trivial = true;
      for (std::uint32_t r = 1; r < part.power && trivial; r += level) {
        if (r % part.prime == 0 || f == 0) continue;
        trivial = local_exponent(r) == 0;
      }
      if (trivial) break;
    }
    conductor_ *= level;
  }
}

std::int32_t DirichletCharacter::exponent(std::uint64_t n) const {
  if (!group_->is_unit(n)) return kNonCoprime;
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < scale_.size(); ++i) {
    acc += static_cast<std::uint64_t>(scale_[i]) * static_cast<std::uint64_t>(group_->log(n, i));
  }
  return static_cast<std::int32_t>(acc % order_);
}

std::vector<std::int32_t> DirichletCharacter::value_exponents() const {
  std::vector<std::int32_t> table(modulus());
  for (std::uint32_t a = 0; a < modulus(); ++a) table[a] = exponent(a);
  return table;
}

std::complex<double> DirichletCharacter::root(std::int64_t e) const {
  const std::int64_t d = order_;
  e %= d;
  if (e < 0) e += d;
  if ((4 * e) % d == 0) {
    switch (4 * e / d) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(d));
}

std::uint32_t DirichletCharacter::conjugate_index() const {
  const auto& orders = group_->factor_orders();
  std::uint32_t index = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    index = index * orders[i] + (orders[i] - coords_[i]) % orders[i];
  }
  return index;
}

std::vector<DirichletCharacter> enumerate_characters(std::uint32_t q) {
  auto group = std::make_shared<const CharacterGroup>(q);
  std::vector<DirichletCharacter> out;
  out.reserve(group->size());
  for (std::uint32_t i = 0; i < group->size(); ++i) out.emplace_back(group, i);
  return out;
}

DirichletCharacter make_character(std::uint32_t q, std::uint32_t index) {
  return DirichletCharacter(std::make_shared<const CharacterGroup>(q), index);
}

std::complex<double> evaluate(const DirichletCharacter& chi, std::uint64_t n) {
  const auto e = chi.exponent(n);
  if (e == DirichletCharacter::kNonCoprime) return {0.0, 0.0};
  return chi.root(e);
}

int evaluate_real(const DirichletCharacter& chi, std::uint64_t n) {
  if (!chi.is_real()) throw DomainError("evaluate_real on a complex character");
  const auto e = chi.exponent(n);
  if (e == DirichletCharacter::kNonCoprime) return 0;
  return e == 0 ? 1 : -1;
}

std::complex<double> gauss_sum(const DirichletCharacter& chi) {
  if (!chi.is_primitive()) throw DomainError("Gauss sum requires a primitive character");
  const std::int64_t q = chi.modulus();
  const std::int64_t d = chi.order();
  // chi(a) e(a/q) = exp(2 pi i (e(a) q + a d) / (d q)); reduce the phase exactly.
  std::complex<double> sum{0.0, 0.0};
  for (std::int64_t a = 1; a <= q; ++a) {
    const auto e = chi.exponent(static_cast<std::uint64_t>(a));
    if (e == DirichletCharacter::kNonCoprime) continue;
    const std::int64_t num = (e * q + a * d) % (d * q);
    sum += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(num) /
                               static_cast<double>(d * q));
  }
  return sum;
}

std::complex<double> root_number(const DirichletCharacter& chi) {
  const auto tau = gauss_sum(chi);
  const std::complex<double> i_a = chi.parity() == 0 ? std::complex<double>{1.0, 0.0}
                                                     : std::complex<double>{0.0, 1.0};
  return tau / (i_a * std::sqrt(static_cast<double>(chi.modulus())));
}

}  // namespace omegabias
