#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace omegabias {

inline constexpr std::uint32_t kMaxModulus = 10000;

/// Cyclic decomposition of (Z/qZ)^* with fixed generators.
///
/// Factors are ordered with the 2-part first ({-1} for 4, {-1, 5} for 2^k,
/// k >= 3), then one factor per odd prime power in increasing order, each
/// generated by the smallest primitive root of that prime power lifted by CRT.
class CharacterGroup {
 public:
  explicit CharacterGroup(std::uint32_t modulus);

  std::uint32_t modulus() const { return modulus_; }
  std::uint32_t size() const { return size_; }  // phi(q)
  const std::vector<std::uint32_t>& factor_orders() const { return orders_; }
  /// Generators of the cyclic factors, as residues mod q.
  const std::vector<std::uint32_t>& generators() const { return generators_; }

  bool is_unit(std::uint64_t n) const { return logs_[index_of(n)] >= 0; }
  /// Discrete log of n with respect to factor i; n must be a unit.
  std::int32_t log(std::uint64_t n, std::size_t i) const { return logs_[index_of(n) + 1 + i]; }

  struct PrimePowerPart {
    std::uint32_t prime;
    std::uint32_t exponent;
    std::uint32_t power;
    std::vector<std::size_t> factors;  // indices into factor_orders()
    // local_logs[r * factors.size() + j]: log of r mod power w.r.t. factors[j],
    // -1 for non-units.
    std::vector<std::int32_t> local_logs;
  };
  const std::vector<PrimePowerPart>& parts() const { return parts_; }

 private:
  std::size_t index_of(std::uint64_t n) const {
    return static_cast<std::size_t>(n % modulus_) * stride_;
  }

  std::uint32_t modulus_;
  std::uint32_t size_ = 1;
  std::vector<std::uint32_t> orders_;
  std::vector<std::uint32_t> generators_;
  std::vector<PrimePowerPart> parts_;
  std::size_t stride_ = 1;
  // stride_ entries per residue: a unit flag (-1 for non-units) followed by
  // the discrete logs.
  std::vector<std::int32_t> logs_;
};

/// A Dirichlet character mod q, stored as root-of-unity exponents: for a unit
/// a, chi(a) = exp(2 pi i e(a) / order).
class DirichletCharacter {
 public:
  static constexpr std::int32_t kNonCoprime = -1;

  DirichletCharacter(std::shared_ptr<const CharacterGroup> group, std::uint32_t index);

  std::uint32_t modulus() const { return group_->modulus(); }
  std::uint32_t index() const { return index_; }
  std::uint32_t order() const { return order_; }
  /// 0 if chi(-1) = 1, 1 otherwise.
  int parity() const { return parity_; }
  bool is_principal() const { return order_ == 1; }
  bool is_real() const { return order_ <= 2; }
  bool is_primitive() const { return conductor_ == group_->modulus(); }
  std::uint32_t conductor() const { return conductor_; }

  /// Exponents c_i of chi(g_i) = exp(2 pi i c_i / n_i) on the group generators.
  const std::vector<std::uint32_t>& coordinates() const { return coords_; }
  const CharacterGroup& group() const { return *group_; }
  const std::shared_ptr<const CharacterGroup>& group_ptr() const { return group_; }

  /// e(n mod q) in [0, order), or kNonCoprime.
  std::int32_t exponent(std::uint64_t n) const;
  /// The full table e(0), ..., e(q-1).
  std::vector<std::int32_t> value_exponents() const;

  /// exp(2 pi i e / order), exact at multiples of a quarter turn.
  std::complex<double> root(std::int64_t e) const;

  /// Index of the complex-conjugate character in the same enumeration.
  std::uint32_t conjugate_index() const;

 private:
  std::shared_ptr<const CharacterGroup> group_;
  std::uint32_t index_;
  std::vector<std::uint32_t> coords_;
  std::vector<std::uint32_t> scale_;  // per-factor multiplier c_i * order / n_i
  std::uint32_t order_ = 1;
  int parity_ = 0;
  std::uint32_t conductor_ = 1;
};

/// All phi(q) characters mod q; index 0 is principal, the rest follow the
/// lexicographic order of the generator exponent vectors.
std::vector<DirichletCharacter> enumerate_characters(std::uint32_t q);

/// Character (q, index) in the enumeration order of enumerate_characters.
DirichletCharacter make_character(std::uint32_t q, std::uint32_t index);

std::complex<double> evaluate(const DirichletCharacter& chi, std::uint64_t n);

/// Real characters only: chi(n) in {-1, 0, 1}.
int evaluate_real(const DirichletCharacter& chi, std::uint64_t n);

std::complex<double> gauss_sum(const DirichletCharacter& chi);

/// tau(chi) / (i^parity sqrt(q)).
std::complex<double> root_number(const DirichletCharacter& chi);

}  // namespace omegabias
