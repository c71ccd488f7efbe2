#include "omegabias/lfunction.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "omegabias/errors.hpp"

namespace omegabias {

namespace {

// B_{2j} / (2j)!, j = 1..30.
constexpr std::array<double, 30> kBernoulliOverFactorial = {
    8.3333333333333333e-2,   -1.3888888888888889e-3,  3.3068783068783069e-5,
    -8.2671957671957672e-7,  2.0876756987868099e-8,   -5.2841901386874932e-10,
    1.3382536530684679e-11,  -3.3896802963225829e-13, 8.5860620562778446e-15,
    -2.1748686985580619e-16, 5.5090028283602295e-18,  -1.3954464685812523e-19,
    3.5347070396294675e-21,  -8.9535174270375469e-23, 2.2679524523376831e-24,
    -5.7447906688722024e-26, 1.4551724756148649e-27,  -3.6859949406653102e-29,
    9.3367342570950447e-31,  -2.3650224157006299e-32, 5.9906717624821343e-34,
    -1.5174548844682903e-35, 3.8437581254541882e-37,  -9.736353072646691e-39,
    2.466247044200681e-40,   -6.2470767418207437e-42, 1.5824030244644914e-43,
    -4.008273685948936e-45,  1.0153075855569556e-46,  -2.5718041582418717e-48,
};

// Neumaier compensated sum of complex terms.
class CompensatedSum {
 public:
  void add(Complex x) {
    add_part(sum_re_, comp_re_, x.real());
    add_part(sum_im_, comp_im_, x.imag());
  }
  Complex value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double sum_re_ = 0.0, comp_re_ = 0.0, sum_im_ = 0.0, comp_im_ = 0.0;
};

// Euler-Maclaurin truncation of zeta(s, a) without the pole term
// (N + a)^{1-s} / (s - 1), together with its s-derivative.
struct HurwitzParts {
  Complex value;
  Complex derivative;
  double tail;
  double log_end;  // log(N + a)
};

HurwitzParts hurwitz_parts(Complex s, double a, int n_terms, int order) {
  CompensatedSum value;
  CompensatedSum derivative;
  for (int k = 0; k < n_terms; ++k) {
    const double log_k = std::log(k + a);
    const Complex term = std::exp(-s * log_k);
    value.add(term);
    derivative.add(-log_k * term);
  }

  const double log_end = std::log(n_terms + a);
  const Complex end_pow = std::exp(-s * log_end);  // (N + a)^{-s}
  value.add(0.5 * end_pow);
  derivative.add(-0.5 * log_end * end_pow);

  // sum_j B_{2j}/(2j)! (s)_{2j-1} (N + a)^{-s-2j+1}
  Complex poch = s;                 // (s)_{2j-1}
  Complex poch_d = 1.0;             // d/ds (s)_{2j-1}
  Complex power = end_pow / (n_terms + a);  // (N + a)^{-s-1}
  const double inv_sq = 1.0 / ((n_terms + a) * (n_terms + a));
  double last = 0.0;
  for (int j = 1; j <= order; ++j) {
    const double c = kBernoulliOverFactorial[static_cast<std::size_t>(j - 1)];
    const Complex term = c * poch * power;
    value.add(term);
    derivative.add(c * (poch_d - log_end * poch) * power);
    last = std::abs(term);
    // (s)_{2j+1} = (s)_{2j-1} (s + 2j - 1)(s + 2j)
    for (int m : {2 * j - 1, 2 * j}) {
      poch_d = poch_d * (s + static_cast<double>(m)) + poch;
      poch *= s + static_cast<double>(m);
    }
    power *= inv_sq;
  }
  return {value.value(), derivative.value(), last, log_end};
}

void check_strip(Complex s) {
  if (!(s.real() > 0.0)) throw DomainError("Hurwitz zeta requires Re s > 0");
  if (std::abs(s.imag()) > kMaxImaginaryPart) throw DomainError("|Im s| above 10^4 ceiling");
}

}  // namespace

int EvalParams::terms_for(double imag) const {
  if (em_terms > 0) return em_terms;
  return std::max(12, static_cast<int>(std::ceil(1.3 * std::abs(imag))) + 10);
}

void EvalParams::validate() const {
  if (em_terms < 0) throw DomainError("em_terms must be >= 1 (or 0 for adaptive)");
  if (bernoulli_order < 1 || bernoulli_order > 30) {
    throw DomainError("bernoulli_order must lie in [1, 30]");
  }
}

LValue hurwitz_zeta(Complex s, double a, const EvalParams& params) {
  params.validate();
  if (s == Complex(1.0, 0.0)) throw PoleError("Hurwitz zeta has a pole at s = 1");
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("Hurwitz shift a must lie in (0, 1]");
  check_strip(s);
  const int n = params.terms_for(s.imag());
  const auto parts = hurwitz_parts(s, a, n, params.bernoulli_order);
  const Complex pole_pow = std::exp((1.0 - s) * parts.log_end);  // (N + a)^{1-s}
  const Complex sm1 = s - 1.0;
  LValue out;
  out.value = parts.value + pole_pow / sm1;
  out.derivative = parts.derivative - parts.log_end * pole_pow / sm1 - pole_pow / (sm1 * sm1);
  out.err_hint = parts.tail;
  return out;
}

Complex log_gamma(Complex z) {
  if (!(z.real() > 0.0)) throw DomainError("log_gamma implemented for Re z > 0");
  // Shift up until Stirling's series is accurate to double precision.
  Complex shift_log = 0.0;
  while (std::abs(z) < 15.0) {
    shift_log += std::log(z);
    z += 1.0;
  }
  const Complex inv = 1.0 / z;
  const Complex inv_sq = inv * inv;
  Complex series = 0.0;
  Complex power = inv;
  for (int k = 1; k <= 10; ++k) {
    // B_{2k} / (2k (2k - 1)) = (2k-2)! * B_{2k}/(2k)!
    double fact = 1.0;
    for (int m = 2; m <= 2 * k - 2; ++m) fact *= m;
    series += kBernoulliOverFactorial[static_cast<std::size_t>(k - 1)] * fact * power;
    power *= inv_sq;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series -
         shift_log;
}

LFunction::LFunction(DirichletCharacter chi, EvalParams params)
    : chi_(std::move(chi)), params_(params), log_q_(std::log(static_cast<double>(chi_.modulus()))) {
  params_.validate();
  const std::uint32_t q = chi_.modulus();
  for (std::uint32_t a = 1; a <= q; ++a) {
    const auto e = chi_.exponent(a);
    if (e == DirichletCharacter::kNonCoprime) continue;
    shifts_.push_back(static_cast<double>(a) / q);
    weights_.push_back(chi_.root(e));
  }
  if (chi_.is_primitive()) {
    eps_ = omegabias::root_number(chi_);
    half_eps_arg_ = 0.5 * std::arg(eps_);
  }
}

void LFunction::require_primitive(const char* what) const {
  if (!chi_.is_primitive()) throw DomainError(std::string(what) + " requires a primitive character");
}

LValue LFunction::value(Complex s) const {
  const bool at_one = s == Complex(1.0, 0.0);
  if (at_one && chi_.is_principal()) throw PoleError("L(s, chi_0) has a pole at s = 1");
  check_strip(s);
  if (chi_.modulus() == 1) return hurwitz_zeta(s, 1.0, params_);
  const int n = params_.terms_for(s.imag());

  CompensatedSum value;
  CompensatedSum derivative;
  // Pole terms sum_a chi(a) (N + a/q)^{1-s} / (s - 1); for s = 1 with a
  // non-principal character the poles cancel and the finite limit is used.
  CompensatedSum pole_value;
  CompensatedSum pole_derivative;
  double tail = 0.0;
  for (std::size_t i = 0; i < shifts_.size(); ++i) {
    const auto parts = hurwitz_parts(s, shifts_[i], n, params_.bernoulli_order);
    value.add(weights_[i] * parts.value);
    derivative.add(weights_[i] * parts.derivative);
    tail += parts.tail;
    if (at_one) {
      pole_value.add(-weights_[i] * parts.log_end);
      pole_derivative.add(weights_[i] * (0.5 * parts.log_end * parts.log_end));
    } else {
      const Complex sm1 = s - 1.0;
      const Complex pole_pow = std::exp((1.0 - s) * parts.log_end);
      pole_value.add(weights_[i] * pole_pow / sm1);
      pole_derivative.add(weights_[i] *
                          (-parts.log_end * pole_pow / sm1 - pole_pow / (sm1 * sm1)));
    }
  }
  const Complex inner = value.value() + pole_value.value();
  const Complex inner_d = derivative.value() + pole_derivative.value();
  const Complex scale = std::exp(-s * log_q_);  // q^{-s}
  LValue out;
  out.value = scale * inner;
  out.derivative = scale * (inner_d - log_q_ * inner);
  out.err_hint = std::abs(scale) * tail;
  return out;
}

Complex LFunction::root_number() const {
  require_primitive("root number");
  return eps_;
}

Complex LFunction::completed(Complex s) const {
  require_primitive("completed L-function");
  const Complex w = (s + static_cast<double>(chi_.parity())) / 2.0;
  const Complex log_factor = w * (log_q_ - std::log(std::numbers::pi)) + log_gamma(w);
  return std::exp(log_factor) * value(s).value;
}

Complex LFunction::rotated_z_complex(double t) const {
  require_primitive("rotated Z-function");
  const Complex w{(0.5 + chi_.parity()) / 2.0, t / 2.0};
  const double theta =
      log_gamma(w).imag() + 0.5 * t * (log_q_ - std::log(std::numbers::pi)) - half_eps_arg_;
  return std::polar(1.0, theta) * value(Complex(0.5, t)).value;
}

LValue l_value(const DirichletCharacter& chi, Complex s, const EvalParams& params) {
  return LFunction(chi, params).value(s);
}

Complex completed_lambda(const DirichletCharacter& chi, Complex s, const EvalParams& params) {
  if (!chi.is_primitive()) throw DomainError("completed L-function requires a primitive character");
  return LFunction(chi, params).completed(s);
}

double rotated_z(const DirichletCharacter& chi, double t, const EvalParams& params) {
  if (!chi.is_primitive()) throw DomainError("rotated Z-function requires a primitive character");
  return LFunction(chi, params).rotated_z(t);
}

}  // namespace omegabias
