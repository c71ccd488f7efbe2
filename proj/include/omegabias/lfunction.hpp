#pragma once

#include <complex>
#include <vector>

#include "omegabias/characters.hpp"

namespace omegabias {

using Complex = std::complex<double>;

inline constexpr double kMaxImaginaryPart = 1e4;

/// Euler-Maclaurin controls. em_terms = 0 selects the adaptive count
/// max(12, ceil(1.3 |Im s|) + 10).
struct EvalParams {
  int em_terms = 0;
  int bernoulli_order = 12;

  int terms_for(double imag) const;
  void validate() const;
};

/// Value and s-derivative of a Dirichlet series, with a heuristic tail bound.
struct LValue {
  Complex value;
  Complex derivative;
  double err_hint = 0.0;
};

/// zeta(s, a) and d/ds zeta(s, a) for Re s > 0, s != 1, a in (0, 1].
LValue hurwitz_zeta(Complex s, double a, const EvalParams& params = {});

/// log Gamma(z) for Re z > 0 (any branch; callers only exponentiate it).
Complex log_gamma(Complex z);

/// Precomputed evaluator for L(s, chi) and the objects derived from it.
class LFunction {
 public:
  explicit LFunction(DirichletCharacter chi, EvalParams params = {});

  const DirichletCharacter& character() const { return chi_; }
  const EvalParams& params() const { return params_; }

  /// L(s, chi) and L'(s, chi).
  LValue value(Complex s) const;

  /// (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s, chi); primitive characters only.
  Complex completed(Complex s) const;

  /// Root number; primitive characters only.
  Complex root_number() const;

  /// epsilon^{-1/2} (q/pi)^{it/2} Gamma(w)/|Gamma(w)| L(1/2 + it, chi) with
  /// w = (1/2 + a + it)/2. Real up to rounding for primitive chi.
  Complex rotated_z_complex(double t) const;
  double rotated_z(double t) const { return rotated_z_complex(t).real(); }

 private:
  void require_primitive(const char* what) const;

  DirichletCharacter chi_;
  EvalParams params_;
  std::vector<double> shifts_;     // a / q for units a
  std::vector<Complex> weights_;   // chi(a)
  double log_q_;
  Complex eps_{1.0, 0.0};
  double half_eps_arg_ = 0.0;      // arg(eps) / 2, principal branch
};

LValue l_value(const DirichletCharacter& chi, Complex s, const EvalParams& params = {});

Complex completed_lambda(const DirichletCharacter& chi, Complex s, const EvalParams& params = {});

double rotated_z(const DirichletCharacter& chi, double t, const EvalParams& params = {});

}  // namespace omegabias
