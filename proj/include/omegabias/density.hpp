#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "omegabias/factor_sieve.hpp"
#include "omegabias/prediction.hpp"

namespace omegabias {

/// Random-phase surrogate for the normalized race
/// psi_f(x, chi) log^2 x / sqrt x  ~  -+drift(y) + sum_j A_j cos(U_j),
/// y = log x, with iid uniform phases U_j.
struct LiModel {
  Kind kind = Kind::omega;
  int a_chi = 0;
  std::vector<double> amplitudes;
  double drift_slope = 0.0;   // L(1/2, chi)
  double drift_offset = 0.0;  // 2 L(1/2, chi) - L'(1/2, chi)

  /// a(chi) [L(1/2) y + (2 L(1/2) - L'(1/2))].
  double drift(double y) const { return a_chi * (drift_slope * y + drift_offset); }
};

/// Amplitudes 2|L'(rho)/(1/2 + i gamma)| over 0 < gamma <= T0 for real chi;
/// for complex chi, |L'(rho)/(1/2 + i gamma)| over |gamma| <= T0, modelling the
/// real part of the race.
LiModel make_li_model(const DirichletCharacter& chi, Kind kind, const LValue& L_half,
                      const ZeroCache& cache, double T0);

struct McPoint {
  double y = 0.0;
  double p = 0.0;   // estimated probability of the bias event
  double se = 0.0;  // binomial standard error
};

struct McEstimate {
  Kind kind = Kind::omega;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<McPoint> points;

  double mean_p() const;
};

/// Estimates P[-drift(y) + X < 0] (omega) or P[drift(y) + X > 0] (Omega)
/// for each y. Requires trials >= 1000; throws DomainError for a model with
/// no amplitudes and no drift. Deterministic in the seed for any thread count.
McEstimate li_monte_carlo(const LiModel& model, const std::vector<double>& y_grid,
                          std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

/// `points` values of y evenly spaced on (0, log X], the range weighted by
/// the logarithmic density up to X.
std::vector<double> density_y_grid(double X, std::size_t points);

inline constexpr double kDensityDisagreement = 0.1;

struct DensityReport {
  std::uint64_t X = 0;
  std::optional<double> delta_omega;
  std::optional<double> delta_Omega;
  std::vector<DensityPoint> trace;
  std::optional<McEstimate> mc_omega;
  std::optional<McEstimate> mc_Omega;
  /// Set when both estimates exist and differ by more than 0.1.
  bool flag_omega = false;
  bool flag_Omega = false;
};

/// Merges an empirical scan (X = 0 or no trace means absent) with Monte Carlo
/// estimates; comparison uses the mean of the MC curve over its y-grid.
DensityReport make_density_report(const EmpiricalDensity* empirical, const McEstimate* mc_omega,
                                  const McEstimate* mc_Omega);

}  // namespace omegabias
