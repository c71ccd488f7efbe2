#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "omegabias/factor_sieve.hpp"
#include "omegabias/lfunction.hpp"
#include "omegabias/zeros.hpp"

namespace omegabias {

enum class Kind { omega, Omega };

std::string_view kind_name(Kind kind);
/// Accepts "omega" and "Omega"; throws DomainError otherwise.
Kind parse_kind(std::string_view name);

/// Explicit-formula right-hand side for psi_f(x, chi) without the remainder
/// (sqrt x / log^2 x) Sigma(x, T0).
struct Prediction {
  double x = 0.0;
  Kind kind = Kind::omega;
  int a_chi = 0;
  /// -+a(chi)[L(1/2) sqrt x / log x + (2 L(1/2) - L'(1/2)) sqrt x / log^2 x],
  /// minus for omega, plus for Omega.
  Complex main_deterministic;
  /// (sqrt x / log^2 x) sum_{|gamma| <= T0} L'(rho) x^{i gamma} / (1/2 + i gamma).
  Complex zero_sum;
  double T0 = 0.0;

  Complex total() const { return main_deterministic + zero_sum; }
};

/// Requires x >= 2, a non-principal chi matching the cache, and
/// 0 <= T0 <= cache.T_scanned. For real chi the zero sum is formed from
/// conjugate pairs so it is exactly real.
Prediction predict(double x, const DirichletCharacter& chi, Kind kind, const LValue& L_half,
                   const ZeroCache& cache, double T0);

std::vector<Prediction> predict_series(const std::vector<std::uint64_t>& checkpoints,
                                       const DirichletCharacter& chi, Kind kind,
                                       const LValue& L_half, const ZeroCache& cache, double T0,
                                       unsigned threads = 1);

/// psi_f(x, chi) at every checkpoint of the sums.
std::vector<Complex> observed_series(const ClassSums& sums, const DirichletCharacter& chi, Kind kind);

inline constexpr double kResidualLowerX = 1e3;

/// Sigma_emp(x, T0) = (psi_f - main - zero_sum) log^2 x / sqrt x on the
/// checkpoints with x >= 10^3, and its mean square over y = log x.
struct ResidualSeries {
  std::vector<double> y;
  std::vector<Complex> sigma;
  /// (1 / (Y - y_0)) * trapezoid integral of |Sigma_emp|^2 dy, where y_0 and
  /// Y are the first and last grid points. Zero when fewer than two points.
  double mean_square = 0.0;
};

/// Throws DomainError when the observed values and predictions are not on the
/// same checkpoint grid.
ResidualSeries residual_series(const std::vector<std::uint64_t>& checkpoints,
                               const std::vector<Complex>& observed,
                               const std::vector<Prediction>& predictions);

struct ComparisonRow {
  std::uint64_t x = 0;
  Complex observed;
  Complex main;
  Complex full;           // main + zero_sum
  Complex residual_norm;  // (observed - full) log^2 x / sqrt x
};

std::vector<ComparisonRow> figure_table(const std::vector<std::uint64_t>& checkpoints,
                                        const std::vector<Complex>& observed,
                                        const std::vector<Prediction>& predictions);

}  // namespace omegabias
