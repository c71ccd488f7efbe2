#include "omegabias/prediction.hpp"

#include <cmath>

#include "omegabias/errors.hpp"
#include "omegabias/parallel.hpp"

namespace omegabias {

namespace {

void check_grid(const std::vector<std::uint64_t>& checkpoints, const std::vector<Complex>& observed,
                const std::vector<Prediction>& predictions) {
  if (observed.size() != checkpoints.size() || predictions.size() != checkpoints.size()) {
    throw DomainError("checkpoint grid mismatch: series lengths differ");
  }
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (predictions[k].x != static_cast<double>(checkpoints[k])) {
      throw DomainError("checkpoint grid mismatch at index " + std::to_string(k));
    }
  }
}

double normalizer(double x) {
  const double log_x = std::log(x);
  return log_x * log_x / std::sqrt(x);
}

}  // namespace

std::string_view kind_name(Kind kind) { return kind == Kind::omega ? "omega" : "Omega"; }

Kind parse_kind(std::string_view name) {
  if (name == "omega") return Kind::omega;
  if (name == "Omega") return Kind::Omega;
  throw DomainError("unknown kind '" + std::string(name) + "' (expected omega or Omega)");
}

Prediction predict(double x, const DirichletCharacter& chi, Kind kind, const LValue& L_half,
                   const ZeroCache& cache, double T0) {
  if (!(x >= 2.0)) throw DomainError("prediction requires x >= 2");
  if (chi.is_principal()) throw DomainError("prediction requires a non-principal character");
  if (cache.q != chi.modulus() || cache.char_index != chi.index()) {
    throw DomainError("zero cache belongs to a different character");
  }
  if (!(T0 >= 0.0)) throw DomainError("T0 must be non-negative");
  if (T0 > cache.T_scanned) {
    throw DomainError("T0 exceeds the scanned height of the zero cache; rescan with T >= T0");
  }

  Prediction p;
  p.x = x;
  p.kind = kind;
  p.T0 = T0;
  p.a_chi = chi.is_real() ? 1 : 0;

  const double log_x = std::log(x);
  const double sqrt_x = std::sqrt(x);
  if (p.a_chi == 1) {
    const Complex block = L_half.value * sqrt_x / log_x +
                          (2.0 * L_half.value - L_half.derivative) * sqrt_x / (log_x * log_x);
    p.main_deterministic = kind == Kind::omega ? -block : block;
  }

  Complex sum = 0.0;
  for (const auto& r : cache.records) {
    if (std::abs(r.gamma) > T0) continue;
    const Complex term = r.l_prime * std::polar(1.0, r.gamma * log_x) / Complex(0.5, r.gamma);
    if (p.a_chi == 1) {
      if (r.gamma > 0.0) {
        sum += 2.0 * term.real();
      } else if (r.gamma == 0.0) {
        sum += term.real();
      }
    } else {
      sum += term;
    }
  }
  p.zero_sum = sum * sqrt_x / (log_x * log_x);
  return p;
}

std::vector<Prediction> predict_series(const std::vector<std::uint64_t>& checkpoints,
                                       const DirichletCharacter& chi, Kind kind,
                                       const LValue& L_half, const ZeroCache& cache, double T0,
                                       unsigned threads) {
  std::vector<Prediction> out(checkpoints.size());
  parallel_for(checkpoints.size(), threads, [&](std::size_t k) {
    out[k] = predict(static_cast<double>(checkpoints[k]), chi, kind, L_half, cache, T0);
  });
  return out;
}

std::vector<Complex> observed_series(const ClassSums& sums, const DirichletCharacter& chi, Kind kind) {
  std::vector<Complex> out;
  out.reserve(sums.checkpoints.size());
  for (auto x : sums.checkpoints) {
    const auto t = twist(sums, chi, x);
    out.push_back(kind == Kind::omega ? t.omega : t.Omega);
  }
  return out;
}

ResidualSeries residual_series(const std::vector<std::uint64_t>& checkpoints,
                               const std::vector<Complex>& observed,
                               const std::vector<Prediction>& predictions) {
  check_grid(checkpoints, observed, predictions);
  ResidualSeries rs;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const double x = static_cast<double>(checkpoints[k]);
    if (x < kResidualLowerX) continue;
    rs.y.push_back(std::log(x));
    rs.sigma.push_back((observed[k] - predictions[k].total()) * normalizer(x));
  }
  if (rs.y.size() >= 2) {
    double integral = 0.0;
    for (std::size_t k = 1; k < rs.y.size(); ++k) {
      integral += 0.5 * (std::norm(rs.sigma[k - 1]) + std::norm(rs.sigma[k])) * (rs.y[k] - rs.y[k - 1]);
    }
    rs.mean_square = integral / (rs.y.back() - rs.y.front());
  }
  return rs;
}

std::vector<ComparisonRow> figure_table(const std::vector<std::uint64_t>& checkpoints,
                                        const std::vector<Complex>& observed,
                                        const std::vector<Prediction>& predictions) {
  check_grid(checkpoints, observed, predictions);
  std::vector<ComparisonRow> rows;
  rows.reserve(checkpoints.size());
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const double x = static_cast<double>(checkpoints[k]);
    const Complex full = predictions[k].total();
    rows.push_back({checkpoints[k], observed[k], predictions[k].main_deterministic, full,
                    x >= 2.0 ? (observed[k] - full) * normalizer(x) : Complex(0.0, 0.0)});
  }
  return rows;
}

}  // namespace omegabias
