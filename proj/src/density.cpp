#include "omegabias/density.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "omegabias/errors.hpp"
#include "omegabias/parallel.hpp"

namespace omegabias {

namespace {

constexpr std::uint64_t kChunkTrials = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; std::uniform_real_distribution is
// not pinned across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

LiModel make_li_model(const DirichletCharacter& chi, Kind kind, const LValue& L_half,
                      const ZeroCache& cache, double T0) {
  if (chi.is_principal()) throw DomainError("LI model requires a non-principal character");
  if (cache.q != chi.modulus() || cache.char_index != chi.index()) {
    throw DomainError("zero cache belongs to a different character");
  }
  if (!(T0 >= 0.0) || T0 > cache.T_scanned) {
    throw DomainError("T0 must lie in [0, T_scanned] of the zero cache");
  }
  LiModel m;
  m.kind = kind;
  m.a_chi = chi.is_real() ? 1 : 0;
  if (m.a_chi == 1) {
    m.drift_slope = L_half.value.real();
    m.drift_offset = (2.0 * L_half.value - L_half.derivative).real();
  }
  for (const auto& r : cache.records) {
    if (std::abs(r.gamma) > T0) continue;
    const double c = std::abs(r.l_prime / Complex(0.5, r.gamma));
    if (m.a_chi == 0) {
      m.amplitudes.push_back(c);
    } else if (r.gamma > 0.0) {
      m.amplitudes.push_back(2.0 * c);
    }
  }
  return m;
}

double McEstimate::mean_p() const {
  if (points.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : points) s += p.p;
  return s / static_cast<double>(points.size());
}

McEstimate li_monte_carlo(const LiModel& model, const std::vector<double>& y_grid,
                          std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1000) throw DomainError("Monte Carlo needs at least 1000 trials");
  bool drift = model.a_chi != 0 && (model.drift_slope != 0.0 || model.drift_offset != 0.0);
  if (model.amplitudes.empty() && !drift) {
    throw DomainError("degenerate LI model: no zeros below T0 and no deterministic drift");
  }

  std::vector<double> drifts(y_grid.size());
  for (std::size_t i = 0; i < y_grid.size(); ++i) drifts[i] = model.drift(y_grid[i]);

  const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(y_grid.size(), 0));
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(c)));
    const std::uint64_t begin = c * kChunkTrials;
    const std::uint64_t end = std::min(trials, begin + kChunkTrials);
    auto& local = counts[c];
    for (std::uint64_t t = begin; t < end; ++t) {
      double X = 0.0;
      for (double A : model.amplitudes) X += A * std::cos(2.0 * std::numbers::pi * unit_uniform(rng));
      for (std::size_t i = 0; i < drifts.size(); ++i) {
        const bool hit = model.kind == Kind::omega ? (-drifts[i] + X < 0.0) : (drifts[i] + X > 0.0);
        local[i] += hit ? 1 : 0;
      }
    }
  });

  McEstimate est;
  est.kind = model.kind;
  est.trials = trials;
  est.seed = seed;
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    std::uint64_t hits = 0;
    for (const auto& local : counts) hits += local[i];
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    est.points.push_back({y_grid[i], p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))});
  }
  return est;
}

std::vector<double> density_y_grid(double X, std::size_t points) {
  if (!(X > 1.0)) throw DomainError("density y-grid needs X > 1");
  if (points == 0) throw DomainError("density y-grid needs at least one point");
  std::vector<double> ys(points);
  const double Y = std::log(X);
  for (std::size_t i = 0; i < points; ++i) ys[i] = Y * static_cast<double>(i + 1) / static_cast<double>(points);
  return ys;
}

DensityReport make_density_report(const EmpiricalDensity* empirical, const McEstimate* mc_omega,
                                  const McEstimate* mc_Omega) {
  DensityReport rep;
  if (empirical != nullptr && empirical->X > 0 && !empirical->trace.empty()) {
    rep.X = empirical->X;
    rep.delta_omega = empirical->delta_omega;
    rep.delta_Omega = empirical->delta_Omega;
    rep.trace = empirical->trace;
  }
  if (mc_omega != nullptr) rep.mc_omega = *mc_omega;
  if (mc_Omega != nullptr) rep.mc_Omega = *mc_Omega;
  if (rep.delta_omega && rep.mc_omega && !rep.mc_omega->points.empty()) {
    rep.flag_omega = std::abs(*rep.delta_omega - rep.mc_omega->mean_p()) > kDensityDisagreement;
  }
  if (rep.delta_Omega && rep.mc_Omega && !rep.mc_Omega->points.empty()) {
    rep.flag_Omega = std::abs(*rep.delta_Omega - rep.mc_Omega->mean_p()) > kDensityDisagreement;
  }
  return rep;
}

}  // namespace omegabias
