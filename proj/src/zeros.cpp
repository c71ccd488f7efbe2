#include "omegabias/zeros.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "omegabias/csv.hpp"
#include "omegabias/errors.hpp"
#include "omegabias/parallel.hpp"

namespace omegabias {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTargetResidual = 1e-10;
constexpr double kMaxResidual = 1e-9;
constexpr const char* kColumns = "gamma,re_lprime,im_lprime,residual";

double grid_step(std::uint32_t q, double t, double fraction) {
  return fraction * kTwoPi / std::log(q * (std::abs(t) + 10.0) / kTwoPi + std::numbers::e);
}

// One side's smooth count (t / 2 pi) log(q t / (2 pi e)) for t >= 0.
double side_count(std::uint32_t q, double t) {
  if (t <= 0.0) return 0.0;
  return std::max(0.0, t / kTwoPi * std::log(q * t / (kTwoPi * std::numbers::e)));
}

double expected_in(std::uint32_t q, double a, double b) {
  if (b <= 0.0) return std::max(0.0, side_count(q, -a) - side_count(q, -b));
  if (a >= 0.0) return std::max(0.0, side_count(q, b) - side_count(q, a));
  return expected_in(q, a, 0.0) + expected_in(q, 0.0, b);
}

struct GridPoint {
  double t;
  double z;
};

class Scanner {
 public:
  Scanner(const DirichletCharacter& chi, double T, const ScanOptions& options)
      : L_(chi, options.params),
        q_(chi.modulus()),
        real_(chi.is_real()),
        lo_(chi.is_real() ? 0.0 : -T),
        hi_(T),
        options_(options) {}

  ZeroCache run() {
    add_points(uniform_points(lo_, hi_, options_.safety_fraction));
    probe_minima();
    refine_deficit_windows(options_.safety_fraction / 4.0);
    probe_minima();

    const double arg = argument_zero_count(L_, hi_);
    const double rounded = std::round(arg);
    const bool arg_usable = std::abs(arg - rounded) < 0.25;
    const double limit = 2.0 + std::log(q_ * hi_);
    auto reconciled = [&] {
      const double found = static_cast<double>(total_count());
      if (arg_usable) return found == rounded;
      return std::abs(found - smooth_zero_count(q_, hi_)) <= limit;
    };
    if (!arg_usable) {
      warnings_.push_back("argument-principle count unavailable at T=" + format_double(hi_) +
                          "; using the smooth count only");
    }

    if (!reconciled()) {
      add_points(uniform_points(lo_, hi_, options_.safety_fraction / 4.0));
      probe_minima();
    }
    if (!reconciled()) {
      refine_deficit_windows(options_.safety_fraction / 16.0);
      probe_minima();
    }
    if (!reconciled()) {
      std::vector<double> suspects;
      for (const auto& w : window_counts()) {
        if (w.expected - static_cast<double>(w.count) >= 0.5) suspects.push_back(w.start);
      }
      std::ostringstream msg;
      msg << "possible missed zeros: located " << total_count() << " zeros with |gamma| <= "
          << hi_ << ", expected " << (arg_usable ? rounded : smooth_zero_count(q_, hi_));
      throw MissedZerosError(msg.str(), std::move(suspects));
    }
    return assemble();
  }

 private:
  std::vector<double> uniform_points(double a, double b, double fraction) const {
    std::vector<double> ts{a};
    double t = a;
    while (t < b) {
      t = std::min(b, t + grid_step(q_, t, fraction));
      ts.push_back(t);
    }
    return ts;
  }

  void add_points(std::vector<double> ts) {
    std::erase_if(ts, [&](double t) {
      auto it = std::lower_bound(grid_.begin(), grid_.end(), t,
                                 [](const GridPoint& g, double v) { return g.t < v; });
      return it != grid_.end() && it->t == t;
    });
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<GridPoint> fresh(ts.size());
    parallel_for(ts.size(), options_.threads, [&](std::size_t i) {
      fresh[i] = {ts[i], L_.rotated_z(ts[i])};
    });
    std::vector<GridPoint> merged;
    merged.reserve(grid_.size() + fresh.size());
    std::merge(grid_.begin(), grid_.end(), fresh.begin(), fresh.end(), std::back_inserter(merged),
               [](const GridPoint& a, const GridPoint& b) { return a.t < b.t; });
    grid_ = std::move(merged);
  }

  struct Bracket {
    std::size_t left;  // grid index; right = left + 1, or left itself for an exact zero
    bool exact;
  };

  std::vector<Bracket> brackets() const {
    std::vector<Bracket> out;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (grid_[i].z == 0.0) {
        out.push_back({i, true});
      } else if (i + 1 < grid_.size() && grid_[i + 1].z != 0.0 &&
                 (grid_[i].z < 0.0) != (grid_[i + 1].z < 0.0)) {
        out.push_back({i, false});
      }
    }
    return out;
  }

  double bracket_mid(const Bracket& b) const {
    return b.exact ? grid_[b.left].t : 0.5 * (grid_[b.left].t + grid_[b.left + 1].t);
  }

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& b : brackets()) {
      const double m = bracket_mid(b);
      n += (real_ && m > 0.0) ? 2 : 1;
    }
    return n;
  }

  std::vector<WindowCount> window_counts() const {
    std::vector<WindowCount> windows;
    const auto first = static_cast<long>(std::floor(lo_));
    const auto last = static_cast<long>(std::ceil(hi_));
    for (long k = first; k < last; ++k) {
      const double a = std::max<double>(k, lo_);
      const double b = std::min<double>(k + 1, hi_);
      windows.push_back({static_cast<double>(k), 0, expected_in(q_, a, b)});
    }
    for (const auto& b : brackets()) {
      const auto k = static_cast<long>(std::floor(bracket_mid(b))) - first;
      if (k >= 0 && k < static_cast<long>(windows.size())) ++windows[static_cast<std::size_t>(k)].count;
    }
    return windows;
  }

  void refine_deficit_windows(double fraction) {
    std::vector<double> ts;
    for (const auto& w : window_counts()) {
      if (w.expected - static_cast<double>(w.count) < 1.0) continue;
      const auto pts = uniform_points(std::max(w.start, lo_), std::min(w.start + 1.0, hi_), fraction);
      ts.insert(ts.end(), pts.begin(), pts.end());
    }
    if (!ts.empty()) add_points(std::move(ts));
  }

  // A local minimum of |Z| without a sign change may hide a close pair of
  // zeros. Minimise sign * Z over the neighbouring cell; a sign flip exposes
  // the pair, a tiny minimum is reported as a possible even-order zero.
  void probe_minima() {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < grid_.size(); ++i) {
      const double a = grid_[i - 1].z, b = grid_[i].z, c = grid_[i + 1].z;
      if (a == 0.0 || b == 0.0 || c == 0.0) continue;
      if ((a < 0.0) != (b < 0.0) || (b < 0.0) != (c < 0.0)) continue;
      if (std::abs(b) < std::abs(a) && std::abs(b) <= std::abs(c)) candidates.push_back(i);
    }
    struct Probe {
      double t;
      double value;  // sign * Z at t
    };
    std::vector<Probe> probes(candidates.size());
    parallel_for(candidates.size(), options_.threads, [&](std::size_t j) {
      const std::size_t i = candidates[j];
      const double sign = grid_[i].z < 0.0 ? -1.0 : 1.0;
      auto f = [&](double t) { return sign * L_.rotated_z(t); };
      const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = grid_[i - 1].t, b = grid_[i + 1].t;
      double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
      double fc = f(c), fd = f(d);
      Probe best = fc < fd ? Probe{c, fc} : Probe{d, fd};
      for (int it = 0; it < 60 && best.value > 0.0 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - inv_phi * (b - a);
          fc = f(c);
          if (fc < best.value) best = {c, fc};
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + inv_phi * (b - a);
          fd = f(d);
          if (fd < best.value) best = {d, fd};
        }
      }
      probes[j] = best;
    });
    std::vector<double> inserts;
    for (std::size_t j = 0; j < probes.size(); ++j) {
      if (probes[j].value <= 0.0) {
        inserts.push_back(probes[j].t);
      } else if (probes[j].value < options_.even_order_tol) {
        even_order_.push_back(probes[j].t);
      }
    }
    if (!inserts.empty()) add_points(std::move(inserts));
  }

  ZeroRecord refine(const Bracket& br) const {
    double t;
    if (br.exact) {
      t = grid_[br.left].t;
    } else {
      double a = grid_[br.left].t, b = grid_[br.left + 1].t;
      double fa = grid_[br.left].z, fb = grid_[br.left + 1].z;
      for (int i = 0; i < 8; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = L_.rotated_z(m);
        if (fm == 0.0) {
          a = b = m;
          fa = fb = 0.0;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
          fb = fm;
        }
      }
      // Illinois variant of regula falsi.
      t = 0.5 * (a + b);
      int side = 0;
      for (int i = 0; i < 200 && a != b; ++i) {
        t = (a * fb - b * fa) / (fb - fa);
        if (!(t > a && t < b)) t = 0.5 * (a + b);
        const double ft = L_.rotated_z(t);
        if (ft == 0.0 || std::abs(ft) < 1e-14) break;
        if ((ft < 0.0) == (fa < 0.0)) {
          a = t;
          fa = ft;
          if (side == -1) fb *= 0.5;
          side = -1;
        } else {
          b = t;
          fb = ft;
          if (side == 1) fa *= 0.5;
          side = 1;
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) break;
      }
    }
    auto lv = L_.value(Complex(0.5, t));
    // Newton polish on the ordinate: d/dgamma L(1/2 + i gamma) = i L'.
    for (int i = 0; i < 3 && std::abs(lv.value) >= kTargetResidual; ++i) {
      const double next = t - (lv.value / (Complex(0.0, 1.0) * lv.derivative)).real();
      const auto trial = L_.value(Complex(0.5, next));
      if (!(std::abs(trial.value) < std::abs(lv.value))) break;
      t = next;
      lv = trial;
    }
    return {t, lv.derivative, std::abs(lv.value)};
  }

  ZeroCache assemble() {
    const auto brs = brackets();
    std::vector<ZeroRecord> found(brs.size());
    parallel_for(brs.size(), options_.threads, [&](std::size_t i) { found[i] = refine(brs[i]); });

    ZeroCache cache;
    cache.q = q_;
    cache.char_index = L_.character().index();
    cache.T_scanned = hi_;
    for (const auto& r : found) {
      if (r.refine_residual >= kMaxResidual) {
        throw VerificationError("zero near gamma=" + format_double(r.gamma) +
                                " did not refine below 1e-9 (residual " +
                                format_double(r.refine_residual) + ")");
      }
      if (std::abs(r.gamma) > hi_) continue;
      cache.records.push_back(r);
      if (real_ && r.gamma > 0.0) {
        cache.records.push_back({-r.gamma, std::conj(r.l_prime), r.refine_residual});
      }
    }
    std::sort(cache.records.begin(), cache.records.end(),
              [](const ZeroRecord& a, const ZeroRecord& b) { return a.gamma < b.gamma; });
    for (std::size_t i = 1; i < cache.records.size(); ++i) {
      if (cache.records[i].gamma - cache.records[i - 1].gamma <= 1e-6) {
        warnings_.push_back("zeros closer than 1e-6 near gamma=" +
                            format_double(cache.records[i].gamma));
      }
    }
    for (const auto& r : cache.records) {
      if (std::abs(r.l_prime) <= 1e-6) {
        warnings_.push_back("possible multiple zero: |L'| <= 1e-6 at gamma=" + format_double(r.gamma));
      }
    }
    std::sort(even_order_.begin(), even_order_.end());
    for (double t : even_order_) {
      warnings_.push_back("possible multiple/even-order zero near t=" + format_double(t));
    }
    cache.warnings = std::move(warnings_);
    return cache;
  }

  LFunction L_;
  std::uint32_t q_;
  bool real_;
  double lo_, hi_;
  ScanOptions options_;
  std::vector<GridPoint> grid_;
  std::vector<double> even_order_;
  std::vector<std::string> warnings_;
};

// arg L(1/2 + it) continued along Re s from 3, where |L - 1| < 1.
double continued_arg(const LFunction& L, double t) {
  auto at = [&](double sigma) { return L.value(Complex(sigma, t)).value; };
  double total = 0.0;
  auto advance = [&](auto&& self, double sa, Complex la, double sb, Complex lb, int depth) -> void {
    const double d = std::arg(lb / la);
    if (std::abs(d) > std::numbers::pi / 4.0 && depth < 40) {
      const double sm = 0.5 * (sa + sb);
      const Complex lm = at(sm);
      self(self, sa, la, sm, lm, depth + 1);
      self(self, sm, lm, sb, lb, depth + 1);
      return;
    }
    total += d;
  };
  constexpr int kSteps = 100;
  double sigma = 3.0;
  Complex prev = at(sigma);
  total = std::arg(prev);
  for (int i = 1; i <= kSteps; ++i) {
    const double next_sigma = 3.0 - 2.5 * i / kSteps;
    const Complex next = at(next_sigma);
    advance(advance, sigma, prev, next_sigma, next, 0);
    sigma = next_sigma;
    prev = next;
  }
  return total;
}

void check_scan_args(const DirichletCharacter& chi, double T) {
  if (!chi.is_primitive()) throw DomainError("zero scan requires a primitive character");
  if (chi.is_principal()) throw DomainError("zero scan requires a non-principal character");
  if (!(T > 0.0) || T > kMaxZeroHeight) throw DomainError("zero scan height must lie in (0, 1000]");
}

}  // namespace

double smooth_zero_count(std::uint32_t q, double T) {
  return T / std::numbers::pi * std::log(q * T / (kTwoPi * std::numbers::e));
}

double argument_zero_count(const LFunction& L, double T) {
  const auto& chi = L.character();
  const double log_q_pi = std::log(static_cast<double>(chi.modulus()) / std::numbers::pi);
  const Complex w{(0.5 + chi.parity()) / 2.0, T / 2.0};
  const double theta = log_gamma(w).imag() + 0.5 * T * log_q_pi;
  return (2.0 * theta + continued_arg(L, T) - continued_arg(L, -T)) / std::numbers::pi;
}

ZeroCache scan_zeros(const DirichletCharacter& chi, double T, const ScanOptions& options) {
  check_scan_args(chi, T);
  options.params.validate();
  if (!(options.safety_fraction > 0.0 && options.safety_fraction <= 1.0)) {
    throw DomainError("safety_fraction must lie in (0, 1]");
  }
  return Scanner(chi, T, options).run();
}

CountReport count_check(const ZeroCache& cache, const EvalParams& params) {
  CountReport rep;
  const double T = cache.T_scanned;
  const double log_qT = std::log(cache.q * T);
  rep.count = cache.count();
  rep.smooth_count = smooth_zero_count(cache.q, T);
  rep.deviation = std::abs(static_cast<double>(rep.count) - rep.smooth_count);
  rep.deviation_limit = 2.0 + log_qT;
  rep.global_ok = rep.deviation <= rep.deviation_limit;

  rep.window_limit = 2.0 * log_qT;
  rep.windows_ok = true;
  const auto first = static_cast<long>(std::floor(-T));
  const auto last = static_cast<long>(std::ceil(T));
  for (long k = first; k < last; ++k) {
    rep.windows.push_back({static_cast<double>(k), 0,
                           expected_in(cache.q, std::max<double>(k, -T), std::min<double>(k + 1, T))});
  }
  for (const auto& r : cache.records) {
    const auto k = static_cast<long>(std::floor(r.gamma)) - first;
    if (k >= 0 && k < static_cast<long>(rep.windows.size())) ++rep.windows[static_cast<std::size_t>(k)].count;
  }
  for (const auto& w : rep.windows) {
    if (static_cast<double>(w.count) > rep.window_limit) rep.windows_ok = false;
  }

  const auto chi = make_character(cache.q, cache.char_index);
  if (chi.is_primitive() && !chi.is_principal()) {
    const double n = argument_zero_count(LFunction(chi, params), T);
    if (std::abs(n - std::round(n)) < 0.25) {
      rep.argument_count = std::lround(n);
      rep.argument_ok = static_cast<long>(rep.count) == *rep.argument_count;
    }
  }
  if (chi.is_real()) {
    const auto& rs = cache.records;
    for (std::size_t i = 0, j = rs.size(); i < rs.size(); ++i) {
      --j;
      const bool mirrored = std::abs(rs[i].gamma + rs[j].gamma) <= 1e-9 * (1.0 + std::abs(rs[i].gamma)) &&
                            std::abs(rs[i].l_prime - std::conj(rs[j].l_prime)) <= 1e-8;
      if (!mirrored) {
        rep.symmetric_ok = false;
        break;
      }
    }
  }
  rep.passed = rep.global_ok && rep.windows_ok && rep.argument_ok && rep.symmetric_ok;
  return rep;
}

std::string cache_filename(std::uint32_t q, std::uint32_t char_index) {
  return "zeros_q" + std::to_string(q) + "_chi" + std::to_string(char_index) + ".csv";
}

std::string serialize_cache(const ZeroCache& cache) {
  std::string out = "# q=" + std::to_string(cache.q) + " chi=" + std::to_string(cache.char_index) +
                    " T=" + format_double(cache.T_scanned) + " count=" +
                    std::to_string(cache.count()) + " version=" + std::to_string(cache.version) +
                    "\n" + kColumns + "\n";
  for (const auto& r : cache.records) {
    out += format_double(r.gamma) + ',' + format_double(r.l_prime.real()) + ',' +
           format_double(r.l_prime.imag()) + ',' + format_double(r.refine_residual) + '\n';
  }
  return out;
}

ZeroCache parse_cache(std::string_view text) {
  if (text.empty() || text.back() != '\n') throw ParseError("zero cache is empty or truncated");
  const auto lines = split_lines(text);
  if (lines.size() < 2) throw ParseError("zero cache header missing");

  std::string_view header = lines[0];
  if (!header.starts_with("# ")) throw ParseError("zero cache header must start with '# '");
  header.remove_prefix(2);
  std::vector<std::string_view> values;
  for (const char* key : {"q", "chi", "T", "count", "version"}) {
    const std::string prefix = std::string(key) + "=";
    if (!header.starts_with(prefix)) throw ParseError("zero cache header: expected " + prefix);
    header.remove_prefix(prefix.size());
    const std::size_t space = header.find(' ');
    values.push_back(header.substr(0, space));
    header = space == std::string_view::npos ? std::string_view{} : header.substr(space + 1);
  }
  if (!header.empty()) throw ParseError("zero cache header: trailing content");

  ZeroCache cache;
  const auto q = parse_uint(values[0]);
  const auto chi = parse_uint(values[1]);
  if (q == 0 || q > 0xffffffffu || chi > 0xffffffffu) throw ParseError("zero cache header: bad q/chi");
  cache.q = static_cast<std::uint32_t>(q);
  cache.char_index = static_cast<std::uint32_t>(chi);
  cache.T_scanned = parse_double(values[2]);
  if (!(cache.T_scanned > 0.0)) throw ParseError("zero cache header: T must be positive");
  const auto count = parse_uint(values[3]);
  const auto version = parse_uint(values[4]);
  if (version != static_cast<std::uint64_t>(kZeroCacheVersion)) {
    throw ParseError("zero cache version " + std::string(values[4]) + " is not supported");
  }
  cache.version = kZeroCacheVersion;
  if (lines[1] != kColumns) throw ParseError("zero cache column header mismatch");
  if (lines.size() - 2 != count) throw ParseError("zero cache row count does not match header");

  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 4) throw ParseError("zero cache row " + std::to_string(i + 1) + ": expected 4 fields");
    ZeroRecord r{parse_double(fields[0]), Complex(parse_double(fields[1]), parse_double(fields[2])),
                 parse_double(fields[3])};
    if (!cache.records.empty() && !(r.gamma > cache.records.back().gamma)) {
      throw ParseError("zero cache rows are not strictly increasing");
    }
    cache.records.push_back(r);
  }
  return cache;
}

void store_cache(const ZeroCache& cache, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_cache(cache));
}

ZeroCache load_cache(const std::filesystem::path& path) { return parse_cache(read_file(path)); }

}  // namespace omegabias
