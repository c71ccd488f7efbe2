#include "omegabias/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "omegabias/csv.hpp"
#include "omegabias/density.hpp"
#include "omegabias/errors.hpp"
#include "omegabias/zeros.hpp"

namespace omegabias {

namespace {

constexpr std::size_t kMcGridPoints = 100;

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::uint64_t config_uint(std::string_view key, std::string_view value) {
  try {
    return parse_uint(value);
  } catch (const ParseError&) {
  }
  // Also accept integral floating forms such as 1e8.
  double d = 0.0;
  try {
    d = parse_double(value);
  } catch (const ParseError&) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
  }
  if (!(d >= 0.0) || d != std::floor(d) || d > 9007199254740992.0) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

double config_double(std::string_view key, std::string_view value) {
  try {
    const double d = parse_double(value);
    if (std::isfinite(d)) return d;
  } catch (const ParseError&) {
  }
  throw ConfigError(std::string(key) + ": expected a finite number, got '" + std::string(value) + "'");
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  for (auto f : split_fields(value)) {
    if (f.empty()) throw ConfigError("empty entry in list '" + std::string(value) + "'");
    out.emplace_back(f);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

std::string hash_line(const RunConfig& cfg) { return "# config_hash=" + cfg.hash() + "\n"; }

std::string sieve_line(const RunConfig& cfg) {
  return "# xmax=" + std::to_string(cfg.x_max) + " q=" + std::to_string(cfg.q) +
         " ratio=" + format_double(cfg.ratio) + "\n";
}

std::string char_tag(const DirichletCharacter& chi) {
  return "q=" + std::to_string(chi.modulus()) + " chi=" + std::to_string(chi.index());
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec || !std::filesystem::is_directory(cfg.out)) {
    throw IoError("cannot create output directory " + cfg.out.string());
  }
}

SieveConfig sieve_config(const RunConfig& cfg) {
  SieveConfig sc;
  sc.x_max = cfg.x_max;
  sc.modulus = cfg.q;
  sc.checkpoints = geometric_checkpoints(cfg.x_max, cfg.ratio);
  return sc;
}

ZeroCache require_cache(const RunConfig& cfg, const DirichletCharacter& chi, double height) {
  const auto path = cfg.out / cache_filename(chi.modulus(), chi.index());
  if (!std::filesystem::exists(path)) {
    throw IoError("zero cache " + path.string() + " not found; run `omegabias zeros` first (with --T >= " +
                  format_double(height) + ")");
  }
  auto cache = load_cache(path);
  if (cache.q != chi.modulus() || cache.char_index != chi.index()) {
    throw ParseError("zero cache " + path.string() + " belongs to a different character");
  }
  if (cache.T_scanned < height) {
    throw ConfigError("zero cache " + path.string() + " covers |gamma| <= " + format_double(cache.T_scanned) +
                      " but T0 up to " + format_double(height) +
                      " was requested; rerun `omegabias zeros` with a larger --T");
  }
  return cache;
}

double max_T0(const RunConfig& cfg) { return *std::max_element(cfg.T0.begin(), cfg.T0.end()); }

ClassSums obtain_sums(const RunConfig& cfg, std::ostream& log) {
  if (auto loaded = load_checkpoints(cfg.out / "checkpoints.csv", cfg)) {
    log << "compare: reusing checkpoints.csv\n";
    return std::move(*loaded);
  }
  log << "compare: sieving to " << cfg.x_max << "\n";
  return sieve_run(sieve_config(cfg), cfg.threads);
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "xmax") {
    x_max = config_uint(key, value);
  } else if (key == "q") {
    const auto v = config_uint(key, value);
    if (v > 0xffffffffu) throw ConfigError("q out of range");
    q = static_cast<std::uint32_t>(v);
  } else if (key == "chi") {
    if (value == "all") {
      chi.reset();
    } else {
      const auto v = config_uint(key, value);
      if (v > 0xffffffffu) throw ConfigError("chi out of range");
      chi = static_cast<std::uint32_t>(v);
    }
  } else if (key == "kinds") {
    kinds.clear();
    for (const auto& k : split_list(value)) {
      try {
        kinds.push_back(parse_kind(k));
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
  } else if (key == "T") {
    T = config_double(key, value);
  } else if (key == "T0") {
    T0.clear();
    for (const auto& t : split_list(value)) T0.push_back(config_double(key, t));
  } else if (key == "ratio") {
    ratio = config_double(key, value);
  } else if (key == "out") {
    if (value.empty()) throw ConfigError("out: empty path");
    out = value;
  } else if (key == "seed") {
    seed = config_uint(key, value);
  } else if (key == "threads") {
    const auto v = config_uint(key, value);
    if (v == 0 || v > 4096) throw ConfigError("threads must lie in [1, 4096]");
    threads = static_cast<unsigned>(v);
  } else if (key == "trials") {
    trials = config_uint(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void RunConfig::apply_text(std::string_view text) {
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set(trim(std::string_view(stripped).substr(0, eq)), std::string_view(stripped).substr(eq + 1));
  }
}

void RunConfig::normalize() {
  std::sort(T0.begin(), T0.end());
  T0.erase(std::unique(T0.begin(), T0.end()), T0.end());
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
}

void RunConfig::validate(const std::vector<Stage>& stages) const {
  if (q == 0 || q > kMaxModulus) throw ConfigError("q must lie in [1, 10000]");
  if (x_max > kSieveCeiling) throw ConfigError("xmax exceeds the sieve ceiling 2^40");
  if (!(ratio > 1.0)) throw ConfigError("ratio must exceed 1");
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (kinds.empty()) throw ConfigError("kinds must name omega and/or Omega");
  const auto chars = enumerate_characters(q);
  if (chi && *chi >= chars.size()) {
    throw ConfigError("chi must be below phi(q) = " + std::to_string(chars.size()));
  }
  for (Stage stage : stages) {
    if (stage == Stage::sieve) continue;
    if (!(T > 0.0) || T > kMaxZeroHeight) throw ConfigError("T must lie in (0, 1000]");
    if (T0.empty()) throw ConfigError("at least one T0 is required");
    for (double t : T0) {
      if (!(t >= 0.0) || t > T) throw ConfigError("every T0 must lie in [0, T]");
    }
    if (chi) {
      const auto& c = chars[*chi];
      if (!c.is_primitive() || c.is_principal()) {
        throw ConfigError("chi=" + std::to_string(*chi) + " mod " + std::to_string(q) +
                          " is not primitive and non-principal");
      }
      if (stage == Stage::density && !c.is_real()) {
        throw ConfigError("density needs a real character; chi=" + std::to_string(*chi) + " is complex");
      }
    }
    if (stage_characters(*this, stage).empty()) {
      throw ConfigError(std::string("no eligible characters mod ") + std::to_string(q) + " for this stage");
    }
    if (stage == Stage::density && trials < 1000) throw ConfigError("trials must be at least 1000");
  }
}

std::string RunConfig::canonical() const {
  std::string kinds_text;
  for (std::size_t i = 0; i < kinds.size(); ++i) kinds_text += (i ? "," : "") + std::string(kind_name(kinds[i]));
  return "xmax=" + std::to_string(x_max) + ";q=" + std::to_string(q) +
         ";chi=" + (chi ? std::to_string(*chi) : std::string("all")) + ";kinds=" + kinds_text +
         ";T=" + format_double(T) + ";T0=" + join_doubles(T0) + ";ratio=" + format_double(ratio) +
         ";seed=" + std::to_string(seed) + ";trials=" + std::to_string(trials);
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<DirichletCharacter> stage_characters(const RunConfig& cfg, Stage stage) {
  auto chars = enumerate_characters(cfg.q);
  if (cfg.chi) {
    if (*cfg.chi >= chars.size()) throw ConfigError("chi out of range");
    chars = {chars[*cfg.chi]};
  }
  if (stage == Stage::sieve) return chars;
  std::erase_if(chars, [&](const DirichletCharacter& c) {
    return !c.is_primitive() || c.is_principal() || (stage == Stage::density && !c.is_real());
  });
  return chars;
}

std::optional<ClassSums> load_checkpoints(const std::filesystem::path& path, const RunConfig& cfg) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  const std::string expected = sieve_line(cfg);
  if (lines.size() < 3 || std::string(lines[1]) + "\n" != expected) return std::nullopt;
  if (lines[2] != "x,a,S_omega,S_Omega") throw ParseError("checkpoints.csv: bad column header");

  ClassSums sums;
  sums.modulus = cfg.q;
  sums.checkpoints = geometric_checkpoints(cfg.x_max, cfg.ratio);
  const std::size_t rows = sums.checkpoints.size() * cfg.q;
  if (lines.size() - 3 != rows) throw ParseError("checkpoints.csv: row count mismatch");
  sums.omega.resize(rows);
  sums.Omega.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto f = split_fields(lines[3 + i]);
    if (f.size() != 4) throw ParseError("checkpoints.csv: expected 4 fields");
    if (parse_uint(f[0]) != sums.checkpoints[i / cfg.q] || parse_uint(f[1]) != i % cfg.q) {
      throw ParseError("checkpoints.csv: rows out of order");
    }
    sums.omega[i] = parse_uint(f[2]);
    sums.Omega[i] = parse_uint(f[3]);
  }
  return sums;
}

void cmd_sieve(const RunConfig& cfg, std::ostream& log) {
  cfg.validate({Stage::sieve});
  ensure_out_dir(cfg);
  log << "sieve: x_max=" << cfg.x_max << " q=" << cfg.q << "\n";
  const auto sums = sieve_run(sieve_config(cfg), cfg.threads);

  std::string cps = hash_line(cfg) + sieve_line(cfg) + "x,a,S_omega,S_Omega\n";
  for (std::size_t k = 0; k < sums.checkpoints.size(); ++k) {
    for (std::uint32_t a = 0; a < cfg.q; ++a) {
      cps += std::to_string(sums.checkpoints[k]) + ',' + std::to_string(a) + ',' +
             std::to_string(sums.omega_at(k, a)) + ',' + std::to_string(sums.Omega_at(k, a)) + '\n';
    }
  }
  write_file_atomic(cfg.out / "checkpoints.csv", cps);

  const auto chars = stage_characters(cfg, Stage::sieve);
  std::string tw = hash_line(cfg) +
                   "x,q,chi_index,re_psi_omega,im_psi_omega,re_psi_Omega,im_psi_Omega\n";
  for (auto x : sums.checkpoints) {
    for (const auto& chi : chars) {
      const auto t = twist(sums, chi, x);
      tw += std::to_string(x) + ',' + std::to_string(cfg.q) + ',' + std::to_string(chi.index()) + ',' +
            format_double(t.omega.real()) + ',' + format_double(t.omega.imag()) + ',' +
            format_double(t.Omega.real()) + ',' + format_double(t.Omega.imag()) + '\n';
    }
  }
  write_file_atomic(cfg.out / "twists.csv", tw);
  log << "sieve: wrote checkpoints.csv and twists.csv (" << sums.checkpoints.size() << " checkpoints)\n";
}

void cmd_zeros(const RunConfig& cfg, std::ostream& log) {
  cfg.validate({Stage::zeros});
  ensure_out_dir(cfg);
  ScanOptions opts;
  opts.threads = cfg.threads;
  for (const auto& chi : stage_characters(cfg, Stage::zeros)) {
    const auto path = cfg.out / cache_filename(chi.modulus(), chi.index());
    ZeroCache cache;
    bool reused = false;
    if (std::filesystem::exists(path)) {
      cache = load_cache(path);
      reused = cache.q == chi.modulus() && cache.char_index == chi.index() && cache.T_scanned >= cfg.T;
    }
    if (reused) {
      log << "zeros: " << char_tag(chi) << " reusing " << path.filename().string() << " (T="
          << cache.T_scanned << ")\n";
    } else {
      cache = scan_zeros(chi, cfg.T, opts);
      for (const auto& w : cache.warnings) log << "zeros: warning: " << w << "\n";
      store_cache(cache, path);
      log << "zeros: " << char_tag(chi) << " T=" << cfg.T << " found " << cache.count() << " zeros\n";
    }
    const auto rep = count_check(cache);
    log << "zeros: count_check " << char_tag(chi) << " count=" << rep.count
        << " smooth=" << rep.smooth_count << " deviation=" << rep.deviation << "/" << rep.deviation_limit
        << " argument=" << (rep.argument_count ? std::to_string(*rep.argument_count) : std::string("n/a"))
        << (rep.passed ? " pass" : " FAIL") << "\n";
    if (!rep.passed) throw VerificationError("count_check failed for " + char_tag(chi));
  }
}

void cmd_compare(const RunConfig& cfg, std::ostream& log) {
  cfg.validate({Stage::compare});
  ensure_out_dir(cfg);
  const auto chars = stage_characters(cfg, Stage::compare);
  std::vector<ZeroCache> caches;
  for (const auto& chi : chars) caches.push_back(require_cache(cfg, chi, max_T0(cfg)));

  const auto sums = obtain_sums(cfg, log);
  std::vector<std::uint64_t> xs;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < sums.checkpoints.size(); ++k) {
    if (sums.checkpoints[k] >= 2) {
      xs.push_back(sums.checkpoints[k]);
      idx.push_back(k);
    }
  }

  std::string meansq = hash_line(cfg) + "T0,Y,M\n";
  for (std::size_t c = 0; c < chars.size(); ++c) {
    const auto& chi = chars[c];
    const auto L_half = l_value(chi, 0.5);
    for (Kind kind : cfg.kinds) {
      const auto all_obs = observed_series(sums, chi, kind);
      std::vector<Complex> obs;
      for (auto k : idx) obs.push_back(all_obs[k]);
      meansq += "# kind=" + std::string(kind_name(kind)) + " " + char_tag(chi) + "\n";
      for (double T0 : cfg.T0) {
        const auto pred = predict_series(xs, chi, kind, L_half, caches[c], T0, cfg.threads);
        const auto rows = figure_table(xs, obs, pred);
        std::string table = hash_line(cfg) + "# kind=" + std::string(kind_name(kind)) + " " + char_tag(chi) +
                            " T0=" + format_double(T0) + "\n" +
                            "x,re_obs,im_obs,re_main,im_main,re_full,im_full,re_resid_norm,im_resid_norm\n";
        for (const auto& r : rows) {
          table += std::to_string(r.x) + ',' + format_double(r.observed.real()) + ',' +
                   format_double(r.observed.imag()) + ',' + format_double(r.main.real()) + ',' +
                   format_double(r.main.imag()) + ',' + format_double(r.full.real()) + ',' +
                   format_double(r.full.imag()) + ',' + format_double(r.residual_norm.real()) + ',' +
                   format_double(r.residual_norm.imag()) + '\n';
        }
        const std::string name = "compare_" + std::string(kind_name(kind)) + "_q" + std::to_string(cfg.q) +
                                 "_chi" + std::to_string(chi.index()) + "_T" + format_double(T0) + ".csv";
        write_file_atomic(cfg.out / name, table);

        const auto rs = residual_series(xs, obs, pred);
        const double Y = rs.y.empty() ? 0.0 : rs.y.back();
        meansq += format_double(T0) + ',' + format_double(Y) + ',' + format_double(rs.mean_square) + '\n';
        log << "compare: " << kind_name(kind) << " " << char_tag(chi) << " T0=" << T0
            << " M=" << rs.mean_square << "\n";
      }
    }
  }
  write_file_atomic(cfg.out / "meansq.csv", meansq);
}

void cmd_density(const RunConfig& cfg, std::ostream& log) {
  cfg.validate({Stage::density});
  ensure_out_dir(cfg);
  const auto chars = stage_characters(cfg, Stage::density);
  std::vector<ZeroCache> caches;
  for (const auto& chi : chars) caches.push_back(require_cache(cfg, chi, max_T0(cfg)));

  std::string density = hash_line(cfg) + "X,delta_omega,delta_Omega\n";
  std::string mc_text = hash_line(cfg) + "y,p_neg,trials,seed\n";
  for (std::size_t c = 0; c < chars.size(); ++c) {
    const auto& chi = chars[c];
    log << "density: sieving " << char_tag(chi) << " to " << cfg.x_max << "\n";
    const auto pass = sieve_pass(sieve_config(cfg), &chi, cfg.threads);
    const auto& emp = pass.density;
    density += "# " + char_tag(chi) + "\n";
    for (const auto& p : emp.trace) {
      density += std::to_string(p.x) + ',' + format_double(p.delta_omega) + ',' + format_double(p.delta_Omega) + '\n';
    }

    std::optional<McEstimate> top_omega, top_Omega;
    if (cfg.x_max >= 2) {
      const auto L_half = l_value(chi, 0.5);
      const auto ys = density_y_grid(static_cast<double>(cfg.x_max), kMcGridPoints);
      for (Kind kind : cfg.kinds) {
        for (double T0 : cfg.T0) {
          const auto model = make_li_model(chi, kind, L_half, caches[c], T0);
          const auto est = li_monte_carlo(model, ys, cfg.trials, cfg.seed, cfg.threads);
          mc_text += "# kind=" + std::string(kind_name(kind)) + " " + char_tag(chi) + " T0=" + format_double(T0) + "\n";
          for (const auto& p : est.points) {
            mc_text += format_double(p.y) + ',' + format_double(p.p) + ',' + std::to_string(est.trials) + ',' +
                       std::to_string(est.seed) + '\n';
          }
          if (T0 == max_T0(cfg)) (kind == Kind::omega ? top_omega : top_Omega) = est;
        }
      }
    }
    const auto rep = make_density_report(&emp, top_omega ? &*top_omega : nullptr, top_Omega ? &*top_Omega : nullptr);
    std::string summary = "# summary " + char_tag(chi) + " X=" + std::to_string(emp.X);
    if (rep.delta_omega) summary += " delta_omega=" + format_double(*rep.delta_omega);
    if (rep.delta_Omega) summary += " delta_Omega=" + format_double(*rep.delta_Omega);
    if (rep.mc_omega) {
      summary += " mc_mean_omega=" + format_double(rep.mc_omega->mean_p()) + " flag_omega=" + (rep.flag_omega ? "1" : "0");
    }
    if (rep.mc_Omega) {
      summary += " mc_mean_Omega=" + format_double(rep.mc_Omega->mean_p()) + " flag_Omega=" + (rep.flag_Omega ? "1" : "0");
    }
    density += summary + " mc_T0=" + format_double(max_T0(cfg)) + "\n";
    log << "density:" << summary.substr(1) << "\n";
  }
  write_file_atomic(cfg.out / "density.csv", density);
  write_file_atomic(cfg.out / "mc.csv", mc_text);
}

void cmd_all(const RunConfig& cfg, std::ostream& log) {
  cfg.validate({Stage::sieve, Stage::zeros, Stage::compare, Stage::density});
  cmd_sieve(cfg, log);
  cmd_zeros(cfg, log);
  cmd_compare(cfg, log);
  cmd_density(cfg, log);
}

}  // namespace omegabias
