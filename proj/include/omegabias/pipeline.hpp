#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "omegabias/factor_sieve.hpp"
#include "omegabias/prediction.hpp"

namespace omegabias {

enum class Stage { sieve, zeros, compare, density };

struct RunConfig {
  std::uint64_t x_max = 100'000'000;
  std::uint32_t q = 4;
  std::optional<std::uint32_t> chi;  // empty selects every eligible character
  std::vector<Kind> kinds{Kind::omega, Kind::Omega};
  double T = 200.0;
  std::vector<double> T0{10.0, 30.0, 50.0, 100.0};
  double ratio = 1.02;
  std::filesystem::path out = "omegabias_out";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t trials = 10'000;

  /// Sets one key (xmax, q, chi, kinds, T, T0, ratio, out, seed, threads,
  /// trials). Lists are comma-separated. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  /// key=value lines; '#' starts a comment. Throws ConfigError.
  void apply_text(std::string_view text);
  /// Sorts and deduplicates the T0 list and kinds.
  void normalize();
  /// Checks every module precondition the given stages will rely on.
  void validate(const std::vector<Stage>& stages) const;

  /// Canonical text of every setting that affects results (not threads, not out).
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// Characters a stage operates on: all characters mod q for the sieve;
/// primitive non-principal ones for zeros and compare; additionally real
/// ones for density.
std::vector<DirichletCharacter> stage_characters(const RunConfig& cfg, Stage stage);

void cmd_sieve(const RunConfig& cfg, std::ostream& log);
/// Throws VerificationError when a cache fails count_check.
void cmd_zeros(const RunConfig& cfg, std::ostream& log);
void cmd_compare(const RunConfig& cfg, std::ostream& log);
void cmd_density(const RunConfig& cfg, std::ostream& log);
void cmd_all(const RunConfig& cfg, std::ostream& log);

/// Loads checkpoints.csv when it was produced with the same x_max, q and
/// ratio; otherwise returns nothing.
std::optional<ClassSums> load_checkpoints(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace omegabias
