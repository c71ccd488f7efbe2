#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "omegabias/lfunction.hpp"

namespace omegabias {

inline constexpr int kZeroCacheVersion = 1;
inline constexpr double kMaxZeroHeight = 1e3;

/// A critical-line zero rho = 1/2 + i gamma.
struct ZeroRecord {
  double gamma = 0.0;
  Complex l_prime;               // L'(rho, chi)
  double refine_residual = 0.0;  // |L(rho, chi)| at the refined ordinate

  friend bool operator==(const ZeroRecord&, const ZeroRecord&) = default;
};

/// All zeros with |gamma| <= T_scanned, sorted by gamma. Warnings are
/// diagnostics from the scan and are not persisted.
struct ZeroCache {
  std::uint32_t q = 0;
  std::uint32_t char_index = 0;
  double T_scanned = 0.0;
  int version = kZeroCacheVersion;
  std::vector<ZeroRecord> records;
  std::vector<std::string> warnings;

  std::size_t count() const { return records.size(); }

  friend bool operator==(const ZeroCache& a, const ZeroCache& b) {
    return a.q == b.q && a.char_index == b.char_index && a.T_scanned == b.T_scanned &&
           a.version == b.version && a.records == b.records;
  }
};

struct ScanOptions {
  EvalParams params;
  unsigned threads = 1;
  /// Grid step is safety_fraction * 2 pi / log(q(|t|+10)/(2 pi) + e).
  double safety_fraction = 0.25;
  /// |Z| below this at a local minimum without a sign change is reported as a
  /// possible even-order zero.
  double even_order_tol = 1e-6;
};

/// Smooth zero count (T/pi) log(qT/(2 pi e)) over both signs.
double smooth_zero_count(std::uint32_t q, double T);

/// Zero count in |gamma| <= T from the argument principle applied to the
/// completed L-function: (2 theta(T) + arg L(1/2+iT) - arg L(1/2-iT)) / pi,
/// with arg L continued horizontally from Re s = 3. Unrounded.
double argument_zero_count(const LFunction& L, double T);

/// Locates all zeros with |gamma| <= T. Requires a primitive non-principal
/// character and 0 < T <= 1000. Throws MissedZerosError when the located count
/// cannot be reconciled after refinement.
ZeroCache scan_zeros(const DirichletCharacter& chi, double T, const ScanOptions& options = {});

struct WindowCount {
  double start = 0.0;  // window [start, start + 1)
  std::size_t count = 0;
  double expected = 0.0;
};

struct CountReport {
  std::size_t count = 0;
  double smooth_count = 0.0;
  double deviation = 0.0;        // |count - smooth_count|
  double deviation_limit = 0.0;  // 2 + log(qT)
  bool global_ok = false;
  std::vector<WindowCount> windows;
  double window_limit = 0.0;  // 2 log(qT)
  bool windows_ok = false;
  /// Argument-principle count; absent when it is not close to an integer.
  std::optional<long> argument_count;
  bool argument_ok = true;
  /// For real characters: gamma <-> -gamma with conjugate derivatives.
  bool symmetric_ok = true;
  bool passed = false;
};

CountReport count_check(const ZeroCache& cache, const EvalParams& params = {});

std::string cache_filename(std::uint32_t q, std::uint32_t char_index);

std::string serialize_cache(const ZeroCache& cache);
/// Throws ParseError on a malformed header, unsorted or truncated rows, a
/// count mismatch or an unknown version.
ZeroCache parse_cache(std::string_view text);

void store_cache(const ZeroCache& cache, const std::filesystem::path& path);
ZeroCache load_cache(const std::filesystem::path& path);

}  // namespace omegabias
