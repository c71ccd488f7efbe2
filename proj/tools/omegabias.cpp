#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omegabias/csv.hpp"
#include "omegabias/errors.hpp"
#include "omegabias/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kVerification = 3, kIo = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace omegabias;

  CLI::App app{"Character-twisted omega/Omega sums and their explicit-formula bias diagnostics"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "key=value configuration file (flags override it)");

  // Settings are kept as text and routed through RunConfig::set so the file
  // and the flags share one validator.
  std::map<std::string, std::string> flags;
  const std::vector<std::pair<std::string, std::string>> scalar_flags = {
      {"xmax", "Sieve limit x_max"},
      {"q", "Modulus"},
      {"chi", "Character index, or 'all'"},
      {"kinds", "Comma-separated kinds: omega,Omega"},
      {"T", "Zero scan height"},
      {"ratio", "Checkpoint ratio (> 1)"},
      {"out", "Output directory"},
      {"seed", "Monte Carlo seed"},
      {"threads", "Worker threads"},
      {"trials", "Monte Carlo trials"},
  };
  for (const auto& [key, help] : scalar_flags) {
    app.add_option("--" + key, flags[key], help);
  }
  std::vector<std::string> t0_values;
  app.add_option("--T0", t0_values, "Zero-sum truncation height (repeatable)")->take_all();

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"sieve", "Class sums and character twists at the checkpoints", cmd_sieve},
      {"zeros", "Scan and cache critical-line zeros", cmd_zeros},
      {"compare", "Explicit-formula comparison tables and residual mean squares", cmd_compare},
      {"density", "Empirical and Monte Carlo logarithmic densities", cmd_density},
      {"all", "sieve, zeros, compare and density in order", cmd_all},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) cfg.apply_text(read_file(config_file));
    for (const auto& [key, help] : scalar_flags) {
      if (app.count("--" + key) > 0) cfg.set(key, flags[key]);
    }
    if (!t0_values.empty()) {
      std::string joined;
      for (const auto& v : t0_values) joined += (joined.empty() ? "" : ",") + v;
      cfg.set("T0", joined);
    }
    cfg.normalize();
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) c.run(cfg, std::cerr);
    }
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kVerification;
  } catch (const OverflowError& e) {
    std::cerr << "overflow: " << e.what() << "\n";
    return kVerification;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
