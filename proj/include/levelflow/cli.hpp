#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "levelflow/calogero.hpp"
#include "levelflow/sde_simulator.hpp"

namespace levelflow {

enum class Command { Simulate, Kernel, FpEvolve, Spectrum, Fit, Ladder, Oracle2x2, Verify };
enum class Format { Csv, Json };

struct RunConfig {
  Command command = Command::Verify;
  double family_n = 3.0;
  std::uint64_t seed = 0;
  std::string output_path;        // empty or "-": standard output
  std::optional<Format> format;   // default: json for fit, csv otherwise

  struct Simulate {
    double x0 = 1.0;
    double dt = 1e-3;
    std::size_t steps = 1000;
    std::size_t paths = 10;
    std::size_t stride = 1;  // record every stride-th step
    Scheme scheme = Scheme::SemiImplicit;
  } simulate;

  struct Kernel {
    std::vector<double> lags = {0.1, 1.0, 10.0};
    std::vector<double> starts = {0.0, 0.5, 1.0};
    double x_max = 6.0;
    std::size_t points = 121;
  } kernel;

  struct FpEvolve {
    double center = 1.0;
    double width = 0.05;
    double x_max = 10.0;
    std::size_t cells = 5000;
    std::optional<double> dt;  // default: largest stable explicit step, 1e-3 implicit
    std::vector<double> times = {0.1, 1.0, 10.0};
    bool implicit = false;
  } fp;

  struct Spectrum {
    double beta = 2.0;
    std::size_t levels = 6;
    double h = 1e-3;
    double x_max = 10.0;
    CalogeroScheme scheme = CalogeroScheme::PowerSubstitution;
  } spectrum;

  std::string input_path;  // fit
  std::size_t count = 100'000;  // ladder, oracle-2x2
  double origin = 0.0;          // ladder
};

/// Executes one command. Exit status 0 on success, 1 on domain or
/// configuration errors, 2 on numerical failures (including failed verify
/// checks); diagnostics go to `err` as "levelflow: <operation>: <message>".
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line into a RunConfig and runs it.
int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levelflow
