#include "levelflow/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <new>

#include "CLI11.hpp"
#include "json.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/fokker_planck.hpp"
#include "levelflow/io.hpp"
#include "levelflow/spectral_statistics.hpp"
#include "levelflow/transition_kernel.hpp"
#include "levelflow/verification.hpp"

namespace levelflow {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string_view> columns(std::initializer_list<std::string_view> names) { return names; }

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

void simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const RepulsionFamily family(c.family_n);
  const auto& o = c.simulate;
  const PathConfig config{o.dt, o.steps, o.scheme, o.x0};
  config.validate();
  if (o.paths == 0) throw ConfigError("simulate_path", "paths must be >= 1");
  if (o.stride == 0) throw ConfigError("simulate_path", "stride must be >= 1");

  std::vector<SamplePath> paths(o.paths);
  const auto total = static_cast<std::int64_t>(o.paths);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < total; ++p) {
    Engine rng = make_stream(c.seed, static_cast<std::uint64_t>(p));
    paths[static_cast<std::size_t>(p)] = simulate_path(family, config, rng);
  }
  if (!paths.front().validated) err << "levelflow: simulate_path: warning: beta < 1, positivity not guaranteed\n";

  if (c.format == Format::Json) {
    Json j;
    j["family_n"] = c.family_n;
    j["seed"] = c.seed;
    j["dt"] = o.dt;
    Json times = Json::array();
    for (std::size_t k = 0; k < paths.front().times.size(); k += o.stride) times.push_back(paths.front().times[k]);
    j["times"] = std::move(times);
    Json values = Json::array();
    for (const auto& p : paths) {
      Json row = Json::array();
      for (std::size_t k = 0; k < p.values.size(); k += o.stride) row.push_back(p.values[k]);
      values.push_back(std::move(row));
    }
    j["paths"] = std::move(values);
    emit_json(out, j);
    return;
  }
  CsvWriter csv(out, columns({"path", "time", "value"}));
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t k = 0; k < paths[p].values.size(); k += o.stride) {
      csv.row({static_cast<double>(p), paths[p].times[k], paths[p].values[k]});
    }
  }
}

void kernel(const RunConfig& c, std::ostream& out) {
  const RepulsionFamily family(c.family_n);
  const auto& o = c.kernel;
  if (o.points < 2 || !(o.x_max > 0.0)) throw ConfigError("transition_density", "need x-max > 0 and >= 2 points");
  std::vector<double> ends(o.points);
  for (std::size_t i = 0; i < o.points; ++i) ends[i] = o.x_max * static_cast<double>(i) / static_cast<double>(o.points - 1);
  const auto table = transition_density_table(family, o.lags, o.starts, ends);

  if (c.format == Format::Json) {
    Json j;
    j["family_n"] = c.family_n;
    j["lags"] = table.lags;
    j["starts"] = table.starts;
    j["ends"] = table.ends;
    j["density"] = table.values;
    emit_json(out, j);
    return;
  }
  CsvWriter csv(out, columns({"lag", "start", "end", "density"}));
  for (std::size_t a = 0; a < table.lags.size(); ++a) {
    for (std::size_t b = 0; b < table.starts.size(); ++b) {
      for (std::size_t e = 0; e < table.ends.size(); ++e) {
        csv.row({table.lags[a], table.starts[b], table.ends[e], table.at(a, b, e)});
      }
    }
  }
}

void fp_evolve(const RunConfig& c, std::ostream& out) {
  const RepulsionFamily family(c.family_n);
  const auto& o = c.fp;
  const Stepping stepping = o.implicit ? Stepping::Implicit : Stepping::Explicit;
  const double dt = o.dt ? *o.dt : (o.implicit ? 1e-3 : max_explicit_dt(family, o.x_max, o.cells));
  if (!std::is_sorted(o.times.begin(), o.times.end()) || o.times.empty() || !(o.times.front() > 0.0)) {
    throw ConfigError("evolve_density", "snapshot times must be positive and ascending");
  }

  struct Snapshot {
    double time;
    DensityGrid density;
  };
  std::vector<Snapshot> snaps{{0.0, gaussian_bump(o.center, o.width, o.x_max, o.cells)}};
  for (double t : o.times) {
    const double span = t - snaps.back().time;
    // Repeated times reuse the previous snapshot.
    snaps.push_back({t, span > 0.0 ? evolve_density(family, snaps.back().density, span, std::min(dt, span), stepping)
                                   : snaps.back().density});
  }
  const auto rho = [&](double x) { return invariant_density(family, x); };

  if (c.format == Format::Json) {
    Json j;
    j["family_n"] = c.family_n;
    j["dt"] = dt;
    std::vector<double> xs(o.cells);
    for (std::size_t i = 0; i < o.cells; ++i) xs[i] = snaps.front().density.center(i);
    j["x"] = xs;
    Json list = Json::array();
    for (const auto& s : snaps) {
      list.push_back(Json{{"time", s.time}, {"l1_to_invariant", l1_distance(s.density, rho)}, {"density", s.density.values()}});
    }
    j["snapshots"] = std::move(list);
    emit_json(out, j);
    return;
  }
  CsvWriter csv(out, columns({"time", "x", "density"}));
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < s.density.cells(); ++i) csv.row({s.time, s.density.center(i), s.density[i]});
  }
}

void spectrum(const RunConfig& c, std::ostream& out) {
  const auto& o = c.spectrum;
  const auto e = eigen_solve({o.beta, o.x_max, o.h, o.scheme}, o.levels);
  if (c.format == Format::Json) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double exact = exact_eigenvalue(o.beta, static_cast<int>(k));
      rows.push_back(Json{{"n", k}, {"numeric", e[k]}, {"exact", exact}, {"difference", e[k] - exact}});
    }
    emit_json(out, Json{{"beta", o.beta}, {"h", o.h}, {"levels", rows}});
    return;
  }
  CsvWriter csv(out, columns({"n", "numeric", "exact", "difference"}));
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double exact = exact_eigenvalue(o.beta, static_cast<int>(k));
    csv.row({static_cast<double>(k), e[k], exact, e[k] - exact});
  }
}

void fit(const RunConfig& c, std::ostream& out) {
  if (c.input_path.empty()) throw ConfigError("read_levels", "--input is required");
  const auto levels = read_levels_file(c.input_path);
  const auto sample = spacings_from_levels(levels, true);
  const auto result = mle_fit_family(sample);
  const RepulsionFamily fitted(result.n_hat);
  const auto ks = ks_statistic(sample, [&](double x) { return invariant_cdf(fitted, x / result.scale_hat); });
  auto report = fit_report(result, ks);
  report["converged"] = result.converged;
  report["spacings"] = "normalized, not unfolded";

  if (c.format == Format::Csv) {
    CsvWriter csv(out, columns({"n_hat", "scale_hat", "log_likelihood", "ks_statistic", "ks_pass", "sample_size"}));
    csv.row({result.n_hat, result.scale_hat, result.log_likelihood, ks.statistic, ks.pass ? 1.0 : 0.0,
             static_cast<double>(result.sample_size)});
    return;
  }
  emit_json(out, report);
}

void ladder(const RunConfig& c, std::ostream& out) {
  const RepulsionFamily family(c.family_n);
  const auto l = synthetic_ladder(family, c.count, c.seed, c.origin);
  if (c.format == Format::Json) {
    emit_json(out, Json{{"family_n", c.family_n}, {"seed", c.seed}, {"levels", l.levels}});
    return;
  }
  write_levels(out, l.levels,
               "synthetic ladder: family n = " + format_real(c.family_n) + ", seed = " + std::to_string(c.seed) +
                   ", " + std::to_string(c.count) + " spacings");
}

void oracle_2x2(const RunConfig& c, std::ostream& out) {
  const auto gaps = goe_2x2_spacing_oracle(c.count, c.seed);
  if (c.format == Format::Json) {
    emit_json(out, Json{{"seed", c.seed}, {"spacings", gaps.spacings()}});
    return;
  }
  CsvWriter csv(out, columns({"spacing"}));
  for (double g : gaps.spacings()) csv.row({g});
}

void verify(const RunConfig& c, std::ostream& out) {
  const auto report = run_verification(RepulsionFamily(c.family_n), c.seed);
  if (c.format == Format::Json) {
    Json checks = Json::array();
    for (const auto& k : report.checks) {
      checks.push_back(Json{{"module", k.module}, {"check", k.name}, {"status", k.skipped ? "skip" : (k.passed ? "pass" : "fail")},
                            {"value", k.value}, {"threshold", k.threshold}, {"note", k.note}});
    }
    emit_json(out, Json{{"family_n", c.family_n}, {"seed", c.seed}, {"checks", checks}});
  } else {
    print_report(out, report);
  }
  if (!report.all_passed()) {
    std::string failed;
    for (const auto& k : report.checks) {
      if (!k.skipped && !k.passed) failed += (failed.empty() ? "" : "; ") + k.module + ": " + k.name;
    }
    throw NumericalError("verify", std::to_string(report.failures()) + " check(s) failed: " + failed);
  }
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Kernel: return "kernel";
    case Command::FpEvolve: return "fp-evolve";
    case Command::Spectrum: return "spectrum";
    case Command::Fit: return "fit";
    case Command::Ladder: return "ladder";
    case Command::Oracle2x2: return "oracle-2x2";
    case Command::Verify: return "verify";
  }
  return "levelflow";
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunConfig c = config;
  if (!c.format) c.format = c.command == Command::Fit ? Format::Json : Format::Csv;
  try {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!c.output_path.empty() && c.output_path != "-") {
      file.open(c.output_path);
      if (!file) throw ConfigError("output", "cannot write '" + c.output_path + "'");
      sink = &file;
    }
    switch (c.command) {
      case Command::Simulate: simulate(c, *sink, err); break;
      case Command::Kernel: kernel(c, *sink); break;
      case Command::FpEvolve: fp_evolve(c, *sink); break;
      case Command::Spectrum: spectrum(c, *sink); break;
      case Command::Fit: fit(c, *sink); break;
      case Command::Ladder: ladder(c, *sink); break;
      case Command::Oracle2x2: oracle_2x2(c, *sink); break;
      case Command::Verify: verify(c, *sink); break;
    }
    sink->flush();
    if (!*sink) throw ConfigError("output", "write failed");
    return 0;
  } catch (const NumericalError& e) {
    err << "levelflow: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "levelflow: " << e.what() << '\n';
    return 1;
  } catch (const std::bad_alloc&) {
    err << "levelflow: " << command_name(c.command) << ": out of memory\n";
    return 2;
  }
}

int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial Ornstein-Uhlenbeck level-spacing toolkit", "levelflow"};
  app.require_subcommand(1);
  RunConfig c;
  std::string format;
  app.add_option("--seed", c.seed, "Run seed; fixes all stochastic output")->capture_default_str();
  app.add_option("-o,--output", c.output_path, "Output file (default: standard output)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.fallthrough();

  const auto family = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--family", c.family_n, "Family index n > 1 (beta = n - 1)")->capture_default_str();
    if (required) opt->required();
  };

  auto* sim = app.add_subcommand("simulate", "Sample paths of the SDE to CSV");
  family(sim, true);
  sim->add_option("--x0", c.simulate.x0, "Start point")->capture_default_str();
  sim->add_option("--dt", c.simulate.dt, "Time step (<= 0.1)")->capture_default_str();
  sim->add_option("--steps", c.simulate.steps, "Steps per path")->capture_default_str();
  sim->add_option("--paths", c.simulate.paths, "Number of paths")->capture_default_str();
  sim->add_option("--stride", c.simulate.stride, "Record every k-th step")->capture_default_str();
  sim->add_option("--scheme", c.simulate.scheme, "semi-implicit or explicit")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Scheme>{{"semi-implicit", Scheme::SemiImplicit}, {"explicit", Scheme::ExplicitReflect}}));

  auto* ker = app.add_subcommand("kernel", "Transition density table over (lag, start, end)");
  family(ker, true);
  ker->add_option("--lags", c.kernel.lags, "Lags t > 0")->delimiter(',');
  ker->add_option("--starts", c.kernel.starts, "Start points y >= 0")->delimiter(',');
  ker->add_option("--x-max", c.kernel.x_max, "Right end of the end-point grid")->capture_default_str();
  ker->add_option("--points", c.kernel.points, "End-point grid size")->capture_default_str();

  auto* fp = app.add_subcommand("fp-evolve", "Fokker-Planck evolution of a Gaussian bump");
  family(fp, true);
  fp->add_option("--center", c.fp.center, "Bump centre")->capture_default_str();
  fp->add_option("--width", c.fp.width, "Bump width")->capture_default_str();
  fp->add_option("--x-max", c.fp.x_max, "Domain [0, x-max]")->capture_default_str();
  fp->add_option("--cells", c.fp.cells, "Grid cells")->capture_default_str();
  fp->add_option("--dt", c.fp.dt, "Time step");
  fp->add_option("--times", c.fp.times, "Snapshot times, ascending")->delimiter(',');
  fp->add_flag("--implicit", c.fp.implicit, "Backward Euler instead of explicit stepping");

  auto* spec = app.add_subcommand("spectrum", "Calogero eigenvalues against the exact formula");
  spec->add_option("--beta", c.spectrum.beta, "Coupling beta > -1")->capture_default_str();
  spec->add_option("--levels", c.spectrum.levels, "Number of eigenvalues")->capture_default_str();
  spec->add_option("--step", c.spectrum.h, "Grid step h")->capture_default_str();
  spec->add_option("--x-max", c.spectrum.x_max, "Domain [0, x-max], >= 8")->capture_default_str();
  spec->add_option("--scheme", c.spectrum.scheme, "power or direct")
      ->transform(CLI::CheckedTransformer(std::map<std::string, CalogeroScheme>{
          {"power", CalogeroScheme::PowerSubstitution}, {"direct", CalogeroScheme::Direct}}));

  auto* fit = app.add_subcommand("fit", "Maximum likelihood family fit of a level file (JSON report)");
  fit->add_option("--input", c.input_path, "Level file: one ascending real per line, '#' comments")->required();

  auto* lad = app.add_subcommand("ladder", "Synthetic level ladder of a family");
  family(lad, true);
  lad->add_option("--count", c.count, "Number of spacings")->capture_default_str();
  lad->add_option("--origin", c.origin, "First level")->capture_default_str();

  auto* ora = app.add_subcommand("oracle-2x2", "Unit-mean eigenvalue gaps of 2x2 GOE matrices");
  ora->add_option("--count", c.count, "Number of matrices")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Run the invariant suite and print a pass/fail table");
  family(ver, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "levelflow: cli: " << e.what() << '\n';
    return 1;
  }

  const std::pair<CLI::App*, Command> table[] = {{sim, Command::Simulate}, {ker, Command::Kernel},
                                                 {fp, Command::FpEvolve},  {spec, Command::Spectrum},
                                                 {fit, Command::Fit},      {lad, Command::Ladder},
                                                 {ora, Command::Oracle2x2}, {ver, Command::Verify}};
  for (const auto& [sub, command] : table) {
    if (sub->parsed()) c.command = command;
  }
  if (!format.empty()) c.format = format == "json" ? Format::Json : Format::Csv;
  return run(c, out, err);
}

}  // namespace levelflow
