#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "levelflow/spectral_statistics.hpp"

namespace levelflow {

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_real(double value);

/// Comma-separated rows under a header line; every value through format_real.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::span<const std::string_view> header);
  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Level list: one real per line, blank lines and '#' comments ignored.
/// ConfigError naming the line on anything else. Order is not checked here.
std::vector<double> read_levels(std::istream& in);
std::vector<double> read_levels_file(const std::string& path);

/// Writes `header` as '#' comment lines, then one value per line.
void write_levels(std::ostream& out, std::span<const double> values, std::string_view header = {});

/// Fit report with fields n_hat, scale_hat, log_likelihood, ks_statistic,
/// ks_pass, sample_size. nlohmann prints doubles in shortest round-trip form.
nlohmann::ordered_json fit_report(const FamilyFit& fit, const KsResult& ks);

}  // namespace levelflow
