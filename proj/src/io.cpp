#include "levelflow/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "levelflow/errors.hpp"

namespace levelflow {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::span<const std::string_view> header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) throw ConfigError("CsvWriter", "row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_real(values[i]);
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<double> read_levels(std::istream& in) {
  std::vector<double> levels;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text(trim(line));
    if (text.empty() || text.front() == '#') continue;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      throw ConfigError("read_levels", "line " + std::to_string(number) + ": not a real number: '" + text + "'");
    }
    levels.push_back(v);
  }
  return levels;
}

std::vector<double> read_levels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_levels", "cannot open '" + path + "'");
  return read_levels(in);
}

void write_levels(std::ostream& out, std::span<const double> values, std::string_view header) {
  std::size_t start = 0;
  while (start < header.size()) {
    const auto stop = header.find('\n', start);
    out << "# " << header.substr(start, stop - start) << '\n';
    if (stop == std::string_view::npos) break;
    start = stop + 1;
  }
  for (double v : values) out << format_real(v) << '\n';
}

nlohmann::ordered_json fit_report(const FamilyFit& fit, const KsResult& ks) {
  nlohmann::ordered_json j;
  j["n_hat"] = fit.n_hat;
  j["scale_hat"] = fit.scale_hat;
  j["log_likelihood"] = fit.log_likelihood;
  j["ks_statistic"] = ks.statistic;
  j["ks_pass"] = ks.pass;
  j["sample_size"] = fit.sample_size;
  return j;
}

}  // namespace levelflow
