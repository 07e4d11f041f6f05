#include "fploc/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fploc/csv_io.hpp"
#include "fploc/error.hpp"

namespace fploc {

ErrorStats error_stats(const std::vector<double>& errors) {
  if (errors.empty()) throw InvalidInput("error_stats: empty error list");
  ErrorStats s;
  s.min = errors.front();
  s.max = errors.front();
  double sum = 0.0;
  for (double e : errors) {
    sum += e;
    s.min = std::min(s.min, e);
    s.max = std::max(s.max, e);
  }
  const double n = static_cast<double>(errors.size());
  s.mean = sum / n;
  if (errors.size() > 1) {
    double acc = 0.0;
    for (double e : errors) {
      const double d = e - s.mean;
      acc += d * d;
    }
    s.variance = acc / (n - 1.0);
  }
  return s;
}

std::vector<double> ExperimentReport::pooled_errors() const {
  std::vector<double> all;
  for (const SeedResult& sr : per_seed)
    all.insert(all.end(), sr.errors.begin(), sr.errors.end());
  return all;
}

ErrorStats ExperimentReport::pooled() const { return error_stats(pooled_errors()); }

namespace {

void require_nonempty(const ExperimentReport& report) {
  if (report.per_seed.empty()) throw InvalidInput("report: no seed results");
  for (const SeedResult& sr : report.per_seed)
    if (sr.errors.empty())
      throw InvalidInput("report: seed " + std::to_string(sr.seed) +
                         " has no errors");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string render_report_text(const ExperimentReport& report) {
  require_nonempty(report);
  std::ostringstream out;
  out << "experiment report\n";
  if (!report.config_echo.empty()) {
    out << "\nconfig:\n";
    for (const auto& [key, value] : report.config_echo)
      out << "  " << key << " = " << value << '\n';
  }
  out << "\nper seed:\n";
  out << "  seed        n       mean   variance        min        max\n";
  const auto row = [&out](const std::string& label, std::size_t n,
                          const ErrorStats& s) {
    out << "  " << label;
    for (std::size_t pad = label.size(); pad < 4; ++pad) out << ' ';
    char buf[128];
    std::snprintf(buf, sizeof(buf), " %8zu %10.4f %10.4f %10.4f %10.4f", n, s.mean,
                  s.variance, s.min, s.max);
    out << buf << '\n';
  };
  for (const SeedResult& sr : report.per_seed)
    row(std::to_string(sr.seed), sr.errors.size(), error_stats(sr.errors));
  const ErrorStats pooled = report.pooled();
  out << "\npooled over " << report.per_seed.size() << " seed(s):\n";
  out << "  Mean error [m]      " << format_double(pooled.mean) << '\n';
  out << "  Error variance      " << format_double(pooled.variance) << '\n';
  out << "  Min error [m]       " << format_double(pooled.min) << '\n';
  out << "  Max error [m]       " << format_double(pooled.max) << '\n';
  return out.str();
}

void write_report_text(const std::string& path, const ExperimentReport& report) {
  std::ofstream out = open_output(path);
  out << render_report_text(report);
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  require_nonempty(report);
  std::ofstream out = open_output(path);
  out << "label,n,mean,variance,min,max\n";
  const auto row = [&out](const std::string& label, std::size_t n,
                          const ErrorStats& s) {
    out << label << ',' << n << ',' << format_double(s.mean) << ','
        << format_double(s.variance) << ',' << format_double(s.min) << ','
        << format_double(s.max) << '\n';
  };
  for (const SeedResult& sr : report.per_seed)
    row("seed" + std::to_string(sr.seed), sr.errors.size(), error_stats(sr.errors));
  row("pooled", report.pooled_errors().size(), report.pooled());
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<ReportCsvRow> read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++line_no;
  std::vector<ReportCsvRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string_view> f = split_fields(line);
    if (f.size() != 6) throw ParseError(path, line_no, "expected 6 fields");
    ReportCsvRow row;
    row.label = std::string(f[0]);
    row.n = parse_long(f[1], path, line_no);
    row.stats.mean = parse_double(f[2], path, line_no);
    row.stats.variance = parse_double(f[3], path, line_no);
    row.stats.min = parse_double(f[4], path, line_no);
    row.stats.max = parse_double(f[5], path, line_no);
    rows.push_back(std::move(row));
  }
  return rows;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidInput("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double idx = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double w = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

void write_plot_data(const std::string& path, const ExperimentReport& report) {
  require_nonempty(report);
  std::ofstream out = open_output(path);
  out << "seed,q0,q25,q50,q75,q100\n";
  for (const SeedResult& sr : report.per_seed) {
    out << sr.seed;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0})
      out << ',' << format_double(quantile(sr.errors, p));
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_history_csv(const std::string& path, const TrainHistory& history) {
  std::ofstream out = open_output(path);
  out << "epoch,train_loss,val_error_m\n";
  for (std::size_t i = 0; i < history.train_loss.size(); ++i) {
    out << (i + 1) << ',' << format_double(history.train_loss[i]) << ','
        << format_double(history.val_error_m[i]) << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace fploc
