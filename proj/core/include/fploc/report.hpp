#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fploc/mlp.hpp"

namespace fploc {

struct ErrorStats {
  double mean = 0.0;
  double variance = 0.0;  // sample variance, divisor n-1; 0 for n=1
  double min = 0.0;
  double max = 0.0;
};

ErrorStats error_stats(const std::vector<double>& errors);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> errors;  // meters, one per test point
};

struct ExperimentReport {
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<SeedResult> per_seed;
  double wall_seconds = 0.0;  // console diagnostics only; never written to files

  std::vector<double> pooled_errors() const;
  ErrorStats pooled() const;
};

// Text table mirroring the four reported statistics, plus per-seed rows.
std::string render_report_text(const ExperimentReport& report);
void write_report_text(const std::string& path, const ExperimentReport& report);

// CSV: label,n,mean,variance,min,max with one row per seed and a pooled row.
void write_report_csv(const std::string& path, const ExperimentReport& report);

struct ReportCsvRow {
  std::string label;
  long n = 0;
  ErrorStats stats;
};
std::vector<ReportCsvRow> read_report_csv(const std::string& path);

// Per-seed quantiles for external box plotting: seed,q0,q25,q50,q75,q100.
void write_plot_data(const std::string& path, const ExperimentReport& report);

// Linear-interpolation quantile of a sample, p in [0,1].
double quantile(std::vector<double> values, double p);

// epoch,train_loss,val_error_m with 1-based epochs.
void write_history_csv(const std::string& path, const TrainHistory& history);

}  // namespace fploc
