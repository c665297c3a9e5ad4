#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "elicit/config.hpp"
#include "elicit/models.hpp"
#include "elicit/transcript.hpp"

namespace elicit {

struct AccuracyLoss {
  std::int64_t sum = 0;
  double mean = 0.0;
};

/// sum_j |round(pred_j) - y_j| with round(0.5) = 1. Throws kEmptyData.
AccuracyLoss accuracy_loss(std::span<const double> predictions, std::span<const double> labels);
AccuracyLoss accuracy_loss(const Critic& predictor, std::span<const LabeledTranscript> data);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap of the mean. Resample k draws indices with
/// uniform_index from an Rng seeded by `seed`; bounds are the linearly
/// interpolated (1 -/+ level)/2 quantiles of the sorted resampled means.
/// Throws kEmptyData or kConfigInvalid.
Interval bootstrap_ci(std::span<const double> samples, std::size_t resamples = 1000,
                      double level = 0.95, std::uint64_t seed = 0);

/// Linear-interpolation quantile of sorted data (q in [0, 1]).
double sorted_quantile(std::span<const double> sorted, double q);

struct MetricRow {
  std::size_t epoch = 0;
  Regime regime = Regime::kEvery;
  std::size_t samples = 0;
  double accuracy = 0.0;
  std::int64_t accuracy_loss = 0;
  double fairness_loss = 0.0;
  double sup_abs = 0.0;
  double mean_z = 0.0;
  bool calibration_performed = false;
  bool rollback = false;
  Interval accuracy_ci;
  Interval fairness_loss_ci;
  Interval mean_z_ci;
  std::int64_t calibration_samples = 0;
};

/// Header: epoch,regime,accuracy,accuracy_loss,fairness_loss,sup_abs,mean_Z,
/// calibration_performed,rollback
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricRow& row);
std::string format_metrics_csv(std::span<const MetricRow> rows);

struct RegimeReport {
  std::vector<std::filesystem::path> figure_files;  // accuracy, fairness loss, Z
  std::vector<std::filesystem::path> curve_files;   // one metrics CSV per regime
  std::vector<std::vector<MetricRow>> histories;
};

/// Trains every configuration (which should differ only in regime and t) and
/// writes accuracy.csv, fairness_loss.csv and z_scores.csv with columns
/// epoch,regime,metric,value,ci_low,ci_high, plus metrics_<regime>.csv per run
/// and report_meta.json. Throws kConfigInvalid when the configs differ in
/// anything but the regime.
RegimeReport regime_report(const std::vector<TrainConfig>& configs,
                           const std::filesystem::path& out_dir);

}  // namespace elicit
