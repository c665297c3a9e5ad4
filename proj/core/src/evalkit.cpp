#include "elicit/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "elicit/error.hpp"
#include "elicit/rng.hpp"
#include "elicit/trainer.hpp"

namespace elicit {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string run_label(const TrainConfig& c) {
  std::string label(regime_name(c.regime));
  if (c.regime == Regime::kOnlyFinal || c.regime == Regime::kUntilT) {
    label += "-t" + std::to_string(c.regime_t);
  }
  return label;
}

void open_or_throw(std::ofstream& f, const std::filesystem::path& p) {
  f.open(p, std::ios::binary);
  if (!f) throw Error(Errc::kIoFailure, "cannot write " + p.string());
}

}  // namespace

AccuracyLoss accuracy_loss(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.empty()) {
    throw Error(Errc::kEmptyData, "accuracy_loss needs samples");
  }
  if (predictions.size() != labels.size()) {
    throw Error(Errc::kShapeMismatch, "predictions and labels differ in length");
  }
  AccuracyLoss r;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double rounded = predictions[k] >= 0.5 ? 1.0 : 0.0;
    r.sum += static_cast<std::int64_t>(std::llround(std::abs(rounded - labels[k])));
  }
  r.mean = static_cast<double>(r.sum) / static_cast<double>(predictions.size());
  return r;
}

AccuracyLoss accuracy_loss(const Critic& predictor, std::span<const LabeledTranscript> data) {
  std::vector<double> p;
  std::vector<double> y;
  for (const auto& d : data) {
    p.push_back(predictor.score(d.transcript));
    y.push_back(d.label);
  }
  return accuracy_loss(p, y);
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw Error(Errc::kEmptyData, "quantile of no data");
  }
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(std::span<const double> samples, std::size_t resamples, double level,
                      std::uint64_t seed) {
  if (samples.empty()) {
    throw Error(Errc::kEmptyData, "bootstrap needs samples");
  }
  if (resamples < 1 || !(level >= 0.0 && level <= 1.0)) {
    throw Error(Errc::kConfigInvalid, "bootstrap needs resamples >= 1 and level in [0, 1]");
  }
  Rng rng(seed);
  const std::size_t n = samples.size();
  std::vector<double> means(resamples);
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += samples[uniform_index(rng, n)];
    }
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  return {sorted_quantile(means, (1.0 - level) / 2.0),
          sorted_quantile(means, (1.0 + level) / 2.0)};
}

void write_metrics_header(std::ostream& out) {
  out << "epoch,regime,accuracy,accuracy_loss,fairness_loss,sup_abs,mean_Z,"
         "calibration_performed,rollback\n";
}

void write_metrics_row(std::ostream& out, const MetricRow& row) {
  out << row.epoch << ',' << regime_name(row.regime) << ',' << num(row.accuracy) << ','
      << row.accuracy_loss << ',' << num(row.fairness_loss) << ',' << num(row.sup_abs) << ','
      << num(row.mean_z) << ',' << (row.calibration_performed ? 1 : 0) << ','
      << (row.rollback ? 1 : 0) << '\n';
}

std::string format_metrics_csv(std::span<const MetricRow> rows) {
  std::ostringstream out;
  write_metrics_header(out);
  for (const auto& r : rows) write_metrics_row(out, r);
  return out.str();
}

RegimeReport regime_report(const std::vector<TrainConfig>& configs,
                           const std::filesystem::path& out_dir) {
  if (configs.empty()) {
    throw Error(Errc::kConfigInvalid, "regime report needs at least one configuration");
  }
  auto strip = [](TrainConfig c) {
    c.regime = Regime::kEvery;
    c.regime_t = 0;
    return c;
  };
  const TrainConfig shared = strip(configs.front());
  std::map<std::string, int> seen;
  for (const auto& c : configs) {
    if (!(strip(c) == shared)) {
      throw Error(Errc::kConfigInvalid, "regime report configs may differ only in regime and t");
    }
    if (seen[run_label(c)]++ > 0) {
      throw Error(Errc::kConfigInvalid, "duplicate regime " + run_label(c));
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::kIoFailure, "cannot create " + out_dir.string());

  RegimeReport report;
  nlohmann::json meta;
  meta["eval_transcript_questions"] = shared.rollout.max_questions;
  meta["eval_size"] = shared.eval_size;
  meta["bootstrap_resamples"] = 1000;
  meta["bootstrap_level"] = 0.95;
  meta["seed"] = shared.seed;
  meta["runs"] = nlohmann::json::array();

  for (const auto& c : configs) {
    const std::string label = run_label(c);
    Trainer trainer(c);
    auto result = trainer.train(out_dir / ("run_" + label));
    const auto curve = out_dir / ("metrics_" + label + ".csv");
    std::ofstream f;
    open_or_throw(f, curve);
    f << format_metrics_csv(result.state.history);
    report.curve_files.push_back(curve);
    report.histories.push_back(std::move(result.state.history));
    meta["runs"].push_back(label);
  }

  struct Figure {
    const char* file;
    const char* metric;
    double MetricRow::*value;
    Interval MetricRow::*ci;
  };
  const Figure figures[] = {
      {"accuracy.csv", "accuracy", &MetricRow::accuracy, &MetricRow::accuracy_ci},
      {"fairness_loss.csv", "fairness_loss", &MetricRow::fairness_loss,
       &MetricRow::fairness_loss_ci},
      {"z_scores.csv", "mean_Z", &MetricRow::mean_z, &MetricRow::mean_z_ci},
  };
  for (const auto& fig : figures) {
    const auto path = out_dir / fig.file;
    std::ofstream f;
    open_or_throw(f, path);
    f << "epoch,regime,metric,value,ci_low,ci_high\n";
    for (std::size_t r = 0; r < configs.size(); ++r) {
      const std::string label = run_label(configs[r]);
      for (const auto& row : report.histories[r]) {
        f << row.epoch << ',' << label << ',' << fig.metric << ',' << num(row.*fig.value) << ','
          << num((row.*fig.ci).low) << ',' << num((row.*fig.ci).high) << '\n';
      }
    }
    report.figure_files.push_back(path);
  }
  std::ofstream m;
  open_or_throw(m, out_dir / "report_meta.json");
  m << meta.dump(2) << '\n';
  return report;
}

}  // namespace elicit
