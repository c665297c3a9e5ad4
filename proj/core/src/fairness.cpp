#include "elicit/fairness.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "elicit/error.hpp"

namespace elicit {

namespace {

// log(1 + e^t) - y t without overflow.
double logistic_loss(double t, double y) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))) - y * t;
}

double dot(const TraitScores& l, const TraitScores& c) {
  double s = 0.0;
  for (std::size_t k = 0; k < kFamilySize; ++k) {
    s += l[k] * c[k];
  }
  return s;
}

void require_data(std::size_t n) {
  if (n == 0) {
    throw Error(Errc::kEmptyData, "no samples");
  }
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Smooth part of the objective and its gradient, with precomputed base logits.
struct Smooth {
  std::span<const ScoredSample> data;
  std::vector<double> base;

  double value(const TraitScores& l) const {
    double s = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
      s += logistic_loss(dot(l, data[j].c) + base[j], data[j].y);
    }
    return s / static_cast<double>(data.size());
  }

  TraitScores gradient(const TraitScores& l) const {
    TraitScores g{};
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double r = sigmoid(dot(l, data[j].c) + base[j]) - data[j].y;
      for (std::size_t k = 0; k < kFamilySize; ++k) {
        g[k] += r * data[j].c[k];
      }
    }
    for (double& v : g) {
      v /= static_cast<double>(data.size());
    }
    return g;
  }
};

double l1(const TraitScores& l) {
  double s = 0.0;
  for (double v : l) s += std::abs(v);
  return s;
}

}  // namespace

double sigmoid(double t) noexcept {
  if (t >= 0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double clamped_logit(double p) noexcept {
  const double q = std::clamp(p, kLogitClampLow, kLogitClampHigh);
  return std::log(q) - std::log1p(-q);
}

double CalibrationWeights::l1_norm() const noexcept { return l1(l); }

std::string AuditReport::to_json() const {
  nlohmann::json j;
  j["per_c"] = per_c;
  j["sup_abs"] = sup_abs;
  j["worst_c"] = worst_c;
  j["eps"] = eps;
  j["passed"] = passed;
  return j.dump();
}

AuditReport audit(std::span<const ScoredSample> data, double eps) {
  require_data(data.size());
  AuditReport r;
  for (const auto& s : data) {
    for (std::size_t k = 0; k < kFamilySize; ++k) {
      r.per_c[k] += s.c[k] * (s.f - s.y);
    }
  }
  for (std::size_t k = 0; k < kFamilySize; ++k) {
    r.per_c[k] /= static_cast<double>(data.size());
    if (std::abs(r.per_c[k]) > r.sup_abs) {
      r.sup_abs = std::abs(r.per_c[k]);
      r.worst_c = k;
    }
  }
  r.eps = eps;
  r.passed = r.sup_abs <= eps;
  return r;
}

std::vector<ScoredSample> score_samples(const Critic& predictor,
                                        std::span<const LabeledTranscript> data) {
  std::vector<ScoredSample> out;
  out.reserve(data.size());
  for (const auto& d : data) {
    out.push_back({trait_scores(d.transcript), predictor.score(d.transcript),
                   static_cast<double>(d.label)});
  }
  return out;
}

AuditReport audit(const Critic& predictor, std::span<const LabeledTranscript> data,
                  double eps) {
  require_data(data.size());
  const auto samples = score_samples(predictor, data);
  return audit(samples, eps);
}

double corrected_value(double f, const TraitScores& c, const CalibrationWeights& w) noexcept {
  return sigmoid(dot(w.l, c) + clamped_logit(f));
}

double cross_entropy(std::span<const ScoredSample> data) {
  require_data(data.size());
  double s = 0.0;
  for (const auto& d : data) {
    s += logistic_loss(clamped_logit(d.f), d.y);
  }
  return s / static_cast<double>(data.size());
}

double ma_loss(const CalibrationWeights& w, std::span<const ScoredSample> data) {
  require_data(data.size());
  double s = 0.0;
  for (const auto& d : data) {
    s += logistic_loss(dot(w.l, d.c) + clamped_logit(d.f), d.y);
  }
  return s / static_cast<double>(data.size()) + w.eps * w.l1_norm();
}

CalibrationWeights solve_calibration(std::span<const ScoredSample> data, double eps,
                                     const SolverConfig& config, SolveStats* stats) {
  require_data(data.size());
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(Errc::kConfigInvalid, "calibration eps must be positive");
  }
  if (!(config.tolerance > 0.0) || config.max_iterations == 0) {
    throw Error(Errc::kConfigInvalid, "solver needs a positive tolerance and iteration cap");
  }
  Smooth smooth{data, {}};
  smooth.base.reserve(data.size());
  for (const auto& d : data) {
    smooth.base.push_back(clamped_logit(d.f));
  }

  // The logistic curvature is at most 1/4, so 0.25 * lambda_max(C^T C / n)
  // bounds the Lipschitz constant of the smooth gradient.
  Eigen::Matrix<double, kFamilySize, kFamilySize> gram =
      Eigen::Matrix<double, kFamilySize, kFamilySize>::Zero();
  for (const auto& d : data) {
    Eigen::Map<const Eigen::Matrix<double, kFamilySize, 1>> c(d.c.data());
    gram.noalias() += c * c.transpose();
  }
  gram /= static_cast<double>(data.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, kFamilySize, kFamilySize>> eig(
      gram, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(0.25 * eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  auto prox_step = [&](const TraitScores& at) {
    const auto g = smooth.gradient(at);
    TraitScores next{};
    for (std::size_t k = 0; k < kFamilySize; ++k) {
      next[k] = soft_threshold(at[k] - step * g[k], step * eps);
    }
    return next;
  };
  auto objective = [&](const TraitScores& l) { return smooth.value(l) + eps * l1(l); };
  auto mapping_norm = [&](const TraitScores& at, const TraitScores& next) {
    double s = 0.0;
    for (std::size_t k = 0; k < kFamilySize; ++k) {
      const double v = lipschitz * (at[k] - next[k]);
      s += v * v;
    }
    return std::sqrt(s);
  };

  TraitScores l{};
  double f_l = objective(l);
  TraitScores y = l;
  double t = 1.0;
  SolveStats st;
  for (st.iterations = 0; st.iterations < config.max_iterations;) {
    // Stationarity is judged at the accepted iterate, not the extrapolated one.
    const TraitScores at_l = prox_step(l);
    st.gradient_mapping_norm = mapping_norm(l, at_l);
    if (st.gradient_mapping_norm < config.tolerance) {
      st.converged = true;
      break;
    }
    ++st.iterations;
    const TraitScores z = prox_step(y);
    const double f_z = objective(z);
    if (!std::isfinite(f_z)) {
      throw Error(Errc::kSolverDiverged, "non-finite calibration objective");
    }
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    const TraitScores prev = l;
    if (f_z <= f_l) {
      l = z;
      f_l = f_z;
    } else {
      // Monotone variant: a rejected extrapolation falls back to a plain step.
      const double f_plain = objective(at_l);
      if (f_plain <= f_l) {
        l = at_l;
        f_l = f_plain;
      }
    }
    for (std::size_t k = 0; k < kFamilySize; ++k) {
      y[k] = l[k] + (t / t_next) * (z[k] - l[k]) + ((t - 1.0) / t_next) * (l[k] - prev[k]);
    }
    t = t_next;
  }
  if (!st.converged) {
    st.gradient_mapping_norm = mapping_norm(l, prox_step(l));
    st.converged = st.gradient_mapping_norm < config.tolerance;
  }
  st.objective = f_l;
  if (stats != nullptr) {
    *stats = st;
  }
  CalibrationWeights w;
  w.l = l;
  w.eps = eps;
  return w;
}

double CorrectedCritic::score(const Transcript& transcript) const {
  return corrected_value(base_.score(transcript), trait_scores(transcript), weights_);
}

std::int64_t threshold(double eps, double delta, std::size_t family_size) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(Errc::kConfigInvalid, "threshold eps must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(Errc::kConfigInvalid, "threshold delta must lie in (0, 1)");
  }
  if (family_size < 1) {
    throw Error(Errc::kConfigInvalid, "family must be nonempty");
  }
  const double raw = std::log(static_cast<double>(family_size) / delta) / (eps * eps);
  return static_cast<std::int64_t>(std::ceil(raw));
}

}  // namespace elicit
