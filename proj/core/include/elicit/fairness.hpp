#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elicit/models.hpp"
#include "elicit/traits.hpp"
#include "elicit/transcript.hpp"

namespace elicit {

// Bounds applied to predictor outputs before taking the logit.
inline constexpr double kLogitClampLow = 1e-7;
inline constexpr double kLogitClampHigh = 1.0 - 1e-7;

double sigmoid(double t) noexcept;
/// Logit of the clamped input.
double clamped_logit(double p) noexcept;

/// Logit-space correction weights, one per family member.
struct CalibrationWeights {
  TraitScores l{};
  double eps = 0.1;

  double l1_norm() const noexcept;
  bool operator==(const CalibrationWeights&) const = default;
};

/// One evaluated sample: family scores c(x), a predictor output f(x) and the label.
struct ScoredSample {
  TraitScores c{};
  double f = 0.5;
  double y = 0.0;
};

struct AuditReport {
  std::array<double, kFamilySize> per_c{};
  double sup_abs = 0.0;
  std::size_t worst_c = 0;
  double eps = 0.0;
  bool passed = false;

  std::string to_json() const;
};

/// Empirical E[c(x) (f(x) - y)] per family member against eps.
/// Throws kEmptyData.
AuditReport audit(std::span<const ScoredSample> data, double eps);
AuditReport audit(const Critic& predictor, std::span<const LabeledTranscript> data, double eps);

/// sigma(sum_c l_c c + logit(clamp f)).
double corrected_value(double f, const TraitScores& c, const CalibrationWeights& w) noexcept;

/// Mean binary cross-entropy of the corrected predictor plus eps * ||l||_1,
/// with eps taken from `w`. Throws kEmptyData.
double ma_loss(const CalibrationWeights& w, std::span<const ScoredSample> data);

/// Mean binary cross-entropy of f itself (clamped).
double cross_entropy(std::span<const ScoredSample> data);

struct SolverConfig {
  double tolerance = 1e-6;
  std::size_t max_iterations = 10000;

  bool operator==(const SolverConfig&) const = default;
};

struct SolveStats {
  std::size_t iterations = 0;
  double gradient_mapping_norm = 0.0;
  double objective = 0.0;
  bool converged = false;
};

/// Minimizes ma_loss over l by accelerated proximal gradient with
/// soft-thresholding, started from l = 0 and only accepting non-increasing
/// objective values. Stops when the gradient mapping falls below tolerance.
/// Throws kEmptyData, kConfigInvalid (eps <= 0) or kSolverDiverged.
CalibrationWeights solve_calibration(std::span<const ScoredSample> data, double eps,
                                     const SolverConfig& config = {},
                                     SolveStats* stats = nullptr);

/// f* = sigma(sum_c l_c c(x) + logit(clamp f(x))).
class CorrectedCritic final : public Critic {
 public:
  CorrectedCritic(const Critic& base, CalibrationWeights weights)
      : base_(base), weights_(weights) {}
  double score(const Transcript& transcript) const override;
  const CalibrationWeights& weights() const noexcept { return weights_; }

 private:
  const Critic& base_;
  CalibrationWeights weights_;
};

std::vector<ScoredSample> score_samples(const Critic& predictor,
                                        std::span<const LabeledTranscript> data);

/// ceil((1 / eps^2) * ln(family_size / delta)): samples needed before a
/// calibration pass is trusted to generalize. Throws kConfigInvalid.
std::int64_t threshold(double eps, double delta, std::size_t family_size);

}  // namespace elicit
