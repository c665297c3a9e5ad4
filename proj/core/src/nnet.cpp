#include "elicit/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "elicit/error.hpp"
#include "elicit/rng.hpp"

namespace elicit {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Vec>;
using MutVecMap = Eigen::Map<Vec>;

struct ForwardCache {
  RowMat q, k, v, attn, out_rows;
  Vec pooled, hidden_act, out;
};

void check_input(const ModelParams& params, const TranscriptTensor& x) {
  if (x.rows == 0) {
    throw Error(Errc::kEmptyTranscript, "model input has no rows");
  }
  if (x.cols != params.arch.input_dim || x.data.size() != x.rows * x.cols) {
    throw Error(Errc::kShapeMismatch, "input width " + std::to_string(x.cols) +
                                          " does not match model width " +
                                          std::to_string(params.arch.input_dim));
  }
  if (params.weights.size() != params.arch.parameter_count()) {
    throw Error(Errc::kShapeMismatch, "weight vector does not match architecture");
  }
}

ForwardCache run_forward(const ModelParams& params, const TranscriptTensor& x) {
  check_input(params, x);
  const auto& a = params.arch;
  const auto L = ParamLayout::of(a);
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto d = static_cast<Eigen::Index>(a.input_dim);
  const auto h = static_cast<Eigen::Index>(a.hidden);
  const auto o = static_cast<Eigen::Index>(a.output_dim());
  const double* w = params.weights.data();

  ConstMap rows(x.data.data(), n, d);
  ConstMap wq(w + L.wq, d, h);
  ConstMap wk(w + L.wk, d, h);
  ConstMap wv(w + L.wv, d, h);
  ConstMap w1(w + L.w1, h, h);
  ConstVecMap b1(w + L.b1, h);
  ConstMap w2(w + L.w2, o, h);
  ConstVecMap b2(w + L.b2, o);

  ForwardCache f;
  f.q = rows * wq;
  f.k = rows * wk;
  f.v = rows * wv;
  f.attn = (f.q * f.k.transpose()) / std::sqrt(static_cast<double>(h));
  for (Eigen::Index r = 0; r < n; ++r) {
    auto row = f.attn.row(r);
    row = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  f.out_rows = f.attn * f.v;
  f.pooled = f.out_rows.colwise().mean().transpose();
  f.hidden_act = (w1 * f.pooled + b1).array().tanh();
  f.out = w2 * f.hidden_act + b2;
  return f;
}

// Accumulates d(objective)/d(weights) into grad given d(objective)/d(out).
void run_backward(const ModelParams& params, const TranscriptTensor& x, const ForwardCache& f,
                  const Vec& d_out, std::vector<double>& grad) {
  const auto& a = params.arch;
  const auto L = ParamLayout::of(a);
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto d = static_cast<Eigen::Index>(a.input_dim);
  const auto h = static_cast<Eigen::Index>(a.hidden);
  const auto o = static_cast<Eigen::Index>(a.output_dim());
  const double* w = params.weights.data();
  double* g = grad.data();

  ConstMap rows(x.data.data(), n, d);
  ConstMap w1(w + L.w1, h, h);
  ConstMap w2(w + L.w2, o, h);

  MutMap(g + L.w2, o, h).noalias() += d_out * f.hidden_act.transpose();
  MutVecMap(g + L.b2, o) += d_out;

  const Vec d_hidden =
      (w2.transpose() * d_out).array() * (1.0 - f.hidden_act.array().square());
  MutMap(g + L.w1, h, h).noalias() += d_hidden * f.pooled.transpose();
  MutVecMap(g + L.b1, h) += d_hidden;

  const Vec d_pooled = w1.transpose() * d_hidden;
  // Mean pooling spreads the gradient evenly over the attended rows.
  const RowMat d_out_rows =
      RowMat::Ones(n, 1) * (d_pooled.transpose() / static_cast<double>(n));

  MutMap(g + L.wv, d, h).noalias() += rows.transpose() * (f.attn.transpose() * d_out_rows);

  const RowMat d_attn = d_out_rows * f.v.transpose();
  const Vec row_dot = (d_attn.array() * f.attn.array()).rowwise().sum();
  RowMat d_scores = f.attn.array() * (d_attn.colwise() - row_dot).array();
  d_scores /= std::sqrt(static_cast<double>(h));

  MutMap(g + L.wq, d, h).noalias() += rows.transpose() * (d_scores * f.k);
  MutMap(g + L.wk, d, h).noalias() += rows.transpose() * (d_scores.transpose() * f.q);
}

double logistic(double t) {
  if (t >= 0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

std::vector<bool> asked_mask(std::span<const QuestionId> asked, std::size_t num_questions) {
  std::vector<bool> mask(num_questions, false);
  for (QuestionId q : asked) {
    if (q >= num_questions) {
      throw Error(Errc::kUnknownQuestion, "asked id " + std::to_string(q) + " out of range");
    }
    mask[q] = true;
  }
  return mask;
}

std::vector<double> masked_softmax(const Vec& logits, const std::vector<bool>& mask) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) {
      max_logit = std::max(max_logit, logits[i]);
    }
  }
  if (max_logit == -std::numeric_limits<double>::infinity()) {
    throw Error(Errc::kAllQuestionsAsked, "every question has already been asked");
  }
  std::vector<double> probs(static_cast<std::size_t>(logits.size()), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!mask[i]) {
      probs[i] = std::exp(logits[static_cast<Eigen::Index>(i)] - max_logit);
      total += probs[i];
    }
  }
  for (double& p : probs) {
    p /= total;
  }
  return probs;
}

void require_role(const ModelParams& params, ModelRole role) {
  if (params.arch.role != role) {
    throw Error(Errc::kRoleMismatch, role == ModelRole::kCritic
                                         ? "expected critic parameters"
                                         : "expected policy parameters");
  }
}

}  // namespace

std::size_t Architecture::parameter_count() const noexcept {
  return ParamLayout::of(*this).total;
}

ParamLayout ParamLayout::of(const Architecture& a) noexcept {
  const std::size_t dh = a.input_dim * a.hidden;
  ParamLayout L{};
  L.wq = 0;
  L.wk = L.wq + dh;
  L.wv = L.wk + dh;
  L.w1 = L.wv + dh;
  L.b1 = L.w1 + a.hidden * a.hidden;
  L.w2 = L.b1 + a.hidden;
  L.b2 = L.w2 + a.output_dim() * a.hidden;
  L.total = L.b2 + a.output_dim();
  return L;
}

ModelParams init_params(const Architecture& arch, std::uint64_t seed) {
  if (arch.input_dim == 0 || arch.hidden == 0 ||
      (arch.role == ModelRole::kPolicy && arch.num_questions == 0)) {
    throw Error(Errc::kConfigInvalid, "degenerate architecture");
  }
  ModelParams p;
  p.arch = arch;
  p.weights.resize(arch.parameter_count());
  Rng rng(seed);
  for (double& w : p.weights) {
    w = -0.1 + 0.2 * uniform01(rng);
  }
  return p;
}

AdamState make_adam_state(const ModelParams& params) {
  AdamState s;
  s.m.assign(params.weights.size(), 0.0);
  s.v.assign(params.weights.size(), 0.0);
  return s;
}

double forward_score_logit(const ModelParams& params, const TranscriptTensor& x) {
  require_role(params, ModelRole::kCritic);
  return run_forward(params, x).out[0];
}

double forward_score(const ModelParams& params, const TranscriptTensor& x) {
  return logistic(forward_score_logit(params, x));
}

std::vector<double> forward_policy(const ModelParams& params, const TranscriptTensor& x,
                                   std::span<const QuestionId> asked) {
  require_role(params, ModelRole::kPolicy);
  const auto mask = asked_mask(asked, params.arch.num_questions);
  return masked_softmax(run_forward(params, x).out, mask);
}

Gradient grad_mse(const ModelParams& params, std::span<const CriticSample> batch) {
  require_role(params, ModelRole::kCritic);
  if (batch.empty()) {
    throw Error(Errc::kEmptyData, "grad_mse needs a nonempty batch");
  }
  Gradient g;
  g.values.assign(params.weights.size(), 0.0);
  const double scale = 2.0 / static_cast<double>(batch.size());
  Vec d_out(1);
  for (const auto& s : batch) {
    const auto f = run_forward(params, s.x);
    const double yhat = logistic(f.out[0] + s.logit_offset);
    d_out[0] = scale * (yhat - s.y) * yhat * (1.0 - yhat);
    run_backward(params, s.x, f, d_out, g.values);
  }
  return g;
}

Gradient grad_reinforce(const ModelParams& params, std::span<const PolicySample> batch) {
  require_role(params, ModelRole::kPolicy);
  if (batch.empty()) {
    throw Error(Errc::kEmptyData, "grad_reinforce needs a nonempty batch");
  }
  Gradient g;
  g.values.assign(params.weights.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  const auto nq = static_cast<Eigen::Index>(params.arch.num_questions);
  for (const auto& s : batch) {
    const auto mask = asked_mask(s.asked, params.arch.num_questions);
    if (s.chosen >= params.arch.num_questions) {
      throw Error(Errc::kUnknownQuestion, "chosen id out of range");
    }
    if (mask[s.chosen]) {
      throw Error(Errc::kChosenQuestionMasked,
                  "question " + std::to_string(s.chosen) + " was already asked");
    }
    if (s.z == 0.0) {
      continue;
    }
    const auto f = run_forward(params, s.x);
    const auto probs = masked_softmax(f.out, mask);
    // d log softmax_c / d logits = e_c - p on unmasked entries; masked logits
    // are constant -inf and receive nothing.
    Vec d_out = Vec::Zero(nq);
    for (Eigen::Index i = 0; i < nq; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) {
        d_out[i] = -probs[static_cast<std::size_t>(i)];
      }
    }
    d_out[static_cast<Eigen::Index>(s.chosen)] += 1.0;
    d_out *= scale * s.z;
    run_backward(params, s.x, f, d_out, g.values);
  }
  return g;
}

void adam_step(ModelParams& params, const Gradient& grad, AdamState& state,
               const AdamConfig& config) {
  const std::size_t n = params.weights.size();
  if (grad.values.size() != n) {
    throw Error(Errc::kShapeMismatch, "gradient size does not match parameters");
  }
  if (state.m.empty() && state.v.empty() && state.step == 0) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  if (state.m.size() != n || state.v.size() != n) {
    throw Error(Errc::kShapeMismatch, "optimizer state does not match parameters");
  }
  ++state.step;
  if (config.plain_sgd) {
    for (std::size_t i = 0; i < n; ++i) {
      params.weights[i] -= config.lr * grad.values[i];
    }
    return;
  }
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(config.beta1, t);
  const double bias2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad.values[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params.weights[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

}  // namespace elicit
