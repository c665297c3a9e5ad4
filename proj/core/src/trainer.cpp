#include "elicit/trainer.hpp"

#include <fstream>
#include <sstream>

#include "elicit/checkpoint.hpp"
#include "elicit/error.hpp"
#include "elicit/rollout.hpp"

namespace elicit {

namespace {

constexpr std::uint64_t kCriticInitTag = 0x63726974;  // "crit"
constexpr std::uint64_t kPolicyInitTag = 0x706f6c69;  // "poli"
constexpr std::uint64_t kRunTag = 0x72756e00;
constexpr std::uint64_t kEvalTag = 0x6576616c;  // "eval"
constexpr std::uint64_t kTrainTag = 0x74726e00;
constexpr std::uint64_t kCalibTag = 0x63616c00;
constexpr std::uint64_t kProfileTag = 0x70726f66;  // "prof"
constexpr std::uint64_t kBootTag = 0x626f6f74;     // "boot"

double dot(const TraitScores& a, const TraitScores& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < kFamilySize; ++k) s += a[k] * b[k];
  return s;
}

struct Models {
  WorkingCritic critic;
  NetworkPolicy policy;
  Models(const ModelSnapshot& s, const Encoder& e) : critic(s, e), policy(s.policy, e) {}
};

// Asks rollout-selected questions until the transcript holds `questions` of them.
void extend(Transcript& x, std::vector<StepRecord>* steps, std::size_t questions,
            const Models& models, const Respondent& respondent, const TrainConfig& config,
            std::uint64_t salt) {
  while (asked_questions(x).size() < questions) {
    const auto sel = select_next(x, config.rollout, models.critic, models.policy, respondent,
                                 config.bank, salt);
    if (steps) steps->push_back({sel.z, sel.question});
    x.push_back({sel.question, respondent.respond(config.bank.question(sel.question), x).text});
  }
}

Transcript truncate_questions(const Transcript& x, std::size_t questions) {
  Transcript out;
  std::size_t seen = 0;
  for (const auto& e : x) {
    if (e.question) {
      if (seen == questions) break;
      ++seen;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_(std::move(config)),
      simulator_((config_.validate(), config_.bank), config_.simulator),
      encoder_(config_.bank, config_.embedding_dim) {
  if (!config_.profile_file.empty()) {
    profile_pool_ =
        import_profiles(config_.profile_file, simulator_, derive_seed({config_.seed, kProfileTag}));
  }
}

void Trainer::emit(std::string_view line) const {
  if (log) log(line);
}

TrainRunState Trainer::initial_state() const {
  TrainRunState s;
  Architecture critic{ModelRole::kCritic, encoder_.row_width(), config_.hidden,
                      config_.bank.size()};
  Architecture policy{ModelRole::kPolicy, encoder_.row_width(), config_.hidden,
                      config_.bank.size()};
  s.current.critic = init_params(critic, derive_seed({config_.seed, kCriticInitTag}));
  s.current.policy = init_params(policy, derive_seed({config_.seed, kPolicyInitTag}));
  s.current.critic_adam = make_adam_state(s.current.critic);
  s.current.policy_adam = make_adam_state(s.current.policy);
  s.current.calibration.eps = config_.eps;
  s.current.latest_step.eps = config_.eps;
  s.last_feasible = s.current;
  s.rng.seed(derive_seed({config_.seed, kRunTag}));
  return s;
}

Persona Trainer::draw_persona(TrainRunState& state) const {
  const std::uint64_t seed = state.rng();
  const auto id = static_cast<std::int64_t>(state.personas_drawn++);
  if (!profile_pool_.empty() && bernoulli(state.rng, 0.5)) {
    Persona p = profile_pool_[uniform_index(state.rng, profile_pool_.size())];
    p.seed = seed;
    return p;
  }
  return simulator_.sample_persona(seed, config_.prevalence, id);
}

Conversation Trainer::run_conversation(const Persona& persona, const ModelSnapshot& snapshot,
                                       std::size_t questions, std::uint64_t salt) const {
  if (questions > config_.bank.size()) {
    throw Error(Errc::kConfigInvalid, "more questions requested than the bank holds");
  }
  Models models(snapshot, encoder_);
  SimulatedRespondent respondent(simulator_, persona);
  Conversation c;
  c.persona = persona;
  c.transcript.push_back({std::nullopt, simulator_.initial_summary(persona).text});
  extend(c.transcript, &c.steps, questions, models, respondent, config_, salt);
  return c;
}

void Trainer::train_phase(TrainRunState& state) const {
  const auto& cfg = config_;
  for (std::size_t b = 0; b < cfg.fair_batches; ++b) {
    const std::size_t i = uniform_index(state.rng, cfg.rollout.max_questions);
    const Models models(state.current, encoder_);
    std::vector<PolicySample> policy_batch;
    std::vector<CriticSample> critic_batch;
    for (std::size_t j = 0; j < cfg.batch_size; ++j) {
      const std::uint64_t salt = derive_seed({kTrainTag, state.epoch, b, j});
      Persona persona;
      Transcript x;
      if (b == 0 && j < state.fair_batch.size()) {
        persona = state.fair_batch[j].persona;
        x = truncate_questions(state.fair_batch[j].transcript, i);
      } else {
        persona = draw_persona(state);
        x.push_back({std::nullopt, simulator_.initial_summary(persona).text});
      }
      SimulatedRespondent respondent(simulator_, persona);
      extend(x, nullptr, i, models, respondent, cfg, salt);

      const auto sel = select_next(x, cfg.rollout, models.critic, models.policy, respondent,
                                   cfg.bank, salt);
      Transcript next = x;
      next.push_back(
          {sel.question, respondent.respond(cfg.bank.question(sel.question), x).text});

      policy_batch.push_back({encoder_.tensorize(x), asked_questions(x), sel.question, sel.z});
      critic_batch.push_back({encoder_.tensorize(next), persona.has_target ? 1.0 : 0.0,
                              dot(state.current.calibration.l, trait_scores(next))});
    }
    state.fair_batch.clear();

    Gradient ascent = grad_reinforce(state.current.policy, policy_batch);
    for (double& g : ascent.values) g = -g;
    adam_step(state.current.policy, ascent, state.current.policy_adam, cfg.policy_optimizer);
    ++state.policy_updates;

    const Gradient descent = grad_mse(state.current.critic, critic_batch);
    adam_step(state.current.critic, descent, state.current.critic_adam, cfg.critic_optimizer);
    ++state.critic_updates;
  }
}

LabeledTranscript Trainer::sample_interview(TrainRunState& state,
                                            std::vector<StoredInterview>* keep) const {
  const Persona persona = draw_persona(state);
  const std::size_t questions = config_.rollout.max_questions;
  const std::uint64_t salt = derive_seed({kCalibTag, state.epoch, state.personas_drawn});
  auto conv = run_conversation(persona, state.current, questions, salt);
  if (keep) keep->push_back({persona, conv.transcript});
  return {std::move(conv.transcript), persona.has_target ? 1 : 0};
}

CalibrationOutcome Trainer::calibration_phase(TrainRunState& state,
                                              std::optional<double> audit_eps) const {
  CalibrationOutcome out;
  out.samples = config_.calibration_sample_count();
  {
    std::ostringstream line;
    line << "epoch " << state.epoch << ": calibration tau = " << out.samples;
    emit(line.str());
  }

  std::vector<StoredInterview> kept;
  out.calibration_set.reserve(static_cast<std::size_t>(out.samples));
  for (std::int64_t k = 0; k < out.samples; ++k) {
    out.calibration_set.push_back(
        sample_interview(state, kept.size() < config_.batch_size ? &kept : nullptr));
  }

  std::vector<ScoredSample> before;
  {
    const WorkingCritic working(state.current, encoder_);
    before = score_samples(working, out.calibration_set);
  }
  out.ce_before = cross_entropy(before);

  // The working critic is corrected again on top of its current correction,
  // which amounts to adding the new weights to the installed ones.
  const auto delta = solve_calibration(before, config_.eps, config_.solver, &out.solve);
  for (std::size_t k = 0; k < kFamilySize; ++k) {
    state.current.calibration.l[k] += delta.l[k];
  }
  state.current.calibration.eps = config_.eps;
  state.current.latest_step = delta;
  out.weights = state.current.calibration;

  std::vector<LabeledTranscript> test;
  for (std::size_t k = 0; k < config_.audit_batch_size(); ++k) {
    test.push_back(sample_interview(state, nullptr));
  }
  {
    const WorkingCritic installed(state.current, encoder_);
    const auto after = score_samples(installed, out.calibration_set);
    out.ce_after = cross_entropy(after);
    out.calibration_audit = audit(after, config_.eps);
    out.test_audit = audit(installed, test, audit_eps.value_or(config_.eps));
  }

  if (!out.test_audit.passed) {
    state.current = state.last_feasible;
    ++state.consecutive_failures;
    std::ostringstream line;
    line << "epoch " << state.epoch << ": audit failed (sup_abs = " << out.test_audit.sup_abs
         << "), restored last feasible state";
    emit(line.str());
    throw Error(Errc::kCalibrationFailed, line.str());
  }
  state.last_feasible = state.current;
  state.consecutive_failures = 0;
  state.fair_batch = std::move(kept);
  return out;
}

EvalResult Trainer::evaluate(const ModelSnapshot& snapshot) const {
  EvalResult r;
  const WorkingCritic working(snapshot, encoder_);
  // Reported loss: the latest correction step measured against the working
  // critic it corrected, which is the network under all earlier steps.
  CalibrationWeights earlier = snapshot.calibration;
  for (std::size_t k = 0; k < kFamilySize; ++k) earlier.l[k] -= snapshot.latest_step.l[k];
  const double penalty = snapshot.latest_step.eps * snapshot.latest_step.l1_norm();
  std::vector<ScoredSample> corrected_from;
  for (std::size_t k = 0; k < config_.eval_size; ++k) {
    const Persona p = simulator_.sample_persona(derive_seed({config_.seed, kEvalTag, k}),
                                                config_.prevalence,
                                                -1 - static_cast<std::int64_t>(k));
    auto conv = run_conversation(p, snapshot, config_.rollout.max_questions,
                                 derive_seed({kEvalTag, k}));
    const double y = p.has_target ? 1.0 : 0.0;
    const TraitScores c = trait_scores(conv.transcript);
    const double f_net = working.network().score(conv.transcript);
    const double f_star = corrected_value(f_net, c, snapshot.calibration);
    r.predictions.push_back(f_star);
    r.labels.push_back(y);
    r.certainties.push_back(certainty(f_star));
    const ScoredSample one{c, corrected_value(f_net, c, earlier), y};
    corrected_from.push_back(one);
    r.loss_terms.push_back(
        ma_loss(CalibrationWeights{snapshot.latest_step.l, 0.0}, std::span(&one, 1)) + penalty);
  }
  const auto acc = accuracy_loss(r.predictions, r.labels);
  for (std::size_t k = 0; k < r.predictions.size(); ++k) {
    const double rounded = r.predictions[k] >= 0.5 ? 1.0 : 0.0;
    r.correct.push_back(rounded == r.labels[k] ? 1.0 : 0.0);
  }
  std::vector<ScoredSample> star_scored;
  for (std::size_t k = 0; k < r.predictions.size(); ++k) {
    star_scored.push_back({corrected_from[k].c, r.predictions[k], r.labels[k]});
  }

  MetricRow& row = r.row;
  row.regime = config_.regime;
  row.samples = r.predictions.size();
  row.accuracy_loss = acc.sum;
  row.accuracy = 1.0 - acc.mean;
  row.fairness_loss = ma_loss(snapshot.latest_step, corrected_from);
  r.audit = audit(star_scored, config_.eps);
  row.sup_abs = r.audit.sup_abs;
  double z = 0.0;
  for (double v : r.certainties) z += v;
  row.mean_z = z / static_cast<double>(r.certainties.size());
  const std::uint64_t boot = derive_seed({config_.seed, kBootTag});
  row.accuracy_ci = bootstrap_ci(r.correct, 1000, 0.95, derive_seed({boot, 1}));
  row.fairness_loss_ci = bootstrap_ci(r.loss_terms, 1000, 0.95, derive_seed({boot, 2}));
  row.mean_z_ci = bootstrap_ci(r.certainties, 1000, 0.95, derive_seed({boot, 3}));
  return r;
}

bool Trainer::calibrates_at(std::size_t epoch) const noexcept {
  switch (config_.regime) {
    case Regime::kEvery: return true;
    case Regime::kNever: return false;
    case Regime::kOnlyFinal: return epoch == config_.regime_t;
    case Regime::kUntilT: return epoch <= config_.regime_t;
  }
  return false;
}

TrainResult Trainer::train(const std::optional<std::filesystem::path>& out_dir) const {
  TrainResult result;
  TrainRunState& state = result.state;
  state = initial_state();

  std::ofstream metrics;
  auto fail_io = [](const std::filesystem::path& p) {
    throw Error(Errc::kIoFailure, "cannot write " + p.string());
  };
  auto write_text = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) fail_io(p);
    f << text << '\n';
    if (!f) fail_io(p);
  };
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir / "checkpoints", ec);
    if (ec) fail_io(*out_dir);
    write_text(*out_dir / "config.json", config_to_json(config_));
    metrics.open(*out_dir / "metrics.csv", std::ios::binary);
    if (!metrics) fail_io(*out_dir / "metrics.csv");
    write_metrics_header(metrics);
  }

  std::optional<EvalResult> last_eval;
  for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
    state.epoch = epoch;
    train_phase(state);

    bool calibrated = false;
    bool rollback = false;
    std::int64_t calibration_samples = 0;
    if (calibrates_at(epoch)) {
      try {
        const auto outcome = calibration_phase(state);
        calibrated = true;
        calibration_samples = outcome.samples;
        if (out_dir) {
          char name[32];
          std::snprintf(name, sizeof name, "epoch_%04zu.json", epoch);
          const auto path = *out_dir / "checkpoints" / name;
          save_checkpoint(path, {config_, state.current, rng_state(state.rng), epoch});
          result.checkpoints.push_back(path);
        }
      } catch (const Error& e) {
        if (e.code() != Errc::kCalibrationFailed) throw;
        rollback = true;
        if (state.consecutive_failures >= config_.max_consecutive_failures) {
          emit("too many consecutive audit failures");
          throw;
        }
      }
    }

    last_eval = evaluate(state.current);
    MetricRow row = last_eval->row;
    row.epoch = epoch;
    row.calibration_performed = calibrated;
    row.rollback = rollback;
    row.calibration_samples = calibration_samples;
    state.history.push_back(row);
    if (metrics.is_open()) {
      write_metrics_row(metrics, row);
      metrics.flush();
    }
    std::ostringstream line;
    line << "epoch " << epoch << ": accuracy " << row.accuracy << ", fairness_loss "
         << row.fairness_loss << ", sup_abs " << row.sup_abs << ", mean_Z " << row.mean_z
         << (calibrated ? ", calibrated" : "") << (rollback ? ", rollback" : "");
    emit(line.str());
  }

  if (out_dir) {
    const auto final_path = *out_dir / "final.json";
    save_checkpoint(final_path, {config_, state.current, rng_state(state.rng), state.epoch});
    result.checkpoints.push_back(final_path);
    if (!last_eval) last_eval = evaluate(state.current);
    write_text(*out_dir / "final_audit.json", last_eval->audit.to_json());
  }
  return result;
}

}  // namespace elicit
