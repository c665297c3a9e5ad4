#include "cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "elicit/checkpoint.hpp"
#include "elicit/config.hpp"
#include "elicit/error.hpp"
#include "elicit/evalkit.hpp"
#include "elicit/fairness.hpp"
#include "elicit/rollout.hpp"
#include "elicit/trainer.hpp"

namespace elicit::cli {

namespace {

struct ConfigOptions {
  std::string profile = "desk";
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> regime;
  std::optional<std::size_t> t;
  std::optional<double> eps;
};

void add_config_options(CLI::App& app, ConfigOptions& o, bool with_regime) {
  app.add_option("--profile", o.profile, "Base profile: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--config", o.config_file, "JSON configuration file");
  app.add_option("--set", o.sets, "Override a field, e.g. --set rollout.depth=3");
  app.add_option("--epochs", o.epochs, "Number of epochs");
  app.add_option("--seed", o.seed, "Run seed (takes precedence over ELICIT_SEED)");
  app.add_option("--eps", o.eps, "Multi-accuracy tolerance");
  if (with_regime) {
    app.add_option("--regime", o.regime, "every, never, only-final or until-t");
  }
  app.add_option("--t", o.t, "Epoch bound for only-final and until-t");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig resolve_config(const ConfigOptions& o) {
  TrainConfig c = profile_by_name(o.profile);
  if (!o.config_file.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(o.config_file));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kConfigInvalid, o.config_file + ": " + e.what());
    }
    if (j.is_object() && !j.contains("profile")) j["profile"] = o.profile;
    c = config_from_json(j.dump());
  }
  if (const char* env = std::getenv("ELICIT_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string_view(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw Error(Errc::kConfigInvalid, std::string("ELICIT_SEED is not an integer: ") + env);
    }
  }
  c = apply_overrides(c, o.sets);
  if (o.epochs) c.epochs = *o.epochs;
  if (o.seed) c.seed = *o.seed;
  if (o.eps) c.eps = *o.eps;
  if (o.regime) c.regime = parse_regime(*o.regime);
  if (o.t) c.regime_t = *o.t;
  c.validate();
  return c;
}

void write_lines(std::ostream& err, bool quiet, Trainer& trainer) {
  if (!quiet) {
    trainer.log = [&err](std::string_view line) { err << line << '\n'; };
  }
}

int cmd_train(const ConfigOptions& o, const std::string& out_dir, bool dry_run, bool quiet,
              std::ostream& out, std::ostream& err) {
  const TrainConfig config = resolve_config(o);
  if (dry_run) {
    out << config_to_json(config) << '\n';
    out << "tau = " << config.calibration_sample_count() << '\n';
    return kExitOk;
  }
  Trainer trainer(config);
  write_lines(err, quiet, trainer);
  const auto result = trainer.train(std::filesystem::path(out_dir));
  out << "wrote " << result.state.history.size() << " metric rows and "
      << result.checkpoints.size() << " checkpoints to " << out_dir << '\n';
  return kExitOk;
}

std::vector<LabeledTranscript> interview_population(const Trainer& trainer,
                                                    const ModelSnapshot& snapshot,
                                                    const std::vector<Persona>& personas) {
  std::vector<LabeledTranscript> data;
  data.reserve(personas.size());
  for (std::size_t k = 0; k < personas.size(); ++k) {
    const auto& p = personas[k];
    auto conv = trainer.run_conversation(p, snapshot, trainer.config().rollout.max_questions,
                                         derive_seed({p.seed, k}));
    data.push_back({std::move(conv.transcript), p.has_target ? 1 : 0});
  }
  return data;
}

int cmd_audit(const std::string& checkpoint_path, const std::string& persona_path,
              std::optional<double> eps, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const Trainer trainer(ckpt.config);
  const auto personas = read_persona_file(persona_path, trainer.simulator());
  const auto data = interview_population(trainer, ckpt.snapshot, personas);
  const WorkingCritic critic(ckpt.snapshot, trainer.encoder());
  const double tolerance = eps.value_or(ckpt.config.eps);
  if (!(tolerance >= 0.0)) {
    throw Error(Errc::kConfigInvalid, "--eps must be nonnegative");
  }
  const auto report = audit(critic, data, tolerance);
  out << report.to_json() << '\n';
  return report.passed ? kExitOk : kExitFailure;
}

int cmd_personas(const ConfigOptions& o, std::size_t count, std::uint64_t seed,
                 const std::string& path, std::ostream& out) {
  const TrainConfig config = resolve_config(o);
  const Simulator simulator(config.bank, config.simulator);
  std::vector<Persona> personas;
  personas.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    personas.push_back(simulator.sample_persona(derive_seed({seed, k}), config.prevalence,
                                                static_cast<std::int64_t>(k)));
  }
  write_persona_file(path, personas);
  out << "wrote " << count << " personas to " << path << '\n';
  return kExitOk;
}

// Reads one answer; an empty line earns a single reminder before it is accepted.
std::string read_answer(std::istream& in, std::ostream& out) {
  std::string line;
  out << "> " << std::flush;
  if (!std::getline(in, line)) return {};
  if (line.find_first_not_of(" \t\r") == std::string::npos) {
    out << "Please type an answer (an empty line is accepted next time).\n> " << std::flush;
    if (!std::getline(in, line)) return {};
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

int cmd_interview(const std::string& checkpoint_path, const std::string& mode,
                  std::optional<std::size_t> max_questions, const std::string& log_path,
                  std::optional<std::uint64_t> seed, std::istream& in, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const Trainer trainer(ckpt.config);
  const auto& bank = ckpt.config.bank;
  const std::size_t limit = max_questions.value_or(ckpt.config.rollout.max_questions);
  if (limit > bank.size()) {
    throw Error(Errc::kConfigInvalid, "--max-questions exceeds the bank size");
  }
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::binary);
    if (!log) throw Error(Errc::kIoFailure, "cannot write " + log_path);
  }

  const WorkingCritic critic(ckpt.snapshot, trainer.encoder());
  const NetworkPolicy policy(ckpt.snapshot.policy, trainer.encoder());
  // Rollouts continue the conversation with a persona that holds no skills
  // and sits at the midpoint of every trait.
  const Persona neutral =
      trainer.simulator().make_persona(0, {}, {0.5, 0.5, 0.5, 0.5, 0.5}, ckpt.config.seed);
  const SimulatedRespondent respondent(trainer.simulator(), neutral);
  Rng rng(seed.value_or(ckpt.config.seed));

  Transcript x;
  auto record = [&](std::optional<QuestionId> q, std::string text) {
    x.push_back({q, std::move(text)});
    if (log.is_open()) {
      nlohmann::json line;
      line["q"] = q ? nlohmann::json(*q) : nlohmann::json(nullptr);
      line["text"] = x.back().text;
      line["score"] = critic.score(x);
      log << line.dump() << '\n';
    }
  };

  out << "Please describe yourself in a few sentences.\n";
  record(std::nullopt, read_answer(in, out));
  for (std::size_t i = 0; i < limit; ++i) {
    QuestionId q = 0;
    if (mode == "argmax") {
      q = select_next(x, ckpt.config.rollout, critic, policy, respondent, bank, 0).question;
    } else {
      q = sample_next(x, policy, bank.size(), rng);
    }
    out << render_question(bank, q) << '\n';
    record(q, read_answer(in, out));
  }

  const double score = critic.score(x);
  out << "score: " << score << '\n';
  const auto c = trait_scores(x);
  for (std::size_t k = 0; k < kFamilySize; ++k) {
    out << "  " << trait_name(k) << ": " << ckpt.snapshot.calibration.l[k] * c[k] << '\n';
  }
  if (log.is_open() && !log) throw Error(Errc::kIoFailure, "write failed for " + log_path);
  return kExitOk;
}

int cmd_regimes(const ConfigOptions& o, const std::vector<std::string>& regimes,
                const std::string& out_dir, bool quiet, std::ostream& out, std::ostream& err) {
  const TrainConfig base = resolve_config(o);
  std::vector<TrainConfig> configs;
  for (const auto& r : regimes) {
    TrainConfig c = base;
    c.regime = parse_regime(r);
    if (c.regime != Regime::kOnlyFinal && c.regime != Regime::kUntilT) c.regime_t = 0;
    c.validate();
    configs.push_back(c);
  }
  if (!quiet) {
    err << "running " << configs.size() << " regimes for " << base.epochs << " epochs\n";
  }
  const auto report = regime_report(configs, out_dir);
  for (const auto& f : report.figure_files) out << f.string() << '\n';
  for (const auto& f : report.curve_files) out << f.string() << '\n';
  return kExitOk;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kConfigInvalid:
    case Errc::kMalformedBank:
      return kExitConfig;
    case Errc::kIoFailure:
    case Errc::kMalformedPersonaFile:
    case Errc::kMalformedCheckpoint:
      return kExitIo;
    default:
      return kExitFailure;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Equitable skill elicitation: training, audits and interviews"};
  app.require_subcommand(1);

  ConfigOptions train_opts;
  std::string train_out = "runs/train";
  bool dry_run = false;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train interviewer and critic");
  add_config_options(*train, train_opts, true);
  train->add_option("--out", train_out, "Output directory");
  train->add_flag("--dry-run", dry_run, "Print the resolved configuration and exit");
  train->add_flag("--quiet", quiet, "Suppress progress lines");

  std::string audit_ckpt;
  std::string audit_personas;
  std::optional<double> audit_eps;
  auto* audit_cmd = app.add_subcommand("audit", "Audit a checkpoint on a persona file");
  audit_cmd->add_option("--checkpoint", audit_ckpt, "Checkpoint JSON")->required();
  audit_cmd->add_option("--personas", audit_personas, "Persona JSON-lines file")->required();
  audit_cmd->add_option("--eps", audit_eps, "Tolerance (defaults to the checkpoint's)");

  std::string iv_ckpt;
  std::string iv_mode = "argmax";
  std::optional<std::size_t> iv_max;
  std::string iv_log;
  std::optional<std::uint64_t> iv_seed;
  auto* interview = app.add_subcommand("interview", "Interview a person on the terminal");
  interview->add_option("--checkpoint", iv_ckpt, "Checkpoint JSON")->required();
  interview->add_option("--mode", iv_mode, "argmax (rollouts) or sample")
      ->check(CLI::IsMember({"argmax", "sample"}));
  interview->add_option("--max-questions", iv_max, "Questions after the self-description");
  interview->add_option("--transcript", iv_log, "Write the session as JSON lines");
  interview->add_option("--seed", iv_seed, "Seed for sample mode");

  ConfigOptions regime_opts;
  std::vector<std::string> regime_list{"every", "never"};
  std::string regime_out = "runs/regimes";
  bool regime_quiet = false;
  auto* regimes = app.add_subcommand("regimes", "Compare correction regimes");
  add_config_options(*regimes, regime_opts, false);
  regimes->add_option("--regimes", regime_list, "Regimes to run")->delimiter(',');
  regimes->add_option("--out", regime_out, "Output directory");
  regimes->add_flag("--quiet", regime_quiet, "Suppress progress lines");

  ConfigOptions persona_opts;
  std::size_t persona_count = 2000;
  std::uint64_t persona_seed = 7;
  std::string persona_out;
  auto* personas = app.add_subcommand("personas", "Sample a persona file");
  add_config_options(*personas, persona_opts, false);
  personas->add_option("--count", persona_count, "Number of personas");
  personas->add_option("--persona-seed", persona_seed, "Seed for the population");
  personas->add_option("--out", persona_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*train) return cmd_train(train_opts, train_out, dry_run, quiet, out, err);
    if (*audit_cmd) return cmd_audit(audit_ckpt, audit_personas, audit_eps, out);
    if (*interview) return cmd_interview(iv_ckpt, iv_mode, iv_max, iv_log, iv_seed, in, out);
    if (*regimes) return cmd_regimes(regime_opts, regime_list, regime_out, regime_quiet, out, err);
    if (*personas) return cmd_personas(persona_opts, persona_count, persona_seed, persona_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitConfig;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv{"elicit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), in, out, err);
}

}  // namespace elicit::cli
