#include "elicit/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "elicit/error.hpp"
#include "elicit/traits.hpp"

namespace elicit {

using nlohmann::json;

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) {
    throw Error(Errc::kConfigInvalid, message);
  }
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

json adam_to_json(const AdamConfig& a) {
  return {{"lr", a.lr},
          {"beta1", a.beta1},
          {"beta2", a.beta2},
          {"eps", a.eps},
          {"plain_sgd", a.plain_sgd}};
}

// Copies keys that are present; unknown keys are an error so typos surface.
template <typename Fn>
void for_each_key(const json& j, const std::string& where, Fn&& fn) {
  check(j.is_object(), where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!fn(it.key(), it.value())) {
      throw Error(Errc::kConfigInvalid, "unknown key '" + where + "." + it.key() + "'");
    }
  }
}

AdamConfig adam_from_json(const json& j, AdamConfig a, const std::string& where) {
  for_each_key(j, where, [&](const std::string& k, const json& v) {
    if (k == "lr") a.lr = v.get<double>();
    else if (k == "beta1") a.beta1 = v.get<double>();
    else if (k == "beta2") a.beta2 = v.get<double>();
    else if (k == "eps") a.eps = v.get<double>();
    else if (k == "plain_sgd") a.plain_sgd = v.get<bool>();
    else return false;
    return true;
  });
  return a;
}

void validate_adam(const AdamConfig& a, const std::string& name) {
  check(a.lr > 0.0 && std::isfinite(a.lr), name + ".lr must be positive");
  check(a.beta1 >= 0.0 && a.beta1 < 1.0, name + ".beta1 must lie in [0, 1)");
  check(a.beta2 >= 0.0 && a.beta2 < 1.0, name + ".beta2 must lie in [0, 1)");
  check(a.eps > 0.0, name + ".eps must be positive");
}

json to_json_value(const TrainConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["bank"] = json::parse(c.bank.to_json());
  j["simulator"] = {{"suppression_weight", c.simulator.suppression_weight},
                    {"skill_inclusion", c.simulator.skill_inclusion},
                    {"direct_attenuation", c.simulator.direct_attenuation},
                    {"unprompted_target", c.simulator.unprompted_target},
                    {"max_markers_per_kind", c.simulator.max_markers_per_kind}};
  j["prevalence"] = c.prevalence;
  j["embedding_dim"] = c.embedding_dim;
  j["hidden"] = c.hidden;
  j["batch_size"] = c.batch_size;
  j["fair_batches"] = c.fair_batches;
  j["rollout"] = {{"candidates", c.rollout.candidates},
                  {"depth", c.rollout.depth},
                  {"max_questions", c.rollout.max_questions}};
  j["eps"] = c.eps;
  j["delta"] = c.delta;
  j["epochs"] = c.epochs;
  j["critic_optimizer"] = adam_to_json(c.critic_optimizer);
  j["policy_optimizer"] = adam_to_json(c.policy_optimizer);
  j["solver"] = {{"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations}};
  j["regime"] = std::string(regime_name(c.regime));
  j["regime_t"] = c.regime_t;
  j["eval_size"] = c.eval_size;
  j["calibration_samples"] = c.calibration_samples;
  j["audit_batch"] = c.audit_batch;
  j["max_consecutive_failures"] = c.max_consecutive_failures;
  j["seed"] = c.seed;
  j["profile_file"] = c.profile_file;
  return j;
}

TrainConfig from_json_value(const json& j) {
  check(j.is_object(), "config must be a JSON object");
  TrainConfig c = profile_by_name(j.value("profile", std::string("desk")));
  for_each_key(j, "config", [&](const std::string& k, const json& v) {
    if (k == "profile") c.profile = v.get<std::string>();
    else if (k == "bank") c.bank = QuestionBank::from_json(v.dump());
    else if (k == "simulator") {
      for_each_key(v, "simulator", [&](const std::string& sk, const json& sv) {
        auto& s = c.simulator;
        if (sk == "suppression_weight") s.suppression_weight = sv.get<double>();
        else if (sk == "skill_inclusion") s.skill_inclusion = sv.get<double>();
        else if (sk == "direct_attenuation") s.direct_attenuation = sv.get<double>();
        else if (sk == "unprompted_target") s.unprompted_target = sv.get<bool>();
        else if (sk == "max_markers_per_kind") s.max_markers_per_kind = sv.get<int>();
        else return false;
        return true;
      });
    } else if (k == "prevalence") c.prevalence = v.get<double>();
    else if (k == "embedding_dim") c.embedding_dim = v.get<std::size_t>();
    else if (k == "hidden") c.hidden = v.get<std::size_t>();
    else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
    else if (k == "fair_batches") c.fair_batches = v.get<std::size_t>();
    else if (k == "rollout") {
      for_each_key(v, "rollout", [&](const std::string& rk, const json& rv) {
        if (rk == "candidates") c.rollout.candidates = rv.get<std::size_t>();
        else if (rk == "depth") c.rollout.depth = rv.get<std::size_t>();
        else if (rk == "max_questions") c.rollout.max_questions = rv.get<std::size_t>();
        else return false;
        return true;
      });
    } else if (k == "eps") c.eps = v.get<double>();
    else if (k == "delta") c.delta = v.get<double>();
    else if (k == "epochs") c.epochs = v.get<std::size_t>();
    else if (k == "critic_optimizer")
      c.critic_optimizer = adam_from_json(v, c.critic_optimizer, "critic_optimizer");
    else if (k == "policy_optimizer")
      c.policy_optimizer = adam_from_json(v, c.policy_optimizer, "policy_optimizer");
    else if (k == "solver") {
      for_each_key(v, "solver", [&](const std::string& sk, const json& sv) {
        if (sk == "tolerance") c.solver.tolerance = sv.get<double>();
        else if (sk == "max_iterations") c.solver.max_iterations = sv.get<std::size_t>();
        else return false;
        return true;
      });
    } else if (k == "regime") c.regime = parse_regime(v.get<std::string>());
    else if (k == "regime_t") c.regime_t = v.get<std::size_t>();
    else if (k == "eval_size") c.eval_size = v.get<std::size_t>();
    else if (k == "calibration_samples") c.calibration_samples = v.get<std::int64_t>();
    else if (k == "audit_batch") c.audit_batch = v.get<std::size_t>();
    else if (k == "max_consecutive_failures") c.max_consecutive_failures = v.get<std::size_t>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "profile_file") c.profile_file = v.get<std::string>();
    else return false;
    return true;
  });
  return c;
}

}  // namespace

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kEvery: return "every";
    case Regime::kNever: return "never";
    case Regime::kOnlyFinal: return "only-final";
    case Regime::kUntilT: return "until-t";
  }
  return "every";
}

Regime parse_regime(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) {
    return ch == '_' ? '-' : static_cast<char>(std::tolower(ch));
  });
  if (s == "every") return Regime::kEvery;
  if (s == "never") return Regime::kNever;
  if (s == "only-final") return Regime::kOnlyFinal;
  if (s == "until-t") return Regime::kUntilT;
  throw Error(Errc::kConfigInvalid, "unknown regime '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  check(batch_size >= 1, "batch_size must be at least 1");
  check(fair_batches >= 1, "fair_batches must be at least 1");
  check(eps > 0.0 && std::isfinite(eps), "eps must be positive");
  check(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  check(in_unit(prevalence), "prevalence must lie in [0, 1]");
  check(embedding_dim > kMarkerFeatures + kSkillFeatures,
        "embedding_dim must exceed the fixed feature count");
  check(hidden >= 1, "hidden must be at least 1");
  rollout.validate(bank.size());
  check(rollout.max_questions >= 1, "rollout.max_questions must be at least 1");
  check(in_unit(simulator.suppression_weight), "simulator.suppression_weight must lie in [0, 1]");
  check(in_unit(simulator.skill_inclusion), "simulator.skill_inclusion must lie in [0, 1]");
  check(in_unit(simulator.direct_attenuation), "simulator.direct_attenuation must lie in [0, 1]");
  check(simulator.max_markers_per_kind >= 0, "simulator.max_markers_per_kind must be >= 0");
  validate_adam(critic_optimizer, "critic_optimizer");
  validate_adam(policy_optimizer, "policy_optimizer");
  check(solver.tolerance > 0.0, "solver.tolerance must be positive");
  check(solver.max_iterations >= 1, "solver.max_iterations must be at least 1");
  check(calibration_samples >= 0, "calibration_samples must be >= 0");
  check(eval_size >= 1, "eval_size must be at least 1");
  check(max_consecutive_failures >= 1, "max_consecutive_failures must be at least 1");
  if (regime == Regime::kOnlyFinal || regime == Regime::kUntilT) {
    check(regime_t >= 1, "regime_t must be at least 1 for this regime");
  }
}

std::int64_t TrainConfig::calibration_sample_count() const {
  return calibration_samples > 0 ? calibration_samples : threshold(eps, delta, kFamilySize);
}

TrainConfig desk_profile() {
  TrainConfig c;
  c.profile = "desk";
  c.eps = 0.1;
  c.epochs = 100;
  return c;
}

TrainConfig paper_profile() {
  TrainConfig c;
  c.profile = "paper";
  c.eps = 0.01;
  c.delta = 1e-6;
  c.batch_size = 8;
  c.fair_batches = 4;
  c.rollout.max_questions = 2;
  c.rollout.depth = 2;
  c.epochs = 100;
  c.prevalence = 0.2;
  return c;
}

TrainConfig profile_by_name(std::string_view name) {
  if (name == "desk") return desk_profile();
  if (name == "paper") return paper_profile();
  throw Error(Errc::kConfigInvalid, "unknown profile '" + std::string(name) + "'");
}

std::string config_to_json(const TrainConfig& config) { return to_json_value(config).dump(2); }

TrainConfig config_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::kConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return from_json_value(j);
  } catch (const json::exception& e) {
    throw Error(Errc::kConfigInvalid, std::string("config has a wrongly typed value: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kMalformedBank) {
      throw Error(Errc::kConfigInvalid, e.what());
    }
    throw;
  }
}

TrainConfig apply_overrides(const TrainConfig& config,
                            const std::vector<std::string>& assignments) {
  json j = to_json_value(config);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    check(eq != std::string::npos && eq > 0, "override '" + a + "' is not path=value");
    const std::string path = a.substr(0, eq);
    const std::string raw = a.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    json* node = &j;
    std::istringstream parts(path);
    std::string part;
    std::vector<std::string> keys;
    while (std::getline(parts, part, '.')) {
      check(!part.empty(), "override path '" + path + "' has an empty segment");
      keys.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      check(node->is_object() && node->contains(keys[i]),
            "override path '" + path + "' does not name a config field");
      node = &(*node)[keys[i]];
    }
    check(node->is_object() && node->contains(keys.back()),
          "override path '" + path + "' does not name a config field");
    (*node)[keys.back()] = value;
  }
  return config_from_json(j.dump());
}

}  // namespace elicit
