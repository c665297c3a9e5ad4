#include "elicit/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "elicit/error.hpp"

namespace elicit {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::kMalformedCheckpoint, what);
}

json hex_array(const std::vector<double>& values) {
  json a = json::array();
  for (double v : values) a.push_back(hex_double(v));
  return a;
}

std::vector<double> parse_hex_array(const json& a) {
  if (!a.is_array()) malformed("expected an array of hex doubles");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& v : a) {
    if (!v.is_string()) malformed("expected a hex string");
    out.push_back(parse_hex_double(v.get<std::string>()));
  }
  return out;
}

json params_to_json(const ModelParams& p) {
  return {{"role", p.arch.role == ModelRole::kCritic ? "critic" : "policy"},
          {"input_dim", p.arch.input_dim},
          {"hidden", p.arch.hidden},
          {"num_questions", p.arch.num_questions},
          {"weights", hex_array(p.weights)}};
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  const auto role = j.at("role").get<std::string>();
  if (role == "critic") p.arch.role = ModelRole::kCritic;
  else if (role == "policy") p.arch.role = ModelRole::kPolicy;
  else malformed("unknown model role '" + role + "'");
  p.arch.input_dim = j.at("input_dim").get<std::size_t>();
  p.arch.hidden = j.at("hidden").get<std::size_t>();
  p.arch.num_questions = j.at("num_questions").get<std::size_t>();
  p.weights = parse_hex_array(j.at("weights"));
  if (p.weights.size() != p.arch.parameter_count()) {
    malformed("weight count does not match the architecture");
  }
  return p;
}

json adam_to_json(const AdamState& s) {
  return {{"m", hex_array(s.m)}, {"v", hex_array(s.v)}, {"step", s.step}};
}

AdamState adam_from_json(const json& j) {
  AdamState s;
  s.m = parse_hex_array(j.at("m"));
  s.v = parse_hex_array(j.at("v"));
  s.step = j.at("step").get<std::uint64_t>();
  return s;
}

json calibration_to_json(const CalibrationWeights& w) {
  return {{"l", hex_array(std::vector<double>(w.l.begin(), w.l.end()))},
          {"eps", hex_double(w.eps)}};
}

CalibrationWeights calibration_from_json(const json& j) {
  CalibrationWeights w;
  const auto l = parse_hex_array(j.at("l"));
  if (l.size() != kFamilySize) malformed("calibration vector has the wrong length");
  std::copy(l.begin(), l.end(), w.l.begin());
  w.eps = parse_hex_double(j.at("eps").get<std::string>());
  return w;
}

json snapshot_to_json(const ModelSnapshot& s) {
  return {{"critic", params_to_json(s.critic)},
          {"critic_adam", adam_to_json(s.critic_adam)},
          {"policy", params_to_json(s.policy)},
          {"policy_adam", adam_to_json(s.policy_adam)},
          {"calibration", calibration_to_json(s.calibration)},
          {"latest_step", calibration_to_json(s.latest_step)}};
}

ModelSnapshot snapshot_from_json(const json& j) {
  ModelSnapshot s;
  s.critic = params_from_json(j.at("critic"));
  s.critic_adam = adam_from_json(j.at("critic_adam"));
  s.policy = params_from_json(j.at("policy"));
  s.policy_adam = adam_from_json(j.at("policy_adam"));
  s.calibration = calibration_from_json(j.at("calibration"));
  s.latest_step = calibration_from_json(j.at("latest_step"));
  if (s.critic.arch.role != ModelRole::kCritic || s.policy.arch.role != ModelRole::kPolicy) {
    malformed("model roles are swapped");
  }
  return s;
}

}  // namespace

std::string hex_double(double value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(value)));
  return buf;
}

double parse_hex_double(std::string_view text) {
  if (text.size() != 16) {
    malformed("hex double must have 16 digits");
  }
  std::uint64_t bits = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), bits, 16);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    malformed("invalid hex double '" + std::string(text) + "'");
  }
  return std::bit_cast<double>(bits);
}

std::string snapshot_bytes(const ModelSnapshot& snapshot) {
  return snapshot_to_json(snapshot).dump();
}

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  json j;
  j["format"] = kFormatVersion;
  j["epoch"] = checkpoint.epoch;
  j["rng_state"] = checkpoint.rng_state;
  j["config"] = json::parse(config_to_json(checkpoint.config));
  j["snapshot"] = snapshot_to_json(checkpoint.snapshot);
  return j.dump(1);
}

Checkpoint checkpoint_from_json(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    if (!j.is_object() || j.value("format", 0) != kFormatVersion) {
      malformed("unsupported checkpoint format");
    }
    Checkpoint c;
    c.epoch = j.at("epoch").get<std::size_t>();
    c.rng_state = j.at("rng_state").get<std::string>();
    try {
      c.config = config_from_json(j.at("config").dump());
    } catch (const Error& e) {
      malformed(std::string("embedded config: ") + e.what());
    }
    c.snapshot = snapshot_from_json(j.at("snapshot"));
    return c;
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::kIoFailure, "cannot write " + path.string());
  }
  out << checkpoint_to_json(checkpoint) << '\n';
  if (!out) {
    throw Error(Errc::kIoFailure, "write failed for " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoFailure, "cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace elicit
