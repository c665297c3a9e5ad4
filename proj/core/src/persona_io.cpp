#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "elicit/error.hpp"
#include "elicit/rng.hpp"
#include "elicit/simulator.hpp"

namespace elicit {

namespace {

using nlohmann::json;

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

Persona parse_persona_line(const std::string& line, std::size_t line_no,
                           const Simulator& simulator) {
  auto fail = [&](const std::string& why) {
    return Error(Errc::kMalformedPersonaFile,
                 "line " + std::to_string(line_no) + ": " + why);
  };
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
  if (!doc.is_object()) {
    throw fail("expected an object");
  }
  for (const char* key : {"id", "skills", "traits", "seed"}) {
    if (!doc.contains(key)) {
      throw fail(std::string("missing key '") + key + "'");
    }
  }
  try {
    const auto id = doc["id"].get<std::int64_t>();
    const auto skills = doc["skills"].get<std::vector<std::string>>();
    const auto traits = doc["traits"].get<std::vector<double>>();
    const auto seed = doc["seed"].get<std::uint64_t>();
    if (traits.size() != 5) {
      throw fail("traits must hold 5 values");
    }
    TraitVector tv{};
    for (std::size_t k = 0; k < 5; ++k) {
      if (!(traits[k] >= 0.0 && traits[k] <= 1.0)) {
        throw fail("traits must lie in [0, 1]");
      }
      tv[k] = traits[k];
    }
    return simulator.make_persona(id, skills, tv, seed);
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
}

std::vector<std::string> profile_skills(const json& value) {
  std::vector<std::string> out;
  if (value.is_array()) {
    for (const auto& s : value) {
      if (s.is_string()) {
        out.push_back(s.get<std::string>());
      }
    }
  } else if (value.is_string()) {
    std::istringstream is(value.get<std::string>());
    std::string item;
    while (std::getline(is, item, ',')) {
      out.push_back(item);
    }
  }
  return out;
}

}  // namespace

std::vector<Persona> read_persona_file(const std::filesystem::path& path,
                                       const Simulator& simulator) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIoFailure, "cannot open persona file " + path.string());
  }
  std::vector<Persona> personas;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) {
      continue;
    }
    personas.push_back(parse_persona_line(line, line_no, simulator));
  }
  if (personas.empty()) {
    throw Error(Errc::kMalformedPersonaFile, "no personas in " + path.string());
  }
  return personas;
}

void write_persona_file(const std::filesystem::path& path, const std::vector<Persona>& personas) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::kIoFailure, "cannot write persona file " + path.string());
  }
  for (const auto& p : personas) {
    json doc;
    doc["id"] = p.id;
    doc["skills"] = std::vector<std::string>(p.true_skills.begin(), p.true_skills.end());
    doc["traits"] = std::vector<double>(p.traits.begin(), p.traits.end());
    doc["seed"] = p.seed;
    out << doc.dump() << '\n';
  }
  if (!out) {
    throw Error(Errc::kIoFailure, "write failed for " + path.string());
  }
}

std::vector<Persona> import_profiles(const std::filesystem::path& path,
                                     const Simulator& simulator, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIoFailure, "cannot open profile file " + path.string());
  }
  std::vector<Persona> personas;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) {
      continue;
    }
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::kMalformedPersonaFile,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("skills")) {
      throw Error(Errc::kMalformedPersonaFile,
                  "line " + std::to_string(line_no) + ": profile without skills");
    }
    const std::uint64_t persona_seed = derive_seed({seed, line_no});
    Rng rng(persona_seed);
    TraitVector traits{};
    for (double& t : traits) {
      t = uniform01(rng);
    }
    const auto id = static_cast<std::int64_t>(personas.size());
    personas.push_back(simulator.make_persona(id, profile_skills(doc["skills"]), traits,
                                              persona_seed));
  }
  if (personas.empty()) {
    throw Error(Errc::kMalformedPersonaFile, "no profiles in " + path.string());
  }
  return personas;
}

}  // namespace elicit
