#include "socnav/model_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace socnav {

using nlohmann::json;

namespace {
constexpr const char* kFormatTag = "socnav-ensemble-v1";
}

void save_ensemble(const Ensemble& ensemble, const std::string& path) {
  json doc;
  doc["format"] = kFormatTag;
  const GruArchitecture& a = ensemble.members.front().arch;
  doc["arch"] = {{"input", a.input},
                 {"hidden", a.hidden},
                 {"dec_hidden", a.dec_hidden},
                 {"horizon", a.horizon},
                 {"out_per_step", a.out_per_step}};
  doc["training"] = {{"epochs", ensemble.epochs},
                     {"batch", ensemble.batch},
                     {"learning_rate", ensemble.learning_rate},
                     {"base_seed", ensemble.base_seed}};
  json members = json::array();
  for (const auto& m : ensemble.members) {
    json jm;
    jm["seed"] = m.seed;
    jm["initial_nll"] = m.initial_nll;
    jm["final_nll"] = m.final_nll;
    std::vector<double> params(m.params.data(), m.params.data() + m.params.size());
    jm["params"] = params;
    members.push_back(std::move(jm));
  }
  doc["members"] = std::move(members);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_ensemble: cannot open " + path);
  out << doc.dump() << "\n";
}

Ensemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ensemble: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_ensemble: " + path + " is not valid JSON: " + e.what());
  }
  if (doc.value("format", "") != kFormatTag) {
    throw std::runtime_error("load_ensemble: unrecognized format tag in " + path);
  }

  GruArchitecture arch;
  const auto& ja = doc.at("arch");
  arch.input = ja.at("input");
  arch.hidden = ja.at("hidden");
  arch.dec_hidden = ja.at("dec_hidden");
  arch.horizon = ja.at("horizon");
  arch.out_per_step = ja.at("out_per_step");

  Ensemble ensemble;
  const auto& jt = doc.at("training");
  ensemble.epochs = jt.at("epochs");
  ensemble.batch = jt.at("batch");
  ensemble.learning_rate = jt.at("learning_rate");
  ensemble.base_seed = jt.at("base_seed");

  for (const auto& jm : doc.at("members")) {
    EnsembleMember m;
    m.arch = arch;
    m.seed = jm.at("seed");
    m.initial_nll = jm.at("initial_nll");
    m.final_nll = jm.at("final_nll");
    const auto& params = jm.at("params");
    if (static_cast<int>(params.size()) != arch.param_count()) {
      throw std::runtime_error("load_ensemble: parameter count does not match architecture");
    }
    m.params.resize(arch.param_count());
    for (Eigen::Index i = 0; i < m.params.size(); ++i) {
      m.params(i) = params[static_cast<std::size_t>(i)];
    }
    if (!m.finite()) {
      throw std::runtime_error("load_ensemble: non-finite parameter in model file");
    }
    ensemble.members.push_back(std::move(m));
  }
  if (ensemble.members.empty()) {
    throw std::runtime_error("load_ensemble: model file has no members");
  }
  return ensemble;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("file_digest: cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

}  // namespace socnav
