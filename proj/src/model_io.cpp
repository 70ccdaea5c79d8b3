#include "popsim/model_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace popsim {

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(field, "invalid value (" + std::string(e.what()) + ")");
  }
}

void accumulate(const YAML::Node& side, const std::vector<std::string>& species,
                Eigen::VectorXi& out, const std::string& field) {
  out = Eigen::VectorXi::Zero(static_cast<Index>(species.size()));
  if (!side || side.IsNull()) return;
  if (!side.IsMap()) throw ConfigError(field, "expected a map of species to coefficients");
  for (const auto& entry : side) {
    const auto name = scalar<std::string>(entry.first, field);
    Index idx = -1;
    for (std::size_t i = 0; i < species.size(); ++i)
      if (species[i] == name) idx = static_cast<Index>(i);
    if (idx < 0) throw ConfigError(field, "unknown species '" + name + "'");
    const int coeff = scalar<int>(entry.second, field);
    if (coeff < 0) throw ConfigError(field, "coefficients must be nonnegative");
    out(idx) += coeff;
  }
}

}  // namespace

ModelSpec parse_model(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("model", std::string("malformed document: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("model", "expected a key/value document");

  const std::string name = root["name"] ? scalar<std::string>(root["name"], "name") : "model";

  if (!root["species"] || !root["species"].IsSequence() || root["species"].size() == 0)
    throw ConfigError("species", "expected a nonempty list of species names");
  std::vector<std::string> species;
  for (const auto& s : root["species"]) species.push_back(scalar<std::string>(s, "species"));
  const auto d = static_cast<Index>(species.size());

  if (!root["x0"] || !root["x0"].IsSequence()) throw ConfigError("x0", "expected a list of initial values");
  if (static_cast<Index>(root["x0"].size()) != d) throw ConfigError("x0", "length differs from species");
  Vector x0(d);
  for (Index i = 0; i < d; ++i) x0(i) = scalar<double>(root["x0"][static_cast<std::size_t>(i)], "x0");

  if (!root["channels"] || !root["channels"].IsSequence() || root["channels"].size() == 0)
    throw ConfigError("channels", "expected a nonempty list of channels");
  std::vector<Channel> channels;
  for (std::size_t k = 0; k < root["channels"].size(); ++k) {
    const YAML::Node node = root["channels"][k];
    const std::string field = "channels[" + std::to_string(k) + "]";
    if (!node.IsMap()) throw ConfigError(field, "expected a map");
    if (!node["rate"]) throw ConfigError(field + ".rate", "missing rate constant");
    Eigen::VectorXi reactants;
    Eigen::VectorXi products;
    accumulate(node["reactants"], species, reactants, field + ".reactants");
    accumulate(node["products"], species, products, field + ".products");
    Channel ch;
    ch.rate_constant = scalar<double>(node["rate"], field + ".rate");
    ch.reactant_orders = reactants;
    ch.zeta = (products - reactants).cast<std::int64_t>();
    channels.push_back(std::move(ch));
  }

  const double T = root["T"] ? scalar<double>(root["T"], "T") : 1.0;
  Index observe = 0;
  if (root["observe"]) {
    const auto which = scalar<std::string>(root["observe"], "observe");
    for (std::size_t i = 0; i < species.size(); ++i)
      if (species[i] == which) observe = static_cast<Index>(i);
    if (species[static_cast<std::size_t>(observe)] != which)
      throw ConfigError("observe", "unknown species '" + which + "'");
  }

  try {
    ReactionNetwork network(name, std::move(species), std::move(channels), std::move(x0));
    return {std::move(network), Functional::terminal(observe, T)};
  } catch (const ArgumentError& e) {
    throw ConfigError("model", e.what());
  }
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("model", "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

}  // namespace popsim
