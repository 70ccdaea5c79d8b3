#pragma once

#include "popsim/model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace popsim {

/// Malformed model or experiment configuration. `field()` names the
/// offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A network together with the functional it is observed through.
struct ModelSpec {
  ReactionNetwork network;
  Functional functional;
};

/// Parses a YAML model document:
///
///   name: abc
///   species: [S1, S2, S3, S4]
///   x0: [0.2, 0.2, 0.2, 0.2]
///   T: 1.0
///   observe: S1            # terminal value of this species; default first
///   channels:
///     - reactants: {S1: 1, S2: 1}
///       products: {S3: 1}
///       rate: 1.0
ModelSpec parse_model(const std::string& text);
ModelSpec load_model(const std::filesystem::path& path);

}  // namespace popsim
