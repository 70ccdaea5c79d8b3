#pragma once

// Scaled population-process models: reaction networks with mass-action
// kinetics under the classical system-size scaling.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace popsim {

using Vector = Eigen::VectorXd;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

/// Thrown when an operation's precondition on its arguments is violated.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One reaction channel. `zeta` is the jump in molecule counts when the
/// channel fires; in scaled units the state moves by zeta / N.
struct Channel {
  IntVector zeta;
  double rate_constant = 0.0;
  // Entries in {0,1,2}, total order <= 2.
  Eigen::VectorXi reactant_orders;
  // Optional non-mass-action intensity on the scaled state. Outputs are
  // clamped at zero.
  std::function<double(const Vector&)> custom;

  int total_order() const { return reactant_orders.sum(); }
};

class ReactionNetwork {
 public:
  // Validates every invariant; throws ArgumentError on violation.
  ReactionNetwork(std::string name, std::vector<std::string> species,
                  std::vector<Channel> channels, Vector x0);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& channel(Index k) const { return channels_[static_cast<std::size_t>(k)]; }
  const Vector& x0() const { return x0_; }

  Index species_count() const { return x0_.size(); }
  Index channel_count() const { return static_cast<Index>(channels_.size()); }

  /// d x K matrix whose columns are the zeta_k, stored as doubles.
  const Eigen::MatrixXd& stoichiometry() const { return stoich_; }
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> integer_stoichiometry() const;

  /// Index of a named species, or -1.
  Index species_index(const std::string& name) const;

 private:
  std::string name_;
  std::vector<std::string> species_;
  std::vector<Channel> channels_;
  Vector x0_;
  Eigen::MatrixXd stoich_;
};

/// Mass-action intensity lambda_k(x) on the scaled state. Zero whenever a
/// coordinate with positive reactant order is negative.
template <typename Derived>
double intensity(const ReactionNetwork& network, Index k, const Eigen::MatrixBase<Derived>& x) {
  const Channel& ch = network.channel(k);
  if (ch.custom) {
    const double v = ch.custom(Vector(x));
    return v > 0.0 ? v : 0.0;
  }
  double value = ch.rate_constant;
  for (Index i = 0; i < x.size(); ++i) {
    const int order = ch.reactant_orders(i);
    if (order == 0) continue;
    const double xi = x(i);
    if (xi < 0.0) return 0.0;
    value *= order == 1 ? xi : xi * xi;
  }
  return value;
}

/// All K intensities at x, written into `out`.
template <typename Derived>
void intensities(const ReactionNetwork& network, const Eigen::MatrixBase<Derived>& x, Vector& out) {
  out.resize(network.channel_count());
  for (Index k = 0; k < network.channel_count(); ++k) out(k) = intensity(network, k, x);
}

/// Deterministic drift F(x) = sum_k lambda_k(x) zeta_k.
template <typename Derived>
Vector drift(const ReactionNetwork& network, const Eigen::MatrixBase<Derived>& x) {
  Vector lambda;
  intensities(network, x, lambda);
  return network.stoichiometry() * lambda;
}

/// Integer basis of the left null space of the stoichiometry matrix:
/// every returned v satisfies v . zeta_k = 0 for all k.
std::vector<IntVector> conserved_vectors(const ReactionNetwork& network);

/// A scaled state together with its system size.
struct ScaledState {
  Vector values;
  std::int64_t n = 1;

  /// N * values rounded to the lattice.
  IntVector counts() const;
};

/// ceil(N * x0) / N componentwise.
ScaledState scaled_initial(const ReactionNetwork& network, std::int64_t N);

/// Molecule counts ceil(N * x0), the integer form of scaled_initial.
Vector initial_counts(const ReactionNetwork& network, std::int64_t N);

class PathSkeleton;

/// Path functional evaluated on [0, T].
class Functional {
 public:
  enum class Kind { terminal_component, custom };
  using PathFunction = std::function<double(const PathSkeleton&)>;

  static Functional terminal(Index component, double horizon);
  static Functional from_path(PathFunction fn, double horizon);

  Kind kind() const { return kind_; }
  Index component() const { return component_; }
  double horizon() const { return horizon_; }
  bool needs_full_path() const { return kind_ == Kind::custom; }

  double operator()(const PathSkeleton& path) const;

  /// Throws ArgumentError when the component index is out of range for `network`.
  void validate(const ReactionNetwork& network) const;

 private:
  Functional(Kind kind, Index component, PathFunction fn, double horizon);

  Kind kind_;
  Index component_;
  PathFunction fn_;
  double horizon_;
};

}  // namespace popsim
