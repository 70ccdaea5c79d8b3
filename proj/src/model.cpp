#include "popsim/model.hpp"

#include "popsim/path.hpp"

#include <cmath>
#include <numeric>
#include <utility>

namespace popsim {

ReactionNetwork::ReactionNetwork(std::string name, std::vector<std::string> species,
                                 std::vector<Channel> channels, Vector x0)
    : name_(std::move(name)),
      species_(std::move(species)),
      channels_(std::move(channels)),
      x0_(std::move(x0)) {
  const Index d = x0_.size();
  if (d < 1) throw ArgumentError("reaction network needs at least one species");
  if (channels_.empty()) throw ArgumentError("reaction network needs at least one channel");
  if (species_.empty()) {
    for (Index i = 0; i < d; ++i) species_.push_back("S" + std::to_string(i + 1));
  }
  if (static_cast<Index>(species_.size()) != d)
    throw ArgumentError("species names and x0 disagree on the species count");
  for (Index i = 0; i < d; ++i) {
    if (!std::isfinite(x0_(i)) || x0_(i) < 0.0)
      throw ArgumentError("x0 entries must be nonnegative and finite");
  }
  stoich_.resize(d, static_cast<Index>(channels_.size()));
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    Channel& ch = channels_[k];
    const std::string where = "channel " + std::to_string(k);
    if (ch.zeta.size() != d) throw ArgumentError(where + ": zeta has the wrong length");
    if (!std::isfinite(ch.rate_constant) || ch.rate_constant < 0.0)
      throw ArgumentError(where + ": rate constant must be nonnegative and finite");
    if (ch.reactant_orders.size() == 0) ch.reactant_orders = Eigen::VectorXi::Zero(d);
    if (ch.reactant_orders.size() != d)
      throw ArgumentError(where + ": reactant orders have the wrong length");
    if ((ch.reactant_orders.array() < 0).any() || (ch.reactant_orders.array() > 2).any() ||
        ch.total_order() > 2)
      throw ArgumentError(where + ": reactant orders must lie in {0,1,2} with total <= 2");
    stoich_.col(static_cast<Index>(k)) = ch.zeta.cast<double>();
  }
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>
ReactionNetwork::integer_stoichiometry() const {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> s(species_count(), channel_count());
  for (Index k = 0; k < channel_count(); ++k) s.col(k) = channel(k).zeta;
  return s;
}

Index ReactionNetwork::species_index(const std::string& name) const {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i] == name) return static_cast<Index>(i);
  return -1;
}

namespace {

void normalize_row(std::vector<std::int64_t>& row) {
  std::int64_t g = 0;
  for (auto v : row) g = std::gcd(g, v);
  if (g > 1)
    for (auto& v : row) v /= g;
}

}  // namespace

std::vector<IntVector> conserved_vectors(const ReactionNetwork& network) {
  const auto d = static_cast<std::size_t>(network.species_count());
  const auto K = static_cast<std::size_t>(network.channel_count());

  // Rows are zeta_k^T; the solution set of rows * v = 0 is the answer.
  std::vector<std::vector<std::int64_t>> rows(K, std::vector<std::int64_t>(d));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < d; ++i) rows[k][i] = network.channel(static_cast<Index>(k)).zeta(static_cast<Index>(i));

  // Fraction-free reduction to a form where each pivot column is zero
  // outside its pivot row.
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < d && r < K; ++c) {
    std::size_t p = r;
    while (p < K && rows[p][c] == 0) ++p;
    if (p == K) continue;
    std::swap(rows[p], rows[r]);
    for (std::size_t i = 0; i < K; ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const std::int64_t a = rows[r][c];
      const std::int64_t b = rows[i][c];
      const std::int64_t g = std::gcd(a, b);
      for (std::size_t j = 0; j < d; ++j) rows[i][j] = rows[i][j] * (a / g) - rows[r][j] * (b / g);
      normalize_row(rows[i]);
    }
    pivot_cols.push_back(c);
    ++r;
  }

  std::int64_t lcm = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    const std::int64_t a = rows[i][pivot_cols[i]];
    lcm = std::lcm(lcm, a < 0 ? -a : a);
  }

  std::vector<IntVector> basis;
  std::vector<bool> is_pivot(d, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  for (std::size_t f = 0; f < d; ++f) {
    if (is_pivot[f]) continue;
    IntVector v = IntVector::Zero(static_cast<Index>(d));
    v(static_cast<Index>(f)) = lcm;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i)
      v(static_cast<Index>(pivot_cols[i])) = -rows[i][f] * (lcm / rows[i][pivot_cols[i]]);
    std::int64_t g = 0;
    for (Index i = 0; i < v.size(); ++i) g = std::gcd(g, v(i));
    if (g > 1) v /= g;
    for (Index i = 0; i < v.size(); ++i) {
      if (v(i) == 0) continue;
      if (v(i) < 0) v = -v;
      break;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

IntVector ScaledState::counts() const {
  IntVector c(values.size());
  for (Index i = 0; i < values.size(); ++i)
    c(i) = static_cast<std::int64_t>(std::llround(values(i) * static_cast<double>(n)));
  return c;
}

Vector initial_counts(const ReactionNetwork& network, std::int64_t N) {
  if (N < 1) throw ArgumentError("system size N must be >= 1");
  Vector c(network.species_count());
  for (Index i = 0; i < c.size(); ++i)
    c(i) = static_cast<double>(ceil_tolerant(static_cast<double>(N) * network.x0()(i)));
  return c;
}

ScaledState scaled_initial(const ReactionNetwork& network, std::int64_t N) {
  return {initial_counts(network, N) / static_cast<double>(N), N};
}

Functional::Functional(Kind kind, Index component, PathFunction fn, double horizon)
    : kind_(kind), component_(component), fn_(std::move(fn)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw ArgumentError("functional horizon T must be positive and finite");
}

Functional Functional::terminal(Index component, double horizon) {
  if (component < 0) throw ArgumentError("terminal component index must be nonnegative");
  return Functional(Kind::terminal_component, component, {}, horizon);
}

Functional Functional::from_path(PathFunction fn, double horizon) {
  if (!fn) throw ArgumentError("custom functional needs a callable");
  return Functional(Kind::custom, 0, std::move(fn), horizon);
}

double Functional::operator()(const PathSkeleton& path) const {
  if (kind_ == Kind::terminal_component) return path.terminal()(component_);
  return fn_(path);
}

void Functional::validate(const ReactionNetwork& network) const {
  if (kind_ == Kind::terminal_component && component_ >= network.species_count())
    throw ArgumentError("terminal component index out of range");
}

}  // namespace popsim
