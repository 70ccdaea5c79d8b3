#include "popsim/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
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

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out.open(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
}

}  // namespace

EstimatorOptions ExperimentConfig::estimator_options(int replication) const {
  EstimatorOptions o;
  o.M = M;
  o.pilot_mlmc_tau = pilot;
  o.pilot_mlmc_em = pilot_em;
  o.pilot_mc = pilot_mc;
  o.seed = seed + static_cast<std::uint64_t>(replication);
  o.hl_rule = hl_rule;
  o.hl_constant = hl_constant;
  o.threads = threads;
  return o;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config", std::string("malformed document: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config", "expected a key/value document");

  ExperimentConfig c;
  if (!root["model"]) throw ConfigError("model", "missing model path");
  c.model_path = resolve(scalar<std::string>(root["model"], "model"), base_dir);

  if (!root["methods"]) throw ConfigError("methods", "missing method list");
  const YAML::Node methods = root["methods"];
  if (methods.IsScalar() && methods.Scalar() == "all") {
    c.methods.assign(kAllMethods.begin(), kAllMethods.end());
  } else {
    std::vector<std::string> names;
    if (methods.IsScalar()) names.push_back(methods.Scalar());
    else if (methods.IsSequence())
      for (const auto& m : methods) names.push_back(scalar<std::string>(m, "methods"));
    if (names.empty()) throw ConfigError("methods", "expected a nonempty list");
    for (const auto& n : names) {
      try {
        c.methods.push_back(parse_method(n));
      } catch (const ArgumentError& e) {
        throw ConfigError("methods", e.what());
      }
    }
  }

  if (root["alpha"]) c.alpha = scalar<double>(root["alpha"], "alpha");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ConfigError("alpha", "must be positive");

  const YAML::Node ns = root["N"] ? root["N"] : root["N_values"];
  if (!ns || !ns.IsSequence() || ns.size() == 0) throw ConfigError("N", "expected a nonempty list of system sizes");
  for (const auto& n : ns) {
    const auto v = scalar<std::int64_t>(n, "N");
    if (v < 1) throw ConfigError("N", "system sizes must be positive");
    if (!c.N_values.empty() && v <= c.N_values.back()) throw ConfigError("N", "must be strictly increasing");
    c.N_values.push_back(v);
  }

  if (root["M"]) c.M = scalar<int>(root["M"], "M");
  if (c.M < 2) throw ConfigError("M", "must be at least 2");
  if (root["pilot"]) c.pilot = scalar<int>(root["pilot"], "pilot");
  if (root["pilot_em"]) c.pilot_em = scalar<int>(root["pilot_em"], "pilot_em");
  if (root["pilot_mc"]) c.pilot_mc = scalar<int>(root["pilot_mc"], "pilot_mc");
  if (c.pilot < 2) throw ConfigError("pilot", "must be at least 2");
  if (c.pilot_em < 2) throw ConfigError("pilot_em", "must be at least 2");
  if (c.pilot_mc < 2) throw ConfigError("pilot_mc", "must be at least 2");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["out"]) c.out_path = resolve(scalar<std::string>(root["out"], "out"), base_dir);
  if (root["replications"]) c.replications = scalar<int>(root["replications"], "replications");
  if (c.replications < 1) throw ConfigError("replications", "must be at least 1");
  if (root["hl_rule"]) {
    const auto rule = scalar<std::string>(root["hl_rule"], "hl_rule");
    if (rule == "lambert") c.hl_rule = FinestStepRule::lambert;
    else if (rule == "inverse_n") c.hl_rule = FinestStepRule::inverse_n;
    else throw ConfigError("hl_rule", "expected 'lambert' or 'inverse_n'");
  }
  if (root["hl_constant"]) c.hl_constant = scalar<double>(root["hl_constant"], "hl_constant");
  if (!(c.hl_constant > 0.0)) throw ConfigError("hl_constant", "must be positive");
  if (root["record_wall_time"]) c.record_wall_time = scalar<bool>(root["record_wall_time"], "record_wall_time");
  if (root["threads"]) c.threads = scalar<unsigned>(root["threads"], "threads");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config) {
  return run_sweep(config, load_model(config.model_path));
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const ModelSpec& model) {
  std::vector<SweepRecord> records;
  for (const Method method : config.methods) {
    for (const std::int64_t N : config.N_values) {
      for (int rep = 0; rep < config.replications; ++rep) {
        const auto options = config.estimator_options(rep);
        SweepRecord r;
        r.method = std::string(to_string(method));
        r.N = N;
        r.alpha = config.alpha;
        r.epsilon = std::pow(static_cast<double>(N), -config.alpha);
        r.seed = options.seed;
        r.replication = rep;
        try {
          const auto res = run_estimator(method, model.network, model.functional, N, config.alpha, options);
          r.mean = res.mean;
          r.std_dev = res.std_dev;
          r.cost_rv = static_cast<std::int64_t>(res.cost_rv);
          r.wall_ms = config.record_wall_time ? res.wall_ms : 0.0;
        } catch (const std::exception&) {
          r.mean = std::numeric_limits<double>::quiet_NaN();
          r.std_dev = std::numeric_limits<double>::quiet_NaN();
          r.cost_rv = -1;
          r.wall_ms = 0.0;
        }
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::vector<CellSummary> summarize(const std::vector<SweepRecord>& records) {
  std::vector<CellSummary> out;
  std::map<std::pair<std::string, std::int64_t>, std::size_t> index;
  std::vector<std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.method, r.N);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  for (const auto& g : groups) {
    CellSummary s;
    s.method = g.front()->method;
    s.N = g.front()->N;
    s.alpha = g.front()->alpha;
    s.epsilon = g.front()->epsilon;
    std::vector<const SweepRecord*> ok;
    for (const auto* r : g)
      if (!r->failed()) ok.push_back(r);
    s.replications = static_cast<int>(ok.size());
    if (ok.empty()) {
      s.mean_of_means = s.sd_of_means = s.rms_std_dev = s.mean_cost_rv = std::numeric_limits<double>::quiet_NaN();
      out.push_back(s);
      continue;
    }
    const double n = static_cast<double>(ok.size());
    double sum = 0.0, var = 0.0, cost = 0.0;
    for (const auto* r : ok) {
      sum += r->mean;
      var += r->std_dev * r->std_dev;
      cost += static_cast<double>(r->cost_rv);
    }
    s.mean_of_means = sum / n;
    double ss = 0.0;
    for (const auto* r : ok) ss += (r->mean - s.mean_of_means) * (r->mean - s.mean_of_means);
    s.sd_of_means = ok.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.rms_std_dev = std::sqrt(var / n);
    s.mean_cost_rv = cost / n;
    out.push_back(s);
  }
  return out;
}

LineFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DegenerateFitError("fit_slope needs at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw DegenerateFitError("all abscissae coincide");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double theory_complexity(Method method, double N, double alpha) {
  const double lg = std::max(std::log(N), 1.0);
  switch (method) {
    case Method::mc_exact:
      return std::pow(N, 2 * alpha) + N;
    case Method::mc_tau:
    case Method::mc_em:
      return std::pow(N, 3 * alpha - 1) + std::pow(N, alpha);
    case Method::mc_midpoint:
      return std::pow(N, 2.5 * alpha - 1) + std::pow(N, alpha / 2);
    case Method::mlmc_em:
      return std::pow(N, 2 * alpha - 1) + std::pow(N, alpha);
    case Method::mlmc_tau_biased:
      return std::pow(N, 2 * alpha - 1) * lg * lg + std::pow(N, alpha);
    case Method::mlmc_tau_unbiased:
      return std::pow(N, 2 * alpha - 1) * lg * lg + N;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void write_sweep_outputs(const std::filesystem::path& out_path, const std::vector<SweepRecord>& records) {
  {
    std::ofstream out;
    open_for_write(out, out_path);
    write_records_csv(out, records);
  }
  const auto sibling = [&](const std::string& suffix) {
    return out_path.parent_path() / (out_path.stem().string() + suffix);
  };
  const auto cells = summarize(records);

  std::ofstream summary;
  open_for_write(summary, sibling(".summary.csv"));
  summary << "method,N,alpha,epsilon,replications,mean_of_means,sd_of_means,rms_std_dev,mean_cost_rv\n";
  for (const auto& c : cells)
    summary << c.method << ',' << c.N << ',' << real(c.alpha) << ',' << real(c.epsilon) << ',' << c.replications
            << ',' << real(c.mean_of_means) << ',' << real(c.sd_of_means) << ',' << real(c.rms_std_dev) << ','
            << real(c.mean_cost_rv) << '\n';

  std::ofstream theory;
  open_for_write(theory, sibling(".theory.csv"));
  theory << "method,N,alpha,mean_cost_rv,predicted\n";
  for (const auto& c : cells)
    theory << c.method << ',' << c.N << ',' << real(c.alpha) << ',' << real(c.mean_cost_rv) << ','
           << real(theory_complexity(parse_method(c.method), static_cast<double>(c.N), c.alpha)) << '\n';

  std::ofstream slopes;
  open_for_write(slopes, sibling(".slopes.csv"));
  slopes << "method,points,slope,intercept,predicted_slope\n";
  std::vector<std::string> order;
  for (const auto& c : cells)
    if (std::find(order.begin(), order.end(), c.method) == order.end()) order.push_back(c.method);
  for (const auto& m : order) {
    std::vector<std::pair<double, double>> measured, predicted;
    for (const auto& c : cells) {
      if (c.method != m || !(c.mean_cost_rv > 0.0)) continue;
      const double x = std::log2(static_cast<double>(c.N));
      measured.emplace_back(x, std::log2(c.mean_cost_rv));
      predicted.emplace_back(x, std::log2(theory_complexity(parse_method(m), static_cast<double>(c.N), c.alpha)));
    }
    try {
      const auto fit = fit_slope(measured);
      slopes << m << ',' << measured.size() << ',' << real(fit.slope) << ',' << real(fit.intercept) << ','
             << real(fit_slope(predicted).slope) << '\n';
    } catch (const DegenerateFitError&) {
      slopes << m << ',' << measured.size() << ",nan,nan,nan\n";
    }
  }
}

}  // namespace popsim
