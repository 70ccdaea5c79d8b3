// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include "popsim/approx.hpp"
#include "popsim/coupling.hpp"
#include "popsim/exact.hpp"
#include "popsim/harness.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace popsim;
using popsim::testing::Moments;
using popsim::testing::sample;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

IntVector lattice(const Vector& state, std::int64_t N) {
  return (state * static_cast<double>(N)).array().round().cast<std::int64_t>().matrix();
}

bool on_lattice(const Vector& state, std::int64_t N) {
  return ((state * static_cast<double>(N)) - lattice(state, N).cast<double>()).cwiseAbs().maxCoeff() < 1e-9;
}

Outcome conservation() {
  Outcome o;
  const auto spec = testing::benchmark();
  const auto vs = conserved_vectors(spec.network);
  const std::int64_t N = 256;
  SimOptions full;
  full.record_full = true;
  std::int64_t exact_bad = 0, tau_bad = 0;
  double em_drift = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    auto s = stream_for_path(101, i);
    const auto ex = simulate_exact(spec.network, N, spec.functional, s, full);
    const auto tau = simulate_tau_euler(spec.network, N, 0.0625, spec.functional, s, full);
    for (const auto* p : {&ex, &tau}) {
      const IntVector c0 = lattice(p->path.initial(), N);
      bool ok = true;
      for (const auto& st : p->path.states()) {
        ok = ok && on_lattice(st, N);
        for (const auto& v : vs) ok = ok && v.dot(lattice(st, N)) == v.dot(c0);
      }
      if (!ok) ++(p == &ex ? exact_bad : tau_bad);
    }
    EmOptions em;
    em.sim = full;
    const auto r = simulate_em_resampling(spec.network, N, 0.0625, spec.functional, s, em).sample;
    for (const auto& v : vs) {
      const Vector vd = v.cast<double>();
      const double q0 = vd.dot(r.path.initial());
      for (const auto& st : r.path.states()) em_drift = std::max(em_drift, std::abs(vd.dot(st) - q0) / std::abs(q0));
    }
  }
  o.require(vs.size() == 2, "two conserved vectors");
  o.require(exact_bad == 0, "exact paths violating: " + std::to_string(exact_bad) + "/1000");
  o.require(tau_bad == 0, "tau paths violating: " + std::to_string(tau_bad) + "/1000");
  o.require(em_drift <= 1e-8, fmt("EM max relative drift %.2e", em_drift));
  return o;
}

Outcome linear_death() {
  Outcome o;
  const auto spec = testing::linear_death();
  const std::int64_t N = 100;
  const double h = 0.0625;
  constexpr std::int64_t n = 100000;
  const auto ex = sample(n, 201, 0, [&](RngStream& s) { return simulate_exact(spec.network, N, spec.functional, s).value; });
  const auto eu = sample(n, 202, 0, [&](RngStream& s) {
    return simulate_tau_euler(spec.network, N, h, spec.functional, s).value;
  });
  const auto mp = sample(n, 203, 0, [&](RngStream& s) {
    return simulate_tau_midpoint(spec.network, N, h, spec.functional, s).value;
  });
  const struct {
    const char* name;
    const Moments* m;
    double target;
  } rows[] = {{"exact", &ex, std::exp(-1.0)},
              {"euler", &eu, std::pow(1 - h, 1 / h)},
              {"midpoint", &mp, std::pow(1 - h + h * h / 2, 1 / h)}};
  for (const auto& r : rows) {
    const double z = (r.m->mean - r.target) / r.m->se();
    o.require(std::abs(z) <= 3.0, std::string(r.name) + fmt(" mean %.5f vs %.5f z=%+.2f", r.m->mean, r.target, z));
  }
  return o;
}

Outcome variance_scalings() {
  Outcome o;
  const auto spec = testing::benchmark();
  constexpr std::int64_t n = 10000;
  auto band = [&](double ratio, double lo, double hi, const std::string& what) {
    o.require(ratio >= lo && ratio <= hi, what + fmt(" %.2f", ratio));
  };

  // (a) Var(f) at N = 64 against N = 256.
  auto var_f = [&](std::int64_t N, int which, std::uint64_t seed) {
    return sample(n, seed, 0, [&](RngStream& s) {
             switch (which) {
               case 0:
                 return simulate_exact(spec.network, N, spec.functional, s).value;
               case 1:
                 return simulate_tau_euler(spec.network, N, 0.0625, spec.functional, s).value;
               default:
                 return simulate_em_resampling(spec.network, N, 0.0625, spec.functional, s).sample.value;
             }
           }).variance();
  };
  const char* names[] = {"exact", "tau", "em"};
  for (int w = 0; w < 3; ++w)
    band(var_f(64, w, 300 + w) / var_f(256, w, 310 + w), 2.5, 6.0, std::string("(a) ") + names[w]);

  // (b) coupled tau/tau Var(delta_f), levels 3..7 at N = 256.
  std::vector<double> tt;
  for (int l = 3; l <= 7; ++l)
    tt.push_back(sample(n, 320, static_cast<std::uint32_t>(l), [&](RngStream& s) {
                   return couple_tau_pair(spec.network, 256, l, 2, spec.functional, s).delta_f;
                 }).variance());
  for (std::size_t i = 0; i + 1 < tt.size(); ++i)
    band(tt[i] / tt[i + 1], 1.3, 3.0, "(b) l=" + std::to_string(i + 3) + "->" + std::to_string(i + 4));

  // (c) coupled exact/tau Var(delta_f) as h_L halves from 2^-3 to 2^-7.
  std::vector<double> et;
  for (int l = 3; l <= 7; ++l)
    et.push_back(sample(n, 330, static_cast<std::uint32_t>(l), [&](RngStream& s) {
                   return couple_exact_tau(spec.network, 256, std::ldexp(1.0, -l), spec.functional, s).delta_f;
                 }).variance());
  for (std::size_t i = 0; i + 1 < et.size(); ++i)
    band(et[i] / et[i + 1], 1.3, 3.0, "(c) h=2^-" + std::to_string(i + 3) + "->2^-" + std::to_string(i + 4));
  return o;
}

Outcome unbiasedness() {
  Outcome o;
  const auto spec = testing::benchmark();
  EstimatorOptions opts;
  opts.seed = 404;
  const auto ml = run_estimator(Method::mlmc_tau_unbiased, spec.network, spec.functional, 256, 1.0, opts);
  opts.seed = 405;
  const auto ex = run_estimator(Method::mc_exact, spec.network, spec.functional, 256, 1.0, opts);
  const double se = std::hypot(ml.std_dev, ex.std_dev);
  const double z = (ml.mean - ex.mean) / se;
  o.require(std::abs(z) <= 3.0, fmt("unbiased %.5f, exact %.5f, z=%+.2f", ml.mean, ex.mean, z));
  return o;
}

Outcome target_sd() {
  Outcome o;
  const auto spec = testing::benchmark();
  ExperimentConfig c;
  c.methods.assign(kAllMethods.begin(), kAllMethods.end());
  c.N_values = {256, 512};
  c.replications = 8;
  c.seed = 500;
  for (const auto& cell : summarize(run_sweep(c, spec))) {
    const double ratio = cell.rms_std_dev / cell.epsilon;
    o.require(cell.replications == 8 && ratio <= 1.1,
              cell.method + " N=" + std::to_string(cell.N) +
                  fmt(" sd/eps %.3f (spread of means %.3f)", ratio, cell.sd_of_means / cell.epsilon));
  }
  return o;
}

Outcome slopes() {
  Outcome o;
  const auto spec = testing::benchmark();
  ExperimentConfig c;
  c.N_values = {512, 1024, 2048, 4096, 8192};
  c.replications = 4;
  c.seed = 600;
  const struct {
    Method m;
    double lo, hi;
  } bands[] = {{Method::mc_tau, 1.7, 2.3},
               {Method::mc_midpoint, 1.2, 1.8},
               {Method::mlmc_tau_biased, 0.9, 1.5},
               {Method::mlmc_tau_unbiased, 0.8, 1.5},
               {Method::mlmc_em, 0.8, 1.3}};
  for (const auto& b : bands) c.methods.push_back(b.m);
  const auto cells = summarize(run_sweep(c, spec));
  for (const auto& b : bands) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& cell : cells)
      if (cell.method == to_string(b.m)) pts.emplace_back(std::log2(double(cell.N)), std::log2(cell.mean_cost_rv));
    const auto fit = fit_slope(pts);
    o.require(pts.size() == 5 && fit.slope >= b.lo && fit.slope <= b.hi,
              std::string(to_string(b.m)) + fmt(" slope %.3f in [%.1f, %.1f]", fit.slope, b.lo, b.hi));
  }

  ExperimentConfig e;
  e.methods = {Method::mc_exact};
  e.N_values = {256, 512};
  e.replications = 4;
  e.seed = 650;
  const auto ex = summarize(run_sweep(e, spec));
  const double ratio = ex[1].mean_cost_rv / ex[0].mean_cost_rv;
  o.require(ratio >= 2.8 && ratio <= 5.5, fmt("mc_exact cost(2^9)/cost(2^8) %.2f", ratio));
  return o;
}

Outcome hl_benefit() {
  Outcome o;
  const auto spec = testing::benchmark();
  const std::int64_t Ns[] = {512, 1024, 2048, 4096};
  constexpr int seeds = 4;
  double sum_lambert[4] = {}, sum_inverse[4] = {};
  int strictly_less_at_top = 0;
  for (int s = 0; s < seeds; ++s) {
    for (int i = 0; i < 4; ++i) {
      EstimatorOptions opts;
      opts.seed = 700 + static_cast<std::uint64_t>(s);
      const auto a = run_estimator(Method::mlmc_tau_unbiased, spec.network, spec.functional, Ns[i], 1.0, opts);
      opts.hl_rule = FinestStepRule::inverse_n;
      const auto b = run_estimator(Method::mlmc_tau_unbiased, spec.network, spec.functional, Ns[i], 1.0, opts);
      sum_lambert[i] += static_cast<double>(a.cost_rv);
      sum_inverse[i] += static_cast<double>(b.cost_rv);
      if (i == 3 && a.cost_rv < b.cost_rv) ++strictly_less_at_top;
    }
  }
  for (int i = 0; i < 4; ++i) {
    const double ratio = sum_lambert[i] / sum_inverse[i];
    o.require(ratio <= 1.05, "N=" + std::to_string(Ns[i]) + fmt(" cost ratio %.3f", ratio));
  }
  o.require(strictly_less_at_top >= 3, "cheaper at N=4096 in " + std::to_string(strictly_less_at_top) + "/4 seeds");
  return o;
}

// Closed forms written out independently of the library.
std::vector<std::int64_t> biased_reference(const std::vector<double>& d, const std::vector<double>& h, double eps) {
  double s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) s += std::sqrt(d[j] / h[j]);
  std::vector<std::int64_t> n;
  for (std::size_t l = 0; l < d.size(); ++l)
    n.push_back(static_cast<std::int64_t>(std::ceil(std::sqrt(d[l] * h[l]) * s / (eps * eps))) + 1);
  return n;
}

Outcome allocation() {
  Outcome o;
  std::mt19937_64 gen(800);
  std::uniform_real_distribution<double> u(-6.0, 1.0);
  std::uniform_int_distribution<int> len(1, 15);
  int mismatches = 0, violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int L = len(gen);
    const double eps = std::pow(10.0, (u(gen) - 1.0) / 3.0);
    std::vector<double> d, h, c;
    for (int l = 0; l < L; ++l) {
      d.push_back(std::pow(10.0, u(gen)));
      h.push_back(std::ldexp(1.0, -l));
      c.push_back(3.0 * std::pow(2.0, l) * (1.0 + std::pow(10.0, u(gen))));
    }
    const double dE = std::pow(10.0, u(gen)), cE = 100.0 * (1.0 + std::pow(10.0, u(gen) + 3.0));

    const auto nb = allocate_levels_biased(d, h, eps);
    if (nb != biased_reference(d, h, eps)) ++mismatches;
    double vb = 0.0;
    for (int l = 0; l < L; ++l) vb += d[std::size_t(l)] / double(nb[std::size_t(l)]);
    if (vb > eps * eps) ++violations;

    const auto nu = allocate_levels_unbiased(d, c, dE, cE, eps);
    double S = std::sqrt(dE * cE);
    for (int l = 0; l < L; ++l) S += std::sqrt(d[std::size_t(l)] * c[std::size_t(l)]);
    std::vector<std::int64_t> ref;
    for (int l = 0; l < L; ++l)
      ref.push_back(std::int64_t(std::ceil(std::sqrt(d[std::size_t(l)] / c[std::size_t(l)]) * S / (eps * eps))) + 1);
    const auto refE = std::int64_t(std::ceil(std::sqrt(dE / cE) * S / (eps * eps))) + 1;
    if (nu.n != ref || nu.n_exact != refE) ++mismatches;
    double vu = dE / double(nu.n_exact);
    for (int l = 0; l < L; ++l) vu += d[std::size_t(l)] / double(nu.n[std::size_t(l)]);
    if (vu > eps * eps) ++violations;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " closed-form mismatches");
  o.require(violations == 0, std::to_string(violations) + " budget violations");
  return o;
}

Outcome lambert() {
  Outcome o;
  double worst = 0.0;
  int points = 0;
  auto check = [&](double x) {
    const double w = lambert_w(x);
    const double r = std::abs(w * std::exp(w) - x) / (x > 1.0 ? x : 1.0);
    worst = std::max(worst, r);
    ++points;
  };
  check(0.0);
  for (int i = 0; i <= 2000; ++i) check(std::pow(10.0, -12.0 + 24.0 * i / 2000.0));
  o.require(worst <= 1e-10, fmt("worst residual %.2e over ", worst) + std::to_string(points) + " points");
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto spec = testing::benchmark();
  ExperimentConfig c;
  c.methods.assign(kAllMethods.begin(), kAllMethods.end());
  c.N_values = {128, 256};
  c.replications = 2;
  c.seed = 1000;
  c.record_wall_time = false;
  auto csv = [&](unsigned threads) {
    c.threads = threads;
    std::ostringstream out;
    write_records_csv(out, run_sweep(c, spec));
    return out.str();
  };
  const auto one = csv(1);
  const auto again = csv(1);
  const auto four = csv(4);
  o.require(one == again, "repeat run identical");
  o.require(one == four, "1 vs 4 threads identical (" + std::to_string(one.size()) + " bytes)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"conservation", conservation},
      {"linear-death oracles", linear_death},
      {"variance scalings", variance_scalings},
      {"unbiasedness", unbiasedness},
      {"target SD attainment", target_sd},
      {"complexity slopes", slopes},
      {"finest-step benefit", hl_benefit},
      {"allocation formulas", allocation},
      {"lambert_w accuracy", lambert},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first, secs,
                out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
