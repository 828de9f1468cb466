#include "nestdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nestdyn {

namespace {

std::vector<Vec> class_masses(const SimilarityTree& tree, const Vec& x) {
  std::vector<Vec> masses(tree.depth() + 1);
  for (int l = 0; l <= tree.depth(); ++l) {
    const auto& classes = tree.partition(l);
    masses[l].assign(classes.size(), 0.0);
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (int a : classes[c]) masses[l][c] += x[a];
  }
  return masses;
}

// Single fixed-step RK4 step of the nested replicator flow.
Vec nrd_step(const Game& game, const SimilarityTree& tree, const RateProfile& rates,
             const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Vec k1 = nrd_field(game, tree, rates, x);
  Vec tmp(n);
  for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  Vec k2 = nrd_field(game, tree, rates, tmp);
  for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  Vec k3 = nrd_field(game, tree, rates, tmp);
  for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  Vec k4 = nrd_field(game, tree, rates, tmp);
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

DivergenceSpec DivergenceSpec::make(const SimilarityTree& tree, const RateProfile& rates,
                                    const PopulationState& reference) {
  return make(tree, rates_to_nkl_weights(rates), reference);
}

DivergenceSpec DivergenceSpec::make(const SimilarityTree& tree, Vec nkl_weights,
                                    const PopulationState& reference) {
  if (static_cast<int>(nkl_weights.size()) != tree.depth())
    throw InvalidProfile("divergence weights must cover levels 1..N");
  for (double w : nkl_weights)
    if (!(w >= 0.0)) throw InvalidProfile("divergence weights must be >= 0");
  if (std::abs(nkl_weights.back() - 1.0) > 1e-12)
    throw InvalidProfile("the level-N divergence weight must be 1");
  if (reference.size() != tree.num_actions())
    throw InvalidState("reference dimension mismatch");
  return DivergenceSpec{&tree, std::move(nkl_weights), reference.x};
}

double nested_kl(const DivergenceSpec& spec, const Vec& x) {
  const SimilarityTree& tree = *spec.tree;
  std::vector<Vec> pm = class_masses(tree, spec.reference);
  std::vector<Vec> xm = class_masses(tree, x);
  double d = 0.0;
  for (int l = 1; l <= tree.depth(); ++l) {
    double level = 0.0;
    for (std::size_t c = 0; c < pm[l].size(); ++c) {
      if (pm[l][c] <= 0.0) continue;  // 0 log 0 = 0
      if (xm[l][c] <= 0.0)
        throw SupportMismatch("reference puts mass on a class with zero share");
      level += pm[l][c] * std::log(pm[l][c] / xm[l][c]);
    }
    d += spec.nkl_weights[l - 1] * level;
  }
  return d;
}

double check_dkl_identity(const Game& game, const SimilarityTree& tree,
                          const RateProfile& rates, const Vec& x, const Vec& p,
                          double h) {
  DivergenceSpec spec =
      DivergenceSpec::make(tree, rates, PopulationState::make(p, 1e-9));
  Vec fwd = nrd_step(game, tree, rates, x, h);
  Vec bwd = nrd_step(game, tree, rates, x, -h);
  double fd = (nested_kl(spec, fwd) - nested_kl(spec, bwd)) / (2.0 * h);
  Vec f = game.payoff(x);
  double rhs = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) rhs += f[a] * (x[a] - p[a]);
  return std::abs(fd - rhs);
}

RateFitReport fit_extinction_rate(const Trajectory& traj, const SimilarityTree& tree,
                                  const RateProfile& rates, int action, int dominator,
                                  double delta, double window_fraction) {
  if (!(delta > 0.0))
    throw InvalidState("extinction fit requires a strictly dominated action");
  if (window_fraction <= 0.0 || window_fraction > 1.0)
    throw InvalidState("window fraction must lie in (0, 1]");

  const int m = traj.size();
  int start = static_cast<int>(std::floor(m * (1.0 - window_fraction)));
  start = std::min(start, m - 1);
  if (m - start < 3) throw WindowTooShort("extinction window needs at least 3 samples");

  // Least-squares slope of log x_a(t) over the tail window.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const int count = m - start;
  for (int i = start; i < m; ++i) {
    double t = traj.times[i];
    double y = std::log(traj.states[i][action]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  double slope = (count * sty - st * sy) / (count * stt - st * st);

  RateFitReport report;
  report.action = action;
  report.fitted_slope = slope;
  report.window_start = traj.times[start];
  report.window_end = traj.times[m - 1];

  const int deg = tree.degree(action, dominator);
  const double big_lambda = rates.cumulative[deg];
  report.bound_exponent = big_lambda * delta;

  // Intercept from the divergence gap at the initial state: the weighted
  // log-ratio of ancestor-class shares of the dominator over the dominated
  // action grows at least linearly at rate delta, which pins the bound
  // x_a(t) <= exp(c - Lambda_deg delta t) with c fixed at t = 0.
  Vec w = rates_to_nkl_weights(rates);
  std::vector<Vec> m0 = class_masses(tree, traj.states.front());
  const auto& chain_a = tree.class_index_of(action);
  const auto& chain_b = tree.class_index_of(dominator);
  double v0 = 0.0;
  for (int l = 1; l <= tree.depth(); ++l)
    v0 += w[l - 1] * std::log(m0[l][chain_b[l]] / m0[l][chain_a[l]]);
  report.bound_intercept =
      -big_lambda * v0 + report.bound_exponent * traj.times.front();

  report.bound_satisfied = true;
  for (int i = 0; i < m; ++i) {
    double bound = report.bound_intercept - report.bound_exponent * traj.times[i];
    if (std::log(traj.states[i][action]) > bound + 1e-9) {
      report.bound_satisfied = false;
      break;
    }
  }
  return report;
}

PotentialAscentReport check_potential_ascent(const Game& game, const SimilarityTree& tree,
                                             const RateProfile& rates,
                                             const Trajectory& traj,
                                             int derivative_samples) {
  if (!game.has_potential()) throw UnsupportedKind("game has no potential callable");
  PotentialAscentReport report;
  report.min_step_delta = std::numeric_limits<double>::infinity();
  double prev = game.potential_value(traj.states.front());
  for (int i = 1; i < traj.size(); ++i) {
    double cur = game.potential_value(traj.states[i]);
    report.min_step_delta = std::min(report.min_step_delta, cur - prev);
    prev = cur;
  }
  if (traj.size() < 2) report.min_step_delta = 0.0;

  // Spot-check the derivative: the chain rule value <F, xdot> must equal the
  // rate-weighted sum of conditional payoff variances over each level.
  int samples = std::min(derivative_samples, traj.size());
  for (int s = 0; s < samples; ++s) {
    const Vec& x = traj.states[s * (traj.size() - 1) / std::max(1, samples - 1)];
    Vec f = game.payoff(x);
    Vec xdot = nrd_field(game, tree, rates, x);
    double chain_rule = dot(f, xdot);

    std::vector<Vec> masses = class_masses(tree, x);
    double variance_form = 0.0;
    for (int k = 0; k < rates.levels(); ++k) {
      if (rates.rates[k] == 0.0) continue;
      const auto& classes = tree.partition(k);
      for (std::size_t c = 0; c < classes.size(); ++c) {
        double mass = masses[k][c];
        if (mass <= 0.0) continue;
        double m1 = 0.0, m2 = 0.0;
        for (int a : classes[c]) {
          double cond = x[a] / mass;
          m1 += cond * f[a];
          m2 += cond * f[a] * f[a];
        }
        variance_form += rates.rates[k] * mass * (m2 - m1 * m1);
      }
    }
    report.max_dpot_residual =
        std::max(report.max_dpot_residual, std::abs(variance_form - chain_rule));
  }
  return report;
}

GessAttractionReport check_gess_attraction(const Game& game, const SimilarityTree& tree,
                                           const RateProfile& rates,
                                           const PopulationState& x_star,
                                           const Trajectory& traj, int ess_samples,
                                           std::mt19937_64& rng, double decrease_tol) {
  GessAttractionReport report;
  report.worst_ess_margin = -std::numeric_limits<double>::infinity();
  const int n = x_star.size();
  for (int s = 0; s < ess_samples; ++s) {
    Vec x = random_interior(n, rng).x;
    if (l1_distance(x, x_star.x) < 1e-9) continue;
    Vec f = game.payoff(x);
    double margin = 0.0;
    for (int a = 0; a < n; ++a) margin += f[a] * (x[a] - x_star.x[a]);
    report.worst_ess_margin = std::max(report.worst_ess_margin, margin);
    if (margin >= 0.0)
      throw NotGESS("sampled state violates <F(x), x - x*> < 0");
  }

  DivergenceSpec spec = DivergenceSpec::make(tree, rates, x_star);
  report.monotone_decrease = true;
  double prev = nested_kl(spec, traj.states.front());
  for (int i = 1; i < traj.size(); ++i) {
    double cur = nested_kl(spec, traj.states[i]);
    report.max_increase = std::max(report.max_increase, cur - prev);
    if (cur - prev > decrease_tol) report.monotone_decrease = false;
    prev = cur;
  }
  report.terminal_l1 = l1_distance(traj.states.back(), x_star.x);
  return report;
}

bool check_nash_limit(const Game& game, const Trajectory& traj, double tol,
                      double window_fraction) {
  const int m = traj.size();
  int start = std::max(0, static_cast<int>(std::floor(m * (1.0 - window_fraction))));
  if (m - start < 2) throw NotConverged("terminal window has fewer than 2 samples");

  double diameter = 0.0;
  for (int i = start; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      diameter = std::max(diameter, l1_distance(traj.states[i], traj.states[j]));
  if (diameter >= tol)
    throw NotConverged("terminal window diameter " + std::to_string(diameter));

  const int n = static_cast<int>(traj.states.front().size());
  Vec avg(n, 0.0);
  for (int i = start; i < m; ++i)
    for (int a = 0; a < n; ++a) avg[a] += traj.states[i][a];
  for (double& v : avg) v /= (m - start);

  // Snap numerically extinct actions to zero so they do not pollute the
  // support of the classified point, then renormalize.
  double sum = 0.0;
  for (double& v : avg) {
    if (v < tol) v = 0.0;
    sum += v;
  }
  for (double& v : avg) v /= sum;

  EquilibriumReport eq =
      classify_point(game, PopulationState::make(avg, 1e-9), 10.0 * tol);
  return eq.is_nash;
}

}  // namespace nestdyn
