#include "nestdyn/dynamics.hpp"

#include <cmath>

namespace nestdyn {

namespace {

// Class masses x_K for every class, indexed [level][class index].
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

void require_interior(const Vec& x) {
  for (double v : x)
    if (!(v > 0.0)) throw BoundaryState("field requires a strictly interior state");
}

}  // namespace

Vec rd_field(const Game& game, const Vec& x) {
  Vec f = game.payoff(x);
  double mean = dot(f, x);
  Vec v(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) v[a] = x[a] * (f[a] - mean);
  return v;
}

Vec nrd_field(const Game& game, const SimilarityTree& tree, const RateProfile& rates,
              const Vec& x) {
  require_interior(x);
  if (rates.levels() != tree.depth())
    throw InvalidProfile("rate profile must have one entry per level 0..N-1");
  Vec f = game.payoff(x);
  std::vector<Vec> means = all_class_mean_payoffs(game, tree, x);
  Vec v(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const auto& chain = tree.class_index_of(static_cast<int>(a));
    double growth = 0.0;
    for (int k = 0; k < rates.levels(); ++k)
      growth += rates.rates[k] * (f[a] - means[k][chain[k]]);
    v[a] = x[a] * growth;
  }
  return v;
}

Vec nrd_extr_field(const Game& game, const SimilarityTree& tree,
                   const ExtrinsicProfile& etas, const Vec& x) {
  require_interior(x);
  if (etas.levels() != tree.depth())
    throw InvalidProfile("extrinsic profile must have one entry per level 0..N-1");
  Vec f = game.payoff(x);
  std::vector<Vec> means = all_class_mean_payoffs(game, tree, x);
  std::vector<Vec> masses = class_masses(tree, x);
  Vec v(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const auto& chain = tree.class_index_of(static_cast<int>(a));
    double growth = 0.0;
    for (int k = 0; k < etas.levels(); ++k)
      growth += etas.etas[k] * masses[k][chain[k]] * (f[a] - means[k][chain[k]]);
    v[a] = x[a] * growth;
  }
  return v;
}

std::vector<Vec> nppi_switch_rates(const SimilarityTree& tree, const RateProfile& rates,
                                   const Vec& payoffs, const Vec& x) {
  require_interior(x);
  const int n = tree.num_actions();
  std::vector<Vec> masses = class_masses(tree, x);
  std::vector<Vec> rho(n, Vec(n, 0.0));
  for (int a = 0; a < n; ++a) {
    if (x[a] <= 0.0) continue;  // unused-action rows stay zero by convention
    const auto& chain = tree.class_index_of(a);
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      double excess = payoffs[b] - payoffs[a];
      if (excess <= 0.0) continue;
      double meet = 0.0;
      int deg = tree.degree(a, b);
      for (int k = 0; k <= deg; ++k)
        meet += rates.rates[k] * x[b] / masses[k][chain[k]];
      rho[a][b] = meet * excess;
    }
  }
  return rho;
}

Vec mean_dynamics(const std::vector<Vec>& switch_rates, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec v(n, 0.0);
  for (int a = 0; a < n; ++a) {
    double inflow = 0.0, outflow = 0.0;
    for (int b = 0; b < n; ++b) {
      inflow += x[b] * switch_rates[b][a];
      outflow += switch_rates[a][b];
    }
    v[a] = inflow - x[a] * outflow;
  }
  return v;
}

Trajectory integrate(const VectorField& field, const PopulationState& x0,
                     const IntegrateOptions& opts) {
  if (!(opts.step > 0.0)) throw InvalidState("step must be positive");
  if (opts.sample_stride < 1) throw InvalidState("sample stride must be >= 1");

  const int n = x0.size();
  const long steps = std::lround(opts.t_end / opts.step);
  Vec x = x0.x;

  Trajectory traj;
  traj.times.reserve(steps / opts.sample_stride + 2);
  traj.states.reserve(steps / opts.sample_stride + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(x);

  Vec k1, k2, k3, k4, tmp(n);
  for (long s = 1; s <= steps; ++s) {
    const double h = opts.step;
    k1 = field(x);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    k2 = field(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    k3 = field(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    k4 = field(tmp);
    for (int i = 0; i < n; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    double sum = 0.0;
    for (double v : x) {
      if (!std::isfinite(v))
        throw StepBlowup("non-finite state at t = " + std::to_string(s * h));
      sum += v;
    }
    if (opts.renormalize)
      for (double& v : x) v /= sum;
    for (int i = 0; i < n; ++i)
      if (x0.x[i] > 0.0 && !(x[i] > 0.0))
        throw PositivityLoss("coordinate " + std::to_string(i) +
                             " lost positivity at t = " + std::to_string(s * h));

    if (s % opts.sample_stride == 0 || s == steps) {
      traj.times.push_back(s * h);
      traj.states.push_back(x);
    }
  }
  return traj;
}

VectorField make_rd_field(const Game& game) {
  return [game](const Vec& x) { return rd_field(game, x); };
}

VectorField make_nrd_field(const Game& game, const SimilarityTree& tree,
                           const RateProfile& rates) {
  return [game, tree, rates](const Vec& x) { return nrd_field(game, tree, rates, x); };
}

VectorField make_nrd_extr_field(const Game& game, const SimilarityTree& tree,
                                const ExtrinsicProfile& etas) {
  return [game, tree, etas](const Vec& x) {
    return nrd_extr_field(game, tree, etas, x);
  };
}

}  // namespace nestdyn
