#include "nestdyn/choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nestdyn {

namespace {

void check_temps(const SimilarityTree& tree, const TempProfile& temps) {
  if (temps.levels() != tree.depth())
    throw InvalidProfile("temperature profile must have one entry per level 1..N");
}

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

}  // namespace

std::vector<Vec> class_scores(const SimilarityTree& tree, const TempProfile& temps,
                              const Vec& y) {
  check_temps(tree, temps);
  const int N = tree.depth();
  std::vector<Vec> scores(N + 1);
  scores[N] = y;
  for (int l = N; l >= 1; --l) {
    const double tau = temps.temps[l - 1];
    scores[l - 1].assign(tree.num_classes(l - 1), 0.0);
    // Max-shifted log-sum-exp per parent.
    Vec shift(tree.num_classes(l - 1), -std::numeric_limits<double>::infinity());
    for (int c = 0; c < tree.num_classes(l); ++c) {
      int p = tree.parent({l, c}).index;
      shift[p] = std::max(shift[p], scores[l][c]);
    }
    Vec acc(tree.num_classes(l - 1), 0.0);
    for (int c = 0; c < tree.num_classes(l); ++c) {
      int p = tree.parent({l, c}).index;
      acc[p] += std::exp((scores[l][c] - shift[p]) / tau);
    }
    for (int p = 0; p < tree.num_classes(l - 1); ++p)
      scores[l - 1][p] = shift[p] + tau * std::log(acc[p]);
  }
  return scores;
}

double root_score(const SimilarityTree& tree, const TempProfile& temps, const Vec& y) {
  return class_scores(tree, temps, y)[0][0];
}

PopulationState nlc(const SimilarityTree& tree, const TempProfile& temps, const Vec& y) {
  std::vector<Vec> scores = class_scores(tree, temps, y);
  const int n = tree.num_actions();
  Vec x(n);
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    const auto& chain = tree.class_index_of(a);
    double logp = 0.0;
    for (int l = 1; l <= tree.depth(); ++l)
      logp += (scores[l][chain[l]] - scores[l - 1][chain[l - 1]]) / temps.temps[l - 1];
    x[a] = std::exp(logp);
    sum += x[a];
  }
  for (double& v : x) v /= sum;  // sum is 1 up to round-off
  return PopulationState{std::move(x)};
}

double nlc_class_probability(const SimilarityTree& tree, const TempProfile& temps,
                             const Vec& y, ClassId c) {
  std::vector<Vec> scores = class_scores(tree, temps, y);
  auto chain = tree.lineage(c);
  double logp = 0.0;
  for (int l = 1; l <= c.level; ++l)
    logp += (scores[l][chain[l].index] - scores[l - 1][chain[l - 1].index]) /
            temps.temps[l - 1];
  return std::exp(logp);
}

double nested_entropy(const SimilarityTree& tree, const Vec& entropy_weights,
                      const Vec& x) {
  if (static_cast<int>(entropy_weights.size()) != tree.depth() + 1)
    throw InvalidProfile("entropy weights must cover levels 0..N");
  std::vector<Vec> masses = class_masses(tree, x);
  double h = 0.0;
  for (int l = 0; l <= tree.depth(); ++l) {
    if (entropy_weights[l] == 0.0) continue;
    double level = 0.0;
    for (double m : masses[l])
      if (m > 0.0) level += m * std::log(m);
    h += entropy_weights[l] * level;
  }
  return h;
}

namespace {

// grad_a h = sum_l c_l (1 + log x_{K_l(a)}) at interior x.
Vec entropy_gradient(const SimilarityTree& tree, const Vec& c, const Vec& x) {
  std::vector<Vec> masses = class_masses(tree, x);
  Vec g(x.size(), 0.0);
  for (std::size_t a = 0; a < x.size(); ++a) {
    const auto& chain = tree.class_index_of(static_cast<int>(a));
    double v = 0.0;
    for (int l = 0; l <= tree.depth(); ++l)
      if (c[l] != 0.0) v += c[l] * (1.0 + std::log(masses[l][chain[l]]));
    g[a] = v;
  }
  return g;
}

}  // namespace

double regularized_objective(const SimilarityTree& tree, const Vec& entropy_weights,
                             const Vec& y, const Vec& x) {
  return dot(y, x) - nested_entropy(tree, entropy_weights, x);
}

PopulationState regularized_argmax(const SimilarityTree& tree, const Vec& entropy_weights,
                                   const Vec& y, const ArgmaxOptions& opts) {
  if (static_cast<int>(entropy_weights.size()) != tree.depth() + 1)
    throw InvalidProfile("entropy weights must cover levels 0..N");
  const int n = tree.num_actions();
  double tau_root = 0.0;  // tau_1 = c_1 + ... + c_N
  for (std::size_t l = 1; l < entropy_weights.size(); ++l) tau_root += entropy_weights[l];
  if (!(tau_root > 0.0)) throw InvalidProfile("entropy weights must have positive sum");
  const double step = 1.0 / tau_root;

  Vec x(n, 1.0 / n);
  for (int it = 0; it < opts.max_iterations; ++it) {
    Vec grad = entropy_gradient(tree, entropy_weights, x);
    for (int a = 0; a < n; ++a) grad[a] = y[a] - grad[a];

    // KKT residual: at an interior maximizer the gradient is constant
    // across coordinates, so its spread measures suboptimality.
    double lo = grad[0], hi = grad[0];
    for (double g : grad) {
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    if (hi - lo <= opts.tol) return PopulationState{std::move(x)};

    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      x[a] *= std::exp(step * (grad[a] - hi));
      sum += x[a];
    }
    for (double& v : x) v /= sum;
  }
  throw NoConvergence("mirror ascent did not reach the KKT tolerance");
}

namespace {

ScoreTrajectory integrate_scores(const Game& game, const SimilarityTree& tree,
                                 const std::function<PopulationState(const Vec&)>& choice,
                                 const Vec& y0, const IntegrateOptions& opts) {
  if (!(opts.step > 0.0)) throw InvalidState("step must be positive");
  if (opts.sample_stride < 1) throw InvalidState("sample stride must be >= 1");
  const int n = tree.num_actions();
  if (static_cast<int>(y0.size()) != n) throw InvalidState("score dimension mismatch");

  auto field = [&](const Vec& y) { return game.payoff(choice(y).x); };

  const long steps = std::lround(opts.t_end / opts.step);
  Vec y = y0;
  ScoreTrajectory traj;
  traj.times.push_back(0.0);
  traj.scores.push_back(y);
  traj.states.push_back(choice(y).x);

  Vec k1, k2, k3, k4, tmp(n);
  for (long s = 1; s <= steps; ++s) {
    const double h = opts.step;
    k1 = field(y);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    k2 = field(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = field(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = field(tmp);
    for (int i = 0; i < n; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : y)
      if (!std::isfinite(v))
        throw StepBlowup("non-finite score at t = " + std::to_string(s * h));

    if (s % opts.sample_stride == 0 || s == steps) {
      traj.times.push_back(s * h);
      traj.scores.push_back(y);
      traj.states.push_back(choice(y).x);
    }
  }
  return traj;
}

}  // namespace

ScoreTrajectory new_integrate(const Game& game, const SimilarityTree& tree,
                              const TempProfile& temps, const Vec& y0,
                              const IntegrateOptions& opts) {
  check_temps(tree, temps);
  auto choice = [&](const Vec& y) { return nlc(tree, temps, y); };
  return integrate_scores(game, tree, choice, y0, opts);
}

ScoreTrajectory nrl_integrate(const Game& game, const SimilarityTree& tree,
                              const TempProfile& temps, const Vec& y0,
                              const IntegrateOptions& opts, const ArgmaxOptions& solver) {
  check_temps(tree, temps);
  Vec c = temps_to_entropy_weights(temps);
  auto choice = [&, c](const Vec& y) { return regularized_argmax(tree, c, y, solver); };
  return integrate_scores(game, tree, choice, y0, opts);
}

}  // namespace nestdyn
