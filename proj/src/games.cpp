#include "nestdyn/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nestdyn {

namespace {

void check_square(const std::vector<Vec>& A) {
  if (A.empty()) throw InvalidState("payoff matrix must be nonempty");
  for (const auto& row : A)
    if (row.size() != A.size()) throw InvalidState("payoff matrix must be square");
}

Vec affine_payoff(const std::vector<Vec>& A, const Vec& b, const Vec& x) {
  Vec f(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    double v = b.empty() ? 0.0 : b[i];
    for (std::size_t j = 0; j < A.size(); ++j) v += A[i][j] * x[j];
    f[i] = v;
  }
  return f;
}

}  // namespace

Game Game::matrix(std::vector<Vec> A, std::vector<std::string> labels) {
  check_square(A);
  Game g;
  g.n_ = static_cast<int>(A.size());
  g.kind_ = Kind::Matrix;
  g.A_ = std::move(A);
  g.labels_ = std::move(labels);
  return g;
}

Game Game::affine(std::vector<Vec> A, Vec b, std::vector<std::string> labels) {
  check_square(A);
  if (b.size() != A.size()) throw InvalidState("offset length must match matrix size");
  Game g;
  g.n_ = static_cast<int>(A.size());
  g.kind_ = Kind::Affine;
  g.A_ = std::move(A);
  g.b_ = std::move(b);
  g.labels_ = std::move(labels);
  return g;
}

Game Game::potential(int n, PayoffFn payoff, PotentialFn phi,
                     std::vector<std::string> labels) {
  Game g;
  g.n_ = n;
  g.kind_ = Kind::Potential;
  g.payoff_ = std::move(payoff);
  g.phi_ = std::move(phi);
  g.labels_ = std::move(labels);
  return g;
}

Game Game::custom(int n, PayoffFn payoff, std::vector<std::string> labels) {
  Game g;
  g.n_ = n;
  g.kind_ = Kind::Custom;
  g.payoff_ = std::move(payoff);
  g.labels_ = std::move(labels);
  return g;
}

double Game::potential_value(const Vec& x) const {
  if (!phi_) throw UnsupportedKind("game has no potential callable");
  return phi_(x);
}

Vec Game::payoff(const Vec& x) const {
  if (static_cast<int>(x.size()) != n_) throw InvalidState("state dimension mismatch");
  Vec f = (kind_ == Kind::Matrix || kind_ == Kind::Affine) ? affine_payoff(A_, b_, x)
                                                           : payoff_(x);
  for (double v : f)
    if (!std::isfinite(v)) throw NonFinitePayoff("payoff not finite");
  return f;
}

double mean_payoff(const Game& game, const Vec& x) { return dot(game.payoff(x), x); }

double class_mean_payoff(const Game& game, const SimilarityTree& tree, const Vec& x,
                         ClassId c) {
  const auto& members = tree.class_members(c);
  Vec f = game.payoff(x);
  double mass = 0.0, acc = 0.0;
  for (int a : members) {
    mass += x[a];
    acc += x[a] * f[a];
  }
  if (mass <= 0.0) throw EmptyClassMass("class has zero population mass");
  return acc / mass;
}

std::vector<Vec> all_class_mean_payoffs(const Game& game, const SimilarityTree& tree,
                                        const Vec& x) {
  Vec f = game.payoff(x);
  std::vector<Vec> means(tree.depth() + 1);
  for (int l = 0; l <= tree.depth(); ++l) {
    const auto& classes = tree.partition(l);
    means[l].resize(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      double mass = 0.0, acc = 0.0;
      for (int a : classes[c]) {
        mass += x[a];
        acc += x[a] * f[a];
      }
      means[l][c] = mass > 0.0 ? acc / mass : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return means;
}

EquilibriumReport classify_point(const Game& game, const PopulationState& x, double tol) {
  EquilibriumReport report;
  report.point = x;
  report.support = x.support();
  Vec f = game.payoff(x.x);

  double best = *std::max_element(f.begin(), f.end());
  double supp_min = std::numeric_limits<double>::infinity();
  double supp_max = -std::numeric_limits<double>::infinity();
  for (int a : report.support) {
    supp_min = std::min(supp_min, f[a]);
    supp_max = std::max(supp_max, f[a]);
  }
  report.is_restricted_eq = (supp_max - supp_min) <= tol;
  report.max_violation = best - supp_min;
  report.is_nash = report.max_violation <= tol;
  if (report.is_nash) report.is_restricted_eq = true;  // enforce the implication at tol edges
  return report;
}

std::vector<DominatedPair> dominated_pairs(const Game& game) {
  if (game.kind() != Game::Kind::Matrix && game.kind() != Game::Kind::Affine)
    throw UnsupportedKind("exact domination scan needs a matrix or affine game");
  const int n = game.num_actions();
  std::vector<DominatedPair> pairs;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      // F_b - F_a is affine, so its minimum over the simplex sits at a vertex.
      double margin = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        Vec vertex(n, 0.0);
        vertex[j] = 1.0;
        Vec f = game.payoff(vertex);
        margin = std::min(margin, f[b] - f[a]);
      }
      if (margin > 0.0) pairs.push_back({a, b, margin});
    }
  }
  return pairs;
}

std::vector<DominatedPair> sampled_domination(const Game& game, int samples,
                                              std::mt19937_64& rng) {
  const int n = game.num_actions();
  std::vector<std::vector<double>> margin(n, std::vector<double>(n,
      std::numeric_limits<double>::infinity()));
  for (int s = 0; s < samples; ++s) {
    Vec f = game.payoff(random_interior(n, rng).x);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) margin[a][b] = std::min(margin[a][b], f[b] - f[a]);
  }
  std::vector<DominatedPair> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && margin[a][b] > 0.0) pairs.push_back({a, b, margin[a][b]});
  return pairs;
}

double check_potential(const Game& game, int samples, std::mt19937_64& rng, double step) {
  if (!game.has_potential()) throw UnsupportedKind("game has no potential callable");
  const int n = game.num_actions();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    PopulationState x = random_interior(n, rng, 10.0 * step);
    Vec f = game.payoff(x.x);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Vec hi = x.x, lo = x.x;
        hi[i] += step;
        hi[j] -= step;
        lo[i] -= step;
        lo[j] += step;
        double fd = (game.potential_value(hi) - game.potential_value(lo)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - (f[i] - f[j])));
      }
    }
  }
  return worst;
}

MonotoneStats check_monotone(const Game& game, int sample_pairs, std::mt19937_64& rng) {
  const int n = game.num_actions();
  MonotoneStats stats{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  for (int s = 0; s < sample_pairs; ++s) {
    Vec x = random_interior(n, rng).x;
    Vec y = random_interior(n, rng).x;
    Vec fx = game.payoff(x);
    Vec fy = game.payoff(y);
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += (fy[i] - fx[i]) * (y[i] - x[i]);
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
  }
  if (sample_pairs == 0) stats = {0.0, 0.0};
  return stats;
}

Game commuting_game() {
  // Two bus lines and a car; bus line 1 is dominated by the car with margin 1.
  std::vector<Vec> A = {{-2, -4, -6}, {-3, 0, -6}, {-1, -4, -8}};
  Vec b = {-5, -5, -2};
  return Game::affine(std::move(A), std::move(b), {"bus1", "bus2", "car"});
}

Game good_rps_game() {
  // Wins pay 2, losses cost 1; the barycenter is the unique equilibrium and a
  // GESS (the game is strictly monotone on the tangent space).
  std::vector<Vec> A = {{0, -1, 2}, {2, 0, -1}, {-1, 2, 0}};
  return Game::matrix(std::move(A), {"rock", "paper", "scissors"});
}

}  // namespace nestdyn
