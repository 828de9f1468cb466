#ifndef NESTDYN_GAMES_HPP
#define NESTDYN_GAMES_HPP

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nestdyn/hierarchy.hpp"
#include "nestdyn/state.hpp"

namespace nestdyn {

// A population game: a payoff field F defined on the simplex. Matrix and
// affine games keep their coefficients so that domination margins can be
// resolved exactly at the vertices; custom games carry an opaque callable.
class Game {
 public:
  enum class Kind { Matrix, Affine, Potential, Custom };

  using PayoffFn = std::function<Vec(const Vec&)>;
  using PotentialFn = std::function<double(const Vec&)>;

  // F(x) = A x, with A in row-major order.
  static Game matrix(std::vector<Vec> A, std::vector<std::string> labels = {});
  // F(x) = A x + b.
  static Game affine(std::vector<Vec> A, Vec b, std::vector<std::string> labels = {});
  // F = grad(phi); the gradient callable is trusted but spot-checked by
  // check_potential.
  static Game potential(int n, PayoffFn payoff, PotentialFn phi,
                        std::vector<std::string> labels = {});
  static Game custom(int n, PayoffFn payoff, std::vector<std::string> labels = {});

  int num_actions() const { return n_; }
  Kind kind() const { return kind_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Vec>& payoff_matrix() const { return A_; }
  const Vec& payoff_offset() const { return b_; }
  bool has_potential() const { return static_cast<bool>(phi_); }
  double potential_value(const Vec& x) const;

  Vec payoff(const Vec& x) const;

 private:
  Game() = default;

  int n_ = 0;
  Kind kind_ = Kind::Custom;
  std::vector<Vec> A_;
  Vec b_;
  PayoffFn payoff_;
  PotentialFn phi_;
  std::vector<std::string> labels_;
};

struct EquilibriumReport {
  PopulationState point{{1.0}};
  bool is_restricted_eq = false;
  bool is_nash = false;
  std::vector<int> support;
  double max_violation = 0.0;  // largest payoff advantage of any deviation
};

struct DominatedPair {
  int dominated = 0;
  int dominator = 0;
  double margin = 0.0;  // min over the simplex of F_dominator - F_dominated
};

constexpr double kEquilibriumTol = 1e-9;

double mean_payoff(const Game& game, const Vec& x);

// Conditional-share weighted average payoff of a class; requires positive
// class mass.
double class_mean_payoff(const Game& game, const SimilarityTree& tree, const Vec& x,
                         ClassId c);

// Per-level class mean payoffs for every class of the tree, indexed as
// [level][class index]. Classes with zero mass get NaN entries; callers on
// interior states never read them.
std::vector<Vec> all_class_mean_payoffs(const Game& game, const SimilarityTree& tree,
                                        const Vec& x);

EquilibriumReport classify_point(const Game& game, const PopulationState& x,
                                 double tol = kEquilibriumTol);

// Exact strict-domination scan for matrix/affine games: the margin of an
// affine payoff difference is attained at a vertex. Throws UnsupportedKind
// otherwise (use sampled_domination for custom games).
std::vector<DominatedPair> dominated_pairs(const Game& game);

// Sampling fallback for custom games. Sound only up to the sample: a pair
// reported here has a positive margin on every sampled point, nothing more.
std::vector<DominatedPair> sampled_domination(const Game& game, int samples,
                                              std::mt19937_64& rng);

// Max |directional finite difference of phi - <F, d>| over sampled interior
// points and tangent directions e_i - e_j.
double check_potential(const Game& game, int samples, std::mt19937_64& rng,
                       double step = 1e-5);

struct MonotoneStats {
  double min = 0.0;
  double max = 0.0;  // max < 0 indicates strict monotonicity on the sample
};

// <F(x') - F(x), x' - x> statistics over sampled pairs.
MonotoneStats check_monotone(const Game& game, int sample_pairs, std::mt19937_64& rng);

// Bundled games used by the docs, presets, and tests.
Game commuting_game();
Game good_rps_game();

}  // namespace nestdyn

#endif  // NESTDYN_GAMES_HPP
