#ifndef NESTDYN_DYNAMICS_HPP
#define NESTDYN_DYNAMICS_HPP

#include <functional>
#include <vector>

#include "nestdyn/games.hpp"
#include "nestdyn/hierarchy.hpp"
#include "nestdyn/profiles.hpp"
#include "nestdyn/state.hpp"

namespace nestdyn {

using VectorField = std::function<Vec(const Vec&)>;

// Replicator field: xdot_a = x_a [F_a(x) - mean payoff].
Vec rd_field(const Game& game, const Vec& x);

// Nested replicator field: the per-capita growth of a is the rate-weighted
// combination of payoff gaps to the mean payoffs of its ancestor classes.
// Requires an interior state (every ancestor class must carry mass).
Vec nrd_field(const Game& game, const SimilarityTree& tree, const RateProfile& rates,
              const Vec& x);

// Extrinsic variant: each level's gap is additionally scaled by the mass of
// the ancestor class at that level.
Vec nrd_extr_field(const Game& game, const SimilarityTree& tree,
                   const ExtrinsicProfile& etas, const Vec& x);

// Conditional switch rates of the nested imitation protocol,
// rho_ab = sum_k lambda_k x_{b|K_k(a)} [pi_b - pi_a]_+. Rows of unused
// actions (x_a = 0) are defined as zero.
std::vector<Vec> nppi_switch_rates(const SimilarityTree& tree, const RateProfile& rates,
                                   const Vec& payoffs, const Vec& x);

// Mean dynamics of a switch-rate matrix: inflows minus outflows per action.
Vec mean_dynamics(const std::vector<Vec>& switch_rates, const Vec& x);

struct Trajectory {
  Vec times;
  std::vector<Vec> states;
  // Named per-step diagnostic columns, filled by the caller (CLI/analysis).
  std::vector<std::string> diagnostic_names;
  std::vector<Vec> diagnostics;  // one row per stored step

  int size() const { return static_cast<int>(times.size()); }
};

struct IntegrateOptions {
  double step = 1e-3;
  double t_end = 1.0;
  int sample_stride = 10;   // store every k-th step (plus the final one)
  bool renormalize = true;  // divide by the coordinate sum after each step
};

// Classical fixed-step RK4. Replicator-type fields keep the simplex
// invariant up to integration error; renormalization divides out the
// accumulated drift and PositivityLoss is raised instead of clamping if a
// coordinate that started positive stops being so.
Trajectory integrate(const VectorField& field, const PopulationState& x0,
                     const IntegrateOptions& opts);

// Field factories binding a game/tree/profile; useful for the CLI and tests.
VectorField make_rd_field(const Game& game);
VectorField make_nrd_field(const Game& game, const SimilarityTree& tree,
                           const RateProfile& rates);
VectorField make_nrd_extr_field(const Game& game, const SimilarityTree& tree,
                                const ExtrinsicProfile& etas);

}  // namespace nestdyn

#endif  // NESTDYN_DYNAMICS_HPP
