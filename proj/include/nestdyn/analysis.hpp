#ifndef NESTDYN_ANALYSIS_HPP
#define NESTDYN_ANALYSIS_HPP

#include <random>

#include "nestdyn/dynamics.hpp"
#include "nestdyn/games.hpp"
#include "nestdyn/hierarchy.hpp"
#include "nestdyn/profiles.hpp"
#include "nestdyn/state.hpp"

namespace nestdyn {

// Level-weighted sum of class-share KL divergences against a fixed
// reference point.
struct DivergenceSpec {
  const SimilarityTree* tree = nullptr;
  Vec nkl_weights;  // w_1..w_N, w_N = 1
  Vec reference;    // p on the simplex

  static DivergenceSpec make(const SimilarityTree& tree, const RateProfile& rates,
                             const PopulationState& reference);
  static DivergenceSpec make(const SimilarityTree& tree, Vec nkl_weights,
                             const PopulationState& reference);
};

// D_N(p, x). Requires supp(p) within supp(x); throws SupportMismatch for
// the +infinity case.
double nested_kl(const DivergenceSpec& spec, const Vec& x);

// Central-difference check of d/dt D_N(p, x(t)) = <F(x), x - p> along a
// short nested-replicator flow through x. Returns |FD - inner product|.
double check_dkl_identity(const Game& game, const SimilarityTree& tree,
                          const RateProfile& rates, const Vec& x, const Vec& p, double h);

struct RateFitReport {
  int action = 0;
  double fitted_slope = 0.0;     // least-squares slope of log x_a(t) on the window
  double bound_exponent = 0.0;   // Lambda_deg * delta
  double bound_intercept = 0.0;  // c in x_a(t) <= exp(c - Lambda_deg delta t)
  bool bound_satisfied = false;  // pointwise over the whole trajectory
  double window_start = 0.0;
  double window_end = 0.0;
};

// Fits the extinction exponent of a strictly dominated action and verifies
// the pointwise share bound. `delta` is the domination margin of `dominator`
// over `action` (computed by games::dominated_pairs); the intercept comes
// from the divergence gap at the start of the trajectory.
RateFitReport fit_extinction_rate(const Trajectory& traj, const SimilarityTree& tree,
                                  const RateProfile& rates, int action, int dominator,
                                  double delta, double window_fraction = 0.5);

struct PotentialAscentReport {
  double min_step_delta = 0.0;     // min over steps of Phi(x_{k+1}) - Phi(x_k)
  double max_dpot_residual = 0.0;  // |variance formula - <F, xdot>| at samples
};

// Checks that the potential is nondecreasing along a nested-replicator
// trajectory and cross-checks the instantaneous derivative against the
// weighted conditional-payoff-variance form.
PotentialAscentReport check_potential_ascent(const Game& game, const SimilarityTree& tree,
                                             const RateProfile& rates,
                                             const Trajectory& traj,
                                             int derivative_samples = 100);

struct GessAttractionReport {
  bool monotone_decrease = false;
  double max_increase = 0.0;   // largest step-to-step rise of D_N(x*, x(t))
  double terminal_l1 = 0.0;    // distance of the final state to x*
  double worst_ess_margin = 0.0;  // max over samples of <F(x), x - x*>
};

// Validates the GESS inequality <F(x), x - x*> < 0 on sampled states
// (throws NotGESS on failure) and then checks that D_N(x*, x(t)) decreases
// along the trajectory.
GessAttractionReport check_gess_attraction(const Game& game, const SimilarityTree& tree,
                                           const RateProfile& rates,
                                           const PopulationState& x_star,
                                           const Trajectory& traj, int ess_samples,
                                           std::mt19937_64& rng,
                                           double decrease_tol = 1e-10);

// Declares the trajectory converged if the terminal window has L1 diameter
// below tol (throws NotConverged otherwise) and classifies the terminal
// average; returns true iff it is Nash within 10 * tol.
bool check_nash_limit(const Game& game, const Trajectory& traj, double tol = 1e-6,
                      double window_fraction = 0.1);

}  // namespace nestdyn

#endif  // NESTDYN_ANALYSIS_HPP
