#ifndef NESTDYN_CHOICE_HPP
#define NESTDYN_CHOICE_HPP

#include "nestdyn/dynamics.hpp"
#include "nestdyn/games.hpp"
#include "nestdyn/hierarchy.hpp"
#include "nestdyn/profiles.hpp"
#include "nestdyn/state.hpp"

namespace nestdyn {

// Propensity scores for every class of the tree, indexed [level][class
// index]. Level N holds the action scores y themselves; each parent is the
// temperature-weighted log-sum-exp of its children.
std::vector<Vec> class_scores(const SimilarityTree& tree, const TempProfile& temps,
                              const Vec& y);

double root_score(const SimilarityTree& tree, const TempProfile& temps, const Vec& y);

// Nested logit choice: hierarchical conditional logits over the tree.
// Strictly positive for finite scores; reduces to plain logit when N = 1.
PopulationState nlc(const SimilarityTree& tree, const TempProfile& temps, const Vec& y);

// Selection probability of an arbitrary class (product of conditional
// logits along its lineage).
double nlc_class_probability(const SimilarityTree& tree, const TempProfile& temps,
                             const Vec& y, ClassId c);

// Nested negative entropy h(x) = sum_l c_l sum_K x_K log x_K with the
// 0 log 0 = 0 convention. `entropy_weights` covers levels 0..N.
double nested_entropy(const SimilarityTree& tree, const Vec& entropy_weights,
                      const Vec& x);

struct ArgmaxOptions {
  double tol = 1e-10;       // KKT residual: spread of the projected gradient
  int max_iterations = 100000;
};

// Maximizer of <y, x> - h(x) over the simplex by entropic mirror ascent
// (multiplicative updates with step 1/tau_1). Serves as the independent
// route to the closed-form nlc().
PopulationState regularized_argmax(const SimilarityTree& tree, const Vec& entropy_weights,
                                   const Vec& y, const ArgmaxOptions& opts = {});

// Objective <y, x> - h(x); its maximum equals the root class score.
double regularized_objective(const SimilarityTree& tree, const Vec& entropy_weights,
                             const Vec& y, const Vec& x);

struct ScoreTrajectory {
  Vec times;
  std::vector<Vec> scores;  // propensity vectors y(t)
  std::vector<Vec> states;  // x(t) = nlc(y(t))
};

// Score-space dynamics ydot = F(x), x = nlc(y), integrated with fixed-step
// RK4 on the unconstrained scores.
ScoreTrajectory new_integrate(const Game& game, const SimilarityTree& tree,
                              const TempProfile& temps, const Vec& y0,
                              const IntegrateOptions& opts);

// As new_integrate but with the choice map evaluated through
// regularized_argmax instead of the closed form.
ScoreTrajectory nrl_integrate(const Game& game, const SimilarityTree& tree,
                              const TempProfile& temps, const Vec& y0,
                              const IntegrateOptions& opts,
                              const ArgmaxOptions& solver = {});

}  // namespace nestdyn

#endif  // NESTDYN_CHOICE_HPP
