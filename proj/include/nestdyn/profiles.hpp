#ifndef NESTDYN_PROFILES_HPP
#define NESTDYN_PROFILES_HPP

#include <vector>

#include "nestdyn/errors.hpp"
#include "nestdyn/state.hpp"

namespace nestdyn {

// Intra-level sampling probabilities lambda_0..lambda_{N-1} of the nested
// revision protocol. lambda_0 > 0 (profiles with no chance of an
// unrestricted comparison are rejected, not analyzed) and the entries sum
// to 1.
struct RateProfile {
  Vec rates;       // lambda_l, l = 0..N-1
  Vec cumulative;  // Lambda_l = lambda_0 + ... + lambda_l

  static RateProfile make(Vec rates, double sum_tol = 1e-12);

  int levels() const { return static_cast<int>(rates.size()); }

  // Convenience for the plain replicator setting, lambda = (1, 0, ..., 0).
  static RateProfile replicator(int levels);
};

// Per-level uncertainty parameters tau_1 >= ... >= tau_N > 0 of the nested
// choice rule.
struct TempProfile {
  Vec temps;  // tau_l, l = 1..N

  static TempProfile make(Vec temps);

  int levels() const { return static_cast<int>(temps.size()); }
};

// The two derived weight vectors: the divergence weights w_1..w_N and the
// entropy weights c_0..c_N. c_0 multiplies x_root log x_root = 0, so it is
// stored as 0 and never contributes.
struct WeightProfile {
  Vec nkl_weights;      // w_l, l = 1..N (index 0 = w_1); w_N = 1
  Vec entropy_weights;  // c_l, l = 0..N (index l = c_l)

  int levels() const { return static_cast<int>(nkl_weights.size()); }
};

// Extrinsic imitation coefficients eta_0..eta_{N-1} >= 0, at least one
// positive.
struct ExtrinsicProfile {
  Vec etas;

  static ExtrinsicProfile make(Vec etas);

  int levels() const { return static_cast<int>(etas.size()); }
};

// tau_l = 1 / Lambda_{l-1}.
TempProfile rates_to_temps(const RateProfile& rates);

// lambda_0 = 1/tau_1, lambda_l = 1/tau_{l+1} - 1/tau_l. Valid rate profiles
// require 1/tau_N = 1; other temperature scales drive the choice dynamics at
// a rescaled clock and have no normalized rate counterpart.
RateProfile temps_to_rates(const TempProfile& temps);

// w_l = lambda_l / (Lambda_{l-1} Lambda_l) for l < N, w_N = 1.
Vec rates_to_nkl_weights(const RateProfile& rates);

// c_l = tau_l - tau_{l+1} with tau_{N+1} = 0 and c_0 = 0.
Vec temps_to_entropy_weights(const TempProfile& temps);

WeightProfile rates_to_weights(const RateProfile& rates);

// Recovers tau_l = c_l + ... + c_N from entropy weights (the inverse of
// temps_to_entropy_weights on its range).
TempProfile entropy_weights_to_temps(const Vec& entropy_weights);

}  // namespace nestdyn

#endif  // NESTDYN_PROFILES_HPP
