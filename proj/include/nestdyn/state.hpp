#ifndef NESTDYN_STATE_HPP
#define NESTDYN_STATE_HPP

#include <random>
#include <vector>

#include "nestdyn/errors.hpp"

namespace nestdyn {

using Vec = std::vector<double>;

// A point of the simplex: nonnegative shares summing to 1.
struct PopulationState {
  Vec x;

  static constexpr double kSumTol = 1e-12;

  // Validates nonnegativity and the sum constraint.
  static PopulationState make(Vec shares, double sum_tol = kSumTol);

  static PopulationState uniform(int n);
  static PopulationState vertex(int n, int action);

  int size() const { return static_cast<int>(x.size()); }
  bool interior() const;
  std::vector<int> support(double tol = 0.0) const;
};

double dot(const Vec& a, const Vec& b);
double l1_distance(const Vec& a, const Vec& b);
double linf_distance(const Vec& a, const Vec& b);

// Uniform sample from the simplex interior (Dirichlet(1,...,1), resampled
// if any coordinate falls below min_share).
PopulationState random_interior(int n, std::mt19937_64& rng, double min_share = 1e-6);

}  // namespace nestdyn

#endif  // NESTDYN_STATE_HPP
