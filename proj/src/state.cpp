#include "nestdyn/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nestdyn {

PopulationState PopulationState::make(Vec shares, double sum_tol) {
  if (shares.empty()) throw InvalidState("state must have at least one share");
  double sum = 0.0;
  for (double v : shares) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidState("shares must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > sum_tol)
    throw InvalidState("shares must sum to 1 (got " + std::to_string(sum) + ")");
  return PopulationState{std::move(shares)};
}

PopulationState PopulationState::uniform(int n) {
  return PopulationState{Vec(n, 1.0 / n)};
}

PopulationState PopulationState::vertex(int n, int action) {
  if (action < 0 || action >= n) throw InvalidState("vertex action out of range");
  Vec x(n, 0.0);
  x[action] = 1.0;
  return PopulationState{std::move(x)};
}

bool PopulationState::interior() const {
  return std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
}

std::vector<int> PopulationState::support(double tol) const {
  std::vector<int> supp;
  for (int a = 0; a < size(); ++a)
    if (x[a] > tol) supp.push_back(a);
  return supp;
}

double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double l1_distance(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double linf_distance(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

PopulationState random_interior(int n, std::mt19937_64& rng, double min_share) {
  std::exponential_distribution<double> exp1(1.0);
  Vec x(n);
  for (;;) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = exp1(rng);
      sum += x[i];
    }
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      x[i] /= sum;
      if (x[i] < min_share) ok = false;
    }
    if (ok) return PopulationState{x};
  }
}

}  // namespace nestdyn
