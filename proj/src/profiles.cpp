#include "nestdyn/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace nestdyn {

RateProfile RateProfile::make(Vec rates, double sum_tol) {
  if (rates.empty()) throw InvalidProfile("rate profile must be nonempty");
  double sum = 0.0;
  for (double l : rates) {
    if (!std::isfinite(l) || l < 0.0)
      throw InvalidProfile("rates must be finite and >= 0");
    sum += l;
  }
  if (std::abs(sum - 1.0) > sum_tol)
    throw InvalidProfile("rates must sum to 1 (got " + std::to_string(sum) + ")");
  if (rates[0] <= 0.0) throw InvalidProfile("lambda_0 must be positive");

  RateProfile p;
  p.cumulative.resize(rates.size());
  double acc = 0.0;
  for (std::size_t l = 0; l < rates.size(); ++l) {
    acc += rates[l];
    p.cumulative[l] = acc;
  }
  p.rates = std::move(rates);
  return p;
}

RateProfile RateProfile::replicator(int levels) {
  Vec rates(levels, 0.0);
  rates[0] = 1.0;
  return make(std::move(rates));
}

TempProfile TempProfile::make(Vec temps) {
  if (temps.empty()) throw InvalidProfile("temperature profile must be nonempty");
  for (std::size_t l = 0; l < temps.size(); ++l) {
    if (!std::isfinite(temps[l]) || temps[l] <= 0.0)
      throw InvalidProfile("temperatures must be finite and > 0");
    if (l > 0 && temps[l] > temps[l - 1])
      throw InvalidProfile("temperatures must be nonincreasing");
  }
  return TempProfile{std::move(temps)};
}

ExtrinsicProfile ExtrinsicProfile::make(Vec etas) {
  if (etas.empty()) throw InvalidProfile("extrinsic profile must be nonempty");
  bool any = false;
  for (double e : etas) {
    if (!std::isfinite(e) || e < 0.0)
      throw InvalidProfile("extrinsic coefficients must be finite and >= 0");
    any = any || e > 0.0;
  }
  if (!any) throw InvalidProfile("at least one extrinsic coefficient must be positive");
  return ExtrinsicProfile{std::move(etas)};
}

TempProfile rates_to_temps(const RateProfile& rates) {
  const int N = rates.levels();
  Vec temps(N);
  for (int l = 1; l <= N; ++l) temps[l - 1] = 1.0 / rates.cumulative[l - 1];
  return TempProfile::make(std::move(temps));
}

RateProfile temps_to_rates(const TempProfile& temps) {
  const int N = temps.levels();
  if (std::abs(1.0 / temps.temps[N - 1] - 1.0) > 1e-9)
    throw InvalidProfile("temperature profile has no normalized rate counterpart "
                         "(needs tau_N = 1)");
  Vec rates(N);
  rates[0] = 1.0 / temps.temps[0];
  for (int l = 1; l < N; ++l)
    rates[l] = 1.0 / temps.temps[l] - 1.0 / temps.temps[l - 1];
  // Absorb round-off so the normalization invariant survives the round trip.
  double sum = 0.0;
  for (double r : rates) sum += r;
  for (double& r : rates) r /= sum;
  return RateProfile::make(std::move(rates));
}

Vec rates_to_nkl_weights(const RateProfile& rates) {
  const int N = rates.levels();
  Vec w(N);
  for (int l = 1; l < N; ++l)
    w[l - 1] = rates.rates[l] / (rates.cumulative[l - 1] * rates.cumulative[l]);
  w[N - 1] = 1.0;
  return w;
}

Vec temps_to_entropy_weights(const TempProfile& temps) {
  const int N = temps.levels();
  Vec c(N + 1);
  c[0] = 0.0;
  for (int l = 1; l < N; ++l) c[l] = temps.temps[l - 1] - temps.temps[l];
  c[N] = temps.temps[N - 1];
  return c;
}

WeightProfile rates_to_weights(const RateProfile& rates) {
  WeightProfile w;
  w.nkl_weights = rates_to_nkl_weights(rates);
  w.entropy_weights = temps_to_entropy_weights(rates_to_temps(rates));
  return w;
}

TempProfile entropy_weights_to_temps(const Vec& entropy_weights) {
  if (entropy_weights.size() < 2)
    throw InvalidProfile("entropy weights must cover levels 0..N with N >= 1");
  const int N = static_cast<int>(entropy_weights.size()) - 1;
  Vec temps(N);
  double tail = 0.0;
  for (int l = N; l >= 1; --l) {
    if (entropy_weights[l] < 0.0)
      throw InvalidProfile("entropy weights must be >= 0 for levels >= 1");
    tail += entropy_weights[l];
    temps[l - 1] = tail;
  }
  return TempProfile::make(std::move(temps));
}

}  // namespace nestdyn
