// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
// Tolerances are pinned inline next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "nestdyn/analysis.hpp"
#include "nestdyn/choice.hpp"
#include "nestdyn/dynamics.hpp"
#include "nestdyn/games.hpp"
#include "nestdyn/hierarchy.hpp"
#include "nestdyn/profiles.hpp"
#include "nestdyn/state.hpp"

using namespace nestdyn;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int g_failures = 0;

void run(const std::string& label, double time_limit_s,
         const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail = std::string("exception: ") + e.what();
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0 && elapsed > time_limit_s) {
    out.passed = false;
    out.detail += (out.detail.empty() ? "" : "; ") + std::string("over time limit");
  }
  if (!out.passed) ++g_failures;
  std::printf("%-52s %s  [%6.2f s]  %s\n", label.c_str(), out.passed ? "PASS" : "FAIL",
              elapsed, out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

SimilarityTree pair_tree() { return SimilarityTree::build(3, {{{0, 1}, {2}}}); }

// Random tower of nested partitions: each level splits every class of size
// >= 2 into two parts at a random cut, so refinement is strict.
SimilarityTree random_tree(int n, int max_depth, std::mt19937_64& rng) {
  std::vector<std::vector<int>> current(1);
  current[0].resize(n);
  std::iota(current[0].begin(), current[0].end(), 0);
  std::vector<std::vector<std::vector<int>>> interior;
  for (int level = 1; level < max_depth; ++level) {
    std::vector<std::vector<int>> next;
    bool split_any = false;
    for (auto cls : current) {
      if (cls.size() < 2) {
        next.push_back(cls);
        continue;
      }
      std::shuffle(cls.begin(), cls.end(), rng);
      std::size_t cut = 1 + rng() % (cls.size() - 1);
      next.emplace_back(cls.begin(), cls.begin() + cut);
      next.emplace_back(cls.begin() + cut, cls.end());
      split_any = true;
    }
    if (!split_any) break;
    bool all_singletons = true;
    for (const auto& cls : next) all_singletons &= cls.size() == 1;
    if (all_singletons) break;  // level N is synthesized by build()
    interior.push_back(next);
    current = next;
  }
  return SimilarityTree::build(n, interior);
}

RateProfile random_rates(int levels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec raw(levels);
  double sum = 0.0;
  for (int l = 0; l < levels; ++l) {
    raw[l] = unit(rng) + (l == 0 ? 0.1 : 0.0);
    sum += raw[l];
  }
  for (double& v : raw) v /= sum;
  return RateProfile::make(raw, 1e-9);
}

Game random_matrix_game(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> entry(-scale, scale);
  std::vector<Vec> A(n, Vec(n));
  for (auto& row : A)
    for (double& v : row) v = entry(rng);
  return Game::matrix(A);
}

// Single RK4 step of the score dynamics ydot = F(nlc(y)).
Vec score_step(const Game& game, const SimilarityTree& tree, const TempProfile& temps,
               const Vec& y, double h) {
  auto f = [&](const Vec& yy) { return game.payoff(nlc(tree, temps, yy).x); };
  const int n = static_cast<int>(y.size());
  Vec k1 = f(y), tmp(n);
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  Vec k2 = f(tmp);
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  Vec k3 = f(tmp);
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  Vec k4 = f(tmp);
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Outcome criterion_equilibria() {
  Game game = commuting_game();
  auto expect = [&](Vec point, bool strict) -> std::string {
    EquilibriumReport eq = classify_point(game, PopulationState::make(point, 1e-12));
    if (!eq.is_nash || eq.max_violation > 1e-9)
      return "not Nash, violation " + fmt("%.2e", eq.max_violation);
    if (strict) {  // every unused action must earn strictly less
      Vec f = game.payoff(point);
      int best = eq.support.front();
      for (int a = 0; a < game.num_actions(); ++a)
        if (a != best && !(f[a] < f[best])) return "vertex not strict";
    }
    return "";
  };
  for (const auto& [point, strict] :
       {std::pair<Vec, bool>{{0.0, 1.0, 0.0}, true},
        {{0.0, 0.0, 1.0}, true},
        {{0.0, 0.5, 0.5}, false}}) {
    std::string err = expect(point, strict);
    if (!err.empty()) return {false, err};
  }
  auto pairs = dominated_pairs(game);
  if (pairs.size() != 1) return {false, "expected exactly one dominated pair"};
  if (pairs[0].dominated != 0 || pairs[0].dominator != 2 ||
      std::abs(pairs[0].margin - 1.0) > 1e-12)
    return {false, "pair (" + std::to_string(pairs[0].dominated) + "," +
                       std::to_string(pairs[0].dominator) + "), margin " +
                       fmt("%.15g", pairs[0].margin)};
  return {true, "3 equilibria, pair (bus1,car) margin " + fmt("%.12g", pairs[0].margin)};
}

Outcome criterion_extinction() {
  Game game = commuting_game();
  SimilarityTree tree = pair_tree();
  PopulationState x0 = PopulationState::make({0.3, 0.3, 0.4});
  IntegrateOptions opts;
  opts.step = 1e-3;
  opts.t_end = 40.0;
  RateProfile rd = RateProfile::make({1.0, 0.0});
  RateProfile nrd = RateProfile::make({0.25, 0.75});
  Trajectory traj_rd = integrate(make_nrd_field(game, tree, rd), x0, opts);
  Trajectory traj_nrd = integrate(make_nrd_field(game, tree, nrd), x0, opts);
  RateFitReport fit_rd = fit_extinction_rate(traj_rd, tree, rd, 0, 2, 1.0);
  RateFitReport fit_nrd = fit_extinction_rate(traj_nrd, tree, nrd, 0, 2, 1.0);
  std::string detail = "slopes rd " + fmt("%.4f", fit_rd.fitted_slope) + ", nrd " +
                       fmt("%.4f", fit_nrd.fitted_slope);
  if (!(fit_rd.fitted_slope <= -0.95)) return {false, detail + "; rd slope > -0.95"};
  if (!(fit_nrd.fitted_slope >= -0.9 && fit_nrd.fitted_slope <= -0.24))
    return {false, detail + "; nrd slope outside [-0.9,-0.24]"};
  if (!fit_rd.bound_satisfied || !fit_nrd.bound_satisfied)
    return {false, detail + "; pointwise share bound violated"};
  return {true, detail + "; bounds hold pointwise"};
}

Outcome criterion_nrd_nppi() {
  std::mt19937_64 rng(2026);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    int n = 4 + static_cast<int>(rng() % 9);  // 4..12
    SimilarityTree tree = random_tree(n, 2 + static_cast<int>(rng() % 3), rng);
    Game game = random_matrix_game(n, rng);
    RateProfile rates = random_rates(tree.depth(), rng);
    for (int s = 0; s < 200; ++s) {
      Vec x = random_interior(n, rng, 1e-3).x;
      Vec direct = nrd_field(game, tree, rates, x);
      Vec via_protocol =
          mean_dynamics(nppi_switch_rates(tree, rates, game.payoff(x), x), x);
      worst = std::max(worst, linf_distance(direct, via_protocol));
    }
  }
  return {worst <= 1e-12, "max gap " + fmt("%.2e", worst) + " over 1000 states"};
}

Outcome criterion_nrd_new() {
  double worst = 0.0;
  RateProfile rates = RateProfile::make({0.25, 0.75});
  TempProfile temps = rates_to_temps(rates);
  for (const Game& game : {commuting_game(), good_rps_game()}) {
    SimilarityTree tree = pair_tree();
    Vec y0(3, 0.0);
    PopulationState x0 = nlc(tree, temps, y0);
    IntegrateOptions opts;
    opts.step = 1e-3;
    opts.t_end = 20.0;
    opts.sample_stride = 10;
    Trajectory growth = integrate(make_nrd_field(game, tree, rates), x0, opts);
    ScoreTrajectory scores = new_integrate(game, tree, temps, y0, opts);
    int m = std::min(growth.size(), static_cast<int>(scores.times.size()));
    for (int i = 0; i < m; ++i)
      worst = std::max(worst, linf_distance(growth.states[i], scores.states[i]));
  }
  return {worst <= 1e-6, "max state gap " + fmt("%.2e", worst)};
}

Outcome criterion_dkl_identity() {
  std::mt19937_64 rng(4043);
  double worst_res = 0.0, worst_ratio = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3 + static_cast<int>(rng() % 4);  // 3..6
    SimilarityTree tree = random_tree(n, 2 + static_cast<int>(rng() % 3), rng);
    Game game = random_matrix_game(n, rng);
    RateProfile rates = random_rates(tree.depth(), rng);
    Vec x = random_interior(n, rng, 0.05).x;
    Vec p = random_interior(n, rng, 0.05).x;
    worst_res = std::max(worst_res, check_dkl_identity(game, tree, rates, x, p, 1e-4));
    // The quadratic decay is measured at a coarser step where the residual
    // sits well above the roundoff floor of the central difference.
    double res = check_dkl_identity(game, tree, rates, x, p, 2e-3);
    double res_half = check_dkl_identity(game, tree, rates, x, p, 1e-3);
    worst_ratio = std::min(worst_ratio, res / std::max(res_half, 1e-300));
  }
  bool ok = worst_res <= 1e-6 && worst_ratio >= 3.5;
  return {ok, "max residual " + fmt("%.2e", worst_res) + ", min halving ratio " +
                  fmt("%.2f", worst_ratio)};
}

Outcome criterion_class_score_derivative() {
  Game game = commuting_game();
  SimilarityTree tree = pair_tree();
  TempProfile temps = TempProfile::make({4.0, 1.0});
  IntegrateOptions opts;
  opts.step = 1e-3;
  opts.t_end = 5.0;
  opts.sample_stride = 500;
  ScoreTrajectory traj = new_integrate(game, tree, temps, Vec(3, 0.0), opts);
  const double h = 1e-4;
  double worst = 0.0;
  for (const Vec& y : traj.scores) {
    Vec y_fwd = score_step(game, tree, temps, y, h);
    Vec y_bwd = score_step(game, tree, temps, y, -h);
    auto s_fwd = class_scores(tree, temps, y_fwd);
    auto s_bwd = class_scores(tree, temps, y_bwd);
    auto means = all_class_mean_payoffs(game, tree, nlc(tree, temps, y).x);
    for (int l = 0; l <= tree.depth(); ++l)
      for (std::size_t c = 0; c < s_fwd[l].size(); ++c) {
        double fd = (s_fwd[l][c] - s_bwd[l][c]) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - means[l][c]));
      }
  }
  return {worst <= 1e-6,
          "max |d(score)/dt - class mean payoff| = " + fmt("%.2e", worst)};
}

Outcome criterion_argmax() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> tau(0.5, 3.0), score(-2.0, 2.0);
  double worst_gap = 0.0, worst_obj = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 3 + static_cast<int>(rng() % 10);  // 3..12
    SimilarityTree tree = random_tree(n, 2 + static_cast<int>(rng() % 3), rng);
    Vec temps_raw(tree.depth());
    for (double& v : temps_raw) v = tau(rng);
    std::sort(temps_raw.begin(), temps_raw.end(), std::greater<>());
    TempProfile temps = TempProfile::make(temps_raw);
    Vec y(n);
    for (double& v : y) v = score(rng);

    PopulationState closed = nlc(tree, temps, y);
    Vec c = temps_to_entropy_weights(temps);
    PopulationState solved = regularized_argmax(tree, c, y);
    worst_gap = std::max(worst_gap, linf_distance(closed.x, solved.x));
    double attained = regularized_objective(tree, c, y, solved.x);
    worst_obj = std::max(worst_obj, std::abs(attained - root_score(tree, temps, y)));
  }
  bool ok = worst_gap <= 1e-7 && worst_obj <= 1e-9;
  return {ok, "max state gap " + fmt("%.2e", worst_gap) + ", max objective gap " +
                  fmt("%.2e", worst_obj)};
}

Outcome criterion_red_bus() {
  SimilarityTree two = SimilarityTree::build(2, {});
  TempProfile unit1 = TempProfile::make({1.0});
  PopulationState pre = nlc(two, unit1, {-0.5, -1.0});
  double pre_ratio = pre.x[0] / pre.x[1];

  SimilarityTree three = SimilarityTree::build(3, {});
  PopulationState post = nlc(three, unit1, {-0.5, -1.0, -1.0});
  double post_ratio = post.x[0] / (post.x[1] + post.x[2]);

  bool ok = std::abs(pre_ratio - 1.6487) <= 1e-3 && std::abs(post_ratio - 0.8244) <= 1e-3;
  return {ok, "car/bus ratio pre-split " + fmt("%.4f", pre_ratio) + ", post-split " +
                  fmt("%.4f", post_ratio)};
}

Outcome criterion_potential_ascent() {
  std::vector<Vec> A = {{2.0, 1.0, 0.0}, {1.0, 3.0, -1.0}, {0.0, -1.0, 1.0}};
  Game game = Game::potential(
      3,
      [A](const Vec& x) {
        Vec f(3, 0.0);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) f[i] += A[i][j] * x[j];
        return f;
      },
      [A](const Vec& x) {
        double phi = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) phi += 0.5 * x[i] * A[i][j] * x[j];
        return phi;
      });
  SimilarityTree tree = pair_tree();
  RateProfile rates = RateProfile::make({0.25, 0.75});
  IntegrateOptions opts;
  opts.step = 1e-3;
  opts.t_end = 10.0;
  std::mt19937_64 rng(99);
  double min_delta = 1e300, max_residual = 0.0;
  for (int s = 0; s < 20; ++s) {
    PopulationState x0 = random_interior(3, rng, 1e-3);
    Trajectory traj = integrate(make_nrd_field(game, tree, rates), x0, opts);
    PotentialAscentReport rep = check_potential_ascent(game, tree, rates, traj, 50);
    min_delta = std::min(min_delta, rep.min_step_delta);
    max_residual = std::max(max_residual, rep.max_dpot_residual);
  }
  bool ok = min_delta >= -1e-9 && max_residual <= 1e-8;
  return {ok, "min step delta " + fmt("%.2e", min_delta) + ", max derivative residual " +
                  fmt("%.2e", max_residual)};
}

Outcome criterion_gess() {
  Game game = good_rps_game();
  SimilarityTree tree = pair_tree();
  RateProfile rates = RateProfile::make({0.25, 0.75});
  PopulationState star = PopulationState::uniform(3);
  IntegrateOptions opts;
  opts.step = 1e-3;
  opts.t_end = 50.0;
  std::mt19937_64 rng(1234);
  bool monotone = true;
  double max_terminal = 0.0;
  for (int s = 0; s < 20; ++s) {
    PopulationState x0 = random_interior(3, rng, 1e-3);
    Trajectory traj = integrate(make_nrd_field(game, tree, rates), x0, opts);
    GessAttractionReport rep = check_gess_attraction(game, tree, rates, star, traj,
                                                     s == 0 ? 2000 : 0, rng);
    monotone &= rep.monotone_decrease;
    max_terminal = std::max(max_terminal, rep.terminal_l1);
  }
  bool ok = monotone && max_terminal <= 1e-4;
  return {ok, std::string("divergence monotone: ") + (monotone ? "yes" : "no") +
                  ", max terminal L1 at t=50: " + fmt("%.2e", max_terminal) +
                  " (required <= 1e-4)"};
}

Outcome criterion_conversions() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    int levels = 1 + static_cast<int>(rng() % 6);
    RateProfile rates = random_rates(levels, rng);
    TempProfile temps = rates_to_temps(rates);
    RateProfile back = temps_to_rates(temps);
    worst = std::max(worst, linf_distance(back.rates, rates.rates));

    Vec w = rates_to_nkl_weights(rates);
    Vec c = temps_to_entropy_weights(temps);
    worst = std::max(worst, std::abs(c[0]));
    for (int l = 1; l <= levels; ++l) worst = std::max(worst, std::abs(c[l] - w[l - 1]));
    TempProfile temps_back = entropy_weights_to_temps(c);
    worst = std::max(worst, linf_distance(temps_back.temps, temps.temps));
  }
  return {worst <= 1e-12, "max round-trip error " + fmt("%.2e", worst)};
}

Outcome note_basins() {
  Game game = commuting_game();
  SimilarityTree tree = pair_tree();
  RateProfile rd = RateProfile::make({1.0, 0.0});
  RateProfile nrd = RateProfile::make({0.25, 0.75});
  IntegrateOptions opts;
  opts.step = 1e-2;
  opts.t_end = 60.0;
  opts.sample_stride = 1000;
  int car_rd = 0, car_nrd = 0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j + i <= 20; ++j) {
      Vec x = {i / 20.0, j / 20.0, (20 - i - j) / 20.0};
      for (double& v : x) v = (1.0 - 3e-4) * v + 1e-4;  // nudge off the boundary
      PopulationState x0 = PopulationState::make(x, 1e-9);
      if (integrate(make_nrd_field(game, tree, rd), x0, opts).states.back()[2] > 0.9)
        ++car_rd;
      if (integrate(make_nrd_field(game, tree, nrd), x0, opts).states.back()[2] > 0.9)
        ++car_nrd;
    }
  return {car_nrd > car_rd, "car-converging starts: nested " + std::to_string(car_nrd) +
                                ", plain " + std::to_string(car_rd) +
                                " (required nested > plain)"};
}

}  // namespace

int main() {
  run("criterion 1: commuting equilibria + domination", 1.0, criterion_equilibria);
  run("criterion 2: extinction-rate ordering + bound", 10.0, criterion_extinction);
  run("criterion 3: nested replicator = protocol mean", 5.0, criterion_nrd_nppi);
  run("criterion 4: growth flow = score flow", 20.0, criterion_nrd_new);
  run("criterion 5: divergence derivative identity", 0.0, criterion_dkl_identity);
  run("criterion 6: class-score derivative law", 0.0, criterion_class_score_derivative);
  run("criterion 7: choice map = regularized argmax", 0.0, criterion_argmax);
  run("criterion 8: red-bus logit ratios", 0.0, criterion_red_bus);
  run("criterion 9: potential ascent", 0.0, criterion_potential_ascent);
  run("criterion 10: stable-state attraction", 30.0, criterion_gess);
  run("criterion 11: profile conversion triangle", 0.0, criterion_conversions);
  run("note: basin comparison on 21x21 grid", 0.0, note_basins);
  std::printf("%d check(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
