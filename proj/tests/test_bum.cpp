#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bethe_csma/bethe_error.hpp"
#include "bethe_csma/bum.hpp"
#include "bethe_csma/oracle.hpp"
#include "bethe_csma/verify.hpp"

using namespace bethe_csma;

namespace {

const UtilitySpec kUnit{1.0, 1.0};

// Root of 1/y = log(y/(1-y)) on (0,1) by bisection: the stationary point of
// K_B for an isolated link with alpha = beta = 1.
double isolated_root() {
  double lo = 0.5, hi = 0.99;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (1.0 / mid - std::log(mid / (1.0 - mid)) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double oracle_utility(const InterferenceGraph& g, const RateVector& y) {
  double u = 0.0;
  for (double s : service_rates(g, bum_recover_intensity(g, y))) u += std::log(s);
  return u;
}

}  // namespace

TEST(Utility, Definitions) {
  const UtilitySpec two{2.0, 1.0};
  EXPECT_NEAR(two.value(0.5), -2.0, 1e-15);
  EXPECT_NEAR(two.derivative(0.5), 4.0, 1e-15);
  EXPECT_NEAR(two.second_derivative(0.5), -16.0, 1e-12);
  EXPECT_NEAR(kUnit.value(0.5), std::log(0.5), 1e-15);
  EXPECT_THROW((UtilitySpec{1.0, 0.0}.validate()), PreconditionError);
  EXPECT_THROW((UtilitySpec{-1.0, 1.0}.validate()), PreconditionError);
  EXPECT_TRUE((UtilitySpec{1.0, 8.0}.concavity_guaranteed(4)));
  EXPECT_FALSE((UtilitySpec{1.0, 8.0}.in_convergence_regime(4)));
  EXPECT_TRUE((UtilitySpec{1.0, 8.5}.in_convergence_regime(4)));
}

TEST(KB, Examples) {
  const InterferenceGraph g(1, {});
  EXPECT_NEAR(k_b(g, RateVector(1, 0.5), kUnit), 0.0, 1e-15);
  EXPECT_THROW(k_b(g, RateVector(1, 1e-301), kUnit), DomainError);
  EXPECT_THROW(k_b(path_graph(2), RateVector(2, 0.5), kUnit), DomainError);
}

TEST(GradKB, IsolatedLink) {
  const InterferenceGraph g(1, {});
  EXPECT_NEAR(grad_k_b(g, RateVector(1, 0.5), kUnit)[0], 2.0, 1e-15);
  const double root = isolated_root();
  EXPECT_NEAR(root, 0.7821, 1e-4);
  EXPECT_NEAR(grad_k_b(g, RateVector(1, root), kUnit)[0], 0.0, 1e-12);
}

TEST(GradKB, MatchesFiniteDifferences) {
  std::mt19937_64 rng(41);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto g = random_test_graph(rng, k);
    for (const UtilitySpec u : {kUnit, UtilitySpec{2.0, 3.0}, UtilitySpec{0.5, 1.0}}) {
      const double err = max_gradient_fd_error(
          g, [&](const RateVector& y) { return k_b(g, y, u); },
          [&](const RateVector& y) { return grad_k_b(g, y, u); }, 10, rng());
      EXPECT_LT(err, 1e-5);
    }
  }
}

TEST(GradKB, IsLocal) {
  const auto g = path_graph(5);
  RateVector y(5, 0.3);
  const double before = grad_k_b_link(g, y, kUnit, 1);
  y[4] = 0.1;
  y[3] = 0.2;
  EXPECT_EQ(grad_k_b_link(g, y, kUnit, 1), before);
}

TEST(WrongSignGradient, FailsFiniteDifferenceCheck) {
  const auto g = ring_graph(5);
  const auto res = check_gradient_fd(
      "negative_control", g, [&](const RateVector& y) { return k_b(g, y, kUnit); },
      [&](const RateVector& y) {
        auto grad = grad_k_b(g, y, kUnit);
        for (auto& v : grad) v = -v;
        return grad;
      },
      20, 1);
  EXPECT_FALSE(res.passed);
}

TEST(ProjectStar, Examples) {
  EXPECT_DOUBLE_EQ(project_star(0.8, 0.9, 0.3, 0.01, 0.1), 0.75);
  EXPECT_DOUBLE_EQ(project_star(0.4, 0.5, 0.2, 0.01, 0.1), 0.4);
  EXPECT_DOUBLE_EQ(project_star(1e-6, 0.5, 0.2, 0.01, 0.1), 0.01);
  const auto p = project_star_detailed(0.8, 0.9, 0.3, 0.01, 0.1);
  EXPECT_TRUE(p.upper);
  EXPECT_FALSE(p.conflict);
}

TEST(ProjectStar, LowerClampWinsConflicts) {
  // upper = (1 + 0.05 - 0.9 - 0.1)/2 = 0.025 < c1
  const auto p = project_star_detailed(0.5, 0.05, 0.9, 0.1, 0.1);
  EXPECT_TRUE(p.conflict);
  EXPECT_DOUBLE_EQ(p.value, 0.1);
}

TEST(Schedule, DefaultsAndRateCondition) {
  const auto s = default_projection_schedule();
  EXPECT_NEAR(s.c1(1.0), 1.0 / (100.0 * std::log(1.0 + std::exp(1.0))), 1e-15);
  EXPECT_NEAR(s.c2(16.0), 0.1, 1e-15);
  EXPECT_LT(rate_condition_value(s, kUnit, 1e6), rate_condition_value(s, kUnit, 1e3));
  EXPECT_THROW(default_projection_schedule(0.0, 5.0, 0.25), PreconditionError);
}

TEST(MuWeights, FourSteps) {
  const auto w = mu_weights(4);
  const double expected[] = {0.3591, 0.2539, 0.2074, 0.1796};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(w[k], expected[k], 1e-4);
}

TEST(BumRun, IsolatedLinkConverges) {
  const auto trace = bum_run(InterferenceGraph(1, {}), kUnit, default_projection_schedule(), 2000);
  EXPECT_NEAR(trace.final_y[0], isolated_root(), 1e-3);
  EXPECT_TRUE(trace.warnings.empty());
  const auto rep = domain_diagnostics(trace, InterferenceGraph(1, {}), kUnit, default_projection_schedule());
  EXPECT_TRUE(rep.all_interior);
  EXPECT_LT(rep.last_clamp_t, 2000u);
  ASSERT_TRUE(rep.t_star.has_value());
  EXPECT_LT(*rep.t_star, 2000u);
}

TEST(BumRun, RecordsAndHorizonOne) {
  const auto g = star_graph(5);
  const auto one = bum_run(g, kUnit, default_projection_schedule(), 1);
  ASSERT_EQ(one.records.size(), 1u);
  EXPECT_EQ(one.final_y, RateVector(5, 0.25));
  EXPECT_THROW(bum_run(g, kUnit, default_projection_schedule(), 0), PreconditionError);
  EXPECT_FALSE(one.warnings.empty());
}

TEST(BumRun, IsDeterministic) {
  const auto g = ring_graph(7);
  const auto a = bum_run(g, kUnit, default_projection_schedule(), 300);
  const auto b = bum_run(g, kUnit, default_projection_schedule(), 300);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].y, b.records[k].y);
    EXPECT_EQ(a.records[k].r, b.records[k].r);
    EXPECT_EQ(a.records[k].k_b, b.records[k].k_b);
    EXPECT_EQ(a.records[k].hits, b.records[k].hits);
  }
}

TEST(BumRun, IteratesStayInterior) {
  TopologySpec grid{TopologyKind::grid};
  grid.width = 5;
  grid.height = 5;
  for (const auto& g : {star_graph(5), complete_graph(5), ring_graph(8), make_topology(grid)}) {
    const auto res = check_bum_interior(g, kUnit, 1000);
    EXPECT_TRUE(res.passed) << res.measured;
  }
  EXPECT_TRUE(check_bum_interior(complete_graph(6), UtilitySpec{2.0, 0.2}, 500).passed);
}

TEST(BumRun, StarUtility) {
  const auto g = star_graph(5);
  const auto trace = bum_run(g, kUnit, default_projection_schedule(), 1000);
  EXPECT_NEAR(oracle_utility(g, trace.final_y), -3.3, 0.1);
  const auto rep = domain_diagnostics(trace, g, kUnit, default_projection_schedule());
  EXPECT_TRUE(rep.all_interior);
  RecordProperty("last_clamp_t", std::to_string(rep.last_clamp_t));
  RecordProperty("t_star", rep.t_star ? std::to_string(*rep.t_star) : "none");
}

TEST(BumRun, RecoveredIntensityOnTreeReproducesIterate) {
  const auto g = star_graph(5);
  const auto trace = bum_run(g, kUnit, default_projection_schedule(), 500);
  const auto r = bum_recover_intensity(g, trace.final_y);
  EXPECT_EQ(r, bas_intensity(g, trace.final_y));
  const auto s = service_rates(g, r);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(s[i], trace.final_y[i], 1e-9);
}

TEST(BumRun, TriangleGapWithinReportedBound) {
  // Symmetric optimum on the capacity region of K3 is 1/3 per link.
  const auto g = complete_graph(3);
  const auto trace = bum_run(g, kUnit, default_projection_schedule(), 2000);
  const double gap = 3.0 * std::log(1.0 / 3.0) - oracle_utility(g, trace.final_y);
  const auto err = bethe_error_at(g, trace.final_y);
  double bound = 3.0 * std::log(2.0);
  for (std::size_t i = 0; i < 3; ++i) bound += err.error[i] / err.service[i];
  RecordProperty("gap", std::to_string(gap));
  RecordProperty("bound", std::to_string(bound));
  EXPECT_GE(gap, 0.0);
  EXPECT_TRUE(std::isfinite(bound));
}

TEST(ReferenceOptimum, IsCachedAndDominatesTrace) {
  const auto g = star_graph(5);
  const auto sched = default_projection_schedule();
  const auto a = reference_optimum(g, kUnit, sched, 20000);
  const auto b = reference_optimum(g, kUnit, sched, 20000);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.k_b, b.k_b);
  EXPECT_GE(a.k_b, bum_run(g, kUnit, sched, 1000).best_k_b);
}

TEST(ReferenceOptimum, GapShrinksWithinEnvelope) {
  const auto g = star_graph(5);
  const auto sched = default_projection_schedule();
  const double ref = reference_optimum(g, kUnit, sched).k_b;
  double prev = std::numeric_limits<double>::infinity();
  std::vector<double> scaled;
  for (std::size_t T : {100u, 400u, 1600u}) {
    const double gap = mu_weighted_gap(bum_run(g, kUnit, sched, T), ref);
    EXPECT_GT(gap, 0.0);
    EXPECT_LT(gap, prev);
    prev = gap;
    scaled.push_back(gap * std::sqrt(static_cast<double>(T)) / std::log(static_cast<double>(T)));
  }
  EXPECT_LE(scaled.back(), 2.0 * scaled.front());
}
