#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hurdle/error.hpp"
#include "hurdle/econ.hpp"
#include "hurdle/synth.hpp"

using namespace hurdle;

namespace {

OutcomeDraws one_draw_table_fixture() {
  OutcomeDraws o;
  o.mu_e = {std::vector<double>{0.710}, std::vector<double>{0.729}};
  o.mu_c = {std::vector<double>{218.150}, std::vector<double>{403.823}};
  return o;
}

IncrementDraws make_inc(std::vector<double> de, std::vector<double> dc) {
  IncrementDraws inc;
  inc.delta_e = std::move(de);
  inc.delta_c = std::move(dc);
  return inc;
}

OutcomeDraws random_outcomes(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> e0(0.70, 0.02), de(0.02, 0.03), c0(220.0, 20.0), dc(180.0, 120.0);
  OutcomeDraws o;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = e0(rng), b = c0(rng);
    o.mu_e[0].push_back(a);
    o.mu_e[1].push_back(a + de(rng));
    o.mu_c[0].push_back(b);
    o.mu_c[1].push_back(b + dc(rng));
  }
  return o;
}

}  // namespace

TEST(Increments, TableFixture) {
  const auto inc = increments(one_draw_table_fixture());
  ASSERT_EQ(inc.size(), 1u);
  EXPECT_NEAR(inc.delta_e[0], 0.019, 1e-12);
  EXPECT_NEAR(inc.delta_c[0], 185.673, 1e-9);
}

TEST(Increments, IdenticalArmsAndShifts) {
  std::mt19937_64 rng(1);
  auto o = random_outcomes(rng, 50);
  o.mu_e[1] = o.mu_e[0];
  o.mu_c[1] = o.mu_c[0];
  for (const auto& inc = increments(o); double v : inc.delta_e) EXPECT_EQ(v, 0.0);
  auto p = random_outcomes(rng, 50);
  const auto base = increments(p);
  for (int t = 0; t < 2; ++t) for (auto& c : p.mu_c[t]) c += 1000.0;
  const auto shifted = increments(p);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(shifted.delta_c[i], base.delta_c[i], 1e-9);
}

TEST(Increments, MissingArm) {
  OutcomeDraws o = one_draw_table_fixture();
  o.mu_c[1].clear();
  EXPECT_THROW(increments(o), InputError);
}

TEST(Eib, Examples) {
  const auto inc = increments(one_draw_table_fixture());
  EXPECT_NEAR(eib(inc, 0.0), -185.673, 1e-9);
  EXPECT_NEAR(eib(inc, 10000.0), 4.327, 1e-9);
  const auto k = break_even(inc);
  ASSERT_TRUE(k.has_value());
  EXPECT_NEAR(eib(inc, k->k), 0.0, 1e-9);
}

TEST(BreakEven, TableFixture) {
  const auto k = break_even(increments(one_draw_table_fixture()));
  ASSERT_TRUE(k.has_value());
  EXPECT_EQ(k->kind, BreakEvenKind::CostEffectiveAbove);
  EXPECT_NEAR(k->k, 9772.263157894737, 1e-6);
}

TEST(BreakEven, DirectionFlags) {
  auto k = break_even(make_inc({0.02, 0.01}, {-10.0, -30.0}));
  ASSERT_TRUE(k);
  EXPECT_EQ(k->kind, BreakEvenKind::Dominant);
  EXPECT_EQ(k->k, 0.0);
  k = break_even(make_inc({-0.02}, {-100.0}));
  ASSERT_TRUE(k);
  EXPECT_EQ(k->kind, BreakEvenKind::CostEffectiveBelow);
  EXPECT_NEAR(k->k, 5000.0, 1e-9);
  k = break_even(make_inc({-0.02}, {100.0}));
  ASSERT_TRUE(k);
  EXPECT_EQ(k->kind, BreakEvenKind::Dominated);
  EXPECT_FALSE(break_even(make_inc({0.0, 0.0}, {5.0, 6.0})).has_value());
}

TEST(Ceac, Examples) {
  const WtpGrid grid = WtpGrid::standard();
  for (const auto& p : ceac(make_inc({0.1, 0.2}, {-5.0, -1.0}), grid)) EXPECT_EQ(p.value, 1.0);
  const auto inc = make_inc({0.02, 0.01, -0.01, 0.0}, {100.0, -300.0, -5.0, 0.0});
  EXPECT_EQ(ceac(inc, WtpGrid({0.0})).front().value, 0.5);
  EXPECT_EQ(ceac(make_inc({0.02, 0.01}, {100.0, 300.0}), WtpGrid({10000.0})).front().value, 0.5);
}

TEST(Evpi, Examples) {
  OutcomeDraws dom;
  dom.mu_e = {std::vector<double>{0.5, 0.6}, std::vector<double>{0.7, 0.8}};
  dom.mu_c = {std::vector<double>{300.0, 320.0}, std::vector<double>{100.0, 90.0}};
  for (const auto& p : evpi(dom, WtpGrid::standard())) EXPECT_EQ(p.value, 0.0);

  // Net benefit at k = 1000: draw 1 (400, 500), draw 2 (400, 350).
  OutcomeDraws flip;
  flip.mu_e = {std::vector<double>{0.5, 0.5}, std::vector<double>{0.7, 0.4}};
  flip.mu_c = {std::vector<double>{100.0, 100.0}, std::vector<double>{200.0, 50.0}};
  const auto v = evpi(flip, WtpGrid({1000.0}));
  EXPECT_NEAR(v.front().value, 25.0, 1e-9);
}

TEST(WtpGrid, Validation) {
  EXPECT_EQ(WtpGrid::standard().size(), 501u);
  EXPECT_EQ(WtpGrid::standard().values().back(), 50000.0);
  EXPECT_THROW(WtpGrid({}), ConfigError);
  EXPECT_THROW(WtpGrid({0.0, 0.0}), ConfigError);
  EXPECT_THROW(WtpGrid({-1.0}), ConfigError);
  EXPECT_THROW(WtpGrid::range(0, 100, 0), ConfigError);
}

TEST(CePlane, ExportIsOnePerDraw) {
  std::mt19937_64 rng(4);
  const auto inc = increments(random_outcomes(rng, 321));
  const auto rows = ce_plane_export(inc);
  ASSERT_EQ(rows.size(), 321u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].draw, i + 1);
    EXPECT_EQ(rows[i].delta_e, inc.delta_e[i]);
    EXPECT_TRUE(std::isfinite(rows[i].delta_c));
  }
}

TEST(EconProperties, RandomDrawSets) {
  std::mt19937_64 rng(2024);
  const WtpGrid grid = WtpGrid::range(0, 50000, 500);
  for (int rep = 0; rep < 50; ++rep) {
    const auto o = random_outcomes(rng, 200);
    const auto inc = increments(o);
    const auto curve = ceac(inc, grid);
    for (const auto& p : curve) {
      EXPECT_GE(p.value, 0.0);
      EXPECT_LE(p.value, 1.0);
    }
    auto shuffled = inc;
    std::vector<std::size_t> idx(inc.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      shuffled.delta_e[i] = inc.delta_e[idx[i]];
      shuffled.delta_c[i] = inc.delta_c[idx[i]];
    }
    const auto again = ceac(shuffled, grid);
    for (std::size_t i = 0; i < curve.size(); ++i) EXPECT_EQ(again[i].value, curve[i].value);
    for (const auto& p : evpi(o, grid)) EXPECT_GE(p.value, 0.0);
    const double e0 = eib(inc, 0.0), e1 = eib(inc, 1.0);
    for (double k : {123.0, 9999.0, 45000.0}) EXPECT_NEAR(eib(inc, k), e0 + k * (e1 - e0), 1e-9 * std::max(1.0, std::fabs(eib(inc, k))));
  }
}

TEST(Sensitivity, GridShapeAndSingleCell) {
  const TrialData d = simulate_dataset(TruthParams::case_study(), 150, 5);
  McmcConfig cfg;
  cfg.n_iter = 1500;
  cfg.n_burnin = 750;
  cfg.thin = 3;
  const ModelSpec spec = ModelSpec::case_study();
  const auto rows = sensitivity_over_W(d, spec, cfg, {1e4});
  ASSERT_EQ(rows.size(), 2u);
  const auto plain = fit(d, spec, cfg);
  for (int t = 0; t < 2; ++t) {
    auto v = plain.pooled("mu_c_" + std::to_string(t));
    EXPECT_EQ(rows[t].arm, t);
    EXPECT_DOUBLE_EQ(rows[t].mean, mean(v));
    std::sort(v.begin(), v.end());
    EXPECT_DOUBLE_EQ(rows[t].q025, quantile_sorted(v, 0.025));
    EXPECT_DOUBLE_EQ(rows[t].q75, quantile_sorted(v, 0.75));
    EXPECT_LE(rows[t].q025, rows[t].q25);
    EXPECT_LE(rows[t].q75, rows[t].q975);
  }
  EXPECT_THROW(sensitivity_over_W(d, spec, cfg, {}), ConfigError);
  EXPECT_THROW(sensitivity_over_W(d, spec, cfg, {0.5}), ConfigError);
}

TEST(Sensitivity, FlagsNonConvergedCells) {
  const TrialData d = simulate_dataset(TruthParams::case_study(), 150, 5);
  McmcConfig cfg;
  cfg.n_iter = 400;
  cfg.n_burnin = 200;
  cfg.thin = 1;
  const auto rows = sensitivity_over_W(d, ModelSpec::case_study(), cfg, {10.0, 1e4}, {1.0001, 1e6});
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) EXPECT_FALSE(r.converged);
}

TEST(Sensitivity, DefaultGridShape) {
  EXPECT_EQ(default_W_grid(), (std::vector<double>{10, 100, 1000, 10000, 100000}));
}
