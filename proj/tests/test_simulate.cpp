#include "ddehopf/equilibria.hpp"
#include "ddehopf/simulate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ddehopf;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try
    {
        fn();
    }
    catch (Error const& e)
    {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

Trajectory samples(double h, std::size_t n, auto&& f)
{
    Trajectory t{0.0, h, {}};
    for (std::size_t i = 0; i < n; ++i)
        t.y.push_back(f(static_cast<double>(i) * h));
    return t;
}

SimConfig quick(double transient, double record)
{
    SimConfig c;
    c.t_transient = transient;
    c.t_record = record;
    c.settle_max = 0.0;
    return c;
}

} // namespace

TEST(Integrator, PiecewisePolynomialSolution)
{
    // x' = -x(t - 1), x = 1 on [-1, 0]: x = 1 - t on [0, 1], 1 - t + (t - 1)^2 / 2 on [1, 2],
    // and 1 - t + (t - 1)^2 / 2 - (t - 2)^3 / 6 on [2, 3]; RK4 is exact for these cubics
    ModelSpec const m{"lag", parse("-xd"), 1.0, ExplicitEquilibrium{parse("0")}};
    Integrator integ{m, 0.0, 0.0, 0.02, 1.0};
    integ.advance(50);
    EXPECT_NEAR(integ.state(), 0.0, 1e-13);
    integ.advance(50);
    EXPECT_NEAR(integ.state(), -0.5, 1e-13);
    integ.advance(50);
    EXPECT_NEAR(integ.time(), 3.0, 1e-12);
    EXPECT_NEAR(integ.state(), 1.0 - 3.0 + 2.0 - 1.0 / 6.0, 1e-12);
}

TEST(Integrator, FourthOrderOnSmoothProblem)
{
    // x' = -x + 0.5 sin(xd): compare against a much finer reference
    ModelSpec const m{"smooth", parse("-x + 0.5*sin(xd)"), 1.0, ExplicitEquilibrium{parse("0")}};
    auto at = [&](double h) {
        Integrator integ{m, 0.0, 0.0, h, 0.8};
        integ.advance(std::lround(5.0 / h));
        return integ.state();
    };
    double const ref = at(1.0 / 800);
    double const e1 = std::abs(at(1.0 / 50) - ref);
    double const e2 = std::abs(at(1.0 / 100) - ref);
    EXPECT_LT(e1, 1e-7);
    EXPECT_GT(e1 / e2, 10.0);
}

TEST(Integrator, BlowUp)
{
    ModelSpec const m{"growth", parse("x"), 1.0, ExplicitEquilibrium{parse("0")}};
    Integrator integ{m, 0.0, 0.0, 0.02, 1.0};
    EXPECT_EQ(kind_of([&] { integ.advance(100000); }), ErrorKind::BlowUp);
}

TEST(SimConfig, Validation)
{
    SimConfig c;
    EXPECT_EQ(c.steps_per_delay(10.0), 200);
    c.step = 0.3;
    EXPECT_EQ(kind_of([&] { c.validate(10.0); }), ErrorKind::InvalidConfig);
    c.step = 0.5;
    EXPECT_EQ(kind_of([&] { c.validate(10.0); }), ErrorKind::InvalidConfig);
    c.step = 0.1;
    c.validate(10.0);
    c.t_record = 400.0;
    EXPECT_EQ(kind_of([&] { c.validate(10.0); }), ErrorKind::InvalidConfig);
    c.validate(10.0, 0.5);
    EXPECT_EQ(kind_of([&] { c.validate(10.0, 0.25); }), ErrorKind::InvalidConfig);
}

TEST(Simulate, EquilibriumHistoryIsAFixedPoint)
{
    for (auto [m, lam, mu] : {std::tuple{sis_inverse(), 1.784, 2.7}, std::tuple{sis_exp(), 2.14, 1.662},
                              std::tuple{sis_inverse(), 1.5, 2.61}})
    {
        auto cfg = quick(100.0, 500.0);
        cfg.history = EquilibriumHistory{0.0};
        double const y = solve_equilibrium(m, lam, mu);
        auto const t = integrate(m, lam, mu, cfg);
        for (double v : t.y)
            ASSERT_NEAR(v, y, 1e-9) << m.name();
        auto const p = simulate_point(m, lam, mu, cfg);
        EXPECT_EQ(p.summary.outcome, Outcome::Equilibrium);
    }
}

TEST(Simulate, TrajectoryCoversTheRecordWindow)
{
    auto const t = integrate(sis_inverse(), 1.5, 2.61, quick(100.0, 500.0));
    EXPECT_NEAR(t.t0, 100.0, 1e-9);
    EXPECT_EQ(t.y.size(), 10001u);
    EXPECT_NEAR(t.time(t.y.size() - 1), 600.0, 1e-9);
}

TEST(Classify, ConstantSamples)
{
    auto const s = classify_attractor(samples(0.05, 1000, [](double) { return 0.42; }), 1e-6);
    EXPECT_EQ(s.outcome, Outcome::Equilibrium);
    EXPECT_NEAR(s.y_eq, 0.42, 1e-12);
    EXPECT_FALSE(s.period.has_value());
}

TEST(Classify, SyntheticSine)
{
    auto const s = classify_attractor(samples(0.05, 10001, [](double t) { return std::sin(2 * std::numbers::pi * t / 25); }),
                                      1e-6);
    EXPECT_EQ(s.outcome, Outcome::Oscillation);
    ASSERT_TRUE(s.period.has_value());
    EXPECT_NEAR(*s.period, 25.0, 0.05);
    EXPECT_LE(s.y_min, s.y_max);
    EXPECT_NEAR(s.amplitude(), 2.0, 1e-3);
}

TEST(Classify, TooFewCrossings)
{
    auto const window = samples(0.05, 400, [](double t) { return std::sin(2 * std::numbers::pi * t / 25); });
    EXPECT_EQ(kind_of([&] { classify_attractor(window, 1e-6); }), ErrorKind::Unclassifiable);
    EXPECT_EQ(kind_of([] { classify_attractor(Trajectory{0.0, 0.05, {1.0}}, 1e-6); }), ErrorKind::PreconditionFailed);
}

TEST(Simulate, SisExpOscillatesInsideBubble)
{
    auto const p = simulate_point(sis_exp(), 2.14, 1.662, SimConfig{});
    ASSERT_EQ(p.summary.outcome, Outcome::Oscillation);
    ASSERT_TRUE(p.summary.period.has_value());
    EXPECT_NEAR(*p.summary.period, 25.0, 1.0);
    double const y = solve_equilibrium(sis_exp(), 2.14, 1.662);
    EXPECT_LT(p.summary.y_min, y);
    EXPECT_GT(p.summary.y_max, y);
}

TEST(Simulate, SisInverseSettlesOutsideBubble)
{
    for (double p : {2.61, 2.7})
    {
        auto const r = simulate_point(sis_inverse(), 1.5, p, SimConfig{});
        ASSERT_EQ(r.summary.outcome, Outcome::Equilibrium) << p;
        EXPECT_NEAR(r.summary.y_eq, solve_equilibrium(sis_inverse(), 1.5, p), 1e-6);
    }
}

TEST(Simulate, StepHalvingChangesExtremaLittle)
{
    for (auto [m, lam, mu] : {std::tuple{sis_inverse(), 1.784, 2.7}, std::tuple{sis_exp(), 2.14, 1.662}})
    {
        auto coarse = quick(2000.0, 500.0);
        auto fine = coarse;
        fine.step = coarse.step / 2;
        auto const a = simulate_point(m, lam, mu, coarse).summary;
        auto const b = simulate_point(m, lam, mu, fine).summary;
        ASSERT_EQ(a.outcome, Outcome::Oscillation) << m.name();
        ASSERT_EQ(b.outcome, Outcome::Oscillation) << m.name();
        EXPECT_LT(std::abs(a.y_min - b.y_min), 1e-4) << m.name();
        EXPECT_LT(std::abs(a.y_max - b.y_max), 1e-4) << m.name();
    }
}

TEST(Sweep, DeterministicAcrossWorkerCounts)
{
    auto const grid = uniform_grid(1.70, 1.86, 0.02);
    auto const cfg = quick(500.0, 500.0);
    auto const a = sweep(sis_inverse(), 2.7, grid, cfg, 1);
    auto const b = sweep(sis_inverse(), 2.7, grid, cfg, 3);
    ASSERT_EQ(a.size(), grid.size());
    ASSERT_EQ(b.size(), grid.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].lam, grid[i]);
        EXPECT_EQ(a[i].summary.outcome, b[i].summary.outcome);
        EXPECT_EQ(a[i].summary.y_min, b[i].summary.y_min);
        EXPECT_EQ(a[i].summary.y_max, b[i].summary.y_max);
        EXPECT_EQ(a[i].summary.y_eq, b[i].summary.y_eq);
        EXPECT_EQ(a[i].summary.period, b[i].summary.period);
    }
}

TEST(Sweep, PerPointErrorsAreRecorded)
{
    std::vector<double> const grid{0.5, 2.0};
    auto const r = sweep(sis_exp(), 1.0, grid, quick(100.0, 500.0), 2);
    EXPECT_EQ(r[0].summary.outcome, Outcome::Error);
    EXPECT_FALSE(r[0].error.empty());
    EXPECT_NE(r[1].summary.outcome, Outcome::Error);
    EXPECT_EQ(summarize(r).errors, 1u);
}

TEST(Sweep, GridPreconditions)
{
    std::vector<double> const unsorted{2.0, 1.0};
    EXPECT_EQ(kind_of([&] { sweep(sis_exp(), 1.0, unsorted, SimConfig{}); }), ErrorKind::PreconditionFailed);
    EXPECT_EQ(kind_of([] { sweep(sis_exp(), 1.0, std::vector<double>{}, SimConfig{}); }),
              ErrorKind::PreconditionFailed);
}

TEST(Sweep, UniformGrid)
{
    auto const g = uniform_grid(1.6, 2.0, 0.01);
    ASSERT_EQ(g.size(), 41u);
    EXPECT_DOUBLE_EQ(g.front(), 1.6);
    EXPECT_NEAR(g.back(), 2.0, 1e-12);
    EXPECT_EQ(uniform_grid(0.0, 0.95, 0.1).size(), 10u);
}

TEST(Sweep, SummaryPicksLongestRun)
{
    auto rec = [](double lam, Outcome o) {
        SweepRecord r;
        r.lam = lam;
        r.summary.outcome = o;
        return r;
    };
    using enum Outcome;
    std::vector<SweepRecord> const rs{rec(1.0, Equilibrium), rec(1.1, Oscillation), rec(1.2, Equilibrium),
                                      rec(1.3, Oscillation), rec(1.4, Oscillation), rec(1.5, Oscillation),
                                      rec(1.6, Equilibrium)};
    auto const s = summarize(rs);
    EXPECT_TRUE(s.bubble);
    EXPECT_NEAR(s.width, 0.3, 1e-12);
    EXPECT_DOUBLE_EQ(s.lam_lo, 1.3);
    EXPECT_DOUBLE_EQ(s.lam_hi, 1.5);

    std::vector<SweepRecord> const none{rec(1.0, Equilibrium), rec(1.1, Equilibrium)};
    EXPECT_FALSE(summarize(none).bubble);
    EXPECT_EQ(summarize(none).width, 0.0);
}
