#include "ddehopf/equilibria.hpp"

#include <gtest/gtest.h>

#include <cmath>

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

// sis-inverse written with an implicit equilibrium so the generic path can be compared with the closed form
ModelSpec sis_inverse_implicit()
{
    auto const explicit_model = sis_inverse();
    return ModelSpec{"sis-inverse-implicit", explicit_model.rhs(), explicit_model.tau(),
                     ImplicitEquilibrium{parse("lam*(1 - x) - 1 - mu*x"), parse("0"), parse("1 - 1/lam")}};
}

} // namespace

TEST(SolveEquilibrium, SisInverseClosedForm)
{
    EXPECT_NEAR(solve_equilibrium(sis_inverse(), 2.0, 1.0), 1.0 / 3.0, 1e-15);
}

TEST(SolveEquilibrium, ExplicitZero)
{
    ModelSpec const m{"zero", parse("-x + lam*xd"), 1.0, ExplicitEquilibrium{parse("0")}};
    for (double lam : {-2.0, 0.0, 0.5})
        EXPECT_EQ(solve_equilibrium(m, lam, 3.0), 0.0);
}

TEST(SolveEquilibrium, SisExpRootInsideBracket)
{
    auto const m = sis_exp();
    for (double R : {1.2, 2.1474, 3.5})
        for (double p : {0.5, 1.6617, 3.0})
        {
            double const y = solve_equilibrium(m, R, p);
            EXPECT_GT(y, 0.0);
            EXPECT_LT(y, 1.0 - 1.0 / R);
            EXPECT_LT(std::abs(equilibrium_residual(m, y, R, p)), 1e-12);
            EXPECT_LT(std::abs(eval_real(m.rhs(), y, y, R, p)), 1e-12);
        }
}

TEST(SolveEquilibrium, SisExpAtDegeneratePoint)
{
    EXPECT_NEAR(solve_equilibrium(sis_exp(), 2.1474, 1.6617), 0.2703, 5e-4);
}

TEST(SolveEquilibrium, NoSignChangeIsAnError)
{
    // for R0 < 1 the bracket (1e-12, 1 - 1/R0 - 1e-12) is empty
    EXPECT_EQ(kind_of([] { solve_equilibrium(sis_exp(), 0.8, 1.0); }), ErrorKind::NoRootInBracket);
    ModelSpec const m{"shifted", parse("-x + 2"), 1.0, ImplicitEquilibrium{parse("x - 2"), parse("3"), parse("4")}};
    EXPECT_EQ(kind_of([&] { solve_equilibrium(m, 0.0, 0.0); }), ErrorKind::NoRootInBracket);
}

TEST(SolveEquilibrium, ResidualThatIsNotAnEquilibrium)
{
    ModelSpec const m{"wrong", parse("-x + 1"), 1.0, ImplicitEquilibrium{parse("x - 0.5"), parse("0"), parse("1")}};
    EXPECT_EQ(kind_of([&] { solve_equilibrium(m, 0.0, 0.0); }), ErrorKind::NotAnEquilibrium);
}

TEST(Linearize, SisInverseClosedForms)
{
    auto const lp = linearize(sis_inverse(), 2.0, 1.0);
    EXPECT_NEAR(lp.alpha, -0.5, 1e-15);
    EXPECT_NEAR(lp.beta, -0.25, 1e-15);

    // derivatives of alpha = (1 - R)/(1 + p) and beta = (1 - R) p / (R (1 + p))
    for (auto [R, p] : {std::pair{1.784, 2.613}, std::pair{1.3, 0.7}, std::pair{2.9, 4.1}})
    {
        auto const l = linearize(sis_inverse(), R, p);
        EXPECT_NEAR(l.alpha, (1 - R) / (1 + p), 1e-14);
        EXPECT_NEAR(l.beta, (1 - R) * p / (R * (1 + p)), 1e-14);
        EXPECT_NEAR(l.alpha_lam, -1 / (1 + p), 1e-14);
        EXPECT_NEAR(l.alpha_mu, (R - 1) / ((1 + p) * (1 + p)), 1e-14);
        EXPECT_NEAR(l.beta_lam, -p / (R * R * (1 + p)), 1e-14);
        EXPECT_NEAR(l.beta_mu, (1 - R) / (R * (1 + p) * (1 + p)), 1e-14);
        EXPECT_NEAR(l.alpha_lamlam, 0.0, 1e-14);
        EXPECT_NEAR(l.beta_lamlam, 2 * p / (R * R * R * (1 + p)), 1e-14);
        EXPECT_NEAR(l.ybar_lam, (p + 1) / ((p + R) * (p + R)), 1e-14);
    }
}

TEST(Linearize, SisInverseAtDegeneratePoint)
{
    auto const lp = linearize(sis_inverse(), 1.784, 2.613);
    EXPECT_NEAR(lp.alpha, -0.217, 5e-4);
    EXPECT_NEAR(lp.beta, -0.318, 5e-4);
}

TEST(Linearize, ImplicitPathReproducesClosedForm)
{
    auto const a = sis_inverse();
    auto const b = sis_inverse_implicit();
    for (double R : {1.4, 1.784, 2.5})
        for (double p : {0.8, 2.613, 4.0})
        {
            auto const x = linearize(a, R, p);
            auto const y = linearize(b, R, p);
            EXPECT_NEAR(x.ybar, y.ybar, 1e-10);
            EXPECT_NEAR(x.ybar_lam, y.ybar_lam, 1e-10);
            EXPECT_NEAR(x.ybar_mu, y.ybar_mu, 1e-10);
            EXPECT_NEAR(x.alpha, y.alpha, 1e-10);
            EXPECT_NEAR(x.beta, y.beta, 1e-10);
            EXPECT_NEAR(x.alpha_lam, y.alpha_lam, 1e-10);
            EXPECT_NEAR(x.beta_lam, y.beta_lam, 1e-10);
            EXPECT_NEAR(x.alpha_mu, y.alpha_mu, 1e-10);
            EXPECT_NEAR(x.beta_mu, y.beta_mu, 1e-10);
            EXPECT_NEAR(x.alpha_lamlam, y.alpha_lamlam, 1e-10);
            EXPECT_NEAR(x.beta_lamlam, y.beta_lamlam, 1e-10);
        }
}

TEST(Linearize, SisExpBetaLamClosedForm)
{
    for (auto [R, p] : {std::pair{2.1474, 1.6617}, std::pair{1.5, 0.5}, std::pair{3.0, 2.5}})
    {
        auto const lp = linearize(sis_exp(), R, p);
        double const y = lp.ybar;
        EXPECT_NEAR(lp.beta_lam, -p * (1 - y) / (R * (1 + p * (1 - y))), 1e-12);
    }
}

TEST(Linearize, ImplicitDerivativesMatchFiniteDifferences)
{
    // central differences with one Richardson step: h for first derivatives, a larger step for second differences
    auto fd1 = [](auto g, double x, double h) {
        auto d = [&](double s) { return (g(x + s) - g(x - s)) / (2 * s); };
        return (4 * d(h / 2) - d(h)) / 3;
    };
    auto fd2 = [](auto g, double x, double h) {
        double const g0 = g(x);
        auto d = [&](double s) { return (g(x + s) - 2 * g0 + g(x - s)) / (s * s); };
        return (4 * d(h / 2) - d(h)) / 3;
    };
    auto rel = [](double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-3); };

    struct Case
    {
        ModelSpec m;
        double lam_lo, lam_hi, mu_lo, mu_hi;
    };
    for (auto const& c : {Case{sis_inverse(), 1.5, 2.1, 2.2, 3.0}, Case{sis_exp(), 1.8, 2.6, 1.2, 2.2}})
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
            {
                double const lam = c.lam_lo + (c.lam_hi - c.lam_lo) * i / 4;
                double const mu = c.mu_lo + (c.mu_hi - c.mu_lo) * j / 4;
                auto const lp = linearize(c.m, lam, mu);
                auto at_lam = [&](double l) { return linearize(c.m, l, mu); };
                auto at_mu = [&](double u) { return linearize(c.m, lam, u); };
                EXPECT_LT(rel(lp.ybar_lam, fd1([&](double l) { return at_lam(l).ybar; }, lam, 1e-4)), 1e-5);
                EXPECT_LT(rel(lp.ybar_mu, fd1([&](double u) { return at_mu(u).ybar; }, mu, 1e-4)), 1e-5);
                EXPECT_LT(rel(lp.alpha_lam, fd1([&](double l) { return at_lam(l).alpha; }, lam, 1e-4)), 1e-5);
                EXPECT_LT(rel(lp.beta_lam, fd1([&](double l) { return at_lam(l).beta; }, lam, 1e-4)), 1e-5);
                EXPECT_LT(rel(lp.alpha_mu, fd1([&](double u) { return at_mu(u).alpha; }, mu, 1e-4)), 1e-5);
                EXPECT_LT(rel(lp.beta_mu, fd1([&](double u) { return at_mu(u).beta; }, mu, 1e-4)), 1e-5);
                EXPECT_LT(rel(lp.alpha_lamlam, fd2([&](double l) { return at_lam(l).alpha; }, lam, 1e-3)), 1e-5);
                EXPECT_LT(rel(lp.beta_lamlam, fd2([&](double l) { return at_lam(l).beta; }, lam, 1e-3)), 1e-5);
            }
}

TEST(Linearize, SisSignsForEndemicParameters)
{
    for (auto const& m : builtin_models())
        for (double R = 1.05; R < 5.0; R += 0.35)
            for (double p = 0.05; p < 6.0; p += 0.45)
            {
                auto const lp = linearize(m, R, p);
                EXPECT_LT(lp.alpha, 0.0) << m.name() << " " << R << " " << p;
                EXPECT_LE(lp.beta, 0.0) << m.name() << " " << R << " " << p;
                EXPECT_LT(std::abs(equilibrium_residual(m, lp.ybar, R, p)), 1e-12);
            }
}

TEST(Linearize, SingularImplicitEquation)
{
    ModelSpec const m{"flat", parse("-x^3"), 1.0, ImplicitEquilibrium{parse("x^3"), parse("-1"), parse("2")}};
    EXPECT_EQ(kind_of([&] { linearize(m, 0.0, 0.0); }), ErrorKind::SingularImplicit);
}

TEST(Builtins, Lookup)
{
    EXPECT_EQ(builtin_model("sis-inverse").name(), "sis-inverse");
    EXPECT_EQ(builtin_model("sis-exp").name(), "sis-exp");
    EXPECT_EQ(builtin_models().size(), 2u);
    EXPECT_EQ(kind_of([] { builtin_model("sis"); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(eval_real(sis_inverse().rhs(), 0.0, 0.0, 3.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(sis_exp().tau(), 10.0);
}
