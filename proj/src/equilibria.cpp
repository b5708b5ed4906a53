#include "ddehopf/equilibria.hpp"

#include <cmath>

namespace ddehopf {

namespace {

double solve_bracketed(Expr const& g, double lo, double hi, double lam, double mu, RootOptions const& opts)
{
    auto value = [&](double y) { return eval_real(g, y, 0.0, lam, mu); };

    double glo = value(lo);
    double ghi = value(hi);
    if (glo == 0.0)
        return lo;
    if (ghi == 0.0)
        return hi;
    if (std::signbit(glo) == std::signbit(ghi))
        throw Error(ErrorKind::NoRootInBracket, "equilibrium residual has the same sign at both bracket ends ["
                                                    + std::to_string(lo) + ", " + std::to_string(hi) + "]")
            .with_value(glo);

    double y = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_iterations; ++it)
    {
        Jet const jg = eval_jet(g, Point{y, 0.0, lam, mu});
        double const gy = jg.value();
        double const dg = jg.coeff(1, 0, 0, 0);
        if (gy == 0.0)
            return y;
        if (std::signbit(gy) == std::signbit(glo))
        {
            lo = y;
            glo = gy;
        }
        else
            hi = y;

        double next = (dg != 0.0) ? y - gy / dg : lo - 1.0;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        double const step = next - y;
        y = next;
        if (std::abs(step) < opts.step_tolerance * std::max(1.0, std::abs(y)))
        {
            double const r = value(y);
            if (std::abs(r) < opts.residual_tolerance)
                return y;
        }
        if (hi - lo < 4e-16 * std::max(1.0, std::abs(y)))
            break;
    }
    double const r = value(y);
    if (std::abs(r) < opts.residual_tolerance)
        return y;
    throw Error(ErrorKind::NonConvergence, "equilibrium root finder did not converge").with_value(r);
}

} // namespace

double equilibrium_residual(ModelSpec const& m, double y, double lam, double mu)
{
    if (auto const* im = std::get_if<ImplicitEquilibrium>(&m.equilibrium()))
        return eval_real(im->residual, y, 0.0, lam, mu);
    return eval_real(m.rhs(), y, y, lam, mu);
}

double solve_equilibrium(ModelSpec const& m, double lam, double mu, RootOptions const& opts)
{
    double y = 0.0;
    if (auto const* ex = std::get_if<ExplicitEquilibrium>(&m.equilibrium()))
    {
        y = eval_real(ex->value, 0.0, 0.0, lam, mu);
    }
    else
    {
        auto const& im = std::get<ImplicitEquilibrium>(m.equilibrium());
        double const lo = eval_real(im.lower, 0.0, 0.0, lam, mu);
        double const hi = eval_real(im.upper, 0.0, 0.0, lam, mu);
        if (!(lo < hi))
            throw Error(ErrorKind::NoRootInBracket, "empty equilibrium bracket [" + std::to_string(lo) + ", "
                                                        + std::to_string(hi) + "]")
                .with_value(hi - lo);
        y = solve_bracketed(im.residual, lo, hi, lam, mu, opts);
    }

    double const r = eval_real(m.rhs(), y, y, lam, mu);
    if (!(std::abs(r) <= 1e-9))
        throw Error(ErrorKind::NotAnEquilibrium, "right-hand side does not vanish at the equilibrium").with_value(r);
    return y;
}

LinearizationPoint linearize(ModelSpec const& m, double lam, double mu)
{
    double const ybar = solve_equilibrium(m, lam, mu);

    // ybar(lam + dl, mu + dm) to second order, as a jet in the parameter slots only
    Jet ybar_jet{ybar};
    if (auto const* ex = std::get_if<ExplicitEquilibrium>(&m.equilibrium()))
    {
        Jet const e = eval_jet(ex->value, Point{0.0, 0.0, lam, mu});
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; a + b <= 2; ++b)
                ybar_jet.set({0, 0, a, b}, e.coeff(0, 0, a, b));
    }
    else
    {
        auto const& im = std::get<ImplicitEquilibrium>(m.equilibrium());
        Jet const g = eval_jet(im.residual, Point{ybar, 0.0, lam, mu});
        double const gy = g.coeff(1, 0, 0, 0);
        if (std::abs(gy) < 1e-13)
            throw Error(ErrorKind::SingularImplicit, "d(residual)/dy vanishes at the equilibrium").with_value(gy);

        double const gyy = 2.0 * g.coeff(2, 0, 0, 0);
        double const gl = g.coeff(0, 0, 1, 0);
        double const gm = g.coeff(0, 0, 0, 1);
        double const gyl = g.coeff(1, 0, 1, 0);
        double const gym = g.coeff(1, 0, 0, 1);
        double const gll = 2.0 * g.coeff(0, 0, 2, 0);
        double const glm = g.coeff(0, 0, 1, 1);
        double const gmm = 2.0 * g.coeff(0, 0, 0, 2);

        double const yl = -gl / gy;
        double const ym = -gm / gy;
        double const yll = -(gyy * yl * yl + 2.0 * gyl * yl + gll) / gy;
        double const ylm = -(gyy * yl * ym + gyl * ym + gym * yl + glm) / gy;
        double const ymm = -(gyy * ym * ym + 2.0 * gym * ym + gmm) / gy;

        ybar_jet.set({0, 0, 1, 0}, yl);
        ybar_jet.set({0, 0, 0, 1}, ym);
        ybar_jet.set({0, 0, 2, 0}, 0.5 * yll);
        ybar_jet.set({0, 0, 1, 1}, ylm);
        ybar_jet.set({0, 0, 0, 2}, 0.5 * ymm);
    }

    // rhs(Y + ex, Y + exd, lam + dl, mu + dm); coefficient (1,0,a,b) is the (a,b) Taylor coefficient of alpha
    JetPoint at;
    at.x = ybar_jet + Jet::variable(Var::X, 0.0);
    at.xd = ybar_jet + Jet::variable(Var::Xd, 0.0);
    at.lam = Jet::variable(Var::Lam, lam);
    at.mu = Jet::variable(Var::Mu, mu);
    Jet const f = eval_jet(m.rhs(), at);

    LinearizationPoint lp;
    lp.lam = lam;
    lp.mu = mu;
    lp.ybar = ybar;
    lp.ybar_lam = ybar_jet.coeff(0, 0, 1, 0);
    lp.ybar_mu = ybar_jet.coeff(0, 0, 0, 1);
    lp.alpha = f.coeff(1, 0, 0, 0);
    lp.beta = f.coeff(0, 1, 0, 0);
    lp.alpha_lam = f.coeff(1, 0, 1, 0);
    lp.beta_lam = f.coeff(0, 1, 1, 0);
    lp.alpha_mu = f.coeff(1, 0, 0, 1);
    lp.beta_mu = f.coeff(0, 1, 0, 1);
    lp.alpha_lamlam = 2.0 * f.coeff(1, 0, 2, 0);
    lp.beta_lamlam = 2.0 * f.coeff(0, 1, 2, 0);
    return lp;
}

ModelSpec sis_inverse(double tau)
{
    return ModelSpec{"sis-inverse", parse("-x + lam/(1 + mu*xd)*x*(1 - x)"), tau,
                     ExplicitEquilibrium{parse("(lam - 1)/(mu + lam)")}};
}

ModelSpec sis_exp(double tau)
{
    return ModelSpec{"sis-exp", parse("-x + lam*exp(-mu*xd)*x*(1 - x)"), tau,
                     ImplicitEquilibrium{parse("exp(mu*x) - lam*(1 - x)"), parse("1e-12"),
                                         parse("1 - 1/lam - 1e-12")}};
}

std::vector<ModelSpec> builtin_models() { return {sis_inverse(), sis_exp()}; }

ModelSpec builtin_model(std::string_view name)
{
    if (name == "sis-inverse")
        return sis_inverse();
    if (name == "sis-exp")
        return sis_exp();
    throw Error(ErrorKind::InvalidConfig,
                "unknown built-in model '" + std::string{name} + "' (available: sis-inverse, sis-exp)");
}

} // namespace ddehopf
