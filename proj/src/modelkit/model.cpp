#include "ddehopf/model.hpp"

#include <cmath>

namespace ddehopf {

namespace {

void require_free_of(Expr const& e, std::initializer_list<Var> vars, char const* what)
{
    for (auto v : vars)
        if (e.depends_on(v))
            throw Error(ErrorKind::InvalidModel,
                        std::string{what} + " must not depend on '" + std::string{to_string(v)} + "'");
}

} // namespace

ModelSpec::ModelSpec(std::string name, Expr rhs, double tau, EquilibriumDef equilibrium)
    : name_(std::move(name)), rhs_(std::move(rhs)), tau_(tau), equilibrium_(std::move(equilibrium))
{
    if (!(tau_ > 0.0) || !std::isfinite(tau_))
        throw Error(ErrorKind::InvalidModel, "tau must be a positive finite number").with_value(tau_);
    if (rhs_.empty())
        throw Error(ErrorKind::InvalidModel, "model has no right-hand side");

    if (auto const* ex = std::get_if<ExplicitEquilibrium>(&equilibrium_))
    {
        if (ex->value.empty())
            throw Error(ErrorKind::InvalidModel, "explicit equilibrium is empty");
        require_free_of(ex->value, {Var::X, Var::Xd}, "explicit equilibrium");
    }
    else
    {
        auto const& im = std::get<ImplicitEquilibrium>(equilibrium_);
        if (im.residual.empty() || im.lower.empty() || im.upper.empty())
            throw Error(ErrorKind::InvalidModel, "implicit equilibrium needs residual, lower and upper");
        if (!im.residual.depends_on(Var::X))
            throw Error(ErrorKind::InvalidModel, "implicit equilibrium residual must depend on 'x'");
        require_free_of(im.residual, {Var::Xd}, "equilibrium residual");
        require_free_of(im.lower, {Var::X, Var::Xd}, "bracket lower end");
        require_free_of(im.upper, {Var::X, Var::Xd}, "bracket upper end");
    }
}

ModelSpec ModelSpec::with_tau(double tau) const { return ModelSpec{name_, rhs_, tau, equilibrium_}; }

double TaylorTable::at(int j, int k) const { return const_cast<TaylorTable*>(this)->at(j, k); }

double& TaylorTable::at(int j, int k)
{
    switch (j * 10 + k)
    {
    case 20: return f20;
    case 11: return f11;
    case 2: return f02;
    case 30: return f30;
    case 21: return f21;
    case 12: return f12;
    case 3: return f03;
    default: throw Error(ErrorKind::PreconditionFailed, "Taylor table holds orders 2 and 3 only");
    }
}

TaylorTable operator*(double s, TaylorTable t) noexcept
{
    t.f20 *= s;
    t.f11 *= s;
    t.f02 *= s;
    t.f30 *= s;
    t.f21 *= s;
    t.f12 *= s;
    t.f03 *= s;
    return t;
}

TaylorTable taylor_coeffs(ModelSpec const& m, LinearizationPoint const& at)
{
    Jet const jet = eval_jet(m.rhs(), Point{at.ybar, at.ybar, at.lam, at.mu});

    auto check = [](double got, double want, char const* name) {
        if (std::abs(got - want) > 1e-10 * std::max(1.0, std::abs(want)))
            throw Error(ErrorKind::InconsistentLinearization,
                        std::string{name} + " from the expansion disagrees with the linearization point")
                .with_value(got - want);
    };
    check(jet.coeff(1, 0, 0, 0), at.alpha, "alpha");
    check(jet.coeff(0, 1, 0, 0), at.beta, "beta");

    TaylorTable t;
    for (int j = 0; j <= 3; ++j)
        for (int k = 0; j + k <= 3; ++k)
            if (j + k >= 2)
                t.at(j, k) = jet.coeff(j, k, 0, 0);
    return t;
}

} // namespace ddehopf
