#pragma once

#include "ddehopf/expr.hpp"
#include "ddehopf/jet.hpp"

#include <string>
#include <variant>

namespace ddehopf {

/// Equilibrium given in closed form as an expression in (lam, mu).
struct ExplicitEquilibrium
{
    Expr value;
};

/// Equilibrium defined as the root of residual(x, lam, mu) inside [lower, upper];
/// the bracket ends are expressions in (lam, mu).
struct ImplicitEquilibrium
{
    Expr residual;
    Expr lower;
    Expr upper;
};

using EquilibriumDef = std::variant<ExplicitEquilibrium, ImplicitEquilibrium>;

/// Scalar DDE x'(t) = rhs(x(t), x(t - tau), lam, mu) with its equilibrium branch.
class ModelSpec
{
public:
    /// Throws Error{InvalidModel} unless tau > 0 and the equilibrium definition uses the right variables.
    ModelSpec(std::string name, Expr rhs, double tau, EquilibriumDef equilibrium);

    [[nodiscard]] std::string const& name() const noexcept { return name_; }
    [[nodiscard]] Expr const& rhs() const noexcept { return rhs_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] EquilibriumDef const& equilibrium() const noexcept { return equilibrium_; }

    [[nodiscard]] ModelSpec with_tau(double tau) const;

private:
    std::string name_;
    Expr rhs_;
    double tau_;
    EquilibriumDef equilibrium_;
};

/// Equilibrium and linear coefficients of the model at one parameter point, with the parameter
/// derivatives the tangency and normal-form coefficients consume.
struct LinearizationPoint
{
    double lam = 0.0;
    double mu = 0.0;
    double ybar = 0.0;
    double ybar_lam = 0.0;
    double ybar_mu = 0.0;

    double alpha = 0.0;
    double beta = 0.0;
    double alpha_lam = 0.0;
    double beta_lam = 0.0;
    double alpha_mu = 0.0;
    double beta_mu = 0.0;
    double alpha_lamlam = 0.0;
    double beta_lamlam = 0.0;
};

/// Quadratic and cubic Taylor coefficients f(j,k) of the nonlinearity F(x, xd) at an equilibrium:
///   F = f20 x^2 + f11 x xd + f02 xd^2 + f30 x^3 + f21 x^2 xd + f12 x xd^2 + f03 xd^3 + O(|x|^4)
struct TaylorTable
{
    double f20 = 0.0;
    double f11 = 0.0;
    double f02 = 0.0;
    double f30 = 0.0;
    double f21 = 0.0;
    double f12 = 0.0;
    double f03 = 0.0;

    /// Coefficient of x^j xd^k for 2 <= j + k <= 3.
    [[nodiscard]] double at(int j, int k) const;
    double& at(int j, int k);

    friend TaylorTable operator*(double s, TaylorTable t) noexcept;
    friend bool operator==(TaylorTable const&, TaylorTable const&) = default;
};

/// Taylor coefficients of x -> rhs(ybar + x, ybar + xd, lam, mu) with the linear part removed.
/// Throws Error{InconsistentLinearization} when the extracted linear part disagrees with `at` beyond 1e-10.
TaylorTable taylor_coeffs(ModelSpec const& m, LinearizationPoint const& at);

} // namespace ddehopf
