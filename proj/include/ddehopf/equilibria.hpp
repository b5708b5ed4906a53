#pragma once

#include "ddehopf/model.hpp"

#include <string_view>
#include <vector>

namespace ddehopf {

/// Bracketed Newton with bisection fallback.
struct RootOptions
{
    double step_tolerance = 1e-13;
    double residual_tolerance = 1e-12;
    int max_iterations = 100;
};

/// Equilibrium ybar(lam, mu).
///
/// Explicit definitions are evaluated directly. Implicit ones are solved inside their bracket, which must
/// show a sign change (it is never widened). Throws NoRootInBracket, NonConvergence, or NotAnEquilibrium
/// when the right-hand side does not vanish at the result.
double solve_equilibrium(ModelSpec const& m, double lam, double mu, RootOptions const& opts = {});

/// Residual of the equilibrium equation: g(y, lam, mu) for implicit models, rhs(y, y, lam, mu) otherwise.
double equilibrium_residual(ModelSpec const& m, double y, double lam, double mu);

/// alpha = d rhs/dx and beta = d rhs/dxd at (ybar, ybar, lam, mu), with first and second parameter
/// derivatives taken through ybar(lam, mu) by second-order implicit differentiation.
/// Throws SingularImplicit when dg/dy vanishes at the root.
LinearizationPoint linearize(ModelSpec const& m, double lam, double mu);

/// SIS model with behavioral response h(y, p) = 1/(1 + p y); lam plays R0 and mu plays p.
ModelSpec sis_inverse(double tau = 10.0);

/// SIS model with behavioral response h(y, p) = exp(-p y); equilibrium is implicit.
ModelSpec sis_exp(double tau = 10.0);

std::vector<ModelSpec> builtin_models();

/// Looks up "sis-inverse" or "sis-exp". Throws Error{InvalidConfig} for other names.
ModelSpec builtin_model(std::string_view name);

} // namespace ddehopf
