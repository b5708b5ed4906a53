#pragma once

#include "ddehopf/model.hpp"

#include <complex>
#include <span>
#include <vector>

namespace ddehopf {

using Complex = std::complex<double>;

/// A point (alpha, beta) on the Hopf curve for delay tau, where xi = i omega is a characteristic root.
struct HopfPoint
{
    double alpha = 0.0;
    double beta = 0.0;
    double omega = 0.0;
    double tau = 0.0;
};

struct StabilityReport
{
    double rightmost_real_part = 0.0;
    std::vector<double> imaginary_axis_roots; ///< omega > 0 of roots within the axis threshold, ascending
    std::vector<Complex> roots;               ///< every distinct root found with Im >= 0, by descending real part
    bool verified_hypothesis1 = false;
};

/// Characteristic function xi - alpha - beta exp(-xi tau).
Complex char_eval(double alpha, double beta, double tau, Complex xi) noexcept;

/// Hopf point parametrized by omega: beta = -omega/sin(tau omega), alpha = -beta cos(tau omega).
/// Throws SingularParametrization when sin(tau omega) vanishes.
HopfPoint hopf_point(double tau, double omega);

/// hopf_point over a grid. Throws on the first singular omega.
std::vector<HopfPoint> hopf_curve(double tau, std::span<double const> omega_grid);

/// omega = sqrt(beta^2 - alpha^2) when (alpha, beta) lies on the Hopf curve.
/// Throws PreconditionFailed for beta^2 <= alpha^2 and NotOnCurve when |Delta(i omega)| exceeds `tolerance`.
double find_imaginary_root(double alpha, double beta, double tau, double tolerance = 1e-9);

/// Newton scan from a structured grid: real parts in [-20/tau, 5], imaginary parts at (k + 1/2) pi / tau
/// for k < count, plus the real axis. Throws EmptyResult when no seed converges.
StabilityReport rightmost_roots(double alpha, double beta, double tau, int count = 8);

/// Signed curvature of the Hopf curve at p.
/// Throws SingularCurvature on a vanishing denominator.
double curvature_hopf(HopfPoint const& p);

/// Signed curvature of the path lam -> (alpha(lam), beta(lam)) at lp.
/// Throws SingularCurvature when beta_lam or the denominator vanishes.
double curvature_path(LinearizationPoint const& lp, double tau);

} // namespace ddehopf
