#pragma once

#include "ddehopf/spectrum.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace ddehopf {

struct TangencyResiduals
{
    double r1 = 0.0; ///< alpha + beta cos(tau sqrt(beta^2 - alpha^2))
    double r2 = 0.0; ///< beta alpha_lam (1 - alpha tau) + beta_lam (tau beta^2 - alpha)
};

/// Throws PreconditionFailed when beta^2 <= alpha^2.
TangencyResiduals tangency_residuals(LinearizationPoint const& lp, double tau);

struct DegenerateSearchOptions
{
    double tolerance = 1e-9;      ///< required max(|r1|, |r2|) at the result
    double fd_step = 1e-6;        ///< relative central-difference step for the Jacobian
    int max_iterations = 50;
};

struct DegeneratePoint
{
    double lam = 0.0;
    double mu = 0.0;
    LinearizationPoint point;
    double omega = 0.0;
    TangencyResiduals residuals;
    int iterations = 0;
};

/// 2D Newton on (r1, r2) with a finite-difference Jacobian and backtracking.
/// Throws NonConvergence, or LeftDomain when an iterate leaves beta^2 > alpha^2 or the equilibrium domain.
DegeneratePoint find_degenerate_point(ModelSpec const& m, double lam_guess, double mu_guess,
                                      DegenerateSearchOptions const& opts = {});

/// Coarse initial guess: for each lam on a uniform grid, locate the r1 = 0 crossing in mu by bisection,
/// then return the midpoint of the first lam interval over which r2 changes sign along that curve.
std::optional<std::array<double, 2>> scan_degenerate_guess(ModelSpec const& m, double lam_lo, double lam_hi,
                                                          double mu_lo, double mu_hi, int points = 40);

/// 1/((1 - alpha tau) + i omega tau).
Complex psi1_zero(double alpha, double beta, double tau, double omega);

struct Sigma
{
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;
    double s5 = 0.0;
};

/// Curvature invariant G(alpha, beta, tau) built from the path's second derivatives.
double curvature_gap(LinearizationPoint const& lp, double tau);

/// Linear normal-form coefficients. s1 and s4 use the closed forms (s4 through G); s2 and s3 are imaginary parts
/// of psi1 L_mu and psi1 L_lam; s5 is Im of half xi_lamlam. Throws SingularDenominator naming the factor.
Sigma sigma_coefficients(LinearizationPoint const& lp, double tau, double omega);

/// Half of xi_lamlam assembled from operator evaluations on the eigenfunction; its real part is s4.
Complex sigma4_via_xi(LinearizationPoint const& lp, double tau, double omega);

/// First Lyapunov coefficient from the lengthy closed form in (alpha, beta, omega, tau) and the Taylor table.
/// Throws NonDegeneracyViolated when alpha + beta or 4 alpha - 5 beta vanishes.
double lyapunov_k1_closed(double alpha, double beta, double omega, double tau, TaylorTable const& f);

/// Monomial coefficients of the cubic Taylor polynomial after substituting x -> x1 + x2 + x3 + x4 and
/// xd -> x1 e^{-i omega tau} + x2 e^{i omega tau} + x3 + x4 e^{-2 i omega tau}.
struct KdefCoefficients
{
    Complex b2100;
    Complex b1100;
    Complex b1010;
    Complex b2000;
    Complex b0101;
};

KdefCoefficients kdef_coefficients(double omega, double tau, TaylorTable const& f);

/// B2100 - B1100 B1010 / L0(1) + B2000 B0101 / (2 i omega - L0(e^{2 i omega theta})), before the psi1 factor.
/// Throws NonDegeneracyViolated when either denominator vanishes.
Complex kdef_bracket(double alpha, double beta, double omega, double tau, TaylorTable const& f);

/// Re[psi1_zero * kdef_bracket].
double lyapunov_k1_general(double alpha, double beta, double omega, double tau, TaylorTable const& f);

enum class DiagramClass
{
    PlusEtaNegative,
    PlusEtaZero,
    PlusEtaPositive,
    MinusEtaNegative,
    MinusEtaZero,
    MinusEtaPositive,
};

std::string_view to_string(DiagramClass c) noexcept;

DiagramClass diagram_class(int epsilon, double eta) noexcept;

struct Classification
{
    int epsilon = 0;              ///< sgn(s4 / K1)
    double eta_slope = 0.0;       ///< eta = eta_slope (mu - mu*)
    double bubble_coeff = 0.0;    ///< 2 sqrt|s1 / s4|
    DiagramClass below{};         ///< diagram for mu < mu*
    DiagramClass above{};         ///< diagram for mu > mu*
    int bubble_side = 0;          ///< +1 bubble for mu > mu*, -1 for mu < mu*, 0 never

    [[nodiscard]] double eta(double dmu) const noexcept { return eta_slope * dmu; }
    [[nodiscard]] bool has_bubble(double dmu) const noexcept;
    /// 2 sqrt|s1 dmu / s4| when a bubble exists at this offset, else 0.
    [[nodiscard]] double bubble_width(double dmu) const noexcept;
};

inline constexpr double kSigmaZeroTolerance = 1e-10;
inline constexpr double kK1ZeroTolerance = 1e-8;

/// Throws DegenerateBeyondScope naming the vanishing quantity.
Classification classify(double sigma1, double sigma4, double k1);

struct DegeneracyReport
{
    std::string model;
    double tau = 0.0;
    double lam_star = 0.0;
    double mu_star = 0.0;
    LinearizationPoint point;
    double omega_star = 0.0;
    TangencyResiduals residuals;
    int iterations = 0;
    Complex psi10;
    Sigma sigma;
    Complex half_xi_lamlam;
    double G_value = 0.0;
    TaylorTable taylor;
    double K1 = 0.0;          ///< closed form, used for classification
    double K1_general = 0.0;  ///< operator form with psi1_zero
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    StabilityReport stability;
    std::optional<Classification> classification;
    std::string flagged;      ///< quantity that prevented classification, empty when classified
};

/// Full pipeline: degenerate point, spectrum check, coefficients, both K1 paths, classification.
/// A vanishing s1, s4 or K1 is recorded in `flagged` instead of throwing.
DegeneracyReport analyze(ModelSpec const& m, double lam_guess, double mu_guess,
                         DegenerateSearchOptions const& opts = {});

} // namespace ddehopf
