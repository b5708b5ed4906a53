#include "ddehopf/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddehopf {

namespace {

constexpr double kAxisThreshold = 1e-8;
constexpr double kDedupRadius = 1e-6;

double curvature_denominator(double a, double b, double t)
{
    double const d = (b * b * t * t + 1.0) * (a * a + b * b) - 4.0 * a * b * b * t;
    if (!(d > 0.0))
        throw Error(ErrorKind::SingularCurvature, "curvature denominator vanishes").with_value(d);
    return std::pow(d, 1.5);
}

} // namespace

Complex char_eval(double alpha, double beta, double tau, Complex xi) noexcept
{
    return xi - alpha - beta * std::exp(-xi * tau);
}

HopfPoint hopf_point(double tau, double omega)
{
    if (!(tau > 0.0))
        throw Error(ErrorKind::PreconditionFailed, "tau must be positive").with_value(tau);
    double const s = std::sin(tau * omega);
    if (std::abs(s) < 1e-12)
        throw Error(ErrorKind::SingularParametrization, "sin(tau omega) vanishes").with_value(omega);
    double const beta = -omega / s;
    double const alpha = -beta * std::cos(tau * omega);
    return {alpha, beta, omega, tau};
}

std::vector<HopfPoint> hopf_curve(double tau, std::span<double const> omega_grid)
{
    std::vector<HopfPoint> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid)
        out.push_back(hopf_point(tau, w));
    return out;
}

double find_imaginary_root(double alpha, double beta, double tau, double tolerance)
{
    double const disc = beta * beta - alpha * alpha;
    if (!(disc > 0.0))
        throw Error(ErrorKind::PreconditionFailed, "no imaginary root unless beta^2 > alpha^2").with_value(disc);
    double const omega = std::sqrt(disc);
    double const r = std::abs(char_eval(alpha, beta, tau, Complex{0.0, omega}));
    if (!(r <= tolerance))
        throw Error(ErrorKind::NotOnCurve, "phase conditions fail at omega = sqrt(beta^2 - alpha^2)").with_value(r);
    return omega;
}

StabilityReport rightmost_roots(double alpha, double beta, double tau, int count)
{
    if (!(tau > 0.0))
        throw Error(ErrorKind::PreconditionFailed, "tau must be positive").with_value(tau);

    std::vector<double> imag_seeds{0.0};
    for (int k = 0; k < count; ++k)
        imag_seeds.push_back((k + 0.5) * std::numbers::pi / tau);

    double const re_lo = -20.0 / tau;
    double const re_hi = 5.0;
    constexpr int kRealSeeds = 12;

    std::vector<Complex> found;
    for (double im : imag_seeds)
        for (int i = 0; i < kRealSeeds; ++i)
        {
            Complex xi{re_lo + (re_hi - re_lo) * i / (kRealSeeds - 1), im};
            bool converged = false;
            for (int it = 0; it < 60; ++it)
            {
                Complex const e = std::exp(-xi * tau);
                Complex const f = xi - alpha - beta * e;
                Complex const df = 1.0 + beta * tau * e;
                if (std::abs(df) < 1e-300)
                    break;
                Complex const step = f / df;
                xi -= step;
                if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag()) || xi.real() > 50.0)
                    break;
                if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(xi)))
                {
                    converged = std::abs(char_eval(alpha, beta, tau, xi)) < 1e-10;
                    break;
                }
            }
            if (!converged)
                continue;
            if (xi.imag() < 0.0)
                xi = std::conj(xi);
            if (std::abs(xi.imag()) < 1e-12)
                xi.imag(0.0);
            found.push_back(xi);
        }

    if (found.empty())
        throw Error(ErrorKind::EmptyResult, "no characteristic root converged from the seed grid");

    std::sort(found.begin(), found.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
    });
    std::vector<Complex> roots;
    for (auto z : found)
        if (std::none_of(roots.begin(), roots.end(), [&](Complex r) { return std::abs(r - z) < kDedupRadius; }))
            roots.push_back(z);

    StabilityReport rep;
    rep.roots = roots;
    rep.rightmost_real_part = roots.front().real();
    int real_axis_roots = 0;
    bool others_stable = true;
    for (auto z : roots)
    {
        if (std::abs(z.real()) < kAxisThreshold)
        {
            if (z.imag() > 0.0)
                rep.imaginary_axis_roots.push_back(z.imag());
            else
                ++real_axis_roots;
        }
        else if (!(z.real() < -kAxisThreshold))
            others_stable = false;
    }
    std::sort(rep.imaginary_axis_roots.begin(), rep.imaginary_axis_roots.end());
    rep.verified_hypothesis1 = rep.imaginary_axis_roots.size() == 1 && real_axis_roots == 0 && others_stable;
    return rep;
}

double curvature_hopf(HopfPoint const& p)
{
    double const a = p.alpha;
    double const b = p.beta;
    double const t = p.tau;
    return b * (a * a - b * b) * (b * b * t * t + a * t - 2.0) * t / curvature_denominator(a, b, t);
}

double curvature_path(LinearizationPoint const& lp, double tau)
{
    double const a = lp.alpha;
    double const b = lp.beta;
    double const t = tau;
    if (lp.beta_lam == 0.0)
        throw Error(ErrorKind::SingularCurvature, "beta_lam vanishes");
    double const num = (a * t - 1.0) * (a * t - 1.0) * b * b
                       * (b * (a * t - 1.0) * lp.alpha_lamlam + (a - b * b * t) * lp.beta_lamlam);
    return num / (lp.beta_lam * lp.beta_lam * curvature_denominator(a, b, t));
}

} // namespace ddehopf
