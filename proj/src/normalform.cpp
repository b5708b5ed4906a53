#include "ddehopf/normalform.hpp"

#include "ddehopf/equilibria.hpp"

#include <cmath>

namespace ddehopf {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_nonzero(double v, char const* factor)
{
    if (std::abs(v) < 1e-14)
        throw Error(ErrorKind::SingularDenominator, std::string{"vanishing factor "} + factor).with_value(v);
}

double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// residuals at (lam, mu); any failure to linearize counts as leaving the domain
struct Evaluation
{
    LinearizationPoint lp;
    TangencyResiduals r;
};

Evaluation evaluate(ModelSpec const& m, double lam, double mu)
{
    LinearizationPoint lp;
    try
    {
        lp = linearize(m, lam, mu);
    }
    catch (Error const& e)
    {
        throw Error(ErrorKind::LeftDomain, "equilibrium unavailable at (" + std::to_string(lam) + ", "
                                               + std::to_string(mu) + "): " + e.what());
    }
    if (!(lp.beta * lp.beta > lp.alpha * lp.alpha))
        throw Error(ErrorKind::LeftDomain, "iterate left the region beta^2 > alpha^2")
            .with_value(lp.beta * lp.beta - lp.alpha * lp.alpha);
    return {lp, tangency_residuals(lp, m.tau())};
}

double norm(TangencyResiduals const& r) noexcept { return std::max(std::abs(r.r1), std::abs(r.r2)); }

// degree <= 3 polynomial in four commuting variables with complex coefficients
class Poly4
{
public:
    static Poly4 linear(std::array<Complex, 4> const& c)
    {
        Poly4 p;
        p.at(1, 0, 0, 0) = c[0];
        p.at(0, 1, 0, 0) = c[1];
        p.at(0, 0, 1, 0) = c[2];
        p.at(0, 0, 0, 1) = c[3];
        return p;
    }

    Complex& at(int a, int b, int c, int d) { return c_[index(a, b, c, d)]; }
    [[nodiscard]] Complex at(int a, int b, int c, int d) const { return c_[index(a, b, c, d)]; }

    friend Poly4 operator*(Poly4 const& p, Poly4 const& q)
    {
        Poly4 r;
        for (int i = 0; i < kCells; ++i)
        {
            if (p.c_[i] == Complex{})
                continue;
            auto const [a1, b1, c1, d1] = unindex(i);
            for (int j = 0; j < kCells; ++j)
            {
                if (q.c_[j] == Complex{})
                    continue;
                auto const [a2, b2, c2, d2] = unindex(j);
                if (a1 + b1 + c1 + d1 + a2 + b2 + c2 + d2 > 3)
                    continue;
                r.at(a1 + a2, b1 + b2, c1 + c2, d1 + d2) += p.c_[i] * q.c_[j];
            }
        }
        return r;
    }

    Poly4& add_scaled(Poly4 const& o, double s)
    {
        for (int i = 0; i < kCells; ++i)
            c_[i] += s * o.c_[i];
        return *this;
    }

private:
    static constexpr int kCells = 256;
    static int index(int a, int b, int c, int d) { return ((a * 4 + b) * 4 + c) * 4 + d; }
    static std::array<int, 4> unindex(int i) { return {i / 64, (i / 16) % 4, (i / 4) % 4, i % 4}; }

    std::array<Complex, kCells> c_{};
};

} // namespace

TangencyResiduals tangency_residuals(LinearizationPoint const& lp, double tau)
{
    double const a = lp.alpha;
    double const b = lp.beta;
    double const disc = b * b - a * a;
    if (!(disc > 0.0))
        throw Error(ErrorKind::PreconditionFailed, "tangency residuals need beta^2 > alpha^2").with_value(disc);
    return {a + b * std::cos(tau * std::sqrt(disc)),
            b * lp.alpha_lam * (1.0 - a * tau) + lp.beta_lam * (tau * b * b - a)};
}

DegeneratePoint find_degenerate_point(ModelSpec const& m, double lam_guess, double mu_guess,
                                      DegenerateSearchOptions const& opts)
{
    double lam = lam_guess;
    double mu = mu_guess;
    Evaluation cur = evaluate(m, lam, mu);

    int it = 0;
    for (; it < opts.max_iterations && norm(cur.r) >= 1e-13; ++it)
    {
        double const hl = opts.fd_step * std::max(1.0, std::abs(lam));
        double const hm = opts.fd_step * std::max(1.0, std::abs(mu));
        auto const lp = evaluate(m, lam + hl, mu).r;
        auto const lm = evaluate(m, lam - hl, mu).r;
        auto const mp = evaluate(m, lam, mu + hm).r;
        auto const mm = evaluate(m, lam, mu - hm).r;
        double const j11 = (lp.r1 - lm.r1) / (2 * hl);
        double const j12 = (mp.r1 - mm.r1) / (2 * hm);
        double const j21 = (lp.r2 - lm.r2) / (2 * hl);
        double const j22 = (mp.r2 - mm.r2) / (2 * hm);
        double const det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || det == 0.0)
            throw Error(ErrorKind::NonConvergence, "singular Jacobian in the degenerate-point search").with_value(det);
        double const dl = -(j22 * cur.r.r1 - j12 * cur.r.r2) / det;
        double const dm = -(-j21 * cur.r.r1 + j11 * cur.r.r2) / det;

        double t = 1.0;
        bool accepted = false;
        std::optional<Error> last_error;
        for (int k = 0; k < 30; ++k, t *= 0.5)
        {
            try
            {
                Evaluation next = evaluate(m, lam + t * dl, mu + t * dm);
                if (norm(next.r) < norm(cur.r) || k == 29)
                {
                    lam += t * dl;
                    mu += t * dm;
                    cur = next;
                    accepted = true;
                    break;
                }
            }
            catch (Error const& e)
            {
                if (e.kind() != ErrorKind::LeftDomain)
                    throw;
                last_error = e;
            }
        }
        if (!accepted)
            throw last_error.value_or(Error(ErrorKind::NonConvergence, "line search failed"));
        if (std::abs(t * dl) < 1e-15 * std::max(1.0, std::abs(lam))
            && std::abs(t * dm) < 1e-15 * std::max(1.0, std::abs(mu)))
            break;
    }

    if (!(norm(cur.r) < opts.tolerance))
        throw Error(ErrorKind::NonConvergence, "degenerate-point search did not reach the residual tolerance")
            .with_value(norm(cur.r));

    DegeneratePoint out;
    out.lam = lam;
    out.mu = mu;
    out.point = cur.lp;
    out.residuals = cur.r;
    out.iterations = it;
    out.omega = find_imaginary_root(cur.lp.alpha, cur.lp.beta, m.tau());
    return out;
}

std::optional<std::array<double, 2>> scan_degenerate_guess(ModelSpec const& m, double lam_lo, double lam_hi,
                                                          double mu_lo, double mu_hi, int points)
{
    if (points < 2 || !(lam_lo < lam_hi) || !(mu_lo < mu_hi))
        throw Error(ErrorKind::PreconditionFailed, "scan needs ordered ranges and at least two points");

    auto r1_at = [&](double lam, double mu) -> std::optional<double> {
        try
        {
            return evaluate(m, lam, mu).r.r1;
        }
        catch (Error const&)
        {
            return std::nullopt;
        }
    };

    // mu on r1 = 0 for fixed lam: the path is tangent to the Hopf curve in lam, transversal in mu
    auto crossing = [&](double lam) -> std::optional<double> {
        std::optional<double> prev;
        double prev_mu = mu_lo;
        for (int i = 0; i < points; ++i)
        {
            double const mu = mu_lo + (mu_hi - mu_lo) * i / (points - 1);
            auto const v = r1_at(lam, mu);
            if (v && prev && std::signbit(*v) != std::signbit(*prev))
            {
                double lo = prev_mu;
                double hi = mu;
                double flo = *prev;
                for (int k = 0; k < 60; ++k)
                {
                    double const mid = 0.5 * (lo + hi);
                    auto const fm = r1_at(lam, mid);
                    if (!fm)
                        return std::nullopt;
                    if (std::signbit(*fm) == std::signbit(flo))
                    {
                        lo = mid;
                        flo = *fm;
                    }
                    else
                        hi = mid;
                }
                return 0.5 * (lo + hi);
            }
            prev = v;
            prev_mu = mu;
        }
        return std::nullopt;
    };

    std::optional<double> prev_r2;
    std::optional<double> prev_mu;
    double prev_lam = lam_lo;
    for (int j = 0; j < points; ++j)
    {
        double const lam = lam_lo + (lam_hi - lam_lo) * j / (points - 1);
        std::optional<double> r2;
        auto const mu = crossing(lam);
        if (mu)
        {
            try
            {
                r2 = evaluate(m, lam, *mu).r.r2;
            }
            catch (Error const&)
            {
            }
        }
        if (r2 && prev_r2 && std::signbit(*r2) != std::signbit(*prev_r2))
            return std::array<double, 2>{0.5 * (lam + prev_lam), 0.5 * (*mu + *prev_mu)};
        prev_r2 = r2;
        prev_mu = mu;
        prev_lam = lam;
    }
    return std::nullopt;
}

Complex psi1_zero(double alpha, double /*beta*/, double tau, double omega)
{
    Complex const d{1.0 - alpha * tau, omega * tau};
    if (std::norm(d) == 0.0)
        throw Error(ErrorKind::SingularDenominator, "vanishing factor (1 - alpha tau) + i omega tau");
    return 1.0 / d;
}

double curvature_gap(LinearizationPoint const& lp, double tau)
{
    double const a = lp.alpha;
    double const b = lp.beta;
    double const t = tau;
    double const at1 = a * t - 1.0;
    return at1 * at1 * at1 * b * b * lp.alpha_lamlam + b * at1 * at1 * (a - b * b * t) * lp.beta_lamlam
           - lp.beta_lam * lp.beta_lam * t * (a * a - b * b) * (b * b * t * t + a * t - 2.0);
}

Sigma sigma_coefficients(LinearizationPoint const& lp, double tau, double omega)
{
    double const a = lp.alpha;
    double const b = lp.beta;
    double const t = tau;
    require_nonzero(b, "beta");
    require_nonzero(a * t - 1.0, "alpha tau - 1");
    double const q = -b * b * t * t + 2.0 * a * t - 1.0;
    require_nonzero(q, "-beta^2 tau^2 + 2 alpha tau - 1");
    double const m2 = (1.0 - a * t) * (1.0 - a * t) + omega * omega * t * t;
    require_nonzero(m2, "(1 - alpha tau)^2 + omega^2 tau^2");

    Complex const psi = psi1_zero(a, b, t, omega);
    Complex const e = std::exp(Complex{0.0, -omega * t});

    Sigma s;
    s.s1 = (b * lp.alpha_mu * (1.0 - a * t) + lp.beta_mu * (t * b * b - a)) / (b * m2);
    s.s2 = (psi * (lp.alpha_mu + lp.beta_mu * e)).imag();
    s.s3 = (psi * (lp.alpha_lam + lp.beta_lam * e)).imag();
    s.s4 = curvature_gap(lp, t) / (b * b * (a * t - 1.0) * (a * t - 1.0) * q) / 2.0;
    s.s5 = sigma4_via_xi(lp, t, omega).imag();
    return s;
}

Complex sigma4_via_xi(LinearizationPoint const& lp, double tau, double omega)
{
    require_nonzero(lp.beta, "beta");
    require_nonzero(lp.alpha * tau - 1.0, "alpha tau - 1");
    Complex const psi = psi1_zero(lp.alpha, lp.beta, tau, omega);
    Complex const e = std::exp(Complex{0.0, -omega * tau});
    Complex const l_lamlam = lp.alpha_lamlam + lp.beta_lamlam * e;
    Complex const l_lam_theta = -tau * lp.beta_lam * e;
    Complex const l0_theta2 = tau * tau * lp.beta * e;
    Complex const xi_lam = psi * (lp.alpha_lam + lp.beta_lam * e);
    Complex const xi_lamlam = psi * (l_lamlam + 2.0 * xi_lam * l_lam_theta + xi_lam * xi_lam * l0_theta2);
    return 0.5 * xi_lamlam;
}

double lyapunov_k1_closed(double alpha, double beta, double omega, double tau, TaylorTable const& f)
{
    double const a = alpha;
    double const b = beta;
    double const T = tau;
    if (std::abs(a + b) < 1e-14)
        throw Error(ErrorKind::NonDegeneracyViolated, "alpha + beta vanishes").with_value(a + b);
    if (std::abs(4 * a - 5 * b) < 1e-14)
        throw Error(ErrorKind::NonDegeneracyViolated, "4 alpha - 5 beta vanishes").with_value(4 * a - 5 * b);
    require_nonzero(b, "beta");

    double const a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
    double const b2 = b * b, b3 = b2 * b, b4 = b3 * b, b5 = b4 * b;
    double const D = (a + b) * (4 * a - 5 * b);

    double s = 3 * (1 - a * T) * f.f30;
    s += ((3 * a2 * T - a2 + b2 - 3 * a) / b) * f.f21;
    s -= ((2 * a3 * T + a * b2 * T - 2 * a3 + 2 * a * b2 - 2 * a2 - b2) / b2) * f.f12;
    s += 3 * ((a2 * T - a2 + b2 - a) / b) * f.f03;
    s += 2 * ((6 * a2 * T - 9 * a * b * T - 2 * a2 + 2 * b2 - 6 * a + 9 * b) / D) * f.f20 * f.f20;
    s -= ((18 * a3 * T - 33 * a2 * b * T + 9 * a * b2 * T - 10 * a3 + 7 * a2 * b + 10 * a * b2 - 7 * b3 - 18 * a2
           + 33 * a * b - 9 * b2)
          / (D * b))
         * f.f20 * f.f11;
    s -= 2 * ((a - b) * (6 * a2 * T - 9 * a * b * T - 6 * a2 + a * b + 7 * b2 - 6 * a + 9 * b) / (D * b)) * f.f20
         * f.f02;
    s += ((a - b)
          * (4 * a3 * T - 10 * a2 * b * T + a * b2 * T - 4 * a3 + 2 * a2 * b + 3 * a * b2 - 3 * b3 - 4 * a2
             + 10 * a * b - b2)
          / (b2 * D))
         * f.f11 * f.f11;
    s += ((8 * T * a5 + 8 * a4 * b * T - 32 * a3 * b2 * T + 19 * a2 * b3 * T - 9 * a * b4 * T - 8 * a5 - 8 * a4 * b
           + 36 * a3 * b2)
              / (b3 * D)
          + (a2 * b3 - 28 * a * b4 + 7 * b5 - 8 * a4 - 8 * a3 * b + 32 * a2 * b2 - 19 * a * b3 + 9 * b4) / (b3 * D))
         * f.f11 * f.f02;
    s -= 2
         * ((4 * a4 * T + 4 * a3 * b * T - 13 * a2 * b2 * T + 2 * a * b3 * T - 4 * a4 - 4 * a3 * b + 15 * a2 * b2
             + 4 * a * b3)
                / (b2 * D)
            + (-11 * b4 - 4 * a3 - 4 * a2 * b + 13 * a * b2 - 2 * b3) / (b2 * D))
         * f.f02 * f.f02;
    return s / ((1 - a * T) * (1 - a * T) + omega * omega);
}

KdefCoefficients kdef_coefficients(double omega, double tau, TaylorTable const& f)
{
    Complex const e1 = std::exp(Complex{0.0, -omega * tau});
    Complex const e2 = std::exp(Complex{0.0, omega * tau});
    Complex const e4 = std::exp(Complex{0.0, -2.0 * omega * tau});
    Poly4 const x = Poly4::linear({1.0, 1.0, 1.0, 1.0});
    Poly4 const xd = Poly4::linear({e1, e2, 1.0, e4});

    Poly4 const x2 = x * x;
    Poly4 const xd2 = xd * xd;
    Poly4 const x_xd = x * xd;
    Poly4 poly;
    poly.add_scaled(x2, f.f20).add_scaled(x_xd, f.f11).add_scaled(xd2, f.f02);
    poly.add_scaled(x2 * x, f.f30).add_scaled(x2 * xd, f.f21).add_scaled(x * xd2, f.f12).add_scaled(xd2 * xd, f.f03);

    return {poly.at(2, 1, 0, 0), poly.at(1, 1, 0, 0), poly.at(1, 0, 1, 0), poly.at(2, 0, 0, 0), poly.at(0, 1, 0, 1)};
}

Complex kdef_bracket(double alpha, double beta, double omega, double tau, TaylorTable const& f)
{
    double const l1 = alpha + beta;
    if (std::abs(l1) < 1e-14)
        throw Error(ErrorKind::NonDegeneracyViolated, "L0(1) = alpha + beta vanishes").with_value(l1);
    Complex const l2 = 2.0 * kI * omega - (alpha + beta * std::exp(Complex{0.0, -2.0 * omega * tau}));
    if (std::abs(l2) < 1e-14)
        throw Error(ErrorKind::NonDegeneracyViolated, "2 i omega - L0(exp(2 i omega theta)) vanishes")
            .with_value(std::abs(l2));
    auto const b = kdef_coefficients(omega, tau, f);
    return b.b2100 - b.b1100 * b.b1010 / l1 + b.b2000 * b.b0101 / l2;
}

double lyapunov_k1_general(double alpha, double beta, double omega, double tau, TaylorTable const& f)
{
    return (psi1_zero(alpha, beta, tau, omega) * kdef_bracket(alpha, beta, omega, tau, f)).real();
}

std::string_view to_string(DiagramClass c) noexcept
{
    switch (c)
    {
    case DiagramClass::PlusEtaNegative: return "eps=+1,eta<0";
    case DiagramClass::PlusEtaZero: return "eps=+1,eta=0";
    case DiagramClass::PlusEtaPositive: return "eps=+1,eta>0";
    case DiagramClass::MinusEtaNegative: return "eps=-1,eta<0";
    case DiagramClass::MinusEtaZero: return "eps=-1,eta=0";
    case DiagramClass::MinusEtaPositive: return "eps=-1,eta>0";
    }
    return "?";
}

DiagramClass diagram_class(int epsilon, double eta) noexcept
{
    if (epsilon > 0)
        return eta < 0.0 ? DiagramClass::PlusEtaNegative
                         : (eta > 0.0 ? DiagramClass::PlusEtaPositive : DiagramClass::PlusEtaZero);
    return eta < 0.0 ? DiagramClass::MinusEtaNegative
                     : (eta > 0.0 ? DiagramClass::MinusEtaPositive : DiagramClass::MinusEtaZero);
}

bool Classification::has_bubble(double dmu) const noexcept { return epsilon > 0 && eta(dmu) < 0.0; }

double Classification::bubble_width(double dmu) const noexcept
{
    return has_bubble(dmu) ? bubble_coeff * std::sqrt(std::abs(dmu)) : 0.0;
}

Classification classify(double sigma1, double sigma4, double k1)
{
    if (!(std::abs(sigma1) > kSigmaZeroTolerance))
        throw Error(ErrorKind::DegenerateBeyondScope, "sigma1 vanishes").with_value(sigma1);
    if (!(std::abs(sigma4) > kSigmaZeroTolerance))
        throw Error(ErrorKind::DegenerateBeyondScope, "sigma4 vanishes").with_value(sigma4);
    if (!(std::abs(k1) > kK1ZeroTolerance))
        throw Error(ErrorKind::DegenerateBeyondScope, "K1 vanishes").with_value(k1);

    Classification c;
    c.epsilon = static_cast<int>(sgn(sigma4 / k1));
    c.eta_slope = sigma1 / (std::abs(k1) * sgn(sigma4));
    c.bubble_coeff = 2.0 * std::sqrt(std::abs(sigma1 / sigma4));
    c.below = diagram_class(c.epsilon, c.eta(-1.0));
    c.above = diagram_class(c.epsilon, c.eta(1.0));
    if (c.epsilon > 0)
        c.bubble_side = c.eta_slope < 0.0 ? 1 : -1;
    return c;
}

DegeneracyReport analyze(ModelSpec const& m, double lam_guess, double mu_guess, DegenerateSearchOptions const& opts)
{
    auto const dp = find_degenerate_point(m, lam_guess, mu_guess, opts);
    auto const& lp = dp.point;
    double const tau = m.tau();

    DegeneracyReport r;
    r.model = m.name();
    r.tau = tau;
    r.lam_star = dp.lam;
    r.mu_star = dp.mu;
    r.point = lp;
    r.omega_star = dp.omega;
    r.residuals = dp.residuals;
    r.iterations = dp.iterations;
    r.psi10 = psi1_zero(lp.alpha, lp.beta, tau, dp.omega);
    r.sigma = sigma_coefficients(lp, tau, dp.omega);
    r.half_xi_lamlam = sigma4_via_xi(lp, tau, dp.omega);
    r.G_value = curvature_gap(lp, tau);
    r.taylor = taylor_coeffs(m, lp);
    r.K1 = lyapunov_k1_closed(lp.alpha, lp.beta, dp.omega, tau, r.taylor);
    r.K1_general = lyapunov_k1_general(lp.alpha, lp.beta, dp.omega, tau, r.taylor);
    r.kappa1 = curvature_hopf(HopfPoint{lp.alpha, lp.beta, dp.omega, tau});
    r.kappa2 = curvature_path(lp, tau);
    r.stability = rightmost_roots(lp.alpha, lp.beta, tau);

    try
    {
        r.classification = classify(r.sigma.s1, r.sigma.s4, r.K1);
    }
    catch (Error const& e)
    {
        if (e.kind() != ErrorKind::DegenerateBeyondScope)
            throw;
        r.flagged = e.what();
    }
    return r;
}

} // namespace ddehopf
