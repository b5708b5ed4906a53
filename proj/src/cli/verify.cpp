#include "ddehopf/cli.hpp"

#include "ddehopf/equilibria.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

namespace ddehopf::cli {

namespace {

struct Sample
{
    HopfPoint hp;
    TaylorTable f;
    LinearizationPoint lp;  // tangent path through hp
};

// random points on the principal Hopf branch with a tangent path and a random Taylor table
std::vector<Sample> random_samples(int n, std::uint64_t seed)
{
    std::mt19937_64 rng{seed};
    std::uniform_real_distribution<double> tau_dist{0.5, 5.0};
    std::uniform_real_distribution<double> frac{0.05, 0.95};
    std::normal_distribution<double> normal{0.0, 1.0};

    std::vector<Sample> out;
    while (static_cast<int>(out.size()) < n)
    {
        double const tau = tau_dist(rng);
        double const w = frac(rng) * std::numbers::pi / tau;
        Sample s;
        s.hp = hopf_point(tau, w);
        double const a = s.hp.alpha;
        double const b = s.hp.beta;
        if (std::abs(a + b) < 1e-3 || std::abs(4 * a - 5 * b) < 1e-3 || std::abs(a * tau - 1.0) < 1e-3)
            continue;
        for (int j = 0; j <= 3; ++j)
            for (int k = 0; j + k <= 3; ++k)
                if (j + k >= 2)
                    s.f.at(j, k) = normal(rng);

        s.lp.alpha = a;
        s.lp.beta = b;
        s.lp.alpha_lam = normal(rng);
        s.lp.beta_lam = -b * s.lp.alpha_lam * (1.0 - a * tau) / (tau * b * b - a);
        s.lp.alpha_lamlam = normal(rng);
        s.lp.beta_lamlam = normal(rng);
        s.lp.alpha_mu = normal(rng);
        s.lp.beta_mu = normal(rng);
        out.push_back(s);
    }
    return out;
}

double rel_diff(double got, double want, double floor = 1e-12)
{
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

VerifyCheck make(std::string name, double residual, double tol, std::string detail)
{
    return {std::move(name), residual <= tol, residual, tol, std::move(detail)};
}

// central difference with one Richardson extrapolation
double fd1(std::function<double(double)> const& g, double x, double h)
{
    auto d = [&](double s) { return (g(x + s) - g(x - s)) / (2.0 * s); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

double fd2(std::function<double(double)> const& g, double x, double h)
{
    double const g0 = g(x);
    auto d = [&](double s) { return (g(x + s) - 2.0 * g0 + g(x - s)) / (s * s); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

struct Grid
{
    ModelSpec model;
    double lam_lo, lam_hi, mu_lo, mu_hi;
};

double implicit_vs_fd(Grid const& g, std::string& worst)
{
    double max_err = 0.0;
    constexpr double h = 1e-4;
    constexpr double h2 = 1e-3;  // second differences lose eps/h^2 to rounding
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
        {
            double const lam = g.lam_lo + (g.lam_hi - g.lam_lo) * i / 4.0;
            double const mu = g.mu_lo + (g.mu_hi - g.mu_lo) * j / 4.0;
            auto const lp = linearize(g.model, lam, mu);
            auto in_lam = [&](auto field) {
                return std::function<double(double)>{[&, field](double l) { return linearize(g.model, l, mu).*field; }};
            };
            auto in_mu = [&](auto field) {
                return std::function<double(double)>{[&, field](double u) { return linearize(g.model, lam, u).*field; }};
            };
            struct Item
            {
                char const* name;
                double analytic;
                double numeric;
            };
            Item const items[] = {
                {"ybar_lam", lp.ybar_lam, fd1(in_lam(&LinearizationPoint::ybar), lam, h)},
                {"ybar_mu", lp.ybar_mu, fd1(in_mu(&LinearizationPoint::ybar), mu, h)},
                {"alpha_lam", lp.alpha_lam, fd1(in_lam(&LinearizationPoint::alpha), lam, h)},
                {"beta_lam", lp.beta_lam, fd1(in_lam(&LinearizationPoint::beta), lam, h)},
                {"alpha_mu", lp.alpha_mu, fd1(in_mu(&LinearizationPoint::alpha), mu, h)},
                {"beta_mu", lp.beta_mu, fd1(in_mu(&LinearizationPoint::beta), mu, h)},
                {"alpha_lamlam", lp.alpha_lamlam, fd2(in_lam(&LinearizationPoint::alpha), lam, h2)},
                {"beta_lamlam", lp.beta_lamlam, fd2(in_lam(&LinearizationPoint::beta), lam, h2)},
            };
            for (auto const& it : items)
            {
                double const e = rel_diff(it.numeric, it.analytic, 1e-3);
                if (e > max_err)
                {
                    max_err = e;
                    worst = g.model.name() + " " + it.name + " at (" + format_double(lam) + ", " + format_double(mu)
                            + ")";
                }
            }
        }
    return max_err;
}

} // namespace

std::vector<VerifyCheck> run_verify(VerifyOptions const& opts)
{
    auto tol = [&](double own) { return opts.tolerance.value_or(own); };
    auto const samples = random_samples(opts.random_samples, opts.seed);
    auto closed_table = [&](TaylorTable f) {
        if (opts.flip_f21_sign)
            f.f21 = -f.f21;
        return f;
    };

    std::vector<VerifyCheck> checks;

    {
        double worst = 0.0;
        double worst_unscaled = 0.0;
        for (auto const& s : samples)
        {
            auto const& p = s.hp;
            double const closed = lyapunov_k1_closed(p.alpha, p.beta, p.omega, p.tau, closed_table(s.f));
            double const general = lyapunov_k1_general(p.alpha, p.beta, p.omega, p.tau, s.f);
            Complex const bracket = kdef_bracket(p.alpha, p.beta, p.omega, p.tau, s.f);
            double const unscaled = (bracket / Complex{1.0 - p.alpha * p.tau, p.omega}).real();
            worst = std::max(worst, rel_diff(closed, general));
            worst_unscaled = std::max(worst_unscaled, rel_diff(closed, unscaled));
        }
        checks.push_back(make("k1-two-path", worst, tol(1e-8),
                              "closed form vs operator form with psi1 = 1/((1 - alpha tau) + i omega tau), "
                                  + std::to_string(samples.size()) + " random points"));
        checks.push_back(make("k1-closed-vs-operator-psi-without-tau", worst_unscaled, tol(1e-8),
                              "closed form vs operator form with 1/((1 - alpha tau) + i omega), same points"));
    }

    {
        double worst = 0.0;
        for (auto const& s : samples)
        {
            double const a = sigma_coefficients(s.lp, s.hp.tau, s.hp.omega).s4;
            double const b = sigma4_via_xi(s.lp, s.hp.tau, s.hp.omega).real();
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
        }
        checks.push_back(make("sigma4-two-path", worst, tol(1e-10), "G quotient vs Re(xi_lamlam)/2 on tangent paths"));
    }

    {
        double worst_identity = 0.0;
        bool equivalence = true;
        for (auto const& s : samples)
        {
            double const k1 = curvature_hopf(s.hp);
            double const k2 = curvature_path(s.lp, s.hp.tau);
            double const G = curvature_gap(s.lp, s.hp.tau);
            double const a = s.hp.alpha;
            double const b = s.hp.beta;
            double const t = s.hp.tau;
            double const d = std::pow((b * b * t * t + 1.0) * (a * a + b * b) - 4.0 * a * b * b * t, 1.5);
            double const lhs = (k2 - k1) * s.lp.beta_lam * s.lp.beta_lam * d;
            worst_identity = std::max(worst_identity, std::abs(lhs - b * G) / std::max(1.0, std::abs(b * G)));
            equivalence = equivalence && ((std::abs(k2 - k1) > 1e-8) == (std::abs(G) > 1e-8));

            // move beta_lamlam so that G vanishes; the two curvatures must then agree
            LinearizationPoint flat = s.lp;
            double const coeff = b * (a * t - 1.0) * (a * t - 1.0) * (a - b * b * t);
            if (std::abs(coeff) > 1e-6)
            {
                flat.beta_lamlam -= curvature_gap(flat, t) / coeff;
                double const gap = std::abs(curvature_path(flat, t) - k1);
                worst_identity = std::max(worst_identity, gap);
                equivalence = equivalence && gap <= 1e-8;
            }
        }
        double const tolerance = tol(1e-8);
        checks.push_back({"kappa-gap-vs-G", worst_identity <= tolerance && equivalence, worst_identity, tolerance,
                          "kappa2 - kappa1 against beta G / (beta_lam^2 D^(3/2)) and zero-G paths"});
    }

    {
        std::string worst_at;
        double worst = 0.0;
        for (Grid const& g : {Grid{sis_inverse(), 1.5, 2.1, 2.2, 3.0}, Grid{sis_exp(), 1.8, 2.6, 1.2, 2.2}})
        {
            std::string at;
            double const e = implicit_vs_fd(g, at);
            if (e >= worst)
            {
                worst = e;
                worst_at = at;
            }
        }
        checks.push_back(make("implicit-derivatives-vs-fd", worst, tol(1e-5), "worst: " + worst_at));
    }

    {
        double worst = 0.0;
        std::size_t count = 0;
        for (double tau : {1.0, 5.0, 10.0})
            for (int i = 0; i < 100; ++i)
            {
                double const w = (i + 1) * 3.0 * std::numbers::pi / tau / 101.0;
                try
                {
                    auto const p = hopf_point(tau, w);
                    worst = std::max(worst, std::abs(char_eval(p.alpha, p.beta, tau, Complex{0.0, p.omega})));
                    ++count;
                }
                catch (Error const&)
                {
                }
            }
        checks.push_back(make("hopf-curve-residual", worst, tol(1e-10),
                              "|Delta(i omega)| over " + std::to_string(count) + " traced points, tau in {1, 5, 10}"));
    }

    struct Builtin
    {
        ModelSpec model;
        double lam;
        double mu;
    };
    for (auto const& [model, lam, mu] : {Builtin{sis_inverse(), 1.8, 2.6}, Builtin{sis_exp(), 2.1, 1.7}})
    {
        auto const r = analyze(model, lam, mu);
        double const res = std::max(std::abs(r.residuals.r1), std::abs(r.residuals.r2));
        checks.push_back(make("degenerate-point-" + model.name(), res, tol(1e-9), "max(|r1|, |r2|)"));
        double const s4 = std::abs(r.sigma.s4 - r.half_xi_lamlam.real());
        checks.push_back(make("sigma4-two-path-" + model.name(), s4, tol(1e-10), "at the degenerate point"));
        checks.push_back({"isolated-pair-" + model.name(), r.stability.verified_hypothesis1,
                          r.stability.rightmost_real_part, 0.0,
                          "one imaginary pair, other roots left of -1e-8 (residual = rightmost real part)"});
    }
    return checks;
}

void write_verify(std::span<VerifyCheck const> checks, std::ostream& os)
{
    std::size_t passed = 0;
    for (auto const& c : checks)
    {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual=" << format_double(c.residual)
           << " tol=" << format_double(c.tolerance) << "  " << c.detail << "\n";
        passed += c.pass ? 1 : 0;
    }
    os << passed << "/" << checks.size() << " checks passed\n";
}

} // namespace ddehopf::cli
