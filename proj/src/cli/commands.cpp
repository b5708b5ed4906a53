#include "ddehopf/cli.hpp"

#include "ddehopf/equilibria.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <ostream>

namespace ddehopf::cli {

namespace {

std::string timestamp()
{
    auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int guarded(std::ostream& err, std::function<int()> const& body)
{
    try
    {
        return body();
    }
    catch (Error const& e)
    {
        err << "error: " << e.what();
        if (e.value())
            err << " (value " << format_double(*e.value()) << ")";
        err << "\n";
        return exit_code_for(e.kind());
    }
}

// writes to cfg.out when set, else to `fallback`
class Sink
{
public:
    Sink(std::string const& path, std::ostream& fallback) : to_file_(!path.empty())
    {
        if (to_file_)
        {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_)
                throw Error(ErrorKind::Io, "cannot write '" + path + "'");
        }
        os_ = to_file_ ? static_cast<std::ostream*>(&file_) : &fallback;
    }

    std::ostream& stream() noexcept { return *os_; }
    [[nodiscard]] bool to_file() const noexcept { return to_file_; }

private:
    bool to_file_;
    std::ofstream file_;
    std::ostream* os_;
};

std::string side_name(int side)
{
    return side > 0 ? "above" : (side < 0 ? "below" : "none");
}

} // namespace

void write_report_text(DegeneracyReport const& r, std::ostream& os)
{
    auto const& p = r.point;
    os << "degenerate Hopf point of " << r.model << " (tau = " << format_double(r.tau) << ")\n";
    os << "  lam* = " << format_double(r.lam_star) << ", mu* = " << format_double(r.mu_star)
       << ", ybar = " << format_double(p.ybar) << "\n";
    os << "  alpha* = " << format_double(p.alpha) << ", beta* = " << format_double(p.beta)
       << ", omega* = " << format_double(r.omega_star) << "\n";
    os << "  sigma1 = " << format_double(r.sigma.s1) << ", sigma4 = " << format_double(r.sigma.s4)
       << ", K1 = " << format_double(r.K1) << "\n";
    if (r.classification)
    {
        auto const& c = *r.classification;
        os << "  epsilon = " << (c.epsilon > 0 ? "+1" : "-1") << ", eta = " << format_double(c.eta_slope)
           << " (mu - mu*)\n";
        if (c.bubble_side != 0)
            os << "  endemic bubble for mu " << (c.bubble_side > 0 ? ">" : "<") << " mu*, width ~ "
               << format_double(c.bubble_coeff) << " sqrt|mu - mu*|\n";
        else
            os << "  no endemic bubble on either side of mu*\n";
    }
    else
        os << "  not classified: " << r.flagged << "\n";
    os << "  critical pair " << (r.stability.verified_hypothesis1 ? "isolated" : "NOT isolated")
       << " (rightmost real part " << format_double(r.stability.rightmost_real_part) << ")\n";
}

void write_report_keyvalue(DegeneracyReport const& r, std::ostream& os)
{
    auto kv = [&](std::string_view key, std::string const& value) { os << key << " = " << value << "\n"; };
    auto num = [&](std::string_view key, double v) { kv(key, format_double(v)); };
    auto const& p = r.point;

    os << "[degeneracy-report]\n";
    kv("model", r.model);
    num("tau", r.tau);
    num("lam_star", r.lam_star);
    num("mu_star", r.mu_star);
    num("ybar", p.ybar);
    num("alpha", p.alpha);
    num("beta", p.beta);
    num("alpha_lam", p.alpha_lam);
    num("beta_lam", p.beta_lam);
    num("alpha_mu", p.alpha_mu);
    num("beta_mu", p.beta_mu);
    num("alpha_lamlam", p.alpha_lamlam);
    num("beta_lamlam", p.beta_lamlam);
    num("omega_star", r.omega_star);
    num("residual_r1", r.residuals.r1);
    num("residual_r2", r.residuals.r2);
    kv("iterations", std::to_string(r.iterations));
    num("psi10_re", r.psi10.real());
    num("psi10_im", r.psi10.imag());
    num("sigma1", r.sigma.s1);
    num("sigma2", r.sigma.s2);
    num("sigma3", r.sigma.s3);
    num("sigma4", r.sigma.s4);
    num("sigma5", r.sigma.s5);
    num("sigma4_xi", r.half_xi_lamlam.real());
    num("G", r.G_value);
    num("f20", r.taylor.f20);
    num("f11", r.taylor.f11);
    num("f02", r.taylor.f02);
    num("f30", r.taylor.f30);
    num("f21", r.taylor.f21);
    num("f12", r.taylor.f12);
    num("f03", r.taylor.f03);
    num("K1", r.K1);
    num("K1_general", r.K1_general);
    kv("K2", "unavailable");
    num("kappa1", r.kappa1);
    num("kappa2", r.kappa2);
    num("rightmost_real_part", r.stability.rightmost_real_part);
    kv("critical_pair_isolated", r.stability.verified_hypothesis1 ? "true" : "false");
    if (r.classification)
    {
        auto const& c = *r.classification;
        kv("status", "classified");
        kv("epsilon", c.epsilon > 0 ? "+1" : "-1");
        num("eta_slope", c.eta_slope);
        num("bubble_coeff", c.bubble_coeff);
        kv("bubble_side", side_name(c.bubble_side));
        kv("diagram_class_below", std::string{to_string(c.below)});
        kv("diagram_class_above", std::string{to_string(c.above)});
    }
    else
    {
        kv("status", "flagged");
        kv("flagged", r.flagged);
    }
}

void write_sweep_csv(std::span<SweepRecord const> records, std::ostream& os)
{
    os << "lam,mu,outcome,y_eq,y_min,y_max,period\n";
    for (auto const& r : records)
    {
        auto const& s = r.summary;
        os << format_double(r.lam) << "," << format_double(r.mu) << "," << to_string(s.outcome) << ",";
        switch (s.outcome)
        {
        case Outcome::Equilibrium: os << format_double(s.y_eq) << ",,,"; break;
        case Outcome::Oscillation:
            os << "," << format_double(s.y_min) << "," << format_double(s.y_max) << ","
               << (s.period ? format_double(*s.period) : std::string{});
            break;
        case Outcome::Error: os << ",,,"; break;
        }
        os << "\n";
    }
}

int cmd_analyze(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        ModelSpec const m = cfg.model_spec();
        std::array<double, 2> guess{};
        if (cfg.guess)
            guess = *cfg.guess;
        else if (cfg.scan_lam && cfg.scan_mu)
        {
            auto const found = scan_degenerate_guess(m, cfg.scan_lam->lo, cfg.scan_lam->hi, cfg.scan_mu->lo,
                                                     cfg.scan_mu->hi, cfg.scan_points);
            if (!found)
                throw Error(ErrorKind::NonConvergence, "scan found no sign change of r2 along the Hopf curve");
            guess = *found;
            err << "scan guess: " << format_double(guess[0]) << "," << format_double(guess[1]) << "\n";
        }
        else
            throw Error(ErrorKind::InvalidConfig, "analyze needs --guess lam,mu (or --scan-lam and --scan-mu)");

        DegeneracyReport const r = analyze(m, guess[0], guess[1]);
        write_report_text(r, out);
        out << "\n";
        write_report_keyvalue(r, out);
        if (!cfg.out.empty())
        {
            Sink sink{cfg.out, out};
            write_report_keyvalue(r, sink.stream());
        }
        if (!r.classification)
        {
            err << "degeneracy beyond scope: " << r.flagged << "\n";
            return static_cast<int>(kOutOfScope);
        }
        return static_cast<int>(kOk);
    });
}

int cmd_hopf_curve(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        double tau = 0.0;
        if (cfg.tau)
            tau = *cfg.tau;
        else if (cfg.model || cfg.inline_model)
            tau = cfg.model_spec().tau();
        else
            throw Error(ErrorKind::InvalidConfig, "hopf-curve needs --tau or a model");
        if (!(tau > 0.0))
            throw Error(ErrorKind::InvalidConfig, "tau must be positive").with_value(tau);
        if (!cfg.omega_range)
            throw Error(ErrorKind::InvalidConfig, "hopf-curve needs --omega-range lo:hi");
        if (cfg.points < 1)
            throw Error(ErrorKind::InvalidConfig, "hopf-curve needs at least one point");

        Sink sink{cfg.out, out};
        auto& os = sink.stream();
        if (!cfg.no_header)
            os << "# ddehopf hopf-curve tau=" << format_double(tau) << " generated " << timestamp() << "\n";
        os << "omega,alpha,beta\n";
        double const lo = cfg.omega_range->lo;
        double const hi = cfg.omega_range->hi;
        int rows = 0;
        for (int i = 0; i < cfg.points; ++i)
        {
            double const w = lo + (i + 1) * (hi - lo) / (cfg.points + 1);
            try
            {
                auto const p = hopf_point(tau, w);
                os << format_double(p.omega) << "," << format_double(p.alpha) << "," << format_double(p.beta) << "\n";
                ++rows;
            }
            catch (Error const& e)
            {
                if (e.kind() != ErrorKind::SingularParametrization)
                    throw;
                os << "# skipped omega=" << format_double(w) << ": sin(tau omega) vanishes\n";
            }
        }
        if (sink.to_file())
            out << rows << " points written to " << cfg.out << "\n";
        return static_cast<int>(kOk);
    });
}

int cmd_sweep(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        ModelSpec const m = cfg.model_spec();
        if (!cfg.mu)
            throw Error(ErrorKind::InvalidConfig, "sweep needs --mu");
        if (!cfg.lam_range || !cfg.lam_range->step)
            throw Error(ErrorKind::InvalidConfig, "sweep needs --lam-range lo:hi:step");
        cfg.sim.validate(m.tau());
        auto const grid = uniform_grid(cfg.lam_range->lo, cfg.lam_range->hi, *cfg.lam_range->step);

        auto const records = sweep(m, *cfg.mu, grid, cfg.sim, cfg.workers);
        Sink sink{cfg.out, out};
        if (!cfg.no_header)
            sink.stream() << "# ddehopf sweep model=" << m.name() << " mu=" << format_double(*cfg.mu)
                          << " generated " << timestamp() << "\n";
        write_sweep_csv(records, sink.stream());

        auto const s = summarize(records);
        std::ostream& info = sink.to_file() ? out : err;
        if (s.bubble)
            info << "bubble present: width " << format_double(s.width) << " (lam " << format_double(s.lam_lo)
                 << " .. " << format_double(s.lam_hi) << ")";
        else
            info << "bubble absent";
        info << ", " << records.size() << " points, " << s.errors << " errors\n";
        for (auto const& r : records)
            if (r.summary.outcome == Outcome::Error)
                err << "lam=" << format_double(r.lam) << ": " << r.error << "\n";
        return s.errors == records.size() ? static_cast<int>(kNumerical) : static_cast<int>(kOk);
    });
}

int cmd_simulate(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        ModelSpec const m = cfg.model_spec();
        if (!cfg.lam || !cfg.mu)
            throw Error(ErrorKind::InvalidConfig, "simulate needs --lam and --mu");
        cfg.sim.validate(m.tau());
        auto const r = simulate_point(m, *cfg.lam, *cfg.mu, cfg.sim);

        Sink sink{cfg.out, out};
        auto& os = sink.stream();
        if (!cfg.no_header)
            os << "# ddehopf simulate model=" << m.name() << " lam=" << format_double(*cfg.lam)
               << " mu=" << format_double(*cfg.mu) << " generated " << timestamp() << "\n";
        os << "t,x\n";
        for (std::size_t i = 0; i < r.window.y.size(); ++i)
            os << format_double(r.window.time(i)) << "," << format_double(r.window.y[i]) << "\n";

        std::ostream& info = sink.to_file() ? out : err;
        auto const& s = r.summary;
        info << "outcome = " << to_string(s.outcome) << "\n";
        if (s.outcome == Outcome::Equilibrium)
            info << "y_eq = " << format_double(s.y_eq) << "\n";
        else
        {
            info << "y_min = " << format_double(s.y_min) << "\ny_max = " << format_double(s.y_max) << "\n";
            if (s.period)
                info << "period = " << format_double(*s.period) << "\n";
        }
        info << "t_end = " << format_double(r.t_end) << "\n";
        return static_cast<int>(kOk);
    });
}

int cmd_verify(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        VerifyOptions opts;
        opts.tolerance = cfg.tolerance;
        auto const checks = run_verify(opts);
        write_verify(checks, out);
        bool const ok = std::all_of(checks.begin(), checks.end(), [](auto const& c) { return c.pass; });
        return ok ? static_cast<int>(kOk) : static_cast<int>(kVerifyFailed);
    });
}

} // namespace ddehopf::cli
