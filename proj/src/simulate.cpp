#include "ddehopf/simulate.hpp"

#include "ddehopf/equilibria.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace ddehopf {

int SimConfig::steps_per_delay(double tau) const
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw Error(ErrorKind::InvalidConfig, "step must be positive").with_value(step);
    double const ratio = tau / step;
    double const n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-9 * ratio)
        throw Error(ErrorKind::InvalidConfig, "step must divide tau exactly").with_value(step);
    if (n < 50)
        throw Error(ErrorKind::InvalidConfig, "step must be at most tau/50").with_value(step);
    return static_cast<int>(n);
}

void SimConfig::validate(double tau, std::optional<double> omega) const
{
    static_cast<void>(steps_per_delay(tau));
    if (!(t_transient >= 0.0))
        throw Error(ErrorKind::InvalidConfig, "transient time must be nonnegative").with_value(t_transient);
    double const minimum = omega ? 20.0 * 2.0 * std::numbers::pi / *omega : 500.0;
    if (!(t_record >= minimum))
        throw Error(ErrorKind::InvalidConfig, "record window must be at least " + std::to_string(minimum)
                                                  + " time units")
            .with_value(t_record);
    if (!(amplitude_threshold > 0.0))
        throw Error(ErrorKind::InvalidConfig, "amplitude threshold must be positive").with_value(amplitude_threshold);
    if (!(settle_max >= 0.0))
        throw Error(ErrorKind::InvalidConfig, "settle time must be nonnegative").with_value(settle_max);
}

// ---------------------------------------------------------------------------------------------------------------------

Integrator::Integrator(ModelSpec const& m, double lam, double mu, double step, double history_value)
    : rhs_(m.rhs()), lam_(lam), mu_(mu), h_(step), hist_(history_value)
{
    SimConfig probe;
    probe.step = step;
    N_ = probe.steps_per_delay(m.tau());
    y_.assign(static_cast<std::size_t>(N_ + 1), hist_);
    f_.assign(static_cast<std::size_t>(N_ + 1), 0.0);
    f_[slot(0)] = rhs(hist_, hist_);
}

std::size_t Integrator::slot(long n) const noexcept
{
    long const size = N_ + 1;
    return static_cast<std::size_t>(((n % size) + size) % size);
}

double Integrator::rhs(double x, double xd) const { return eval_real(rhs_, x, xd, lam_, mu_); }

double Integrator::delayed_node(long k) const noexcept { return k < 0 ? hist_ : y_[slot(k)]; }

double Integrator::delayed_mid(long n) const noexcept
{
    long const k = n - N_;
    if (k < 0)
        return hist_;
    double const y0 = y_[slot(k)];
    double const y1 = y_[slot(k + 1)];
    return 0.5 * (y0 + y1) + h_ * (f_[slot(k)] - f_[slot(k + 1)]) / 8.0;
}

void Integrator::advance(long steps, std::vector<double>* out, double bound)
{
    for (long s = 0; s < steps; ++s)
    {
        double const y = y_[slot(n_)];
        double const xdm = delayed_mid(n_);
        double const xd1 = delayed_node(n_ - N_ + 1);

        double const k1 = f_[slot(n_)];
        double const k2 = rhs(y + 0.5 * h_ * k1, xdm);
        double const k3 = rhs(y + 0.5 * h_ * k2, xdm);
        double const k4 = rhs(y + h_ * k3, xd1);
        double const y1 = y + h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        ++n_;
        if (!std::isfinite(y1) || std::abs(y1) > bound)
            throw Error(ErrorKind::BlowUp, "solution left |x| <= " + std::to_string(bound) + " at t = "
                                               + std::to_string(time()))
                .with_value(time());
        y_[slot(n_)] = y1;
        f_[slot(n_)] = rhs(y1, xd1);
        if (out)
            out->push_back(y1);
    }
}

double history_value(ModelSpec const& m, double lam, double mu, SimConfig const& cfg)
{
    if (auto const* c = std::get_if<ConstantHistory>(&cfg.history))
        return c->value;
    return solve_equilibrium(m, lam, mu) + std::get<EquilibriumHistory>(cfg.history).perturbation;
}

namespace {

long steps_for(double duration, double h) { return std::lround(duration / h); }

Trajectory record_window(Integrator& integ, double duration, double bound)
{
    Trajectory tr;
    tr.t0 = integ.time();
    tr.h = integ.step();
    long const n = steps_for(duration, integ.step());
    tr.y.reserve(static_cast<std::size_t>(n + 1));
    tr.y.push_back(integ.state());
    integ.advance(n, &tr.y, bound);
    return tr;
}

} // namespace

Trajectory integrate(ModelSpec const& m, double lam, double mu, SimConfig const& cfg)
{
    Integrator integ{m, lam, mu, cfg.step, history_value(m, lam, mu, cfg)};
    integ.advance(steps_for(cfg.t_transient, cfg.step), nullptr, cfg.blowup_bound);
    return record_window(integ, cfg.t_record, cfg.blowup_bound);
}

std::string_view to_string(Outcome o) noexcept
{
    switch (o)
    {
    case Outcome::Equilibrium: return "equilibrium";
    case Outcome::Oscillation: return "oscillation";
    case Outcome::Error: return "error";
    }
    return "?";
}

AttractorSummary classify_attractor(Trajectory const& samples, double amplitude_threshold)
{
    auto const& y = samples.y;
    if (y.size() < 2)
        throw Error(ErrorKind::PreconditionFailed, "need at least two samples");

    auto const [lo, hi] = std::minmax_element(y.begin(), y.end());
    AttractorSummary s;
    s.y_min = *lo;
    s.y_max = *hi;
    double sum = 0.0;
    for (double v : y)
        sum += v;
    double const mean = sum / static_cast<double>(y.size());

    if (s.amplitude() < amplitude_threshold)
    {
        s.outcome = Outcome::Equilibrium;
        s.y_eq = mean;
        return s;
    }

    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i] < mean && y[i + 1] >= mean)
        {
            double const frac = (mean - y[i]) / (y[i + 1] - y[i]);
            crossings.push_back(samples.time(i) + frac * samples.h);
        }
    if (crossings.size() < 3)
        throw Error(ErrorKind::Unclassifiable, "oscillating window has fewer than 3 upward mean-crossings")
            .with_value(static_cast<double>(crossings.size()));

    s.outcome = Outcome::Oscillation;
    s.period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return s;
}

PointResult simulate_point(ModelSpec const& m, double lam, double mu, SimConfig const& cfg)
{
    Integrator integ{m, lam, mu, cfg.step, history_value(m, lam, mu, cfg)};
    integ.advance(steps_for(cfg.t_transient, cfg.step), nullptr, cfg.blowup_bound);

    PointResult r;
    r.window = record_window(integ, cfg.t_record, cfg.blowup_bound);
    double amplitude = *std::max_element(r.window.y.begin(), r.window.y.end())
                       - *std::min_element(r.window.y.begin(), r.window.y.end());
    double const deadline = integ.time() + cfg.settle_max;
    double previous = std::numeric_limits<double>::infinity();
    while (amplitude >= cfg.amplitude_threshold && amplitude < cfg.settle_ratio * previous
           && integ.time() + cfg.t_record <= deadline + 0.5 * cfg.step)
    {
        previous = amplitude;
        r.window = record_window(integ, cfg.t_record, cfg.blowup_bound);
        amplitude = *std::max_element(r.window.y.begin(), r.window.y.end())
                    - *std::min_element(r.window.y.begin(), r.window.y.end());
    }
    r.summary = classify_attractor(r.window, cfg.amplitude_threshold);
    r.t_end = integ.time();
    return r;
}

std::vector<SweepRecord> sweep(ModelSpec const& m, double mu, std::span<double const> lam_grid, SimConfig const& cfg,
                               int workers)
{
    if (lam_grid.empty())
        throw Error(ErrorKind::PreconditionFailed, "sweep grid is empty");
    if (!std::is_sorted(lam_grid.begin(), lam_grid.end()))
        throw Error(ErrorKind::PreconditionFailed, "sweep grid must be sorted ascending");

    std::vector<SweepRecord> out(lam_grid.size());
    std::atomic<std::size_t> next{0};
    auto job = [&] {
        for (std::size_t i = next++; i < lam_grid.size(); i = next++)
        {
            SweepRecord& rec = out[i];
            rec.lam = lam_grid[i];
            rec.mu = mu;
            try
            {
                rec.summary = simulate_point(m, rec.lam, mu, cfg).summary;
            }
            catch (Error const& e)
            {
                rec.summary = AttractorSummary{};
                rec.summary.outcome = Outcome::Error;
                rec.error = e.what();
            }
        }
    };

    unsigned n = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(lam_grid.size()));
    if (n <= 1)
    {
        job();
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i)
        pool.emplace_back(job);
    pool.clear();
    return out;
}

SweepSummary summarize(std::span<SweepRecord const> records)
{
    SweepSummary s;
    double const step = records.size() > 1 ? records[1].lam - records[0].lam : 0.0;
    std::size_t best = 0;
    std::size_t run = 0;
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        if (records[i].summary.outcome == Outcome::Error)
            ++s.errors;
        if (records[i].summary.outcome == Outcome::Oscillation)
        {
            ++run;
            if (run > best)
            {
                best = run;
                s.lam_lo = records[i + 1 - run].lam;
                s.lam_hi = records[i].lam;
            }
        }
        else
            run = 0;
    }
    s.bubble = best > 0;
    s.width = static_cast<double>(best) * step;
    return s;
}

std::vector<double> uniform_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw Error(ErrorKind::InvalidConfig, "grid needs lo <= hi and a positive step");
    auto const n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n + 1));
    for (long i = 0; i <= n; ++i)
        g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

} // namespace ddehopf
