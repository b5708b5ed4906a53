#pragma once

#include "ddehopf/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ddehopf {

/// x(t) = value on [-tau, 0].
struct ConstantHistory
{
    double value = 0.0;
};

/// x(t) = ybar(lam, mu) + perturbation on [-tau, 0].
struct EquilibriumHistory
{
    double perturbation = 1e-3;
};

using History = std::variant<ConstantHistory, EquilibriumHistory>;

struct SimConfig
{
    double step = 0.05;                 ///< must equal tau / N for an integer N >= 50
    double t_transient = 2000.0;
    double t_record = 500.0;
    History history = EquilibriumHistory{};
    double amplitude_threshold = 1e-6;
    double blowup_bound = 1e6;
    /// Extra time allowed for record windows that are still shrinking above the threshold; 0 disables.
    double settle_max = 1.5e6;
    /// A window counts as still shrinking when its amplitude is below settle_ratio times the previous one.
    double settle_ratio = 0.999;

    /// N = tau / step. Throws InvalidConfig unless step divides tau into at least 50 parts.
    [[nodiscard]] int steps_per_delay(double tau) const;

    /// Throws InvalidConfig on a bad step, negative transient, or a record window shorter than
    /// 20 periods 2 pi / omega (when omega is known) or 500 time units otherwise.
    void validate(double tau, std::optional<double> omega = std::nullopt) const;
};

/// Samples y[i] at t0 + i h.
struct Trajectory
{
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> y;

    [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * h; }
};

/// Method-of-steps RK4 on a fixed grid of step tau / N. Delayed values at half steps come from the cubic Hermite
/// interpolant of the stored nodes and their right-hand-side derivatives.
class Integrator
{
public:
    /// Throws InvalidConfig for a bad step.
    Integrator(ModelSpec const& m, double lam, double mu, double step, double history_value);

    /// Advance `steps` steps; when `out` is given, append every new node value.
    /// Throws BlowUp (value = time) when |x| exceeds `bound` or becomes non-finite.
    void advance(long steps, std::vector<double>* out = nullptr, double bound = 1e6);

    [[nodiscard]] double time() const noexcept { return static_cast<double>(n_) * h_; }
    [[nodiscard]] double state() const noexcept { return y_[slot(n_)]; }
    [[nodiscard]] double step() const noexcept { return h_; }

private:
    [[nodiscard]] std::size_t slot(long n) const noexcept;
    [[nodiscard]] double delayed_node(long n) const noexcept;
    [[nodiscard]] double delayed_mid(long n) const noexcept;
    [[nodiscard]] double rhs(double x, double xd) const;

    Expr rhs_;
    double lam_;
    double mu_;
    double h_;
    long N_;
    long n_ = 0;
    double hist_;
    std::vector<double> y_;  // ring over nodes n - N .. n
    std::vector<double> f_;
};

/// History value for cfg at (lam, mu); solves for the equilibrium when needed.
double history_value(ModelSpec const& m, double lam, double mu, SimConfig const& cfg);

/// Integrates through the transient and returns samples at every step over [t_transient, t_transient + t_record].
Trajectory integrate(ModelSpec const& m, double lam, double mu, SimConfig const& cfg);

enum class Outcome
{
    Equilibrium,
    Oscillation,
    Error,
};

std::string_view to_string(Outcome o) noexcept;

struct AttractorSummary
{
    Outcome outcome = Outcome::Equilibrium;
    double y_eq = 0.0;                 ///< window mean, for Equilibrium
    double y_min = 0.0;
    double y_max = 0.0;
    std::optional<double> period;      ///< mean spacing of upward mean-crossings, for Oscillation
    [[nodiscard]] double amplitude() const noexcept { return y_max - y_min; }
};

/// Throws Unclassifiable when the amplitude is above threshold but fewer than 3 upward mean-crossings occur,
/// and PreconditionFailed for fewer than two samples.
AttractorSummary classify_attractor(Trajectory const& samples, double amplitude_threshold);

struct PointResult
{
    Trajectory window;           ///< last record window
    AttractorSummary summary;
    double t_end = 0.0;          ///< end time including any settle extension
};

/// integrate + classify_attractor, extending by further record windows while the amplitude is above the threshold
/// and each window shrinks by at least the factor cfg.settle_ratio, up to cfg.settle_max extra time.
PointResult simulate_point(ModelSpec const& m, double lam, double mu, SimConfig const& cfg);

struct SweepRecord
{
    double lam = 0.0;
    double mu = 0.0;
    AttractorSummary summary;
    std::string error;           ///< set when summary.outcome == Error
};

/// One record per grid value, in grid order; per-point errors become Error records.
/// `workers` <= 0 selects the hardware concurrency. Throws PreconditionFailed for an unsorted or empty grid.
std::vector<SweepRecord> sweep(ModelSpec const& m, double mu, std::span<double const> lam_grid, SimConfig const& cfg,
                               int workers = 0);

struct SweepSummary
{
    bool bubble = false;
    double width = 0.0;          ///< longest contiguous oscillation run, count times grid step
    double lam_lo = 0.0;         ///< first and last lam of that run
    double lam_hi = 0.0;
    std::size_t errors = 0;
};

SweepSummary summarize(std::span<SweepRecord const> records);

/// lo, lo + step, ... up to hi inclusive, tolerating rounding in (hi - lo) / step.
std::vector<double> uniform_grid(double lo, double hi, double step);

} // namespace ddehopf
