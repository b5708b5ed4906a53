#pragma once

#include "ddehopf/error.hpp"
#include "ddehopf/expr.hpp"

#include <array>
#include <cstddef>

namespace ddehopf {

/// Multi-index (j, k, a, b): orders in x, xd, lam, mu.
struct JetIndex
{
    int j = 0;
    int k = 0;
    int a = 0;
    int b = 0;

    friend bool operator==(JetIndex const&, JetIndex const&) = default;
};

/// Truncated multivariate Taylor polynomial in (x, xd, lam, mu).
///
/// Retains every coefficient with j + k <= 3 and a + b <= 2. The discarded monomials form an ideal, so
/// sums and products computed here equal the truncation of the exact products. Coefficients are Taylor
/// coefficients: derivative divided by j! k! a! b!.
class Jet
{
public:
    static constexpr int kStateOrder = 3;
    static constexpr int kParamOrder = 2;
    static constexpr std::size_t kStateTerms = 10; // (j, k) with j + k <= 3
    static constexpr std::size_t kParamTerms = 6;  // (a, b) with a + b <= 2
    static constexpr std::size_t kSize = kStateTerms * kParamTerms;

    constexpr Jet() noexcept = default;
    Jet(double constant) noexcept; // NOLINT(google-explicit-constructor)

    /// c + (unit in the given variable).
    static Jet variable(Var v, double base) noexcept;

    [[nodiscard]] static bool retained(JetIndex i) noexcept;
    [[nodiscard]] static std::size_t flat(JetIndex i);
    [[nodiscard]] static JetIndex unflat(std::size_t n) noexcept;

    [[nodiscard]] double value() const noexcept { return c_[0]; }
    [[nodiscard]] double operator[](JetIndex i) const { return c_[flat(i)]; }
    [[nodiscard]] double coeff(int j, int k, int a, int b) const { return c_[flat({j, k, a, b})]; }
    void set(JetIndex i, double v) { c_[flat(i)] = v; }

    [[nodiscard]] std::array<double, kSize> const& coefficients() const noexcept { return c_; }

    /// True when only the order-0 coefficient can be nonzero.
    [[nodiscard]] bool is_constant() const noexcept;

    Jet& operator+=(Jet const& o) noexcept;
    Jet& operator-=(Jet const& o) noexcept;
    Jet& operator*=(double s) noexcept;

    friend Jet operator+(Jet a, Jet const& b) noexcept { return a += b; }
    friend Jet operator-(Jet a, Jet const& b) noexcept { return a -= b; }
    friend Jet operator-(Jet a) noexcept { return a *= -1.0; }
    friend Jet operator*(Jet a, double s) noexcept { return a *= s; }
    friend Jet operator*(double s, Jet a) noexcept { return a *= s; }
    friend Jet operator*(Jet const& a, Jet const& b) noexcept;

    /// Throws Error{Domain} when the divisor has zero constant term.
    friend Jet operator/(Jet const& a, Jet const& b);

    /// g(c + v) = sum_n g^(n)(c)/n! v^n, given derivs[n] = g^(n)(c) for n = 0..5.
    [[nodiscard]] Jet compose(std::array<double, 6> const& derivs) const noexcept;

private:
    std::array<double, kSize> c_{};
};

Jet exp(Jet const& u);
Jet log(Jet const& u, SourcePos pos = {});
Jet sin(Jet const& u);
Jet cos(Jet const& u);
Jet sqrt(Jet const& u, SourcePos pos = {});
Jet pow(Jet const& base, Jet const& exponent, SourcePos pos = {});
Jet reciprocal(Jet const& u, SourcePos pos = {});

/// Inputs for a jet evaluation; each variable may itself be a jet, which composes expansions.
struct JetPoint
{
    Jet x;
    Jet xd;
    Jet lam;
    Jet mu;
};

/// Taylor expansion of `e` about `base`: coefficient (j,k,a,b) is the mixed partial divided by j!k!a!b!.
Jet eval_jet(Expr const& e, Point const& base);

/// Evaluates `e` with jet-valued inputs (chain rule through composition).
Jet eval_jet(Expr const& e, JetPoint const& at);

} // namespace ddehopf
