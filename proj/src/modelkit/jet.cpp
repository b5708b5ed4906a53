#include "ddehopf/jet.hpp"

#include <cmath>
#include <vector>

namespace ddehopf {

namespace {

// (j, k) with j + k = d occupy [d(d+1)/2, (d+1)(d+2)/2), ordered by k
constexpr std::size_t graded_index(int first, int second) noexcept
{
    int const d = first + second;
    return static_cast<std::size_t>(d * (d + 1) / 2 + second);
}

constexpr std::array<std::pair<int, int>, 10> kGraded = {{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3},
}};

struct ProductTerm
{
    std::uint8_t lhs;
    std::uint8_t rhs;
    std::uint8_t out;
};

std::vector<ProductTerm> build_product_table()
{
    std::vector<ProductTerm> table;
    for (std::size_t p = 0; p < Jet::kSize; ++p)
    {
        auto const ip = Jet::unflat(p);
        for (std::size_t q = 0; q < Jet::kSize; ++q)
        {
            auto const iq = Jet::unflat(q);
            JetIndex const sum{ip.j + iq.j, ip.k + iq.k, ip.a + iq.a, ip.b + iq.b};
            if (Jet::retained(sum))
                table.push_back({static_cast<std::uint8_t>(p), static_cast<std::uint8_t>(q),
                                 static_cast<std::uint8_t>(Jet::flat(sum))});
        }
    }
    return table;
}

std::vector<ProductTerm> const& product_table()
{
    static auto const table = build_product_table();
    return table;
}

constexpr std::array<double, 6> kFactorial = {1.0, 1.0, 2.0, 6.0, 24.0, 120.0};

} // namespace

Jet::Jet(double constant) noexcept { c_[0] = constant; }

Jet Jet::variable(Var v, double base) noexcept
{
    Jet r{base};
    switch (v)
    {
    case Var::X: r.c_[flat({1, 0, 0, 0})] = 1.0; break;
    case Var::Xd: r.c_[flat({0, 1, 0, 0})] = 1.0; break;
    case Var::Lam: r.c_[flat({0, 0, 1, 0})] = 1.0; break;
    case Var::Mu: r.c_[flat({0, 0, 0, 1})] = 1.0; break;
    }
    return r;
}

bool Jet::retained(JetIndex i) noexcept
{
    return i.j >= 0 && i.k >= 0 && i.a >= 0 && i.b >= 0 && i.j + i.k <= kStateOrder && i.a + i.b <= kParamOrder;
}

std::size_t Jet::flat(JetIndex i)
{
    if (!retained(i))
        throw Error(ErrorKind::PreconditionFailed, "jet index outside the retained orders");
    return graded_index(i.j, i.k) * kParamTerms + graded_index(i.a, i.b);
}

JetIndex Jet::unflat(std::size_t n) noexcept
{
    auto const [j, k] = kGraded[n / kParamTerms];
    auto const [a, b] = kGraded[n % kParamTerms];
    return {j, k, a, b};
}

bool Jet::is_constant() const noexcept
{
    for (std::size_t i = 1; i < kSize; ++i)
        if (c_[i] != 0.0)
            return false;
    return true;
}

Jet& Jet::operator+=(Jet const& o) noexcept
{
    for (std::size_t i = 0; i < kSize; ++i)
        c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(Jet const& o) noexcept
{
    for (std::size_t i = 0; i < kSize; ++i)
        c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) noexcept
{
    for (auto& c : c_)
        c *= s;
    return *this;
}

Jet operator*(Jet const& a, Jet const& b) noexcept
{
    Jet r;
    for (auto const& t : product_table())
        r.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
    return r;
}

Jet operator/(Jet const& a, Jet const& b) { return a * reciprocal(b); }

Jet Jet::compose(std::array<double, 6> const& derivs) const noexcept
{
    Jet v = *this;
    v.c_[0] = 0.0;
    // every monomial of v has total order >= 1 and retained orders sum to at most 5, so v^6 = 0
    Jet r{derivs[5] / kFactorial[5]};
    for (int n = 4; n >= 0; --n)
    {
        r = r * v;
        r.c_[0] += derivs[n] / kFactorial[n];
    }
    return r;
}

Jet exp(Jet const& u)
{
    double const e = std::exp(u.value());
    return u.compose({e, e, e, e, e, e});
}

Jet log(Jet const& u, SourcePos pos)
{
    double const c = u.value();
    if (!(c > 0.0))
        throw Error(ErrorKind::Domain, "ln of a nonpositive value", pos).with_value(c);
    std::array<double, 6> d{std::log(c)};
    double inv = 1.0 / c;
    double p = inv;
    for (int n = 1; n < 6; ++n)
    {
        // (-1)^(n-1) (n-1)! / c^n
        d[n] = ((n % 2 == 1) ? 1.0 : -1.0) * kFactorial[n - 1] * p;
        p *= inv;
    }
    return u.compose(d);
}

Jet sin(Jet const& u)
{
    double const s = std::sin(u.value());
    double const c = std::cos(u.value());
    return u.compose({s, c, -s, -c, s, c});
}

Jet cos(Jet const& u)
{
    double const s = std::sin(u.value());
    double const c = std::cos(u.value());
    return u.compose({c, -s, -c, s, c, -s});
}

namespace {

// derivatives of t -> t^r at c > 0
std::array<double, 6> power_derivatives(double c, double r)
{
    std::array<double, 6> d{};
    double falling = 1.0;
    for (int n = 0; n < 6; ++n)
    {
        d[n] = falling * std::pow(c, r - n);
        falling *= (r - n);
    }
    return d;
}

Jet integer_power(Jet const& base, long long n)
{
    Jet result{1.0};
    Jet factor = base;
    auto m = n < 0 ? -n : n;
    while (m > 0)
    {
        if (m & 1)
            result = result * factor;
        m >>= 1;
        if (m > 0)
            factor = factor * factor;
    }
    return result;
}

} // namespace

Jet sqrt(Jet const& u, SourcePos pos)
{
    double const c = u.value();
    if (u.is_constant() && c >= 0.0)
        return Jet{std::sqrt(c)};
    if (!(c > 0.0))
        throw Error(ErrorKind::Domain, "sqrt expansion needs a positive argument", pos).with_value(c);
    return u.compose(power_derivatives(c, 0.5));
}

Jet reciprocal(Jet const& u, SourcePos pos)
{
    double const c = u.value();
    if (c == 0.0)
        throw Error(ErrorKind::Domain, "division by a jet with zero constant term", pos).with_value(c);
    std::array<double, 6> d{};
    double p = 1.0 / c;
    for (int n = 0; n < 6; ++n)
    {
        d[n] = ((n % 2 == 0) ? 1.0 : -1.0) * kFactorial[n] * p;
        p /= c;
    }
    return u.compose(d);
}

Jet pow(Jet const& base, Jet const& exponent, SourcePos pos)
{
    double const c = base.value();
    if (exponent.is_constant())
    {
        double const r = exponent.value();
        if (r == std::floor(r) && std::abs(r) <= 64.0)
        {
            auto const n = static_cast<long long>(r);
            if (n < 0)
                return reciprocal(integer_power(base, -n), pos);
            return integer_power(base, n);
        }
        if (base.is_constant() && c >= 0.0)
            return Jet{std::pow(c, r)};
        if (!(c > 0.0))
            throw Error(ErrorKind::Domain, "non-integer power needs a positive base", pos).with_value(c);
        return base.compose(power_derivatives(c, r));
    }
    if (!(c > 0.0))
        throw Error(ErrorKind::Domain, "variable exponent needs a positive base", pos).with_value(c);
    return exp(exponent * log(base, pos));
}

// ---------------------------------------------------------------------------------------------------------------------

Jet eval_jet(Expr const& e, JetPoint const& at)
{
    auto const nodes = e.nodes();
    if (nodes.empty())
        throw Error(ErrorKind::InvalidModel, "empty expression");

    std::vector<Jet> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        auto const& n = nodes[i];
        switch (n.op)
        {
        case Op::Const: v[i] = Jet{n.value}; break;
        case Op::Variable:
            switch (n.var)
            {
            case Var::X: v[i] = at.x; break;
            case Var::Xd: v[i] = at.xd; break;
            case Var::Lam: v[i] = at.lam; break;
            case Var::Mu: v[i] = at.mu; break;
            }
            break;
        case Op::Add: v[i] = v[n.lhs] + v[n.rhs]; break;
        case Op::Sub: v[i] = v[n.lhs] - v[n.rhs]; break;
        case Op::Mul: v[i] = v[n.lhs] * v[n.rhs]; break;
        case Op::Div: v[i] = v[n.lhs] * reciprocal(v[n.rhs], n.pos); break;
        case Op::Pow: v[i] = pow(v[n.lhs], v[n.rhs], n.pos); break;
        case Op::Neg: v[i] = -v[n.lhs]; break;
        case Op::Exp: v[i] = exp(v[n.lhs]); break;
        case Op::Ln: v[i] = log(v[n.lhs], n.pos); break;
        case Op::Sin: v[i] = sin(v[n.lhs]); break;
        case Op::Cos: v[i] = cos(v[n.lhs]); break;
        case Op::Sqrt: v[i] = sqrt(v[n.lhs], n.pos); break;
        }
    }
    return v.back();
}

Jet eval_jet(Expr const& e, Point const& base)
{
    return eval_jet(e, JetPoint{Jet::variable(Var::X, base.x), Jet::variable(Var::Xd, base.xd),
                                Jet::variable(Var::Lam, base.lam), Jet::variable(Var::Mu, base.mu)});
}

} // namespace ddehopf
