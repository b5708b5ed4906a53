#include "ddehopf/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>

namespace ddehopf {

std::string_view to_string(Var v) noexcept
{
    switch (v)
    {
    case Var::X: return "x";
    case Var::Xd: return "xd";
    case Var::Lam: return "lam";
    case Var::Mu: return "mu";
    }
    return "?";
}

Expr::Expr(std::vector<Node> nodes) : nodes_(std::make_shared<std::vector<Node> const>(std::move(nodes))) {}

std::span<Node const> Expr::nodes() const noexcept
{
    if (!nodes_)
        return {};
    return {nodes_->data(), nodes_->size()};
}

bool Expr::depends_on(Var v) const noexcept
{
    for (auto const& n : nodes())
        if (n.op == Op::Variable && n.var == v)
            return true;
    return false;
}

namespace {

bool equal_subtree(std::span<Node const> a, std::int32_t ia, std::span<Node const> b, std::int32_t ib)
{
    auto const& na = a[ia];
    auto const& nb = b[ib];
    if (na.op != nb.op)
        return false;
    switch (na.op)
    {
    case Op::Const: return na.value == nb.value || (std::isnan(na.value) && std::isnan(nb.value));
    case Op::Variable: return na.var == nb.var;
    default: break;
    }
    if (!equal_subtree(a, na.lhs, b, nb.lhs))
        return false;
    if (is_binary(na.op))
        return equal_subtree(a, na.rhs, b, nb.rhs);
    return true;
}

// Appends `src` to `dst`, shifting child indices; returns the index of the copied root.
std::int32_t append(std::vector<Node>& dst, Expr const& src)
{
    auto const offset = static_cast<std::int32_t>(dst.size());
    for (Node n : src.nodes())
    {
        if (n.lhs >= 0)
            n.lhs += offset;
        if (n.rhs >= 0)
            n.rhs += offset;
        dst.push_back(n);
    }
    return static_cast<std::int32_t>(dst.size()) - 1;
}

} // namespace

bool operator==(Expr const& a, Expr const& b)
{
    if (a.empty() || b.empty())
        return a.empty() == b.empty();
    return equal_subtree(a.nodes(), static_cast<std::int32_t>(a.size()) - 1, b.nodes(),
                         static_cast<std::int32_t>(b.size()) - 1);
}

Expr Expr::constant(double v)
{
    Node n;
    n.op = Op::Const;
    n.value = v;
    return Expr{{n}};
}

Expr Expr::variable(Var v)
{
    Node n;
    n.op = Op::Variable;
    n.var = v;
    return Expr{{n}};
}

Expr Expr::unary(Op op, Expr const& a)
{
    if (!is_unary(op))
        throw Error(ErrorKind::InvalidModel, "not a unary operator");
    std::vector<Node> nodes;
    nodes.reserve(a.size() + 1);
    Node n;
    n.op = op;
    n.lhs = append(nodes, a);
    nodes.push_back(n);
    return Expr{std::move(nodes)};
}

Expr Expr::binary(Op op, Expr const& a, Expr const& b)
{
    if (!is_binary(op))
        throw Error(ErrorKind::InvalidModel, "not a binary operator");
    std::vector<Node> nodes;
    nodes.reserve(a.size() + b.size() + 1);
    Node n;
    n.op = op;
    n.lhs = append(nodes, a);
    n.rhs = append(nodes, b);
    nodes.push_back(n);
    return Expr{std::move(nodes)};
}

// ---------------------------------------------------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------------------------------------------------

namespace {

int precedence(Node const& n)
{
    switch (n.op)
    {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        return "nan";
    return {buf.data(), end};
}

char const* function_name(Op op)
{
    switch (op)
    {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Sqrt: return "sqrt";
    default: return nullptr;
    }
}

std::string print(std::span<Node const> nodes, std::int32_t i)
{
    auto const& n = nodes[i];
    auto wrap = [](std::string s) { return "(" + s + ")"; };
    switch (n.op)
    {
    case Op::Const: {
        auto s = format_number(n.value);
        // "(-2)" reparses to a negative literal; a bare "-2" inside a product would not
        return std::signbit(n.value) ? wrap(s) : s;
    }
    case Op::Variable: return std::string{to_string(n.var)};
    case Op::Neg: {
        auto const& child = nodes[n.lhs];
        auto inner = print(nodes, n.lhs);
        // "-(2)" keeps Neg(Const) distinct from the folded literal "-2"
        if (precedence(child) < 3 || (child.op == Op::Const && !std::signbit(child.value)))
            inner = wrap(inner);
        return "-" + inner;
    }
    case Op::Pow: {
        auto base = print(nodes, n.lhs);
        auto expo = print(nodes, n.rhs);
        if (precedence(nodes[n.lhs]) <= 4)
            base = wrap(base);
        if (precedence(nodes[n.rhs]) < 3)
            expo = wrap(expo);
        return base + "^" + expo;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
        int const p = precedence(n);
        auto lhs = print(nodes, n.lhs);
        auto rhs = print(nodes, n.rhs);
        if (precedence(nodes[n.lhs]) < p)
            lhs = wrap(lhs);
        if (precedence(nodes[n.rhs]) <= p)
            rhs = wrap(rhs);
        char const* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
        return lhs + sym + rhs;
    }
    default: return std::string{function_name(n.op)} + "(" + print(nodes, n.lhs) + ")";
    }
}

} // namespace

std::string to_string(Expr const& e)
{
    if (e.empty())
        return {};
    return print(e.nodes(), static_cast<std::int32_t>(e.size()) - 1);
}

// ---------------------------------------------------------------------------------------------------------------------
// real evaluation
// ---------------------------------------------------------------------------------------------------------------------

namespace {

[[noreturn]] void domain_error(char const* what, SourcePos pos, double arg)
{
    throw Error(ErrorKind::Domain, what, pos).with_value(arg);
}

double apply(Node const& n, double const* v, Point const& at)
{
    switch (n.op)
    {
    case Op::Const: return n.value;
    case Op::Variable:
        switch (n.var)
        {
        case Var::X: return at.x;
        case Var::Xd: return at.xd;
        case Var::Lam: return at.lam;
        case Var::Mu: return at.mu;
        }
        return 0.0;
    case Op::Add: return v[n.lhs] + v[n.rhs];
    case Op::Sub: return v[n.lhs] - v[n.rhs];
    case Op::Mul: return v[n.lhs] * v[n.rhs];
    case Op::Div:
        if (v[n.rhs] == 0.0)
            domain_error("division by zero", n.pos, v[n.rhs]);
        return v[n.lhs] / v[n.rhs];
    case Op::Pow: {
        double const b = v[n.lhs];
        double const e = v[n.rhs];
        if (b == 0.0 && e < 0.0)
            domain_error("zero raised to a negative power", n.pos, e);
        double const r = std::pow(b, e);
        if (std::isnan(r) && !std::isnan(b) && !std::isnan(e))
            domain_error("negative base with non-integer exponent", n.pos, b);
        return r;
    }
    case Op::Neg: return -v[n.lhs];
    case Op::Exp: return std::exp(v[n.lhs]);
    case Op::Ln:
        if (!(v[n.lhs] > 0.0))
            domain_error("ln of a nonpositive value", n.pos, v[n.lhs]);
        return std::log(v[n.lhs]);
    case Op::Sin: return std::sin(v[n.lhs]);
    case Op::Cos: return std::cos(v[n.lhs]);
    case Op::Sqrt:
        if (v[n.lhs] < 0.0)
            domain_error("sqrt of a negative value", n.pos, v[n.lhs]);
        return std::sqrt(v[n.lhs]);
    }
    return 0.0;
}

} // namespace

double eval_real(Expr const& e, Point const& at)
{
    auto const nodes = e.nodes();
    if (nodes.empty())
        throw Error(ErrorKind::InvalidModel, "empty expression");

    constexpr std::size_t kInline = 64;
    std::array<double, kInline> small{};
    std::vector<double> large;
    double* v = small.data();
    if (nodes.size() > kInline)
    {
        large.resize(nodes.size());
        v = large.data();
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        v[i] = apply(nodes[i], v, at);
    return v[nodes.size() - 1];
}

double eval_real(Expr const& e, double x, double xd, double lam, double mu)
{
    return eval_real(e, Point{x, xd, lam, mu});
}

} // namespace ddehopf
