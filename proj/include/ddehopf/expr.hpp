#pragma once

#include "ddehopf/error.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddehopf {

/// The four symbolic inputs of a model expression.
enum class Var : std::uint8_t
{
    X,   // x(t)
    Xd,  // x(t - tau)
    Lam, // distinguished parameter
    Mu,  // unfolding parameter
};

std::string_view to_string(Var v) noexcept;

enum class Op : std::uint8_t
{
    Const,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
};

[[nodiscard]] constexpr bool is_binary(Op op) noexcept
{
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
}

[[nodiscard]] constexpr bool is_unary(Op op) noexcept
{
    return op == Op::Neg || op == Op::Exp || op == Op::Ln || op == Op::Sin || op == Op::Cos || op == Op::Sqrt;
}

/// One AST node. Children always precede their parent in the node array, so a single forward pass
/// over the array evaluates every subexpression.
struct Node
{
    Op op = Op::Const;
    Var var = Var::X;
    double value = 0.0;
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
    SourcePos pos;
};

/// Immutable expression over {x, xd, lam, mu}. Copies share storage.
class Expr
{
public:
    Expr() = default;

    /// Takes a topologically ordered node array whose last element is the root.
    explicit Expr(std::vector<Node> nodes);

    [[nodiscard]] bool empty() const noexcept { return !nodes_ || nodes_->empty(); }
    [[nodiscard]] std::span<Node const> nodes() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return nodes_ ? nodes_->size() : 0; }
    [[nodiscard]] Node const& root() const { return nodes_->back(); }

    [[nodiscard]] bool depends_on(Var v) const noexcept;

    /// Structural equality of the trees (source positions ignored).
    friend bool operator==(Expr const& a, Expr const& b);

    // builders, mostly for tests and programmatic models
    static Expr constant(double v);
    static Expr variable(Var v);
    static Expr unary(Op op, Expr const& a);
    static Expr binary(Op op, Expr const& a, Expr const& b);

private:
    std::shared_ptr<std::vector<Node> const> nodes_;
};

/// Named numeric constants, inlined at parse time.
using ConstantTable = std::map<std::string, double, std::less<>>;

/// Parses the infix grammar documented in docs/model-grammar.md.
/// Throws Error{Syntax} with line/column, or Error{UnknownIdentifier}.
Expr parse(std::string_view source, ConstantTable const& constants = {});

/// Pretty-prints with minimal parentheses; the output reparses to a structurally equal tree.
std::string to_string(Expr const& e);

/// Point at which an expression is evaluated.
struct Point
{
    double x = 0.0;
    double xd = 0.0;
    double lam = 0.0;
    double mu = 0.0;
};

/// IEEE double evaluation. Throws Error{Domain} (with node position) for ln/sqrt/division out of domain.
double eval_real(Expr const& e, Point const& at);
double eval_real(Expr const& e, double x, double xd, double lam, double mu);

} // namespace ddehopf
