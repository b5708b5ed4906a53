#include "ddehopf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace ddehopf {

namespace {

enum class Tok
{
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
};

struct Token
{
    Tok kind = Tok::End;
    std::string_view text;
    double number = 0.0;
    SourcePos pos;
};

std::string describe(Token const& t)
{
    if (t.kind == Tok::End)
        return "end of input";
    return "'" + std::string{t.text} + "'";
}

class Lexer
{
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;)
        {
            skip_space();
            Token t;
            t.pos = {line_, column_};
            if (i_ >= src_.size())
            {
                out.push_back(t);
                return out;
            }
            auto const start = i_;
            unsigned char const c = static_cast<unsigned char>(src_[i_]);
            if (std::isdigit(c) || (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))))
            {
                lex_number(t);
            }
            else if (std::isalpha(c) || c == '_')
            {
                while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                    advance(1);
                t.kind = Tok::Ident;
                t.text = src_.substr(start, i_ - start);
            }
            else if (src_.substr(i_, 3) == "\xE2\x88\x92") // U+2212 MINUS SIGN
            {
                advance(3);
                t.kind = Tok::Minus;
                t.text = src_.substr(start, 3);
            }
            else
            {
                switch (c)
                {
                case '+': t.kind = Tok::Plus; break;
                case '-': t.kind = Tok::Minus; break;
                case '*': t.kind = Tok::Star; break;
                case '/': t.kind = Tok::Slash; break;
                case '^': t.kind = Tok::Caret; break;
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                default:
                    throw Error(ErrorKind::Syntax,
                                "unexpected character '" + std::string{src_.substr(i_, utf8_length(c))} + "'", t.pos);
                }
                advance(1);
                t.text = src_.substr(start, 1);
            }
            out.push_back(t);
        }
    }

private:
    static std::size_t utf8_length(unsigned char lead)
    {
        if (lead < 0x80)
            return 1;
        if ((lead >> 5) == 0x6)
            return 2;
        if ((lead >> 4) == 0xE)
            return 3;
        return 4;
    }

    // advances `bytes` bytes of a single code point (or that many ASCII characters)
    void advance(std::size_t bytes)
    {
        if (bytes > 1 && static_cast<unsigned char>(src_[i_]) >= 0x80)
        {
            i_ += bytes;
            ++column_;
            return;
        }
        for (std::size_t n = 0; n < bytes; ++n, ++i_)
        {
            if (src_[i_] == '\n')
            {
                ++line_;
                column_ = 1;
            }
            else
                ++column_;
        }
    }

    void skip_space()
    {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
            advance(1);
    }

    void lex_number(Token& t)
    {
        auto const start = i_;
        auto digits = [&] {
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
                advance(1);
        };
        digits();
        if (i_ < src_.size() && src_[i_] == '.')
        {
            advance(1);
            digits();
        }
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E'))
        {
            std::size_t look = i_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
                ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look])))
            {
                advance(look - i_);
                digits();
            }
        }
        t.kind = Tok::Number;
        t.text = src_.substr(start, i_ - start);
        std::string_view body = t.text;
        if (body.front() == '.')
        {
            // from_chars wants a leading digit
            std::string padded = "0" + std::string{body};
            std::from_chars(padded.data(), padded.data() + padded.size(), t.number);
        }
        else
        {
            auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), t.number);
            if (ec != std::errc{} || end != body.data() + body.size())
                throw Error(ErrorKind::Syntax, "malformed number '" + std::string{body} + "'", t.pos);
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int column_ = 1;
};

std::optional<Op> function_op(std::string_view name)
{
    if (name == "exp")
        return Op::Exp;
    if (name == "ln")
        return Op::Ln;
    if (name == "sin")
        return Op::Sin;
    if (name == "cos")
        return Op::Cos;
    if (name == "sqrt")
        return Op::Sqrt;
    return std::nullopt;
}

std::optional<Var> variable(std::string_view name)
{
    if (name == "x")
        return Var::X;
    if (name == "xd")
        return Var::Xd;
    if (name == "lam")
        return Var::Lam;
    if (name == "mu")
        return Var::Mu;
    return std::nullopt;
}

class Parser
{
public:
    Parser(std::vector<Token> tokens, ConstantTable const& constants)
        : toks_(std::move(tokens)), constants_(constants)
    {}

    Expr run()
    {
        expression();
        if (peek().kind != Tok::End)
            throw Error(ErrorKind::Syntax, "unexpected " + describe(peek()), peek().pos);
        return Expr{std::move(nodes_)};
    }

private:
    Token const& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    Token const& next() { return toks_[pos_++]; }

    std::int32_t push(Node n)
    {
        nodes_.push_back(n);
        return static_cast<std::int32_t>(nodes_.size()) - 1;
    }

    std::int32_t push_binary(Op op, std::int32_t lhs, std::int32_t rhs, SourcePos pos)
    {
        Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        n.pos = pos;
        return push(n);
    }

    std::int32_t expression()
    {
        auto lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus)
        {
            auto const& op = next();
            auto rhs = term();
            lhs = push_binary(op.kind == Tok::Plus ? Op::Add : Op::Sub, lhs, rhs, op.pos);
        }
        return lhs;
    }

    std::int32_t term()
    {
        auto lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash)
        {
            auto const& op = next();
            auto rhs = unary();
            lhs = push_binary(op.kind == Tok::Star ? Op::Mul : Op::Div, lhs, rhs, op.pos);
        }
        return lhs;
    }

    std::int32_t unary()
    {
        if (peek().kind == Tok::Minus)
        {
            auto const& minus = next();
            // a literal directly after the sign is a negative constant, unless it is a power base
            if (peek().kind == Tok::Number && peek(1).kind != Tok::Caret)
            {
                auto const& num = next();
                Node n;
                n.op = Op::Const;
                n.value = -num.number;
                n.pos = minus.pos;
                return push(n);
            }
            auto operand = unary();
            Node n;
            n.op = Op::Neg;
            n.lhs = operand;
            n.pos = minus.pos;
            return push(n);
        }
        if (peek().kind == Tok::Plus)
        {
            next();
            return unary();
        }
        return power();
    }

    std::int32_t power()
    {
        auto base = primary();
        if (peek().kind == Tok::Caret)
        {
            auto const& op = next();
            auto exponent = unary();
            return push_binary(Op::Pow, base, exponent, op.pos);
        }
        return base;
    }

    std::int32_t primary()
    {
        auto const& t = next();
        switch (t.kind)
        {
        case Tok::Number: {
            Node n;
            n.op = Op::Const;
            n.value = t.number;
            n.pos = t.pos;
            return push(n);
        }
        case Tok::LParen: {
            auto inner = expression();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident: return identifier(t);
        default: throw Error(ErrorKind::Syntax, "expected an expression, found " + describe(t), t.pos);
        }
    }

    std::int32_t identifier(Token const& t)
    {
        if (peek().kind == Tok::LParen)
        {
            auto op = function_op(t.text);
            if (!op)
                throw Error(ErrorKind::UnknownIdentifier, "unknown function '" + std::string{t.text} + "'", t.pos);
            next();
            auto arg = expression();
            expect(Tok::RParen, "')'");
            Node n;
            n.op = *op;
            n.lhs = arg;
            n.pos = t.pos;
            return push(n);
        }
        if (function_op(t.text))
            throw Error(ErrorKind::Syntax, "function '" + std::string{t.text} + "' needs an argument list", t.pos);

        Node n;
        n.pos = t.pos;
        if (auto v = variable(t.text))
        {
            n.op = Op::Variable;
            n.var = *v;
            return push(n);
        }
        if (auto it = constants_.find(t.text); it != constants_.end())
        {
            n.op = Op::Const;
            n.value = it->second;
            return push(n);
        }
        if (t.text == "pi")
        {
            n.op = Op::Const;
            n.value = std::numbers::pi;
            return push(n);
        }
        throw Error(ErrorKind::UnknownIdentifier,
                    "unknown identifier '" + std::string{t.text} + "' (variables are x, xd, lam, mu)", t.pos);
    }

    void expect(Tok kind, char const* what)
    {
        if (peek().kind != kind)
            throw Error(ErrorKind::Syntax, std::string{"expected "} + what + ", found " + describe(peek()), peek().pos);
        next();
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ConstantTable const& constants_;
    std::vector<Node> nodes_;
};

} // namespace

Expr parse(std::string_view source, ConstantTable const& constants)
{
    return Parser{Lexer{source}.run(), constants}.run();
}

} // namespace ddehopf
