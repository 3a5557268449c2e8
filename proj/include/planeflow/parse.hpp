#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "planeflow/poly.hpp"
#include "planeflow/smoothfn.hpp"

namespace planeflow {

/// Syntax error with the byte offset of the offending token.
struct parse_error : std::runtime_error {
    parse_error(const std::string& what, size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    size_t position;
};

namespace detail {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
    std::string text;
    size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        tok_.pos = i_;
        if (i_ >= src_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text.clear();
            return;
        }
        char c = src_[i_];
        auto single = [&](Token::Kind k) {
            tok_.kind = k;
            tok_.text = std::string(1, c);
            ++i_;
        };
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i_;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            if (j < src_.size() && src_[j] == '.') {
                ++j;
                if (j >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[j])))
                    throw parse_error("malformed decimal literal", i_);
                while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            }
            tok_.kind = Token::Kind::Number;
            tok_.text = src_.substr(i_, j - i_);
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
                ++j;
            tok_.kind = Token::Kind::Ident;
            tok_.text = src_.substr(i_, j - i_);
            i_ = j;
            return;
        }
        switch (c) {
            case '+': single(Token::Kind::Plus); return;
            case '-': single(Token::Kind::Minus); return;
            case '*': single(Token::Kind::Star); return;
            case '/': single(Token::Kind::Slash); return;
            case '^': single(Token::Kind::Caret); return;
            case '(': single(Token::Kind::LParen); return;
            case ')': single(Token::Kind::RParen); return;
            default: throw parse_error(std::string("unexpected character '") + c + "'", i_);
        }
    }

    const std::string& src_;
    size_t i_ = 0;
    Token tok_;
};

/// Bivariate polynomial accumulator used only while expanding parsed input.
struct BiPoly {
    std::map<std::pair<int, int>, Rational> terms;  // (x-exp, y-exp) -> coeff

    static BiPoly constant(const Rational& c) {
        BiPoly p;
        if (c != 0) p.terms[{0, 0}] = c;
        return p;
    }
    static BiPoly var(int which) {
        BiPoly p;
        p.terms[{which == 0 ? 1 : 0, which == 0 ? 0 : 1}] = 1;
        return p;
    }
    bool is_constant() const {
        return terms.empty() || (terms.size() == 1 && terms.begin()->first == std::pair<int, int>{0, 0});
    }
    Rational constant_value() const { return terms.empty() ? Rational(0) : terms.begin()->second; }

    BiPoly operator+(const BiPoly& o) const {
        BiPoly r = *this;
        for (const auto& [k, v] : o.terms) {
            auto it = r.terms.find(k);
            if (it == r.terms.end())
                r.terms[k] = v;
            else {
                it->second += v;
                if (it->second == 0) r.terms.erase(it);
            }
        }
        return r;
    }
    BiPoly operator-() const {
        BiPoly r = *this;
        for (auto& [k, v] : r.terms) v = -v;
        return r;
    }
    BiPoly operator-(const BiPoly& o) const { return *this + (-o); }
    BiPoly operator*(const BiPoly& o) const {
        BiPoly r;
        for (const auto& [ka, va] : terms)
            for (const auto& [kb, vb] : o.terms) {
                auto key = std::pair<int, int>{ka.first + kb.first, ka.second + kb.second};
                auto it = r.terms.find(key);
                Rational prod = va * vb;
                if (it == r.terms.end()) {
                    if (prod != 0) r.terms[key] = prod;
                } else {
                    it->second += prod;
                    if (it->second == 0) r.terms.erase(it);
                }
            }
        return r;
    }
    BiPoly pow(int e) const {
        BiPoly r = constant(1);
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }
};

/// Recursive-descent core. Template over the value domain: BiPoly for exact
/// polynomial expansion, ast::NodePtr for smooth expressions.
template <typename Value, typename Ops>
class Parser {
public:
    Parser(const std::string& src, Ops ops) : lex_(src), ops_(std::move(ops)) {}

    Value parse() {
        Value v = expr();
        if (lex_.peek().kind != Token::Kind::End)
            throw parse_error("trailing input after expression", lex_.peek().pos);
        return v;
    }

private:
    Value expr() {
        bool neg = false;
        if (lex_.peek().kind == Token::Kind::Plus) lex_.next();
        else if (lex_.peek().kind == Token::Kind::Minus) {
            lex_.next();
            neg = true;
        }
        Value acc = term();
        if (neg) acc = ops_.negate(std::move(acc));
        for (;;) {
            auto k = lex_.peek().kind;
            if (k == Token::Kind::Plus) {
                lex_.next();
                acc = ops_.add(std::move(acc), term());
            } else if (k == Token::Kind::Minus) {
                lex_.next();
                acc = ops_.sub(std::move(acc), term());
            } else {
                break;
            }
        }
        return acc;
    }

    Value term() {
        Value acc = factor();
        for (;;) {
            auto k = lex_.peek().kind;
            if (k == Token::Kind::Star) {
                lex_.next();
                acc = ops_.mul(std::move(acc), factor());
            } else if (k == Token::Kind::Slash) {
                Token t = lex_.next();
                acc = ops_.div(std::move(acc), factor(), t.pos);
            } else {
                break;
            }
        }
        return acc;
    }

    Value factor() {
        Value b = base();
        if (lex_.peek().kind == Token::Kind::Caret) {
            lex_.next();
            Token e = lex_.next();
            if (e.kind != Token::Kind::Number || e.text.find('.') != std::string::npos)
                throw parse_error("exponent must be a non-negative integer", e.pos);
            long ev = std::stol(e.text);
            if (ev > 64) throw parse_error("exponent too large", e.pos);
            b = ops_.pow(std::move(b), static_cast<int>(ev), e.pos);
        }
        return b;
    }

    Value base() {
        Token t = lex_.next();
        switch (t.kind) {
            case Token::Kind::Number: return ops_.number(t.text, t.pos);
            case Token::Kind::Ident: {
                if (lex_.peek().kind == Token::Kind::LParen) {
                    lex_.next();
                    Value arg = expr();
                    expect_rparen();
                    return ops_.call(t.text, std::move(arg), t.pos);
                }
                return ops_.variable(t.text, t.pos);
            }
            case Token::Kind::Minus: {
                // unary minus on a base (e.g. exp(-1/(x^2+y^2)))
                return ops_.negate(factor());
            }
            case Token::Kind::LParen: {
                Value v = expr();
                expect_rparen();
                return v;
            }
            default: throw parse_error("expected a value", t.pos);
        }
    }

    void expect_rparen() {
        Token t = lex_.next();
        if (t.kind != Token::Kind::RParen) throw parse_error("expected ')'", t.pos);
    }

    Lexer lex_;
    Ops ops_;
};

struct PolyOps {
    using V = BiPoly;
    V number(const std::string& text, size_t) const { return V::constant(rational_from_decimal(text)); }
    V variable(const std::string& name, size_t pos) const {
        if (name == "x") return V::var(0);
        if (name == "y") return V::var(1);
        throw parse_error("unknown identifier '" + name + "' in polynomial", pos);
    }
    V call(const std::string& name, V, size_t pos) const {
        throw parse_error("non-polynomial construct: function '" + name + "'", pos);
    }
    V negate(V a) const { return -a; }
    V add(V a, V b) const { return a + b; }
    V sub(V a, V b) const { return a - b; }
    V mul(V a, V b) const { return a * b; }
    V div(V a, V b, size_t pos) const {
        if (!b.is_constant())
            throw parse_error("non-polynomial construct: division by a variable expression", pos);
        Rational c = b.constant_value();
        if (c == 0) throw parse_error("division by zero", pos);
        return a * V::constant(Rational(1) / c);
    }
    V pow(V a, int e, size_t) const { return a.pow(e); }
};

struct FnOps {
    using V = ast::NodePtr;
    VarPair vars;

    V number(const std::string& text, size_t) const {
        return ast::make_const(to_double(rational_from_decimal(text)));
    }
    V variable(const std::string& name, size_t pos) const {
        if (vars == VarPair::XY) {
            if (name == "x") return ast::make_var(0);
            if (name == "y") return ast::make_var(1);
        } else {
            if (name == "phi") return ast::make_var(0);
            if (name == "rho") return ast::make_var(1);
        }
        throw parse_error("unknown identifier '" + name + "'", pos);
    }
    V call(const std::string& name, V arg, size_t pos) const {
        if (name == "exp") return ast::make_un(ast::UnOp::Exp, std::move(arg));
        if (name == "sin") return ast::make_un(ast::UnOp::Sin, std::move(arg));
        if (name == "cos") return ast::make_un(ast::UnOp::Cos, std::move(arg));
        if (name == "sqrt") return ast::make_un(ast::UnOp::Sqrt, std::move(arg));
        if (name == "log") return ast::make_un(ast::UnOp::Log, std::move(arg));
        throw parse_error("unknown function '" + name + "'", pos);
    }
    V negate(V a) const { return ast::make_un(ast::UnOp::Neg, std::move(a)); }
    V add(V a, V b) const { return ast::make_bin(ast::BinOp::Add, std::move(a), std::move(b)); }
    V sub(V a, V b) const { return ast::make_bin(ast::BinOp::Sub, std::move(a), std::move(b)); }
    V mul(V a, V b) const { return ast::make_bin(ast::BinOp::Mul, std::move(a), std::move(b)); }
    V div(V a, V b, size_t) const { return ast::make_bin(ast::BinOp::Div, std::move(a), std::move(b)); }
    V pow(V a, int e, size_t) const { return ast::make_pow(std::move(a), e); }
};

}  // namespace detail

/// Parse an arithmetic expression in x, y with rational literals into a
/// homogeneous polynomial. The expansion is eager; a mixed-degree result is
/// rejected here rather than surfacing later.
inline HomoPoly parse_poly(const std::string& text) {
    detail::Parser<detail::BiPoly, detail::PolyOps> p(text, detail::PolyOps{});
    detail::BiPoly b = p.parse();
    if (b.terms.empty()) return HomoPoly::zero();
    int d = -1;
    for (const auto& [k, v] : b.terms) {
        int total = k.first + k.second;
        if (d < 0) d = total;
        else if (total != d)
            throw parse_error("non-homogeneous polynomial: mixes degrees " + std::to_string(d) +
                                  " and " + std::to_string(total),
                              0);
    }
    std::vector<Rational> cs(d + 1, Rational(0));
    for (const auto& [k, v] : b.terms) cs[k.first] = v;
    return HomoPoly(d, std::move(cs));
}

/// Parse a smooth scalar expression over the declared variable pair
/// ((x, y) or (phi, rho)), with an optional declared value where the
/// expression itself is singular but removable.
inline SmoothFn parse_fn(const std::string& text, VarPair vars,
                         std::optional<double> value_at_origin = std::nullopt) {
    detail::Parser<ast::NodePtr, detail::FnOps> p(text, detail::FnOps{vars});
    return SmoothFn(p.parse(), vars, value_at_origin);
}

}  // namespace planeflow
