#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace planeflow {

/// Which variable pair an expression ranges over.
enum class VarPair { XY, PhiRho };

struct eval_error : std::domain_error {
    using std::domain_error::domain_error;
};

namespace ast {

enum class UnOp { Neg, Exp, Sin, Cos, Sqrt, Log };
enum class BinOp { Add, Sub, Mul, Div };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Const, Var, Unary, Binary, Pow } kind;
    double value = 0.0;   // Const
    int var = 0;          // Var: 0 = first of the pair, 1 = second
    UnOp un{};            // Unary
    BinOp bin{};          // Binary
    int exponent = 0;     // Pow (non-negative integer)
    NodePtr a, b;
};

inline NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Const;
    n->value = v;
    return n;
}
inline NodePtr make_var(int i) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->var = i;
    return n;
}
inline NodePtr make_un(UnOp op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->un = op;
    n->a = std::move(a);
    return n;
}
inline NodePtr make_bin(BinOp op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->bin = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline NodePtr make_pow(NodePtr a, int e) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Pow;
    n->a = std::move(a);
    n->exponent = e;
    return n;
}

inline double eval(const Node& n, double u, double v) {
    switch (n.kind) {
        case Node::Kind::Const: return n.value;
        case Node::Kind::Var: return n.var == 0 ? u : v;
        case Node::Kind::Unary: {
            double a = eval(*n.a, u, v);
            switch (n.un) {
                case UnOp::Neg: return -a;
                case UnOp::Exp: return std::exp(a);
                case UnOp::Sin: return std::sin(a);
                case UnOp::Cos: return std::cos(a);
                case UnOp::Sqrt:
                    if (a < 0) throw eval_error("sqrt of negative value");
                    return std::sqrt(a);
                case UnOp::Log:
                    if (a <= 0) throw eval_error("log of non-positive value");
                    return std::log(a);
            }
            return 0;
        }
        case Node::Kind::Binary: {
            double a = eval(*n.a, u, v), b = eval(*n.b, u, v);
            switch (n.bin) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (b == 0) throw eval_error("division by zero");
                    return a / b;
            }
            return 0;
        }
        case Node::Kind::Pow: {
            double a = eval(*n.a, u, v);
            double r = 1.0;
            for (int i = 0; i < n.exponent; ++i) r *= a;
            return r;
        }
    }
    return 0;
}

/// Formal derivative with respect to variable `var` (0 or 1).
inline NodePtr derivative(const NodePtr& n, int var) {
    using K = Node::Kind;
    switch (n->kind) {
        case K::Const: return make_const(0.0);
        case K::Var: return make_const(n->var == var ? 1.0 : 0.0);
        case K::Unary: {
            NodePtr da = derivative(n->a, var);
            switch (n->un) {
                case UnOp::Neg: return make_un(UnOp::Neg, da);
                case UnOp::Exp: return make_bin(BinOp::Mul, make_un(UnOp::Exp, n->a), da);
                case UnOp::Sin: return make_bin(BinOp::Mul, make_un(UnOp::Cos, n->a), da);
                case UnOp::Cos:
                    return make_un(UnOp::Neg, make_bin(BinOp::Mul, make_un(UnOp::Sin, n->a), da));
                case UnOp::Sqrt:
                    return make_bin(BinOp::Div, da,
                                    make_bin(BinOp::Mul, make_const(2.0), make_un(UnOp::Sqrt, n->a)));
                case UnOp::Log: return make_bin(BinOp::Div, da, n->a);
            }
            return make_const(0.0);
        }
        case K::Binary: {
            NodePtr da = derivative(n->a, var), db = derivative(n->b, var);
            switch (n->bin) {
                case BinOp::Add: return make_bin(BinOp::Add, da, db);
                case BinOp::Sub: return make_bin(BinOp::Sub, da, db);
                case BinOp::Mul:
                    return make_bin(BinOp::Add, make_bin(BinOp::Mul, da, n->b),
                                    make_bin(BinOp::Mul, n->a, db));
                case BinOp::Div:
                    // (a/b)' = (a'b - ab') / b^2
                    return make_bin(BinOp::Div,
                                    make_bin(BinOp::Sub, make_bin(BinOp::Mul, da, n->b),
                                             make_bin(BinOp::Mul, n->a, db)),
                                    make_pow(n->b, 2));
            }
            return make_const(0.0);
        }
        case K::Pow: {
            if (n->exponent == 0) return make_const(0.0);
            NodePtr da = derivative(n->a, var);
            return make_bin(BinOp::Mul,
                            make_bin(BinOp::Mul, make_const(double(n->exponent)),
                                     make_pow(n->a, n->exponent - 1)),
                            da);
        }
    }
    return make_const(0.0);
}

}  // namespace ast

/// A smooth scalar function of two real variables: either a parsed expression
/// or a composed evaluator. A declared origin value covers removable
/// singularities like exp(-1/(x^2+y^2)): at (0,0) for an XY function, on the
/// whole line rho = 0 for a PhiRho function.
class SmoothFn {
public:
    SmoothFn() = default;

    SmoothFn(ast::NodePtr root, VarPair vars, std::optional<double> origin_value = std::nullopt)
        : vars_(vars), origin_value_(origin_value), ast_(std::move(root)) {}

    SmoothFn(std::function<double(double, double)> fn, VarPair vars,
             std::optional<double> origin_value = std::nullopt)
        : vars_(vars), origin_value_(origin_value), fn_(std::move(fn)) {}

    static SmoothFn constant(double c, VarPair vars = VarPair::XY) {
        return SmoothFn(ast::make_const(c), vars);
    }

    bool valid() const { return ast_ != nullptr || static_cast<bool>(fn_); }
    bool has_ast() const { return ast_ != nullptr; }
    VarPair vars() const { return vars_; }
    std::optional<double> origin_value() const { return origin_value_; }
    const ast::NodePtr& root() const { return ast_; }

    double eval(double u, double v) const {
        if (origin_value_) {
            bool at_origin = (vars_ == VarPair::XY) ? (u == 0.0 && v == 0.0) : (v == 0.0);
            if (at_origin) return *origin_value_;
        }
        if (ast_) return ast::eval(*ast_, u, v);
        if (fn_) return fn_(u, v);
        throw std::logic_error("SmoothFn: empty function");
    }

    double operator()(double u, double v) const { return eval(u, v); }

    /// Formal partial derivative; only available for parsed expressions.
    SmoothFn derivative(int var) const {
        if (!ast_) throw std::logic_error("SmoothFn::derivative needs an expression tree");
        return SmoothFn(ast::derivative(ast_, var), vars_);
    }

    /// Is this (structurally) the constant 1? Used to detect the eta == 1 case.
    bool is_const_one() const {
        return ast_ && ast_->kind == ast::Node::Kind::Const && ast_->value == 1.0;
    }

private:
    VarPair vars_ = VarPair::XY;
    std::optional<double> origin_value_;
    ast::NodePtr ast_;
    std::function<double(double, double)> fn_;
};

}  // namespace planeflow
