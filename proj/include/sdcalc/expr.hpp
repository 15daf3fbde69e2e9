#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>

#include "sdcalc/error.hpp"

namespace sdcalc {

// Variables an expression may reference. Which subset is actually bound
// depends on context (chart components, field components, ...).
enum class Var : int { s1 = 0, s2, s, theta, sigma, tau, x, y, z };
constexpr int kNumVars = 9;

const char* var_name(Var v);

enum class ExprOp {
    Number, Variable,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Tan, Exp, Log, Sqrt,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op;
    double number = 0.0;   // ExprOp::Number
    Var var = Var::s1;     // ExprOp::Variable
    ExprPtr a, b;          // operands (b only for binary ops)
};

// Recursive-descent parser for
//   expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
//   factor := base ('^' factor)? ; base := '-' base | number | ident |
//   func '(' expr ')' | '(' expr ')'
// Functions: sin cos tan exp log sqrt. `pi` folds to a numeric literal.
// Throws ParseError (with byte offset) on syntax errors and unknown names.
ExprPtr parse_expr(std::string_view text);

// Deterministic precedence-based printer; print/parse round trips are
// idempotent at the string level.
std::string print_expr(const ExprPtr& e);

// Exact symbolic derivative with light constant folding.
ExprPtr diff_expr(const ExprPtr& e, Var wrt);

// Bitmask of variables appearing in the tree (bit i = Var(i)).
unsigned free_vars(const ExprPtr& e);

ExprPtr make_number(double v);

template <class T>
struct ExprEnv {
    std::array<const T*, kNumVars> vals{};
    void bind(Var v, const T& x) { vals[static_cast<int>(v)] = &x; }
};

template <class T>
T eval_expr(const ExprNode& n, const ExprEnv<T>& env) {
    using std::sin; using std::cos; using std::tan;
    using std::exp; using std::log; using std::sqrt; using std::pow;
    switch (n.op) {
        case ExprOp::Number: return T(n.number);
        case ExprOp::Variable: {
            const T* p = env.vals[static_cast<int>(n.var)];
            if (!p) throw DomainError(std::string("unbound variable '") + var_name(n.var) + "'");
            return *p;
        }
        case ExprOp::Add: return eval_expr(*n.a, env) + eval_expr(*n.b, env);
        case ExprOp::Sub: return eval_expr(*n.a, env) - eval_expr(*n.b, env);
        case ExprOp::Mul: return eval_expr(*n.a, env) * eval_expr(*n.b, env);
        case ExprOp::Div: return eval_expr(*n.a, env) / eval_expr(*n.b, env);
        case ExprOp::Pow: {
            if (n.b->op == ExprOp::Number) return pow(eval_expr(*n.a, env), n.b->number);
            T base = eval_expr(*n.a, env);
            T e = eval_expr(*n.b, env);
            return exp(e * log(base));
        }
        case ExprOp::Neg: return -eval_expr(*n.a, env);
        case ExprOp::Sin: return sin(eval_expr(*n.a, env));
        case ExprOp::Cos: return cos(eval_expr(*n.a, env));
        case ExprOp::Tan: return tan(eval_expr(*n.a, env));
        case ExprOp::Exp: return exp(eval_expr(*n.a, env));
        case ExprOp::Log: return log(eval_expr(*n.a, env));
        case ExprOp::Sqrt: return sqrt(eval_expr(*n.a, env));
    }
    throw Error("corrupt expression node");
}

}  // namespace sdcalc
