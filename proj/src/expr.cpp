#include "sdcalc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstring>

namespace sdcalc {

namespace {

const char* kVarNames[kNumVars] = {"s1", "s2", "s", "theta", "sigma", "tau", "x", "y", "z"};

ExprPtr node(ExprOp op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

bool is_num(const ExprPtr& e, double v) { return e->op == ExprOp::Number && e->number == v; }

ExprPtr num(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Number;
    n->number = v;
    return n;
}

ExprPtr variable(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Variable;
    n->var = v;
    return n;
}

// Folding constructors keep high-order derivative trees small.
ExprPtr mk_neg(ExprPtr a) {
    if (a->op == ExprOp::Number) return num(-a->number);
    if (a->op == ExprOp::Neg) return a->a;
    return node(ExprOp::Neg, std::move(a));
}

ExprPtr mk_add(ExprPtr a, ExprPtr b) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
    if (a->op == ExprOp::Number && b->op == ExprOp::Number) return num(a->number + b->number);
    return node(ExprOp::Add, std::move(a), std::move(b));
}

ExprPtr mk_sub(ExprPtr a, ExprPtr b) {
    if (is_num(b, 0.0)) return a;
    if (is_num(a, 0.0)) return mk_neg(std::move(b));
    if (a->op == ExprOp::Number && b->op == ExprOp::Number) return num(a->number - b->number);
    return node(ExprOp::Sub, std::move(a), std::move(b));
}

ExprPtr mk_mul(ExprPtr a, ExprPtr b) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
    if (a->op == ExprOp::Number && b->op == ExprOp::Number) return num(a->number * b->number);
    return node(ExprOp::Mul, std::move(a), std::move(b));
}

ExprPtr mk_div(ExprPtr a, ExprPtr b) {
    if (is_num(a, 0.0)) return num(0.0);
    if (is_num(b, 1.0)) return a;
    if (a->op == ExprOp::Number && b->op == ExprOp::Number && b->number != 0.0)
        return num(a->number / b->number);
    return node(ExprOp::Div, std::move(a), std::move(b));
}

ExprPtr mk_pow(ExprPtr a, ExprPtr b) {
    if (is_num(b, 1.0)) return a;
    if (is_num(b, 0.0)) return num(1.0);
    if (a->op == ExprOp::Number && b->op == ExprOp::Number)
        return num(std::pow(a->number, b->number));
    return node(ExprOp::Pow, std::move(a), std::move(b));
}

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    ExprPtr parse() {
        ExprPtr e = expr();
        skip_ws();
        if (pos != text.size()) fail("unexpected trailing input");
        return e;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (eat('+')) e = mk_add(std::move(e), term());
            else if (eat('-')) e = mk_sub(std::move(e), term());
            else return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = factor();
        for (;;) {
            if (eat('*')) e = mk_mul(std::move(e), factor());
            else if (eat('/')) e = mk_div(std::move(e), factor());
            else return e;
        }
    }

    ExprPtr factor() {
        ExprPtr b = base();
        if (eat('^')) return mk_pow(std::move(b), factor());  // right associative
        return b;
    }

    ExprPtr base() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '-') {
            ++pos;
            return mk_neg(base());
        }
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        fail("unexpected character");
    }

    ExprPtr number() {
        double v = 0.0;
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc()) fail("malformed number");
        pos = static_cast<std::size_t>(p - text.data());
        return num(v);
    }

    ExprPtr ident() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string_view name = text.substr(start, pos - start);
        if (eat('(')) {
            ExprOp op;
            if (name == "sin") op = ExprOp::Sin;
            else if (name == "cos") op = ExprOp::Cos;
            else if (name == "tan") op = ExprOp::Tan;
            else if (name == "exp") op = ExprOp::Exp;
            else if (name == "log") op = ExprOp::Log;
            else if (name == "sqrt") op = ExprOp::Sqrt;
            else { pos = start; fail("unknown function '" + std::string(name) + "'"); }
            ExprPtr arg = expr();
            if (!eat(')')) fail("expected ')'");
            return node(op, std::move(arg));
        }
        if (name == "pi") return num(M_PI);
        for (int i = 0; i < kNumVars; ++i)
            if (name == kVarNames[i]) return variable(static_cast<Var>(i));
        pos = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }
};

// Precedence levels for printing: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5.
int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add: case ExprOp::Sub: return 1;
        case ExprOp::Mul: case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;
    }
}

std::string fmt_number(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

void print_rec(const ExprNode& e, int min_prec, std::string& out) {
    int prec = precedence(e.op);
    bool wrap = prec < min_prec;
    if (wrap) out += '(';
    switch (e.op) {
        case ExprOp::Number:
            if (e.number < 0.0 && !wrap && min_prec > 1) {
                // A bare negative literal inside a product would reparse
                // differently; keep it parenthesized.
                out += '(';
                out += fmt_number(e.number);
                out += ')';
                return;
            }
            out += fmt_number(e.number);
            break;
        case ExprOp::Variable: out += kVarNames[static_cast<int>(e.var)]; break;
        case ExprOp::Add:
            print_rec(*e.a, 1, out); out += '+'; print_rec(*e.b, 2, out);
            break;
        case ExprOp::Sub:
            print_rec(*e.a, 1, out); out += '-'; print_rec(*e.b, 2, out);
            break;
        case ExprOp::Mul:
            print_rec(*e.a, 2, out); out += '*'; print_rec(*e.b, 3, out);
            break;
        case ExprOp::Div:
            print_rec(*e.a, 2, out); out += '/'; print_rec(*e.b, 3, out);
            break;
        case ExprOp::Neg:
            out += '-'; print_rec(*e.a, 3, out);
            break;
        case ExprOp::Pow:
            print_rec(*e.a, 5, out); out += '^'; print_rec(*e.b, 4, out);
            break;
        case ExprOp::Sin: out += "sin("; print_rec(*e.a, 0, out); out += ')'; break;
        case ExprOp::Cos: out += "cos("; print_rec(*e.a, 0, out); out += ')'; break;
        case ExprOp::Tan: out += "tan("; print_rec(*e.a, 0, out); out += ')'; break;
        case ExprOp::Exp: out += "exp("; print_rec(*e.a, 0, out); out += ')'; break;
        case ExprOp::Log: out += "log("; print_rec(*e.a, 0, out); out += ')'; break;
        case ExprOp::Sqrt: out += "sqrt("; print_rec(*e.a, 0, out); out += ')'; break;
    }
    if (wrap) out += ')';
}

}  // namespace

const char* var_name(Var v) { return kVarNames[static_cast<int>(v)]; }

ExprPtr make_number(double v) { return num(v); }

ExprPtr parse_expr(std::string_view text) {
    Parser p{text};
    return p.parse();
}

std::string print_expr(const ExprPtr& e) {
    std::string out;
    print_rec(*e, 0, out);
    return out;
}

ExprPtr diff_expr(const ExprPtr& e, Var wrt) {
    switch (e->op) {
        case ExprOp::Number: return num(0.0);
        case ExprOp::Variable: return num(e->var == wrt ? 1.0 : 0.0);
        case ExprOp::Add: return mk_add(diff_expr(e->a, wrt), diff_expr(e->b, wrt));
        case ExprOp::Sub: return mk_sub(diff_expr(e->a, wrt), diff_expr(e->b, wrt));
        case ExprOp::Mul:
            return mk_add(mk_mul(diff_expr(e->a, wrt), e->b), mk_mul(e->a, diff_expr(e->b, wrt)));
        case ExprOp::Div:
            // (a/b)' = a'/b - a b'/b^2
            return mk_sub(mk_div(diff_expr(e->a, wrt), e->b),
                          mk_div(mk_mul(e->a, diff_expr(e->b, wrt)), mk_mul(e->b, e->b)));
        case ExprOp::Pow: {
            ExprPtr da = diff_expr(e->a, wrt);
            if (e->b->op == ExprOp::Number) {
                double c = e->b->number;
                return mk_mul(mk_mul(num(c), mk_pow(e->a, num(c - 1.0))), da);
            }
            ExprPtr db = diff_expr(e->b, wrt);
            // a^b (b' log a + b a'/a)
            ExprPtr inner = mk_add(mk_mul(db, node(ExprOp::Log, e->a)),
                                   mk_div(mk_mul(e->b, da), e->a));
            return mk_mul(mk_pow(e->a, e->b), inner);
        }
        case ExprOp::Neg: return mk_neg(diff_expr(e->a, wrt));
        case ExprOp::Sin: return mk_mul(node(ExprOp::Cos, e->a), diff_expr(e->a, wrt));
        case ExprOp::Cos: return mk_neg(mk_mul(node(ExprOp::Sin, e->a), diff_expr(e->a, wrt)));
        case ExprOp::Tan: {
            ExprPtr c = node(ExprOp::Cos, e->a);
            return mk_div(diff_expr(e->a, wrt), mk_mul(c, c));
        }
        case ExprOp::Exp: return mk_mul(node(ExprOp::Exp, e->a), diff_expr(e->a, wrt));
        case ExprOp::Log: return mk_div(diff_expr(e->a, wrt), e->a);
        case ExprOp::Sqrt:
            return mk_div(diff_expr(e->a, wrt), mk_mul(num(2.0), node(ExprOp::Sqrt, e->a)));
    }
    throw Error("corrupt expression node");
}

unsigned free_vars(const ExprPtr& e) {
    switch (e->op) {
        case ExprOp::Number: return 0;
        case ExprOp::Variable: return 1u << static_cast<unsigned>(e->var);
        default: {
            unsigned m = 0;
            if (e->a) m |= free_vars(e->a);
            if (e->b) m |= free_vars(e->b);
            return m;
        }
    }
}

}  // namespace sdcalc
