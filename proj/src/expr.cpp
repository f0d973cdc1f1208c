#include "apm/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace apm {

namespace {

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser {
    std::string_view src;
    std::size_t pos = 0;
    int dim;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < src.size() && src[pos] == c;
    }

    bool accept(char c) {
        if (peek_is(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'", pos);
    }

    ExprPtr parse() {
        auto e = sum();
        skip_ws();
        if (pos != src.size()) fail("unexpected trailing input", pos);
        return e;
    }

    ExprPtr sum() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                auto rhs = term();
                lhs = make(ExprKind::Add, lhs, rhs);
            } else if (accept('-')) {
                auto rhs = term();
                lhs = make(ExprKind::Sub, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        auto lhs = factor();
        for (;;) {
            if (accept('*')) {
                auto rhs = factor();
                lhs = make(ExprKind::Mul, lhs, rhs);
            } else if (accept('/')) {
                auto rhs = factor();
                lhs = make(ExprKind::Div, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    // factor handles unary minus; '^' binds tighter and is right-associative,
    // with the exponent parsed at factor level so 2^-3 works.
    ExprPtr factor() {
        if (accept('-')) {
            auto child = factor();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Neg;
            e->lhs = child;
            return e;
        }
        return power();
    }

    ExprPtr power() {
        auto base = primary();
        if (accept('^')) {
            auto exponent = factor();
            return make(ExprKind::Pow, base, exponent);
        }
        return base;
    }

    ExprPtr primary() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input", pos);
        const char c = src[pos];
        if (c == '(') {
            ++pos;
            auto e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character", pos);
    }

    ExprPtr number() {
        const std::size_t start = pos;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
        if (pos < src.size() && src[pos] == '.') {
            ++pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
        }
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
            if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            } else {
                pos = mark; // 'e' belonged to something else; not part of the literal
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src.data() + start, src.data() + pos, value);
        if (res.ec != std::errc() || res.ptr != src.data() + pos)
            fail("malformed number literal", start);
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Constant;
        e->constant = value;
        return e;
    }

    ExprPtr identifier() {
        const std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        const std::string_view name = src.substr(start, pos - start);

        if (name.size() >= 2 && name[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
            int index = 0;
            const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (res.ec == std::errc() && res.ptr == name.data() + name.size()) {
                if (index < 1 || index > dim)
                    fail("variable index out of range 1.." + std::to_string(dim), start);
                auto e = std::make_shared<Expr>();
                e->kind = ExprKind::Variable;
                e->var_index = index - 1;
                return e;
            }
        }

        static constexpr std::array<std::pair<std::string_view, Func>, 6> kFuncs{{
            {"sin", Func::Sin},
            {"cos", Func::Cos},
            {"exp", Func::Exp},
            {"log", Func::Log},
            {"sqrt", Func::Sqrt},
            {"tanh", Func::Tanh},
        }};
        for (const auto& [fname, f] : kFuncs) {
            if (name == fname) {
                expect('(');
                auto arg = sum();
                expect(')');
                auto e = std::make_shared<Expr>();
                e->kind = ExprKind::Call;
                e->func = f;
                e->lhs = arg;
                return e;
            }
        }
        fail("unknown function or identifier '" + std::string(name) + "'", start);
    }

    static ExprPtr make(ExprKind kind, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::Pow: return 4;
        default: return 5;
    }
}

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Tanh: return "tanh";
    }
    return "?";
}

void print(const Expr& e, std::string& out) {
    const auto child = [&out](const Expr& c, bool parens) {
        if (parens) out += '(';
        print(c, out);
        if (parens) out += ')';
    };
    const int p = precedence(e);
    switch (e.kind) {
        case ExprKind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e.constant);
            out += buf;
            break;
        }
        case ExprKind::Variable:
            out += 'x';
            out += std::to_string(e.var_index + 1);
            break;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div:
            child(*e.lhs, precedence(*e.lhs) < p);
            out += (e.kind == ExprKind::Add   ? " + "
                    : e.kind == ExprKind::Sub ? " - "
                    : e.kind == ExprKind::Mul ? "*"
                                              : "/");
            child(*e.rhs, precedence(*e.rhs) <= p);
            break;
        case ExprKind::Pow:
            child(*e.lhs, precedence(*e.lhs) <= p);
            out += '^';
            child(*e.rhs, precedence(*e.rhs) < p);
            break;
        case ExprKind::Neg:
            out += '-';
            child(*e.lhs, precedence(*e.lhs) < p);
            break;
        case ExprKind::Call:
            out += func_name(e.func);
            out += '(';
            print(*e.lhs, out);
            out += ')';
            break;
    }
}

// ---------------------------------------------------------------------------
// Second-order forward mode
// ---------------------------------------------------------------------------

// Fixed-capacity jet scalar: value + d first-order + d(d+1)/2 second-order
// coefficients, so one pass over the tree yields the whole Jet2.
struct D2 {
    int d = 0;
    double v = 0.0;
    std::array<double, kMaxDimExpr> g{};
    std::array<double, kMaxDimExpr*(kMaxDimExpr + 1) / 2> h{};

    static constexpr int tri(int d, int i, int j) {
        return i <= j ? i * (2 * d - i - 1) / 2 + j : j * (2 * d - j - 1) / 2 + i;
    }
    [[nodiscard]] int hsize() const { return d * (d + 1) / 2; }
};

D2 d2_constant(int d, double v) {
    D2 r;
    r.d = d;
    r.v = v;
    return r;
}

D2 d2_variable(int d, int index, double value) {
    D2 r;
    r.d = d;
    r.v = value;
    r.g[static_cast<std::size_t>(index)] = 1.0;
    return r;
}

D2 d2_add(const D2& a, const D2& b) {
    D2 r = a;
    r.v += b.v;
    for (int i = 0; i < a.d; ++i) r.g[static_cast<std::size_t>(i)] += b.g[static_cast<std::size_t>(i)];
    for (int k = 0; k < a.hsize(); ++k) r.h[static_cast<std::size_t>(k)] += b.h[static_cast<std::size_t>(k)];
    return r;
}

D2 d2_sub(const D2& a, const D2& b) {
    D2 r = a;
    r.v -= b.v;
    for (int i = 0; i < a.d; ++i) r.g[static_cast<std::size_t>(i)] -= b.g[static_cast<std::size_t>(i)];
    for (int k = 0; k < a.hsize(); ++k) r.h[static_cast<std::size_t>(k)] -= b.h[static_cast<std::size_t>(k)];
    return r;
}

D2 d2_neg(const D2& a) {
    D2 r = a;
    r.v = -r.v;
    for (int i = 0; i < a.d; ++i) r.g[static_cast<std::size_t>(i)] = -r.g[static_cast<std::size_t>(i)];
    for (int k = 0; k < a.hsize(); ++k) r.h[static_cast<std::size_t>(k)] = -r.h[static_cast<std::size_t>(k)];
    return r;
}

D2 d2_mul(const D2& a, const D2& b) {
    D2 r;
    r.d = a.d;
    r.v = a.v * b.v;
    for (int i = 0; i < a.d; ++i)
        r.g[static_cast<std::size_t>(i)] =
            a.g[static_cast<std::size_t>(i)] * b.v + a.v * b.g[static_cast<std::size_t>(i)];
    for (int i = 0; i < a.d; ++i)
        for (int j = i; j < a.d; ++j) {
            const int k = D2::tri(a.d, i, j);
            r.h[static_cast<std::size_t>(k)] =
                a.h[static_cast<std::size_t>(k)] * b.v + a.v * b.h[static_cast<std::size_t>(k)] +
                a.g[static_cast<std::size_t>(i)] * b.g[static_cast<std::size_t>(j)] +
                a.g[static_cast<std::size_t>(j)] * b.g[static_cast<std::size_t>(i)];
        }
    return r;
}

// Compose a univariate map given by (f, f', f'') with the jet u.
D2 d2_chain(const D2& u, double f, double f1, double f2) {
    D2 r;
    r.d = u.d;
    r.v = f;
    for (int i = 0; i < u.d; ++i) r.g[static_cast<std::size_t>(i)] = f1 * u.g[static_cast<std::size_t>(i)];
    for (int i = 0; i < u.d; ++i)
        for (int j = i; j < u.d; ++j) {
            const int k = D2::tri(u.d, i, j);
            r.h[static_cast<std::size_t>(k)] =
                f1 * u.h[static_cast<std::size_t>(k)] +
                f2 * u.g[static_cast<std::size_t>(i)] * u.g[static_cast<std::size_t>(j)];
        }
    return r;
}

D2 d2_div(const D2& a, const D2& b) {
    if (b.v == 0.0) throw NumericError("division by zero while evaluating expression");
    const double inv = 1.0 / b.v;
    return d2_mul(a, d2_chain(b, inv, -inv * inv, 2.0 * inv * inv * inv));
}

D2 d2_call(Func f, const D2& u) {
    switch (f) {
        case Func::Sin: {
            const double s = std::sin(u.v), c = std::cos(u.v);
            return d2_chain(u, s, c, -s);
        }
        case Func::Cos: {
            const double s = std::sin(u.v), c = std::cos(u.v);
            return d2_chain(u, c, -s, -c);
        }
        case Func::Exp: {
            const double e = std::exp(u.v);
            return d2_chain(u, e, e, e);
        }
        case Func::Log: {
            if (!(u.v > 0.0)) throw NumericError("log of non-positive value");
            const double inv = 1.0 / u.v;
            return d2_chain(u, std::log(u.v), inv, -inv * inv);
        }
        case Func::Sqrt: {
            if (!(u.v > 0.0)) throw NumericError("sqrt of non-positive value");
            const double s = std::sqrt(u.v);
            return d2_chain(u, s, 0.5 / s, -0.25 / (u.v * s));
        }
        case Func::Tanh: {
            const double t = std::tanh(u.v);
            const double sech2 = 1.0 - t * t;
            return d2_chain(u, t, sech2, -2.0 * t * sech2);
        }
    }
    throw NumericError("unknown function");
}

double int_pow(double base, long long k) {
    if (k < 0) return 1.0 / int_pow(base, -k);
    double acc = 1.0, b = base;
    while (k > 0) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

D2 d2_pow(const D2& base, const Expr& exponent, std::span<const double> point);

D2 d2_eval(const Expr& e, std::span<const double> point) {
    const int d = static_cast<int>(point.size());
    switch (e.kind) {
        case ExprKind::Constant: return d2_constant(d, e.constant);
        case ExprKind::Variable:
            if (e.var_index >= d) throw NumericError("variable index exceeds point dimension");
            return d2_variable(d, e.var_index, point[static_cast<std::size_t>(e.var_index)]);
        case ExprKind::Add: return d2_add(d2_eval(*e.lhs, point), d2_eval(*e.rhs, point));
        case ExprKind::Sub: return d2_sub(d2_eval(*e.lhs, point), d2_eval(*e.rhs, point));
        case ExprKind::Mul: return d2_mul(d2_eval(*e.lhs, point), d2_eval(*e.rhs, point));
        case ExprKind::Div: return d2_div(d2_eval(*e.lhs, point), d2_eval(*e.rhs, point));
        case ExprKind::Neg: return d2_neg(d2_eval(*e.lhs, point));
        case ExprKind::Call: return d2_call(e.func, d2_eval(*e.lhs, point));
        case ExprKind::Pow: return d2_pow(d2_eval(*e.lhs, point), *e.rhs, point);
    }
    throw NumericError("unknown expression node");
}

D2 d2_pow(const D2& base, const Expr& exponent, std::span<const double> point) {
    // Constant integer exponents stay valid for any base; everything else
    // needs a strictly positive base (a^b = exp(b log a)).
    if (exponent.kind == ExprKind::Constant && std::nearbyint(exponent.constant) == exponent.constant &&
        std::abs(exponent.constant) <= 1e9) {
        const long long k = static_cast<long long>(exponent.constant);
        if (k < 0 && base.v == 0.0) throw NumericError("zero base with negative exponent");
        const double f = int_pow(base.v, k);
        const double f1 = (k == 0) ? 0.0 : static_cast<double>(k) * int_pow(base.v, k - 1);
        const double f2 = (k == 0 || k == 1) ? 0.0
                                             : static_cast<double>(k) * static_cast<double>(k - 1) *
                                                   int_pow(base.v, k - 2);
        return d2_chain(base, f, f1, f2);
    }
    if (!(base.v > 0.0)) throw NumericError("non-integer power of a non-positive base");
    const D2 expo = d2_eval(exponent, point);
    return d2_call(Func::Exp, d2_mul(expo, d2_call(Func::Log, base)));
}

double eval_plain(const Expr& e, std::span<const double> point) {
    switch (e.kind) {
        case ExprKind::Constant: return e.constant;
        case ExprKind::Variable:
            if (e.var_index >= static_cast<int>(point.size()))
                throw NumericError("variable index exceeds point dimension");
            return point[static_cast<std::size_t>(e.var_index)];
        case ExprKind::Add: return eval_plain(*e.lhs, point) + eval_plain(*e.rhs, point);
        case ExprKind::Sub: return eval_plain(*e.lhs, point) - eval_plain(*e.rhs, point);
        case ExprKind::Mul: return eval_plain(*e.lhs, point) * eval_plain(*e.rhs, point);
        case ExprKind::Div: {
            const double b = eval_plain(*e.rhs, point);
            if (b == 0.0) throw NumericError("division by zero while evaluating expression");
            return eval_plain(*e.lhs, point) / b;
        }
        case ExprKind::Neg: return -eval_plain(*e.lhs, point);
        case ExprKind::Call: {
            const double u = eval_plain(*e.lhs, point);
            switch (e.func) {
                case Func::Sin: return std::sin(u);
                case Func::Cos: return std::cos(u);
                case Func::Exp: return std::exp(u);
                case Func::Log:
                    if (!(u > 0.0)) throw NumericError("log of non-positive value");
                    return std::log(u);
                case Func::Sqrt:
                    if (!(u > 0.0)) throw NumericError("sqrt of non-positive value");
                    return std::sqrt(u);
                case Func::Tanh: return std::tanh(u);
            }
            throw NumericError("unknown function");
        }
        case ExprKind::Pow: {
            if (e.rhs->kind == ExprKind::Constant &&
                std::nearbyint(e.rhs->constant) == e.rhs->constant &&
                std::abs(e.rhs->constant) <= 1e9) {
                const double b = eval_plain(*e.lhs, point);
                const long long k = static_cast<long long>(e.rhs->constant);
                if (k < 0 && b == 0.0) throw NumericError("zero base with negative exponent");
                return int_pow(b, k);
            }
            const double b = eval_plain(*e.lhs, point);
            if (!(b > 0.0)) throw NumericError("non-integer power of a non-positive base");
            return std::exp(eval_plain(*e.rhs, point) * std::log(b));
        }
    }
    throw NumericError("unknown expression node");
}

} // namespace

ExprPtr parse_expr(std::string_view source, int dim) {
    if (source.empty()) throw ParseError("empty expression", 0);
    if (dim < 1) throw SpecError("expression dimension must be >= 1");
    if (dim > kMaxDimExpr) throw SpecError("expression dimension exceeds supported maximum");
    Parser p{source, 0, dim};
    return p.parse();
}

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

double eval(const Expr& e, std::span<const double> point) {
    const double v = eval_plain(e, point);
    if (!std::isfinite(v)) throw NumericError("non-finite expression value");
    return v;
}

Jet2 eval_jet2(const Expr& e, std::span<const double> point) {
    const int d = static_cast<int>(point.size());
    if (d < 1 || d > kMaxDimExpr) throw SpecError("point dimension out of supported range");
    const D2 r = d2_eval(e, point);
    Jet2 jet(d);
    jet.value = r.v;
    for (int i = 0; i < d; ++i) jet.grad[static_cast<std::size_t>(i)] = r.g[static_cast<std::size_t>(i)];
    for (int k = 0; k < r.hsize(); ++k) jet.hess_upper[static_cast<std::size_t>(k)] = r.h[static_cast<std::size_t>(k)];
    if (!std::isfinite(jet.value)) throw NumericError("non-finite expression value");
    for (double v : jet.grad)
        if (!std::isfinite(v)) throw NumericError("non-finite expression derivative");
    for (double v : jet.hess_upper)
        if (!std::isfinite(v)) throw NumericError("non-finite expression second derivative");
    return jet;
}

} // namespace apm
