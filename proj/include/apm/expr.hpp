#pragma once

#include "apm/errors.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apm {

/// Largest point dimension the jet evaluator supports.
inline constexpr int kMaxDimExpr = 8;

/// Second-order jet of a scalar function at a point: value, gradient, and
/// symmetric Hessian. Only the upper triangle of the Hessian is stored;
/// mirrored entries are therefore bitwise identical by construction.
class Jet2 {
public:
    explicit Jet2(int dim)
        : dim_(dim), value(0.0), grad(static_cast<std::size_t>(dim), 0.0),
          hess_upper(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0) {}

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double hess(int i, int j) const {
        if (i > j) std::swap(i, j);
        return hess_upper[static_cast<std::size_t>(i) * (2 * dim_ - i - 1) / 2 + j];
    }
    double& hess_ref(int i, int j) {
        if (i > j) std::swap(i, j);
        return hess_upper[static_cast<std::size_t>(i) * (2 * dim_ - i - 1) / 2 + j];
    }

    int dim_;
    double value;
    std::vector<double> grad;
    std::vector<double> hess_upper;
};

enum class ExprKind : std::uint8_t { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func : std::uint8_t { Sin, Cos, Exp, Log, Sqrt, Tanh };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree over real literals, variables x1..xd, the
/// arithmetic operators + - * / ^, unary minus, and a fixed set of smooth
/// functions.
struct Expr {
    ExprKind kind;
    double constant = 0.0; // Constant
    int var_index = 0;     // Variable, 0-based
    Func func = Func::Sin; // Call
    ExprPtr lhs, rhs;      // children (unary ops use lhs only)
};

/// Parse `source` against dimension `dim`. Variables are x1..x<dim>.
/// Precedence: ^  >  unary -  >  * /  >  + -, all left-associative except ^
/// which is right-associative.
ExprPtr parse_expr(std::string_view source, int dim);

/// Minimal-parentheses rendering; parsing the output reproduces the tree.
std::string to_string(const Expr& e);

/// Plain value at a point (no derivatives).
double eval(const Expr& e, std::span<const double> point);

/// Value, gradient and Hessian in one forward pass carrying second-order
/// coefficients; exact to machine precision, no differencing involved.
Jet2 eval_jet2(const Expr& e, std::span<const double> point);

} // namespace apm
