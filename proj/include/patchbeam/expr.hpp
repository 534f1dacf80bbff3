#ifndef PATCHBEAM_EXPR_HPP
#define PATCHBEAM_EXPR_HPP

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

namespace patchbeam {

// Compiled closed-form scalar expression in the rescaled coordinates
// y = (y1, y2, y3).  Used for material modulation and for the coefficient
// functions of the loads f and h.
//
// Grammar: +, -, *, /, ^, parentheses, numeric literals, the variables
// y1 y2 y3, the constant pi, and the functions
// sin cos tan exp log sqrt abs tanh.
class Expr {
  public:
    Expr();  // constant 0

    // Throws ConfigError on a malformed expression.
    static Expr parse(const std::string& text);

    static Expr constant(double value);

    double operator()(const Eigen::Vector3d& y) const;

    // True if the expression never reads y1 (resp. y2, y3).  Lets callers
    // detect axially uniform data and reuse per-slice factorizations.
    bool independent_of(int axis) const { return !uses_[axis]; }

    bool is_zero() const;  // literal constant 0

    const std::string& text() const { return text_; }

  private:
    enum class Tag { Push, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
    struct Op {
        Tag tag;
        double value = 0.0;  // Push: literal
        int arg = 0;         // Var: axis, Call: function id
    };

    std::shared_ptr<const std::vector<Op>> code_;
    std::string text_;
    bool uses_[3] = {false, false, false};

    friend class ExprParser;
};

}  // namespace patchbeam

#endif
