#include "patchbeam/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "patchbeam/errors.hpp"

namespace patchbeam {

namespace {

constexpr const char* kFunctions[] = {"sin", "cos", "tan", "exp", "log",
                                      "sqrt", "abs", "tanh"};

double call_function(int id, double x) {
    switch (id) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return std::tan(x);
        case 3: return std::exp(x);
        case 4: return std::log(x);
        case 5: return std::sqrt(x);
        case 6: return std::abs(x);
        default: return std::tanh(x);
    }
}

}  // namespace

// Recursive-descent parser emitting postfix ops.
class ExprParser {
  public:
    ExprParser(const std::string& text, Expr& out) : text_(text), out_(out) {}

    void run() {
        parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing characters");
        if (code_.empty())
            fail("empty expression");
        int depth = 0, max_depth = 0;
        for (const auto& op : code_) {
            if (op.tag == Tag::Push || op.tag == Tag::Var) ++depth;
            else if (op.tag != Tag::Neg && op.tag != Tag::Call) --depth;
            max_depth = std::max(max_depth, depth);
        }
        if (max_depth > 64)
            fail("expression too deep");
        out_.code_ = std::make_shared<const std::vector<Expr::Op>>(std::move(code_));
        out_.text_ = text_;
    }

  private:
    using Tag = Expr::Tag;

    void fail(const std::string& msg) const {
        throw ConfigError("expression '" + text_ + "': " + msg + " at position " +
                          std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void parse_sum() {
        parse_product();
        while (true) {
            if (eat('+')) {
                parse_product();
                code_.push_back({Tag::Add});
            } else if (eat('-')) {
                parse_product();
                code_.push_back({Tag::Sub});
            } else {
                break;
            }
        }
    }

    void parse_product() {
        parse_unary();
        while (true) {
            if (eat('*')) {
                parse_unary();
                code_.push_back({Tag::Mul});
            } else if (eat('/')) {
                parse_unary();
                code_.push_back({Tag::Div});
            } else {
                break;
            }
        }
    }

    void parse_unary() {
        if (eat('-')) {
            parse_unary();
            code_.push_back({Tag::Neg});
        } else if (eat('+')) {
            parse_unary();
        } else {
            parse_power();
        }
    }

    void parse_power() {
        parse_primary();
        if (eat('^')) {
            parse_unary();  // right associative, allows 2^-3
            code_.push_back({Tag::Pow});
        }
    }

    void parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("expected operand");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start)
                fail("bad numeric literal");
            pos_ += static_cast<std::size_t>(end - start);
            code_.push_back({Tag::Push, v});
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name = text_.substr(start, pos_ - start);
            if (name == "y1" || name == "y2" || name == "y3") {
                int axis = name[1] - '1';
                out_.uses_[axis] = true;
                code_.push_back({Tag::Var, 0.0, axis});
                return;
            }
            if (name == "pi") {
                code_.push_back({Tag::Push, M_PI});
                return;
            }
            for (int id = 0; id < 8; ++id) {
                if (name == kFunctions[id]) {
                    if (!eat('('))
                        fail("expected '(' after " + name);
                    parse_sum();
                    if (!eat(')'))
                        fail("expected ')'");
                    code_.push_back({Tag::Call, 0.0, id});
                    return;
                }
            }
            fail("unknown identifier '" + name + "'");
        }
        if (eat('(')) {
            parse_sum();
            if (!eat(')'))
                fail("expected ')'");
            return;
        }
        fail("expected operand");
    }

    const std::string& text_;
    Expr& out_;
    std::size_t pos_ = 0;
    std::vector<Expr::Op> code_;
};

Expr::Expr() {
    static const auto zero = std::make_shared<const std::vector<Op>>(
        std::vector<Op>{{Tag::Push, 0.0}});
    code_ = zero;
    text_ = "0";
}

Expr Expr::parse(const std::string& text) {
    Expr e;
    ExprParser(text, e).run();
    return e;
}

Expr Expr::constant(double value) {
    Expr e;
    e.code_ = std::make_shared<const std::vector<Op>>(
        std::vector<Op>{{Tag::Push, value}});
    e.text_ = std::to_string(value);
    return e;
}

bool Expr::is_zero() const {
    return code_->size() == 1 && (*code_)[0].tag == Tag::Push && (*code_)[0].value == 0.0;
}

double Expr::operator()(const Eigen::Vector3d& y) const {
    double stack[64];
    int top = -1;
    for (const Op& op : *code_) {
        switch (op.tag) {
            case Tag::Push: stack[++top] = op.value; break;
            case Tag::Var: stack[++top] = y[op.arg]; break;
            case Tag::Neg: stack[top] = -stack[top]; break;
            case Tag::Add: --top; stack[top] += stack[top + 1]; break;
            case Tag::Sub: --top; stack[top] -= stack[top + 1]; break;
            case Tag::Mul: --top; stack[top] *= stack[top + 1]; break;
            case Tag::Div: --top; stack[top] /= stack[top + 1]; break;
            case Tag::Pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case Tag::Call: stack[top] = call_function(op.arg, stack[top]); break;
        }
    }
    return stack[0];
}

}  // namespace patchbeam
