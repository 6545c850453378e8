#include "znl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace znl {

namespace {

enum class Op { Add, Sub, Mul, Div, Pow, Neg };
enum class Fn { Sin, Cos, Exp, Tanh, Sqrt, Abs };

const char* op_symbol(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Pow: return "^";
        case Op::Neg: return "-";
    }
    return "?";
}

const char* fn_name(Fn fn) {
    switch (fn) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Tanh: return "tanh";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
    }
    return "?";
}

}  // namespace

struct FieldExpr::Node {
    enum class Kind { Literal, Variable, Unary, Binary, Call } kind;
    double literal = 0.0;
    int variable = 0;  // zero-based
    Op op = Op::Add;
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const FieldExpr::Node>;
using Node = FieldExpr::Node;

NodePtr make_literal(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Literal;
    n->literal = v;
    return n;
}

NodePtr make_variable(int idx) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->variable = idx;
    return n;
}

NodePtr make_unary(NodePtr operand) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->op = Op::Neg;
    n->lhs = std::move(operand);
    return n;
}

NodePtr make_binary(Op op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call(Fn fn, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->fn = fn;
    n->lhs = std::move(arg);
    return n;
}

class Parser {
public:
    Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) syntax("unexpected trailing input");
        return e;
    }

private:
    std::string_view src_;
    int dim_;
    std::size_t pos_ = 0;

    [[noreturn]] void syntax(const std::string& msg) {
        fail(Errc::SyntaxError, msg + " at byte " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    // sum := term (('+' | '-') term)*
    NodePtr parse_sum() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = make_binary(Op::Add, lhs, parse_term());
            else if (consume('-'))
                lhs = make_binary(Op::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    // term := unary (('*' | '/') unary)*
    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (consume('*'))
                lhs = make_binary(Op::Mul, lhs, parse_unary());
            else if (consume('/'))
                lhs = make_binary(Op::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    // unary := '-' unary | power      (unary minus binds looser than ^)
    NodePtr parse_unary() {
        if (consume('-')) return make_unary(parse_unary());
        return parse_power();
    }

    // power := atom ('^' unary)?      (right-associative)
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) return make_binary(Op::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) syntax("expected expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) syntax("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        syntax(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) syntax("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_literal(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
            if (digits) {
                const int idx = std::stoi(name.substr(1));
                if (idx < 1 || idx > dim_)
                    fail(Errc::UnknownIdentifier,
                         "variable " + name + " out of range for dimension " + std::to_string(dim_));
                return make_variable(idx - 1);
            }
        }

        static const std::pair<const char*, Fn> kFunctions[] = {
            {"sin", Fn::Sin}, {"cos", Fn::Cos},   {"exp", Fn::Exp},
            {"tanh", Fn::Tanh}, {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs},
        };
        for (const auto& [fname, fn] : kFunctions) {
            if (name == fname) {
                if (!consume('(')) fail(Errc::ArityError, "function " + name + " needs one argument");
                NodePtr arg = parse_sum();
                if (consume(',')) fail(Errc::ArityError, "function " + name + " takes exactly one argument");
                if (!consume(')')) syntax("expected ')'");
                return make_call(fn, arg);
            }
        }
        fail(Errc::UnknownIdentifier, "unknown identifier '" + name + "'");
    }
};

double eval_node(const Node& n, const Vec& x) {
    switch (n.kind) {
        case Node::Kind::Literal:
            return n.literal;
        case Node::Kind::Variable:
            return x[n.variable];
        case Node::Kind::Unary:
            return -eval_node(*n.lhs, x);
        case Node::Kind::Binary: {
            const double a = eval_node(*n.lhs, x);
            const double b = eval_node(*n.rhs, x);
            switch (n.op) {
                case Op::Add: return a + b;
                case Op::Sub: return a - b;
                case Op::Mul: return a * b;
                case Op::Div:
                    if (b == 0.0) fail(Errc::EvalError, "division by zero");
                    return a / b;
                case Op::Pow: {
                    const double v = std::pow(a, b);
                    if (!std::isfinite(v)) fail(Errc::EvalError, "non-finite power");
                    return v;
                }
                case Op::Neg: break;
            }
            fail(Errc::EvalError, "bad binary operator");
        }
        case Node::Kind::Call: {
            const double a = eval_node(*n.lhs, x);
            switch (n.fn) {
                case Fn::Sin: return std::sin(a);
                case Fn::Cos: return std::cos(a);
                case Fn::Exp: {
                    const double v = std::exp(a);
                    if (!std::isfinite(v)) fail(Errc::EvalError, "exp overflow");
                    return v;
                }
                case Fn::Tanh: return std::tanh(a);
                case Fn::Sqrt:
                    if (a < 0.0) fail(Errc::EvalError, "sqrt of negative value");
                    return std::sqrt(a);
                case Fn::Abs: return std::abs(a);
            }
            fail(Errc::EvalError, "bad function");
        }
    }
    fail(Errc::EvalError, "bad node");
}

void print_node(const Node& n, std::ostringstream& out) {
    switch (n.kind) {
        case Node::Kind::Literal: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", n.literal);
            out << buf;
            return;
        }
        case Node::Kind::Variable:
            out << 'x' << (n.variable + 1);
            return;
        case Node::Kind::Unary:
            out << "(-";
            print_node(*n.lhs, out);
            out << ')';
            return;
        case Node::Kind::Binary:
            out << '(';
            print_node(*n.lhs, out);
            out << ' ' << op_symbol(n.op) << ' ';
            print_node(*n.rhs, out);
            out << ')';
            return;
        case Node::Kind::Call:
            out << fn_name(n.fn) << '(';
            print_node(*n.lhs, out);
            out << ')';
            return;
    }
}

}  // namespace

FieldExpr::FieldExpr(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}
FieldExpr::FieldExpr(const FieldExpr&) = default;
FieldExpr::FieldExpr(FieldExpr&&) noexcept = default;
FieldExpr& FieldExpr::operator=(FieldExpr other) {
    root_ = std::move(other.root_);
    dim_ = other.dim_;
    return *this;
}
FieldExpr::~FieldExpr() = default;

FieldExpr FieldExpr::parse(std::string_view source, int dim) {
    if (dim < 0) fail(Errc::BadParams, "dimension must be nonnegative");
    Parser parser(source, dim);
    return FieldExpr(parser.parse(), dim);
}

double FieldExpr::eval(const Vec& x) const {
    require_dim(x, dim_, "expression input");
    return eval_node(*root_, x);
}

std::string FieldExpr::print() const {
    std::ostringstream out;
    print_node(*root_, out);
    return out.str();
}

}  // namespace znl
