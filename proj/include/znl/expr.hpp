#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "znl/types.hpp"

namespace znl {

// A scalar field over variables x1..xm. Grammar: numeric literals, binary
// + - * / ^ (^ right-associative, binds tighter than unary minus), unary
// minus, functions sin cos exp tanh sqrt abs, parentheses. Evaluation is
// total: division by zero and sqrt of a negative raise EvalError instead of
// producing non-finite values.
class FieldExpr {
public:
    static FieldExpr parse(std::string_view source, int dim);

    double eval(const Vec& x) const;
    std::string print() const;  // canonical fully-parenthesized form
    int dim() const { return dim_; }

    FieldExpr(const FieldExpr&);
    FieldExpr(FieldExpr&&) noexcept;
    FieldExpr& operator=(FieldExpr);
    ~FieldExpr();

    struct Node;  // exposed for the implementation file only

private:
    FieldExpr(std::shared_ptr<const Node> root, int dim);
    std::shared_ptr<const Node> root_;
    int dim_;
};

}  // namespace znl
