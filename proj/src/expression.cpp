#include "kernbench/expression.hpp"

#include "kernbench/error.hpp"

#include <cctype>
#include <variant>
#include <vector>

namespace kernbench {

struct Expression::Node {
    enum class Kind { Literal, Variable, Negate, Add, Sub, Mul, Div };
    Kind kind;
    std::int64_t value = 0;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make_literal(std::int64_t v) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Literal;
    n->value = v;
    return n;
}

NodePtr make_binary(Kind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all() {
        skip_space();
        if (pos_ == text_.size()) fail("empty expression");
        NodePtr root = parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::Syntax, "expression '" + std::string(text_) + "': " + why +
                                           " at position " + std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make_binary(Kind::Add, lhs, parse_product());
            else if (accept('-')) lhs = make_binary(Kind::Sub, lhs, parse_product());
            else return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(Kind::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = make_binary(Kind::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Kind::Negate;
            n->lhs = parse_unary();
            return n;
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ == text_.size()) fail("unexpected end");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                if (__builtin_mul_overflow(v, 10, &v) ||
                    __builtin_add_overflow(v, text_[pos_] - '0', &v))
                    fail("integer literal too large");
                ++pos_;
            }
            return make_literal(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            auto n = std::make_shared<Expression::Node>();
            n->kind = Kind::Variable;
            n->name = std::string(text_.substr(start, pos_ - start));
            return n;
        }
        fail("unexpected character");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::int64_t eval_node(const Expression::Node& n, const Bindings& b, const std::string& text) {
    auto overflow = [&] {
        throw Error(ErrorCode::IllegalArgument, "expression '" + text + "': integer overflow");
    };
    std::int64_t l = 0, r = 0, out = 0;
    switch (n.kind) {
        case Kind::Literal: return n.value;
        case Kind::Variable: {
            auto it = b.find(n.name);
            if (it == b.end())
                throw Error(ErrorCode::UnboundVariable,
                            "expression '" + text + "': unbound variable '" + n.name + "'");
            return it->second;
        }
        case Kind::Negate:
            l = eval_node(*n.lhs, b, text);
            if (__builtin_sub_overflow(std::int64_t{0}, l, &out)) overflow();
            return out;
        default: break;
    }
    l = eval_node(*n.lhs, b, text);
    r = eval_node(*n.rhs, b, text);
    switch (n.kind) {
        case Kind::Add:
            if (__builtin_add_overflow(l, r, &out)) overflow();
            return out;
        case Kind::Sub:
            if (__builtin_sub_overflow(l, r, &out)) overflow();
            return out;
        case Kind::Mul:
            if (__builtin_mul_overflow(l, r, &out)) overflow();
            return out;
        case Kind::Div:
            if (r == 0 || l % r != 0)
                throw Error(ErrorCode::InexactDivision,
                            "expression '" + text + "': inexact division " + std::to_string(l) +
                                "/" + std::to_string(r));
            return l / r;
        default: break;
    }
    return 0;
}

void collect(const Expression::Node& n, std::set<std::string>& out) {
    if (n.kind == Kind::Variable) out.insert(n.name);
    if (n.lhs) collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
}

std::string strip_spaces(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    return s;
}

}  // namespace

Expression::Expression() : Expression(0) {}

Expression::Expression(std::int64_t literal) {
    if (literal < 0) {
        *this = parse(std::to_string(literal));
        return;
    }
    root_ = make_literal(literal);
    text_ = std::to_string(literal);
}

Expression Expression::parse(std::string_view text) {
    Expression e;
    e.root_ = Parser(text).parse_all();
    e.text_ = strip_spaces(text);
    return e;
}

std::int64_t Expression::eval(const Bindings& bindings) const {
    return eval_node(*root_, bindings, text_);
}

std::set<std::string> Expression::free_variables() const {
    std::set<std::string> out;
    collect(*root_, out);
    return out;
}

bool Expression::is_literal() const { return root_->kind == Kind::Literal; }

}  // namespace kernbench
