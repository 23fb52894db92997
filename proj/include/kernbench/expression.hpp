#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace kernbench {

using Bindings = std::map<std::string, std::int64_t, std::less<>>;

/// Integer arithmetic over named variables: literals, identifiers, unary minus,
/// + - * / (exact division only) and parentheses. Usual precedence, left associative.
class Expression {
public:
    struct Node;

    Expression();  // the literal 0
    explicit Expression(std::int64_t literal);

    /// Throws Error{Syntax} with the offending character position.
    static Expression parse(std::string_view text);

    /// Throws Error{UnboundVariable} or Error{InexactDivision}.
    std::int64_t eval(const Bindings& bindings) const;

    std::set<std::string> free_variables() const;
    bool is_literal() const;

    /// Source text with whitespace removed; parse(text()) reproduces the expression.
    const std::string& text() const { return text_; }

    friend bool operator==(const Expression& a, const Expression& b) { return a.text_ == b.text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace kernbench
