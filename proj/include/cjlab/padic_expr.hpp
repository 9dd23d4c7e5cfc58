#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "cjlab/padic.hpp"

namespace cjlab {

/// Result of a p-adic expression: a number, a norm, or a valuation.
struct ExprValue {
    enum class Kind { Number, Norm, Valuation } kind = Kind::Number;
    PAdicNumber number;
    PNorm norm;
    bool zero_valuation = false;  // val(0)
    int valuation = 0;

    std::string to_string() const {
        switch (kind) {
            case Kind::Number: return number.is_zero() ? "0" : number.to_literal();
            case Kind::Norm: return norm.to_string();
            case Kind::Valuation: return zero_valuation ? "inf" : std::to_string(valuation);
        }
        return "?";
    }
};

/// Grammar:
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | atom
///   atom  := INT | '(' expr ')' | rat(a/b) | Qp(p; v; digits)
///          | name '(' expr (',' ('p'|'prec') '=' INT)* ')'   name in norm, val, halve, twice
/// Integer literals and rat() take the prime and precision of the innermost
/// enclosing call that sets them.
class PadicExpression {
public:
    explicit PadicExpression(std::string text) : text_(std::move(text)) {
        root_ = parse_expr();
        skip();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }

    ExprValue evaluate(int prime = 2, int precision = kDefaultPrecision) const { return eval(*root_, prime, precision); }

private:
    struct Node {
        enum class Op { Int, Literal, Add, Sub, Mul, Div, Neg, Call } op;
        std::int64_t integer = 0;
        std::string text;  // literal text or function name
        int prime = 0, precision = 0;  // 0: inherit
        std::unique_ptr<Node> a, b;
    };
    using Ptr = std::unique_ptr<Node>;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("padic expression: " + why + " at offset " + std::to_string(pos_) + " in '" + text_ + "'");
    }
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char ch) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::int64_t integer() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer");
        try {
            return std::stoll(text_.substr(start, pos_ - start));
        } catch (const std::out_of_range&) {
            fail("integer out of range");
        }
    }
    std::string identifier() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    Ptr binary(Node::Op op, Ptr a, Ptr b) {
        auto n = std::make_unique<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }
    Ptr parse_expr() {
        Ptr left = parse_term();
        for (;;) {
            if (eat('+'))
                left = binary(Node::Op::Add, std::move(left), parse_term());
            else if (eat('-'))
                left = binary(Node::Op::Sub, std::move(left), parse_term());
            else
                return left;
        }
    }
    Ptr parse_term() {
        Ptr left = parse_unary();
        for (;;) {
            if (eat('*'))
                left = binary(Node::Op::Mul, std::move(left), parse_unary());
            else if (eat('/'))
                left = binary(Node::Op::Div, std::move(left), parse_unary());
            else
                return left;
        }
    }
    Ptr parse_unary() {
        if (eat('-')) return binary(Node::Op::Neg, parse_unary(), nullptr);
        return parse_atom();
    }
    Ptr parse_atom() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end");
        if (eat('(')) {
            Ptr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            auto n = std::make_unique<Node>();
            n->op = Node::Op::Int;
            n->integer = integer();
            return n;
        }
        const std::size_t start = pos_;
        const std::string name = identifier();
        if (name.empty()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        if (!eat('(')) fail("expected '(' after " + name);
        if (name == "rat" || name == "Qp") {
            int depth = 1;
            while (pos_ < text_.size() && depth > 0) {
                if (text_[pos_] == '(') ++depth;
                if (text_[pos_] == ')') --depth;
                ++pos_;
            }
            if (depth) fail("unbalanced parentheses");
            auto n = std::make_unique<Node>();
            n->op = Node::Op::Literal;
            n->text = text_.substr(start, pos_ - start);
            return n;
        }
        if (name != "norm" && name != "val" && name != "halve" && name != "twice") fail("unknown function " + name);
        auto n = std::make_unique<Node>();
        n->op = Node::Op::Call;
        n->text = name;
        n->a = parse_expr();
        while (eat(',')) {
            const std::string key = identifier();
            if (!eat('=')) fail("expected '=' after " + key);
            const auto v = integer();
            if (key == "p")
                n->prime = static_cast<int>(v);
            else if (key == "prec")
                n->precision = static_cast<int>(v);
            else
                fail("unknown keyword " + key);
        }
        if (!eat(')')) fail("expected ')'");
        return n;
    }

    static const PAdicNumber& as_number(const ExprValue& v) {
        if (v.kind != ExprValue::Kind::Number) throw DomainError("padic expression: norm/val results are not numbers");
        return v.number;
    }
    static ExprValue number(PAdicNumber x) {
        ExprValue v;
        v.number = std::move(x);
        return v;
    }

    ExprValue eval(const Node& n, int prime, int precision) const {
        switch (n.op) {
            case Node::Op::Int: return number(PAdicNumber::from_integer(n.integer, prime, precision));
            case Node::Op::Literal: return number(PAdicNumber::parse(n.text, prime, precision));
            case Node::Op::Neg: return number(-as_number(eval(*n.a, prime, precision)));
            case Node::Op::Add:
                return number(as_number(eval(*n.a, prime, precision)) + as_number(eval(*n.b, prime, precision)));
            case Node::Op::Sub:
                return number(as_number(eval(*n.a, prime, precision)) - as_number(eval(*n.b, prime, precision)));
            case Node::Op::Mul:
                return number(as_number(eval(*n.a, prime, precision)) * as_number(eval(*n.b, prime, precision)));
            case Node::Op::Div:
                return number(as_number(eval(*n.a, prime, precision)) / as_number(eval(*n.b, prime, precision)));
            case Node::Op::Call: {
                const int p = n.prime ? n.prime : prime, q = n.precision ? n.precision : precision;
                const PAdicNumber x = as_number(eval(*n.a, p, q));
                ExprValue v;
                if (n.text == "norm") {
                    v.kind = ExprValue::Kind::Norm;
                    v.norm = x.norm();
                } else if (n.text == "val") {
                    v.kind = ExprValue::Kind::Valuation;
                    v.zero_valuation = x.is_zero();
                    v.valuation = x.is_zero() ? 0 : x.valuation();
                } else if (n.text == "halve") {
                    v.number = halve(x);
                } else {
                    v.number = twice(x);
                }
                return v;
            }
        }
        throw DomainError("padic expression: bad node");
    }

    std::string text_;
    std::size_t pos_ = 0;
    Ptr root_;
};

inline std::string eval_padic_expression(const std::string& text, int prime = 2, int precision = kDefaultPrecision) {
    return PadicExpression(text).evaluate(prime, precision).to_string();
}

}  // namespace cjlab
