#pragma once
// Recursive-descent parser for polynomial expressions.
//
//   expr   := term (("+"|"-") term)* ;
//   term   := factor ("*" factor)* ;
//   factor := ["-"] atom ;
//   atom   := number | ident ["^" uint] | "(" expr ")" ["^" uint] ;
//   number := uint ["." digits] | uint "/" uint ;
//
// Whitespace is insignificant. "/" is only legal between two integer
// literals, so every accepted text denotes a polynomial.

#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "sdem/polynomial.hpp"

namespace sdem {

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : Error("parse error at position " + std::to_string(pos) + ": " + msg), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view src, std::span<const std::string> vars) : src_(src) {
        for (std::size_t i = 0; i < vars.size(); ++i) index_.emplace(vars[i], i);
        dim_ = vars.size();
    }

    Polynomial parse() {
        skip_ws();
        if (at_end()) fail("empty expression");
        Polynomial p = expr();
        skip_ws();
        if (!at_end()) fail(std::string("unexpected '") + src_[pos_] + "'");
        return p;
    }

private:
    Polynomial expr() {
        Polynomial acc = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Polynomial term() {
        Polynomial acc = factor();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                acc = acc * factor();
            } else if (peek() == '/') {
                fail("division is only allowed between two integer literals");
            } else if (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '(' || peek() == '_')) {
                fail("expected operator (implicit multiplication is not supported)");
            } else {
                return acc;
            }
        }
    }

    Polynomial factor() {
        skip_ws();
        if (accept('-')) return -atom();
        return atom();
    }

    Polynomial atom() {
        skip_ws();
        if (at_end()) fail("unexpected end of expression");
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Polynomial p = Polynomial::constant(dim_, number());
            skip_ws();
            if (peek() == '^') fail("exponentiation of a numeric literal is not supported");
            return p;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            std::string name = ident();
            auto it = index_.find(name);
            if (it == index_.end()) fail_at("unknown variable '" + name + "'", start);
            return Polynomial::variable(dim_, it->second).pow(exponent());
        }
        if (accept('(')) {
            Polynomial inner = expr();
            skip_ws();
            if (!accept(')')) fail("expected ')'");
            return inner.pow(exponent());
        }
        fail(std::string("unexpected '") + c + "'");
    }

    // optional "^" uint suffix
    unsigned exponent() {
        skip_ws();
        if (!accept('^')) return 1;
        skip_ws();
        if (peek() == '-') fail("negative exponent");
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected non-negative integer exponent");
        std::string digits = uint_digits();
        if (peek() == '.' || peek() == '/') fail("non-integer exponent");
        if (digits.size() > 6) fail("exponent too large");
        return static_cast<unsigned>(std::stoul(digits));
    }

    Rational number() {
        std::string whole = uint_digits();
        if (accept('.')) {
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digits after '.'");
            return parse_rational(whole + "." + uint_digits());
        }
        std::size_t save = pos_;
        skip_ws();
        if (accept('/')) {
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail("division is only allowed between two integer literals");
            std::size_t den_pos = pos_;
            std::string den = uint_digits();
            if (peek() == '.') fail("division is only allowed between two integer literals");
            if (BigInt(den, 10) == 0) fail_at("division by zero", den_pos);
            return parse_rational(whole + "/" + den);
        }
        pos_ = save;
        return parse_rational(whole);
    }

    std::string uint_digits() {
        std::string d;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) d += src_[pos_++];
        return d;
    }

    std::string ident() {
        std::string s;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) s += src_[pos_++];
        return s;
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[pos_]; }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const { throw ParseError(msg, pos); }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace detail

/// Parses src as a polynomial over the ordered variable list vars.
inline Polynomial parse_polynomial(std::string_view src, std::span<const std::string> vars) {
    return detail::PolyParser(src, vars).parse();
}

}  // namespace sdem
