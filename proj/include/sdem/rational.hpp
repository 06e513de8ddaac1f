#pragma once
// Exact rational scalars. Backed by GMP's mpq_class, which keeps every value
// reduced with a positive denominator after each arithmetic operation.

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdem {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses "3", "-11/8" or "0.3" into an exact rational. Decimal literals are
/// converted exactly (0.3 -> 3/10); exponent notation is not accepted.
inline Rational parse_rational(std::string_view text) {
    std::size_t pos = 0;
    auto fail = [&](const char* why) {
        throw Error("invalid rational literal '" + std::string(text) + "': " + why);
    };
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    auto digits = [&](std::string& out) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) out += text[pos++];
    };
    std::string whole;
    digits(whole);
    if (whole.empty()) fail("expected digits");
    Rational value;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::string frac;
        digits(frac);
        if (frac.empty()) fail("expected digits after '.'");
        BigInt num(whole + frac, 10);
        BigInt den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        value = Rational(num, den);
    } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        std::string den;
        digits(den);
        if (den.empty()) fail("expected denominator");
        BigInt d(den, 10);
        if (d == 0) fail("zero denominator");
        value = Rational(BigInt(whole, 10), d);
    } else {
        value = Rational(BigInt(whole, 10));
    }
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) fail("trailing characters");
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

inline Rational factorial(unsigned n) {
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

inline Rational pow(const Rational& base, unsigned e) {
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
    return Rational(num, den);  // already reduced: powers of coprime integers stay coprime
}

}  // namespace sdem
