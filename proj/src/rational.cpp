#include "dsm/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace dsm {

namespace {

BigInt pow10(int n) {
    BigInt p = 1;
    for (int i = 0; i < n; ++i) p *= 10;
    return p;
}

Rational parse_decimal(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    bool negative = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
    }
    BigInt mantissa = 0;
    int frac_digits = 0;
    bool seen_digit = false;
    bool in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            if (in_frac) ++frac_digits;
            seen_digit = true;
        } else if (c == '.' && !in_frac) {
            in_frac = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed number: " + std::string(s));
    int exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("malformed number: " + std::string(s));
        ++i;
        bool exp_negative = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            exp_negative = s[i] == '-';
            ++i;
        }
        if (i == s.size()) throw std::invalid_argument("malformed exponent: " + std::string(s));
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                throw std::invalid_argument("malformed exponent: " + std::string(s));
            exponent = exponent * 10 + (s[i] - '0');
            if (exponent > 400) throw std::invalid_argument("exponent out of range: " + std::string(s));
        }
        if (exp_negative) exponent = -exponent;
    }
    int scale = exponent - frac_digits;
    Rational r = scale >= 0 ? Rational(mantissa * pow10(scale)) : Rational(mantissa, pow10(-scale));
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    return num / den;
}

std::string to_string_exact(const Rational& r) {
    const BigInt& den = boost::multiprecision::denominator(r);
    if (den == 1) return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + den.str();
}

BigInt round_scaled(const Rational& r, int decimals) {
    Rational scaled = r * pow10(decimals);
    BigInt num = boost::multiprecision::numerator(scaled);
    BigInt den = boost::multiprecision::denominator(scaled);
    bool negative = num < 0;
    if (negative) num = -num;
    // half away from zero: floor((2|num| + den) / (2 den))
    BigInt q = (2 * num + den) / (2 * den);
    return negative ? BigInt(-q) : q;
}

std::string to_fixed(const Rational& r, int decimals) {
    BigInt q = round_scaled(r, decimals);
    bool negative = q < 0;
    if (negative) q = -q;
    std::string digits = q.str();
    if (decimals > 0) {
        if (static_cast<int>(digits.size()) <= decimals)
            digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
    }
    return negative ? "-" + digits : digits;
}

BigInt floor_int(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt q = num / den;  // truncates toward zero
    if (num < 0 && q * den != num) q -= 1;
    return q;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace dsm
