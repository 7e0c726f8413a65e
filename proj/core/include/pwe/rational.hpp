#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "pwe/errors.hpp"

namespace pwe {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// log of a positive rational, stable for huge numerator/denominator.
inline double log_rat(const Rat& r) {
    if (r <= 0) throw Error("log_rat: argument must be positive");
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    auto log_big = [](const BigInt& x) {
        const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(x));
        if (bits <= 900) return std::log(x.convert_to<double>());
        const BigInt shifted = x >> (bits - 64);
        return std::log(shifted.convert_to<double>()) +
               static_cast<double>(bits - 64) * std::log(2.0);
    };
    return log_big(num) - log_big(den);
}

inline Rat pow_rat(const Rat& base, long exp) {
    if (exp == 0) return Rat(1);
    Rat b = exp > 0 ? base : Rat(1) / base;
    long e = std::labs(exp);
    Rat acc(1);
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline Rat abs_rat(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Parses "p/q", "p", or decimal literals like "-0.25" into an exact rational.
inline Rat parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const BigInt num(text.substr(0, slash));
            const BigInt den(text.substr(slash + 1));
            if (den == 0) throw ConfigError("rational with zero denominator: " + text);
            return Rat(num, den);
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) return Rat(BigInt(text));
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        const size_t frac_len = text.size() - dot - 1;
        BigInt den(1);
        for (size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rat(BigInt(digits), den);
    } catch (const std::exception& e) {
        throw ConfigError("cannot parse rational '" + text + "': " + e.what());
    }
}

inline std::string rat_to_string(const Rat& r) {
    const BigInt den = boost::multiprecision::denominator(r);
    std::string s = boost::multiprecision::numerator(r).str();
    if (den != 1) s += "/" + den.str();
    return s;
}

// Decimal expansion to `digits` significant digits (used by report CSVs).
inline std::string rat_to_decimal(const Rat& r, int digits = 30) {
    if (r == 0) return "0";
    BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    std::string sign;
    if (num < 0) {
        sign = "-";
        num = -num;
    }
    BigInt ip = num / den;
    BigInt rem = num % den;
    std::string int_part = ip.str();
    int sig = (ip == 0) ? 0 : static_cast<int>(int_part.size());
    std::string frac;
    while (rem != 0 && sig < digits) {
        rem *= 10;
        BigInt d = rem / den;
        rem %= den;
        frac += d.str();
        if (sig > 0 || d != 0) ++sig;
    }
    std::string out = sign + int_part;
    if (!frac.empty()) out += "." + frac;
    return out;
}

}  // namespace pwe
