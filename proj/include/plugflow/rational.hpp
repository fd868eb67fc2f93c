#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace plugflow {

/// Exact rational scalar used by all piecewise-linear dynamics.
/// Always stored in reduced form with positive denominator.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rat: zero denominator");
    return Rat(num, den);
}

inline BigInt rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline BigInt rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

/// Serializes as "p/q", or just "p" when the denominator is 1.
inline std::string rat_str(const Rat& q) {
    if (rat_den(q) == 1) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

/// Parses "p/q" or "p". Throws std::invalid_argument on malformed input.
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rat_parse: empty string");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rat_parse: zero denominator");
        return Rat(num, den);
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(std::string("rat_parse: ") + e.what());
    }
}

inline double rat_double(const Rat& q) { return q.convert_to<double>(); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

/// floor(q) as a big integer.
inline BigInt rat_floor(const Rat& q) {
    BigInt n = rat_num(q), d = rat_den(q);
    BigInt f = n / d;
    if (n < 0 && f * d != n) --f;
    return f;
}

/// q reduced to [0, period).
inline Rat rat_mod(const Rat& q, const Rat& period) {
    Rat m = q - Rat(rat_floor(q / period)) * period;
    if (m < 0) m += period;   // guard against representation edge cases
    if (m >= period) m -= period;
    return m;
}

}  // namespace plugflow
