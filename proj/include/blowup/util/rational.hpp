#ifndef BLOWUP_UTIL_RATIONAL_HPP
#define BLOWUP_UTIL_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <stdexcept>

namespace blowup {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Parses "p", "-p", "p/q" with optional surrounding whitespace.
inline Rational parse_rational(const std::string& s) {
    auto first = s.find_first_not_of(" \t");
    auto last = s.find_last_not_of(" \t");
    if (first == std::string::npos) throw std::invalid_argument("empty rational literal");
    std::string body = s.substr(first, last - first + 1);
    auto slash = body.find('/');
    if (slash == std::string::npos) return Rational(BigInt(body));
    BigInt num(body.substr(0, slash));
    BigInt den(body.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
    return Rational(num, den);
}

inline std::string rational_to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

}  // namespace blowup

#endif
