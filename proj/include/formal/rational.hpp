#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "formal/error.hpp"

namespace formal {

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Accepts `p`, `p/q` and plain decimals such as `-0.25`.
inline Rational parse_rational(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) fail(Errc::ParseError, "empty rational");
    if (s.front() == '+') s.erase(s.begin());

    auto is_int = [](const std::string& t) {
        std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };

    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        if (neg) whole.erase(whole.begin());
        if (whole.empty()) whole = "0";
        if (!is_int(whole) || (!frac.empty() && !is_int(frac)) || (!frac.empty() && frac[0] == '-'))
            fail(Errc::ParseError, "bad decimal '" + s + "'");
        Integer den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        Rational r(Integer(whole + frac, 10), den);
        r.canonicalize();
        return neg ? Rational(-r) : r;
    }
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den[0] == '-') fail(Errc::ParseError, "bad rational '" + s + "'");
    Integer d(den, 10);
    if (d == 0) fail(Errc::ParseError, "zero denominator");
    Rational r(Integer(num, 10), d);
    r.canonicalize();
    return r;
}

} // namespace formal
