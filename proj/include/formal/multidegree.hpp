#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "formal/error.hpp"

namespace formal {

/// Exponent vectors packed into one 64-bit word: the total degree sits in
/// the top byte, then one byte per variable (x1 first). Integer comparison
/// is therefore graded-lex and monomial multiplication is addition, as
/// long as degrees stay below 256.
using Mono = std::uint64_t;

inline constexpr int kMaxDim = 7;
inline constexpr int kMaxTrunc = 120;

namespace mono {

inline constexpr int shift_of(int i) noexcept { return 48 - 8 * i; }

inline constexpr int degree(Mono m) noexcept { return static_cast<int>(m >> 56); }

inline constexpr int exponent(Mono m, int i) noexcept { return static_cast<int>((m >> shift_of(i)) & 0xFF); }

inline constexpr Mono one() noexcept { return 0; }

inline constexpr Mono var(int i, int power = 1) noexcept
{
    return (static_cast<Mono>(power) << 56) | (static_cast<Mono>(power) << shift_of(i));
}

inline Mono from_exponents(const std::vector<int>& e)
{
    require(static_cast<int>(e.size()) <= kMaxDim, Errc::UnsupportedDimension, "at most 7 variables");
    Mono m = 0;
    int total = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        require(e[i] >= 0, Errc::ParseError, "negative exponent");
        require(e[i] <= kMaxTrunc, Errc::DegreeOverflow, "exponent too large");
        total += e[i];
        m |= static_cast<Mono>(e[i]) << shift_of(static_cast<int>(i));
    }
    require(total <= kMaxTrunc, Errc::DegreeOverflow, "degree too large");
    return m | (static_cast<Mono>(total) << 56);
}

inline std::vector<int> exponents(Mono m, int dim)
{
    std::vector<int> e(dim);
    for (int i = 0; i < dim; ++i) e[i] = exponent(m, i);
    return e;
}

/// Monomial m divided by x_i; caller guarantees the exponent is positive.
inline constexpr Mono lower(Mono m, int i) noexcept { return m - var(i); }

inline constexpr bool divides(Mono a, Mono b, int dim) noexcept
{
    for (int i = 0; i < dim; ++i)
        if (exponent(a, i) > exponent(b, i)) return false;
    return true;
}

/// True when m only involves the first `dim` variables.
inline constexpr bool fits(Mono m, int dim) noexcept
{
    for (int i = dim; i < kMaxDim; ++i)
        if (exponent(m, i) != 0) return false;
    return true;
}

/// Lexicographic comparison ignoring the degree byte.
inline constexpr bool lex_less(Mono a, Mono b) noexcept
{
    return (a & 0x00FFFFFFFFFFFFFFULL) < (b & 0x00FFFFFFFFFFFFFFULL);
}

/// All monomials of exact total degree d in `dim` variables, ascending.
inline std::vector<Mono> of_degree(int dim, int d)
{
    std::vector<Mono> out;
    std::vector<int> e(dim, 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == dim - 1) {
            e[i] = left;
            out.push_back(from_exponents(e));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            e[i] = k;
            self(self, i + 1, left - k);
        }
    };
    if (dim == 0) return out;
    rec(rec, 0, d);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string to_string(Mono m, int dim)
{
    std::string s;
    for (int i = 0; i < dim; ++i) {
        if (i) s += ' ';
        s += std::to_string(exponent(m, i));
    }
    return s;
}

} // namespace mono
} // namespace formal
