#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace c00 {

// Ordinals below w^w in Cantor normal form
//
//     a = w^{e_1}*c_1 + ... + w^{e_k}*c_k,   e_1 > ... > e_k >= 0,  c_i >= 1,
//
// with the empty sum standing for 0. Exponents are naturals, so everything
// representable here is < w^w.
//
// Text syntax (also used on the wire):
//     ordinal := "0" | term ("+" term)*
//     term    := "w^"K"*"C | "w^"K | "w*"C | "w" | C
// with K >= 0 and C >= 1 decimal naturals. Terms must appear with strictly
// decreasing exponents; no normalization is applied on input, a violation is a
// parse error. Rendering is canonical: "w^2*3+w+4", coefficient 1 elided,
// "w" rather than "w^1".
class Ordinal {
 public:
  struct Term {
    std::uint32_t exp;
    std::uint64_t coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Ordinal() = default; // zero

  static Ordinal finite(std::uint64_t n);
  static Ordinal omega_power(std::uint32_t exp, std::uint64_t coeff = 1);
  static Ordinal parse(std::string_view s); // throws ParseError

  std::string str() const;

  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const { return terms_.empty() || terms_.back().exp == 0; }
  // requires is_finite()
  std::uint64_t finite_value() const;

  enum class Kind { zero, successor, limit };
  Kind kind() const;

  // requires kind() == successor
  Ordinal predecessor() const;

  // Fundamental sequence at a limit lam = a + w^k*c (k >= 1 the last term):
  //   c > 1:  lam[n] = a + w^k*(c-1) + w^{k-1}*n
  //   c == 1: lam[n] = a + w^{k-1}*n
  // (w^0*n = n; an n = 0 tail is dropped). So w[n] = n, w^2[2] = w*2,
  // (w*2)[5] = w+5. Requires kind() == limit and n >= 1.
  Ordinal fundamental(std::uint64_t n) const;

  // CNF sum this + w^exp*coeff: erases trailing terms with smaller exponent,
  // merges an equal-exponent tail. coeff == 0 returns *this unchanged.
  Ordinal plus_term(std::uint32_t exp, std::uint64_t coeff) const;

  const std::vector<Term>& terms() const { return terms_; }

  std::strong_ordering operator<=>(const Ordinal& o) const;
  bool operator==(const Ordinal& o) const { return terms_ == o.terms_; }

  std::size_t hash() const;

 private:
  std::vector<Term> terms_; // strictly decreasing exponents, coeffs >= 1
};

} // namespace c00

template <>
struct std::hash<c00::Ordinal> {
  std::size_t operator()(const c00::Ordinal& o) const { return o.hash(); }
};
