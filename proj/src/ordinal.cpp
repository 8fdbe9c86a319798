#include "c00kit/ordinal.hpp"

#include <charconv>
#include <limits>

#include "c00kit/errors.hpp"

namespace c00 {

Ordinal Ordinal::finite(std::uint64_t n) {
  Ordinal o;
  if (n > 0) o.terms_.push_back({0, n});
  return o;
}

Ordinal Ordinal::omega_power(std::uint32_t exp, std::uint64_t coeff) {
  Ordinal o;
  if (coeff > 0) o.terms_.push_back({exp, coeff});
  return o;
}

std::uint64_t Ordinal::finite_value() const {
  if (terms_.empty()) return 0;
  if (terms_.back().exp != 0 || terms_.size() != 1)
    throw InternalError("finite_value() on a transfinite ordinal");
  return terms_.back().coeff;
}

Ordinal::Kind Ordinal::kind() const {
  if (terms_.empty()) return Kind::zero;
  return terms_.back().exp == 0 ? Kind::successor : Kind::limit;
}

Ordinal Ordinal::predecessor() const {
  if (kind() != Kind::successor) throw InternalError("predecessor() of a non-successor");
  Ordinal o = *this;
  if (--o.terms_.back().coeff == 0) o.terms_.pop_back();
  return o;
}

Ordinal Ordinal::fundamental(std::uint64_t n) const {
  if (kind() != Kind::limit) throw InternalError("fundamental() of a non-limit");
  if (n < 1) throw InternalError("fundamental() index must be >= 1");
  Ordinal o = *this;
  Term last = o.terms_.back();
  o.terms_.pop_back(); // o is now the head a (possibly with the shrunk last term re-added)
  if (last.coeff > 1) o.terms_.push_back({last.exp, last.coeff - 1});
  o.terms_.push_back({last.exp - 1, n});
  return o;
}

Ordinal Ordinal::plus_term(std::uint32_t exp, std::uint64_t coeff) const {
  Ordinal o = *this;
  if (coeff == 0) return o;
  while (!o.terms_.empty() && o.terms_.back().exp < exp) o.terms_.pop_back();
  if (!o.terms_.empty() && o.terms_.back().exp == exp)
    o.terms_.back().coeff += coeff;
  else
    o.terms_.push_back({exp, coeff});
  return o;
}

std::strong_ordering Ordinal::operator<=>(const Ordinal& o) const {
  std::size_t n = std::min(terms_.size(), o.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = terms_[i].exp <=> o.terms_[i].exp; c != 0) return c;
    if (auto c = terms_[i].coeff <=> o.terms_[i].coeff; c != 0) return c;
  }
  return terms_.size() <=> o.terms_.size();
}

std::size_t Ordinal::hash() const {
  std::size_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (const Term& t : terms_) {
    mix(t.exp);
    mix(t.coeff);
  }
  return h;
}

namespace {

std::uint64_t parse_nat(std::string_view s, std::size_t& i, const char* what) {
  std::size_t start = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == start) throw ParseError(std::string("expected ") + what, start);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data() + start, s.data() + i, v);
  if (ec != std::errc() || p != s.data() + i)
    throw ParseError(std::string("number out of range for ") + what, start);
  return v;
}

} // namespace

Ordinal Ordinal::parse(std::string_view s) {
  if (s == "0") return Ordinal();
  if (s.empty()) throw ParseError("empty ordinal");
  Ordinal o;
  std::size_t i = 0;
  bool first = true;
  while (true) {
    if (!first) {
      if (i >= s.size() || s[i] != '+') throw ParseError("expected '+'", i);
      ++i;
    }
    first = false;
    std::uint32_t exp = 0;
    std::uint64_t coeff = 0;
    if (i < s.size() && s[i] == 'w') {
      ++i;
      exp = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::uint64_t e = parse_nat(s, i, "exponent");
        if (e > std::numeric_limits<std::uint32_t>::max())
          throw ParseError("exponent out of range", i);
        exp = static_cast<std::uint32_t>(e);
      }
      coeff = 1;
      if (i < s.size() && s[i] == '*') {
        ++i;
        coeff = parse_nat(s, i, "coefficient");
      }
    } else {
      coeff = parse_nat(s, i, "term");
      exp = 0;
    }
    if (coeff == 0) throw ParseError("zero coefficient in ordinal term", i);
    if (!o.terms_.empty() && o.terms_.back().exp <= exp)
      throw ParseError("ordinal terms must have strictly decreasing exponents", i);
    o.terms_.push_back({exp, coeff});
    if (i == s.size()) break;
  }
  return o;
}

std::string Ordinal::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : terms_) {
    if (!first) out += '+';
    first = false;
    if (t.exp == 0) {
      out += std::to_string(t.coeff);
      continue;
    }
    out += 'w';
    if (t.exp > 1) {
      out += '^';
      out += std::to_string(t.exp);
    }
    if (t.coeff > 1) {
      out += '*';
      out += std::to_string(t.coeff);
    }
  }
  return out;
}

} // namespace c00
