#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "c00kit/errors.hpp"

namespace c00 {

// A finite subset of {1, 2, 3, ...}, stored as a strictly increasing vector.
// Comparison is lexicographic on the element sequence; since elements increase,
// this puts {2} before {2,3} before {3}, which is the tie-break order used for
// deterministic witnesses.
class FinSet {
 public:
  FinSet() = default;

  explicit FinSet(std::vector<std::uint32_t> v) : elems_(std::move(v)) {
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      if (elems_[i] < 1) throw ParseError("set elements must be >= 1");
      if (i > 0 && elems_[i] <= elems_[i - 1])
        throw ParseError("set elements must be strictly increasing");
    }
  }

  // "3,5,9"; empty string is the empty set. Spaces are not accepted.
  static FinSet parse(std::string_view s) {
    std::vector<std::uint32_t> v;
    std::size_t i = 0;
    while (i < s.size()) {
      std::uint64_t x = 0;
      std::size_t start = i;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        x = x * 10 + static_cast<std::uint64_t>(s[i] - '0');
        if (x > 0xffffffffull) throw ParseError("set element out of range", start);
        ++i;
      }
      if (i == start) throw ParseError("expected a number in set literal", i);
      v.push_back(static_cast<std::uint32_t>(x));
      if (i < s.size()) {
        if (s[i] != ',') throw ParseError("expected ',' in set literal", i);
        ++i;
        if (i == s.size()) throw ParseError("trailing ',' in set literal", i);
      }
    }
    return FinSet(std::move(v));
  }

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }

  std::uint32_t min() const {
    if (empty()) throw InternalError("min() of the empty set");
    return elems_.front();
  }
  std::uint32_t max() const {
    if (empty()) throw InternalError("max() of the empty set");
    return elems_.back();
  }

  std::uint32_t operator[](std::size_t i) const { return elems_[i]; }

  bool contains(std::uint32_t n) const {
    return std::binary_search(elems_.begin(), elems_.end(), n);
  }

  // this + {n} with n > max(); the cheap extension used by enumerators.
  FinSet with(std::uint32_t n) const {
    if (!empty() && n <= max()) throw InternalError("with() element must exceed max");
    FinSet r = *this;
    r.elems_.push_back(n);
    return r;
  }

  FinSet prefix(std::size_t len) const {
    FinSet r;
    r.elems_.assign(elems_.begin(), elems_.begin() + static_cast<std::ptrdiff_t>(len));
    return r;
  }

  FinSet slice(std::size_t begin, std::size_t end) const {
    FinSet r;
    r.elems_.assign(elems_.begin() + static_cast<std::ptrdiff_t>(begin),
                    elems_.begin() + static_cast<std::ptrdiff_t>(end));
    return r;
  }

  static FinSet interval(std::uint32_t lo, std::uint32_t hi) {
    FinSet r;
    for (std::uint32_t v = lo; v <= hi; ++v) r.elems_.push_back(v);
    return r;
  }

  bool subset_of(const FinSet& f) const {
    return std::includes(f.elems_.begin(), f.elems_.end(), elems_.begin(), elems_.end());
  }

  // Same cardinality, elementwise >=: "this is a spread of e".
  bool is_spread_of(const FinSet& e) const {
    if (size() != e.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (elems_[i] < e.elems_[i]) return false;
    return true;
  }

  bool proper_initial_segment_of(const FinSet& f) const {
    if (size() >= f.size()) return false;
    return std::equal(elems_.begin(), elems_.end(), f.elems_.begin());
  }

  // Bitmask with element i at bit i-1; requires max() <= 64.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (std::uint32_t e : elems_) {
      if (e > 64) throw ResourceError("set element exceeds the 64-element mask universe");
      m |= 1ull << (e - 1);
    }
    return m;
  }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(elems_[i]);
    }
    out += '}';
    return out;
  }

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<std::uint32_t>& elements() const { return elems_; }

  std::strong_ordering operator<=>(const FinSet& f) const = default;

  std::size_t hash() const {
    std::size_t h = 0x100001b3ull;
    for (std::uint32_t e : elems_) h = (h ^ e) * 0x9e3779b97f4a7c15ull;
    return h;
  }

 private:
  std::vector<std::uint32_t> elems_;
};

} // namespace c00

template <>
struct std::hash<c00::FinSet> {
  std::size_t operator()(const c00::FinSet& f) const { return f.hash(); }
};
