#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "c00kit/errors.hpp"
#include "c00kit/finset.hpp"
#include "c00kit/rational.hpp"

namespace c00 {

// A finitely supported sequence: sparse entries (index, value), indices >= 1
// strictly increasing, values nonzero. The scalar T is Rat or double.
template <class T>
struct Vec {
  std::vector<std::pair<std::uint32_t, T>> entries;

  static Vec basis(std::uint32_t i) {
    Vec v;
    v.entries.emplace_back(i, T(1));
    return v;
  }

  static Vec from_entries(std::vector<std::pair<std::uint32_t, T>> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Vec v;
    for (auto& [i, x] : raw) {
      if (i < 1) throw ParseError("vector indices must be >= 1");
      if (!v.entries.empty() && v.entries.back().first == i)
        throw ParseError("duplicate vector index " + std::to_string(i));
      if (x == T(0)) continue;
      v.entries.emplace_back(i, std::move(x));
    }
    return v;
  }

  bool is_zero() const { return entries.empty(); }
  std::size_t support_size() const { return entries.size(); }

  std::uint32_t min_index() const {
    if (entries.empty()) throw InternalError("min_index of the zero vector");
    return entries.front().first;
  }
  std::uint32_t max_index() const {
    if (entries.empty()) throw InternalError("max_index of the zero vector");
    return entries.back().first;
  }

  FinSet support() const {
    std::vector<std::uint32_t> v;
    v.reserve(entries.size());
    for (const auto& [i, x] : entries) v.push_back(i);
    return FinSet(std::move(v));
  }

  T at(std::uint32_t i) const {
    for (const auto& [j, x] : entries)
      if (j == i) return x;
    return T(0);
  }

  Vec scaled(const T& c) const {
    Vec v;
    if (c == T(0)) return v;
    v.entries.reserve(entries.size());
    for (const auto& [i, x] : entries) v.entries.emplace_back(i, T(x * c));
    return v;
  }

  friend Vec operator+(const Vec& a, const Vec& b) {
    Vec v;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() || j < b.entries.size()) {
      if (j == b.entries.size() ||
          (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
        v.entries.push_back(a.entries[i++]);
      } else if (i == a.entries.size() || b.entries[j].first < a.entries[i].first) {
        v.entries.push_back(b.entries[j++]);
      } else {
        T s = a.entries[i].second + b.entries[j].second;
        if (s != T(0)) v.entries.emplace_back(a.entries[i].first, std::move(s));
        ++i, ++j;
      }
    }
    return v;
  }

  // entries with lo <= index <= hi
  Vec restrict_to(std::uint32_t lo, std::uint32_t hi) const {
    Vec v;
    for (const auto& [i, x] : entries)
      if (lo <= i && i <= hi) v.entries.emplace_back(i, x);
    return v;
  }

  Vec restrict_to(const FinSet& e) const {
    Vec v;
    for (const auto& [i, x] : entries)
      if (e.contains(i)) v.entries.emplace_back(i, x);
    return v;
  }

  T l1() const {
    T s(0);
    for (const auto& [i, x] : entries) s += scalar_traits<T>::abs(x);
    return s;
  }

  T linf() const {
    T s(0);
    for (const auto& [i, x] : entries) {
      T a = scalar_traits<T>::abs(x);
      if (a > s) s = a;
    }
    return s;
  }

  bool operator==(const Vec& o) const { return entries == o.entries; }
};

} // namespace c00
