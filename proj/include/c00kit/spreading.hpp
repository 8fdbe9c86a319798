#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "c00kit/errors.hpp"
#include "c00kit/families.hpp"
#include "c00kit/norms.hpp"
#include "c00kit/simplex.hpp"
#include "c00kit/vector.hpp"

namespace c00 {

// delta = min over admissible E of the minimal norm of a combination of the
// chosen vectors: convex mode ranges over the simplex (optionally shifted by
// a center), ell1_sphere mode over signed l1-normalized coefficients.
template <class T>
struct SpreadingQuery {
  enum class Mode { convex, ell1_sphere };

  std::vector<Vec<T>> vectors; // x_1..x_N (E picks indices 1..N)
  NormExprPtr norm;
  Ordinal xi;
  Mode mode = Mode::convex;
  Vec<T> center;
  double tolerance = 1e-9;
  // extra bound on |E| during enumeration; 0 means "just N" in convex mode
  // and the sign-enumeration bound 12 in sphere mode
  std::uint32_t set_size_cap = 0;
};

template <class T>
struct InnerResult {
  T value{};
  std::vector<T> coeffs; // aligned with E, signed in sphere mode
  Functional<T> functional;
  double gap = 0;
};

template <class T>
struct SpreadingCertificate {
  T delta{};
  FinSet witness_E;
  std::vector<T> witness_coeffs;
  Functional<T> witness_functional;
  double gap = 0;
};

namespace spreaddetail {

constexpr std::uint32_t kSignEnumerationCap = 12;

template <class T>
bool pairwise_disjoint(const std::vector<Vec<T>>& vs) {
  std::vector<std::uint32_t> all;
  std::size_t total = 0;
  for (const auto& v : vs) {
    for (const auto& [i, c] : v.entries) all.push_back(i);
    total += v.entries.size();
  }
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end() && all.size() == total;
}

template <class T>
bool unit_basis_like(const std::vector<Vec<T>>& vs) {
  std::uint32_t prev = 0;
  for (const auto& v : vs) {
    if (v.support_size() != 1 || v.entries[0].second != T(1)) return false;
    if (v.entries[0].first <= prev) return false;
    prev = v.entries[0].first;
  }
  return true;
}

// Minimize the norm of sum a_i v_i over the simplex by cutting planes: keep a
// bag of ball functionals G (each giving the valid lower bound max_g g(y)),
// solve the LP min t over { t >= g(sum a_i v_i) = sum a_i g(v_i) : g in G },
// evaluate the true norm at the LP minimizer, and add that witness (both
// signs) as a new cut until the bounds meet. Every exact-mode norm here has
// finitely many witness structures on a fixed support, so the exact loop
// terminates with gap identically zero; float mode stops at the tolerance.
template <class T>
InnerResult<T> cutting_plane(const NormExpr& norm, const std::vector<Vec<T>>& vs, double tol) {
  const std::size_t s = vs.size();
  std::vector<std::vector<T>> rows;
  auto add_cut = [&](const Functional<T>& g) {
    std::vector<T> row;
    for (const auto& v : vs) row.push_back(g.apply(v));
    std::vector<T> neg;
    for (const auto& c : row) neg.push_back(-c);
    bool added = false;
    for (auto* r : {&row, &neg})
      if (std::find(rows.begin(), rows.end(), *r) == rows.end()) {
        rows.push_back(std::move(*r));
        added = true;
      }
    return added;
  };
  for (const auto& v : vs) add_cut(normdetail::eval<T>(norm, v).witness); // vertex seeds

  std::optional<T> best_upper;
  std::vector<T> best_a;
  Functional<T> best_g;

  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<std::vector<T>> a_ub;
    std::vector<T> b_ub;
    for (const auto& r : rows) {
      std::vector<T> lp_row(s + 1, T(0));
      for (std::size_t i = 0; i < s; ++i) lp_row[i] = r[i];
      lp_row[s] = T(-1);
      a_ub.push_back(std::move(lp_row));
      b_ub.push_back(T(0));
    }
    std::vector<std::vector<T>> a_eq{std::vector<T>(s + 1, T(1))};
    a_eq[0][s] = T(0);
    std::vector<T> b_eq{T(1)};
    std::vector<T> c(s + 1, T(0));
    c[s] = T(1);
    LPResult<T> lp = solve_lp<T>(a_ub, b_ub, a_eq, b_eq, c);
    if (lp.status != LPStatus::optimal)
      throw InternalError("inner LP must stay feasible and bounded on the simplex");

    std::vector<T> a(lp.x.begin(), lp.x.begin() + static_cast<std::ptrdiff_t>(s));
    Vec<T> y;
    for (std::size_t i = 0; i < s; ++i) y = y + vs[i].scaled(a[i]);
    EvalResult<T> ev = normdetail::eval<T>(norm, y);
    if (!best_upper || ev.value < *best_upper) {
      best_upper = ev.value;
      best_a = a;
      best_g = ev.witness;
    }
    T gap = *best_upper - lp.objective;
    if (gap < T(0)) gap = T(0);
    bool done;
    if constexpr (scalar_traits<T>::exact)
      done = gap == T(0);
    else
      done = to_double(gap) <= tol;
    if (done) return {*best_upper, std::move(best_a), std::move(best_g), to_double(gap)};
    if (!add_cut(ev.witness))
      throw InternalError("cutting plane stalled with an already-known functional");
  }
  throw ResourceError("cutting plane cut budget exhausted");
}

template <class T>
std::uint32_t effective_cap(const SpreadingQuery<T>& q) {
  const auto n = static_cast<std::uint32_t>(q.vectors.size());
  if (q.mode == SpreadingQuery<T>::Mode::ell1_sphere) {
    std::uint32_t cap = q.set_size_cap ? q.set_size_cap : std::min(kSignEnumerationCap, n);
    if (cap > kSignEnumerationCap)
      throw ConfigError("sign enumeration caps sphere-mode sets at 12 elements");
    return std::min(cap, n);
  }
  return q.set_size_cap ? std::min(q.set_size_cap, n) : n;
}

template <class T>
void validate_query(const SpreadingQuery<T>& q) {
  if (q.vectors.empty()) throw ConfigError("spreading query needs at least one vector");
  if (!q.norm) throw ConfigError("spreading query needs a norm");
  q.norm->validate();
  if (!(q.tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (q.vectors.size() > universe_cap())
    throw ResourceError("vector count exceeds the universe cap " + std::to_string(universe_cap()));
  effective_cap(q);
}

} // namespace spreaddetail

template <class T>
InnerResult<T> inner_min(const SpreadingQuery<T>& q, const FinSet& e) {
  using Mode = typename SpreadingQuery<T>::Mode;
  spreaddetail::validate_query(q);
  if (e.empty()) throw ConfigError("inner set must be nonempty");
  if (e.max() > q.vectors.size()) throw ConfigError("inner set points past the vector list");
  if (!schreier_contains(q.xi, e)) throw ConfigError("inner set must be admissible");

  std::vector<Vec<T>> vs;
  for (std::uint32_t i : e.elements()) {
    Vec<T> d = q.vectors[i - 1] + q.center.scaled(T(-1));
    vs.push_back(std::move(d));
  }
  if (q.mode == Mode::convex) return spreaddetail::cutting_plane<T>(*q.norm, vs, q.tolerance);

  if (e.size() > spreaddetail::kSignEnumerationCap)
    throw ConfigError("sign enumeration caps sphere-mode sets at 12 elements");
  // signs are irrelevant when the summands never overlap and the norm is
  // unconditional: one convex solve covers every orthant
  if (q.center.is_zero() && q.norm->unconditional() && spreaddetail::pairwise_disjoint(vs))
    return spreaddetail::cutting_plane<T>(*q.norm, vs, q.tolerance);

  const std::size_t s = vs.size();
  std::optional<InnerResult<T>> best;
  for (std::uint64_t mask = 0; mask < (1ull << s); ++mask) {
    std::vector<Vec<T>> signed_vs;
    for (std::size_t i = 0; i < s; ++i)
      signed_vs.push_back(mask & (1ull << i) ? vs[i].scaled(T(-1)) : vs[i]);
    InnerResult<T> r = spreaddetail::cutting_plane<T>(*q.norm, signed_vs, q.tolerance);
    for (std::size_t i = 0; i < s; ++i)
      if (mask & (1ull << i)) r.coeffs[i] = -r.coeffs[i];
    if (!best || r.value < best->value) best = std::move(r);
  }
  return *best;
}

template <class T>
SpreadingCertificate<T> spreading_constant(const SpreadingQuery<T>& q,
                                           std::uint32_t index_floor = 0) {
  using Mode = typename SpreadingQuery<T>::Mode;
  spreaddetail::validate_query(q);
  const auto n = static_cast<std::uint32_t>(q.vectors.size());
  if (index_floor >= n) throw ConfigError("index floor leaves no candidate vectors");
  const std::uint32_t cap = spreaddetail::effective_cap(q);

  std::optional<SpreadingCertificate<T>> best;
  auto consider = [&](const FinSet& e) {
    InnerResult<T> r = inner_min(q, e);
    if (!best || r.value < best->delta)
      best = SpreadingCertificate<T>{r.value, e, std::move(r.coeffs), std::move(r.functional),
                                     r.gap};
  };

  // Packed fast path: for plain increasing basis vectors under an
  // unconditional spreading-monotone norm (center 0, signs immaterial), the
  // minimum over supersets never grows and scattering a set only raises the
  // value, so only the maximal packed interval {m..M} per starting point can
  // attain the minimum. Explicit finite-universe families are not spreading
  // within their universe, so they take the exhaustive route.
  const bool sphere_reduces = q.mode == Mode::ell1_sphere && q.center.is_zero() &&
                              q.norm->unconditional() &&
                              spreaddetail::pairwise_disjoint(q.vectors);
  const bool packed = (q.mode == Mode::convex || sphere_reduces) && q.center.is_zero() &&
                      q.norm->unconditional() && q.norm->spreading_monotone() &&
                      spreaddetail::unit_basis_like(q.vectors);
  if (packed) {
    for (std::uint32_t m = index_floor + 1; m <= n; ++m) {
      FinSet e({m});
      for (std::uint32_t j = m + 1; j <= n && e.size() < cap; ++j) {
        FinSet next = e.with(j);
        if (!schreier_contains(q.xi, next)) break;
        e = std::move(next);
      }
      consider(e);
    }
    return *best;
  }

  std::uint64_t visited = 0;
  auto rec = [&](auto&& self, const FinSet& prefix, std::uint32_t start) -> void {
    for (std::uint32_t j = start; j <= n; ++j) {
      FinSet next = prefix.with(j);
      if (!schreier_contains(q.xi, next)) continue;
      if (++visited > enumeration_cap())
        throw ResourceError("candidate-set enumeration exceeded the cap");
      consider(next);
      if (next.size() < cap) self(self, next, j + 1);
    }
  };
  rec(rec, FinSet(), index_floor + 1);
  return *best;
}

template <class T>
struct FlatteningResult {
  bool found = false;
  FinSet e;
  std::vector<T> coeffs;
  T value{}; // the certified delta of the searched range either way
};

// Admissible l1-normalized combination with norm below eps and min E past the
// floor, if the searched range holds one; "not found" speaks only about the
// range that was searched.
template <class T>
FlatteningResult<T> flattening_search(const std::vector<Vec<T>>& vectors, const NormExprPtr& norm,
                                      const Ordinal& xi, const T& eps, std::uint32_t index_floor,
                                      double tolerance = 1e-9, std::uint32_t set_size_cap = 0) {
  if (!(eps > T(0))) throw ConfigError("eps must be positive");
  SpreadingQuery<T> q;
  q.vectors = vectors;
  q.norm = norm;
  q.xi = xi;
  q.mode = SpreadingQuery<T>::Mode::ell1_sphere;
  q.tolerance = tolerance;
  q.set_size_cap = set_size_cap;
  SpreadingCertificate<T> cert = spreading_constant(q, index_floor);
  if (cert.delta < eps) return {true, cert.witness_E, std::move(cert.witness_coeffs), cert.delta};
  return {false, FinSet(), {}, cert.delta};
}

// sum_{i=m+1}^{2m} (1/m) sum_{j in E_i} a_j basis_map(j): averages the middle
// blocks of a staged witness list; total l1 mass stays 1. The used minima
// must spread-dominate an S_1 set starting at m+1, i.e. the first used block
// must start past m (blocks being successive does the rest).
template <class T>
Vec<T> build_average(const std::vector<std::pair<FinSet, std::vector<T>>>& stage_witnesses,
                     std::uint32_t m, const std::function<Vec<T>(std::uint32_t)>& basis_map) {
  if (m < 1) throw ConfigError("averaging needs m >= 1");
  if (stage_witnesses.size() < 2ull * m)
    throw ConfigError("averaging needs at least 2m stage witnesses");
  for (std::size_t i = 0; i < stage_witnesses.size(); ++i) {
    const auto& [e, a] = stage_witnesses[i];
    if (e.empty()) throw ConfigError("stage sets must be nonempty");
    if (a.size() != e.size()) throw ConfigError("stage coefficients must match the stage set");
    T mass(0);
    for (const auto& c : a) mass += scalar_traits<T>::abs(c);
    bool normalized;
    if constexpr (scalar_traits<T>::exact)
      normalized = mass == T(1);
    else
      normalized = std::fabs(to_double(mass) - 1.0) <= 1e-9;
    if (!normalized) throw ConfigError("stage coefficients must have l1 mass 1");
    if (i > 0 && stage_witnesses[i - 1].first.max() >= e.min())
      throw ConfigError("stage sets must be successive blocks");
  }
  std::vector<std::uint32_t> minima;
  for (std::size_t i = m; i < 2ull * m; ++i) minima.push_back(stage_witnesses[i].first.min());
  if (minima.front() < m + 1)
    throw ConfigError("used minima " + FinSet(std::move(minima)).str() +
                      " do not dominate an admissible set starting at " + std::to_string(m + 1));

  Vec<T> out;
  const T w = scalar_traits<T>::from_rat(Rat(1, m));
  for (std::size_t i = m; i < 2ull * m; ++i) {
    const auto& [e, a] = stage_witnesses[i];
    const auto idx = e.elements();
    for (std::size_t k = 0; k < idx.size(); ++k) out = out + basis_map(idx[k]).scaled(w * a[k]);
  }
  return out;
}

} // namespace c00
