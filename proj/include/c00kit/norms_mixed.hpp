#pragma once

// Implementation detail of norms.hpp (included from there); the implicitly
// defined norm
//   Z(x) = max( sup|x_i| , sqrt( sum_n stage_n(x)^2 ) ),
//   stage_n(x) = theta_n * max { sum_i Z(x|I_i) : I_1 < I_2 < ..., {min I_i} admissible at level xi_n }
// with xi_n the n-th approximation of w^k from below. Per support range the
// equation collapses to a scalar fixed point: decompositions of the range at
// stage n are either the range itself as a single block (value theta_n * z,
// the self term) or use proper subranges whose values are already known, so
//   z = max( c0, sqrt( sum_{n<=m} max(a_n, theta_n z)^2 + tau_m L^2 ) )
// where a_n is the best proper decomposition, m is the first stage whose
// family contains the whole range support (from there on the stage value is
// exactly theta_n L, summed in closed form as tau_m L^2), L the l1 mass and
// c0 the peak. z^2 - G(z)^2 is strictly increasing, so exactly one activity
// pattern {n : theta_n z > a_n} is consistent; we sweep the threshold windows
// a_n/theta_n and solve the linear equation inside each.

namespace c00 {
namespace normdetail {

class MixedEngine {
public:
  MixedEngine(const NormExpr& n, const Vec<double>& x) : n_(n), x_(x) {}

  EvalResult<double> run() {
    if (x_.is_zero()) return zero_result<double>();
    if (!n_.param.is_finite() || n_.param.finite_value() < 1)
      throw ConfigError("mixed norm scale must be a finite index (the stage scale w^k stays below w^w)");
    k_ = static_cast<std::uint32_t>(n_.param.finite_value());
    pos_ = x_.support().elements();
    p_ = pos_.size();
    if (pos_[0] == 1 && p_ >= 2)
      throw ConfigError("mixed norm is undefined on supports that contain index 1 together with "
                        "later indices: no finite stage admits such a set");
    if (k_ >= 2 && p_ > universe_cap())
      throw ResourceError("support size exceeds the cap for transfinite admissibility");

    for (std::size_t len = 1; len <= p_; ++len)
      for (std::size_t a = 0; a + len <= p_; ++a) solve_range(a, a + len - 1);

    // stationarity audit against the finished table
    for (const auto& [rng, z] : table_) {
      double g = g_value(rng.first, rng.second, z);
      double want = std::max(info_.at(rng).c0, g);
      if (std::fabs(want - z) > 1e-9 * std::max(1.0, z))
        throw InternalError("mixed norm table is not stationary");
    }

    EvalResult<double> r;
    r.value = table_.at({0, p_ - 1});
    r.witness = witness(0, p_ - 1);
    return r;
  }

private:
  struct RangeInfo {
    double L = 0, c0 = 0, tau = 0;
    int m = 0;
  };

  static constexpr int kStageBound = 64;

  const NormExpr& n_;
  const Vec<double>& x_;
  std::vector<std::uint32_t> pos_;
  std::size_t p_ = 0;
  std::uint32_t k_ = 1;
  std::vector<Ordinal> stage_ord_; // 1-based, built on demand
  std::map<std::pair<std::size_t, std::size_t>, RangeInfo> info_;
  std::map<std::pair<std::size_t, std::size_t>, double> table_;

  const Ordinal& stage(int n) {
    while (static_cast<int>(stage_ord_.size()) < n)
      stage_ord_.push_back(Ordinal::omega_power(k_).fundamental(
          static_cast<std::uint32_t>(stage_ord_.size()) + 1));
    return stage_ord_[static_cast<std::size_t>(n - 1)];
  }

  double theta(int i) const { return to_double(n_.theta_rule.theta(static_cast<std::uint32_t>(i))); }

  int cut_stage(std::size_t a, std::size_t b) {
    std::vector<std::uint32_t> v(pos_.begin() + static_cast<std::ptrdiff_t>(a),
                                 pos_.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    FinSet supp{std::move(v)};
    for (int n = 1; n <= kStageBound; ++n)
      if (schreier_contains(stage(n), supp)) return n;
    throw ResourceError("no stage below the search bound admits the whole support");
  }

  // best decomposition into proper subranges at stage n (the single
  // full-range block is excluded; it is the self term)
  double prop_split(int nstage, std::size_t a, std::size_t b,
                    std::vector<std::pair<std::size_t, std::size_t>>* out = nullptr) {
    std::function<double(std::size_t, std::size_t)> piece =
        [&](std::size_t i, std::size_t j) -> double { return table_.at({i, j}); };
    SplitDP<double> dp{&pos_, a, b, &piece, true, {}};
    const AdmissibilityTracker root{stage(nstage)};
    double raw = dp.best(a, root);
    if (out) dp.reconstruct(a, root, raw, *out);
    return raw;
  }

  double g_value(std::size_t a, std::size_t b, double z) {
    const RangeInfo& ri = info_.at({a, b});
    double s = ri.tau * ri.L * ri.L;
    for (int n = 1; n <= ri.m; ++n) {
      double v = std::max(theta(n) * prop_split(n, a, b), theta(n) * z);
      s += v * v;
    }
    return std::sqrt(s);
  }

  void solve_range(std::size_t a, std::size_t b) {
    RangeInfo ri;
    for (std::size_t i = a; i <= b; ++i) {
      double v = std::fabs(x_.at(pos_[i]));
      ri.L += v;
      ri.c0 = std::max(ri.c0, v);
    }
    ri.m = cut_stage(a, b);
    ri.tau = to_double(n_.theta_rule.tail_sq_sum(static_cast<std::uint32_t>(ri.m)));

    std::vector<double> av(static_cast<std::size_t>(ri.m) + 1, 0.0);
    for (int n = 1; n <= ri.m; ++n) av[static_cast<std::size_t>(n)] = theta(n) * prop_split(n, a, b);

    auto g_sq = [&](double z) {
      double s = ri.tau * ri.L * ri.L;
      for (int n = 1; n <= ri.m; ++n) {
        double v = std::max(av[static_cast<std::size_t>(n)], theta(n) * z);
        s += v * v;
      }
      return s;
    };

    double z;
    if (g_sq(ri.c0) <= ri.c0 * ri.c0) {
      z = ri.c0;
    } else {
      std::vector<double> bounds{0.0};
      for (int n = 1; n <= ri.m; ++n) bounds.push_back(av[static_cast<std::size_t>(n)] / theta(n));
      std::sort(bounds.begin(), bounds.end());
      bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
      bool found = false;
      z = 0;
      for (std::size_t s = 0; s < bounds.size() && !found; ++s) {
        double lo = bounds[s];
        double hi = s + 1 < bounds.size() ? bounds[s + 1] : std::numeric_limits<double>::infinity();
        double d = 0, rest = ri.tau * ri.L * ri.L;
        for (int n = 1; n <= ri.m; ++n) {
          if (av[static_cast<std::size_t>(n)] / theta(n) <= lo)
            d += theta(n) * theta(n);
          else
            rest += av[static_cast<std::size_t>(n)] * av[static_cast<std::size_t>(n)];
        }
        double zc = std::sqrt(rest / (1.0 - d));
        double eps = 1e-9 * std::max(1.0, zc);
        if (zc >= lo - eps && zc <= hi + eps && zc >= ri.c0 - eps) {
          z = std::max(zc, ri.c0);
          found = true;
        }
      }
      if (!found) throw InternalError("mixed norm fixed point escaped every threshold window");
    }
    info_[{a, b}] = ri;
    table_[{a, b}] = z;
  }

  Functional<double> witness(std::size_t a, std::size_t b) {
    const RangeInfo& ri = info_.at({a, b});
    const double z = table_.at({a, b});
    Functional<double> f;

    double gz = g_value(a, b, z);
    if (gz < z * (1.0 - 1e-12)) {
      // peak branch: smallest index attaining the range maximum
      for (std::size_t i = a; i <= b; ++i)
        if (std::fabs(x_.at(pos_[i])) == ri.c0) {
          int s = sign_of(x_.at(pos_[i]));
          f.terms = {{pos_[i], double(s)}};
          f.provenance = Json{{"kind", "coordinate"}, {"index", pos_[i]}, {"sign", s}};
          return f;
        }
      throw InternalError("mixed norm peak witness not found");
    }

    // stage branch: resolve the self-referential stages by a discount factor
    double d = 0;
    std::vector<int> active;
    std::vector<double> av(static_cast<std::size_t>(ri.m) + 1, 0.0);
    for (int n = 1; n <= ri.m; ++n) {
      av[static_cast<std::size_t>(n)] = theta(n) * prop_split(n, a, b);
      if (theta(n) * z - av[static_cast<std::size_t>(n)] > 1e-12 * std::max(1.0, theta(n) * z)) {
        active.push_back(n);
        d += theta(n) * theta(n);
      }
    }

    Json stages = Json::array();
    for (int n = 1; n <= ri.m; ++n) {
      if (std::find(active.begin(), active.end(), n) != active.end()) continue;
      if (av[static_cast<std::size_t>(n)] == 0.0) continue;
      std::vector<std::pair<std::size_t, std::size_t>> chosen;
      prop_split(n, a, b, &chosen);
      double wn = (av[static_cast<std::size_t>(n)] / z) / (1.0 - d);
      Json intervals = Json::array(), children = Json::array();
      for (auto [i, j] : chosen) {
        Functional<double> cw = witness(i, j);
        intervals.push_back(Json::array({pos_[i], pos_[j]}));
        children.push_back(cw.provenance);
        for (const auto& [idx, c] : cw.terms) f.add_term(idx, wn * theta(n) * c);
      }
      stages.push_back(Json{{"n", n},
                            {"weight", wn},
                            {"child", Json{{"kind", "split"},
                                           {"theta", format_rat(n_.theta_rule.theta(static_cast<std::uint32_t>(n)))},
                                           {"intervals", intervals},
                                           {"children", children}}}});
    }

    double wt = (ri.tau * ri.L / z) / (1.0 - d);
    Json tail_signs = Json::array();
    for (std::size_t i = a; i <= b; ++i) {
      int s = sign_of(x_.at(pos_[i]));
      tail_signs.push_back(Json::array({pos_[i], s}));
      f.add_term(pos_[i], wt * double(s));
    }
    f.finalize();
    f.provenance = Json{{"kind", "mixed"},
                        {"stage_cut", ri.m},
                        {"self_discount", d},
                        {"active", active},
                        {"stages", stages},
                        {"tail", Json{{"weight", wt}, {"signs", tail_signs}}}};
    return f;
  }
};

template <class T>
EvalResult<T> eval_mixed(const NormExpr& n, const Vec<T>& x) {
  if constexpr (scalar_traits<T>::exact) {
    throw ConfigError("mixed norm has no exact rational evaluation; use float mode");
  } else {
    MixedEngine eng(n, x);
    return eng.run();
  }
}

} // namespace normdetail
} // namespace c00
