#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "c00kit/errors.hpp"
#include "c00kit/families.hpp"
#include "c00kit/ordinal.hpp"
#include "c00kit/rational.hpp"

namespace c00 {

// Reference to the family parameter of a set norm: either S_xi (infinite,
// membership computed on demand) or an explicitly materialized family on a
// finite universe.
struct FamilyRef {
  bool schreier = true;
  Ordinal xi;
  std::shared_ptr<const MaterializedFamily> fam;

  static FamilyRef schreier_family(Ordinal x) {
    FamilyRef r;
    r.schreier = true;
    r.xi = std::move(x);
    return r;
  }
  static FamilyRef explicit_family(MaterializedFamily f) {
    FamilyRef r;
    r.schreier = false;
    r.fam = std::make_shared<MaterializedFamily>(std::move(f));
    return r;
  }

  bool contains(const FinSet& e) const {
    if (schreier) return schreier_contains(xi, e);
    if (!e.empty() && e.max() > fam->universe) return false;
    return fam->is_member(e);
  }

  std::string label() const { return schreier ? "Schreier(" + xi.str() + ")" : fam->label; }
};

// Weight rule for the interval-sum norm: alpha_1 = 1 > alpha_2 > ... with
// lim alpha_i = 0 and divergent sum. "harmonic" (alpha_i = 1/i) is the only
// built-in rule; the name travels with witnesses so they can be re-checked.
struct AlphaRule {
  std::string name = "harmonic";

  Rat alpha(std::uint32_t i) const {
    if (i < 1) throw InternalError("alpha index must be >= 1");
    return Rat(1, i);
  }
  void validate() const {
    if (name != "harmonic") throw ConfigError("unknown alpha rule '" + name + "'");
  }
};

// Stage weights for the mixed euclidean norm: theta_n = first * ratio^(n-1),
// strictly decreasing with sum first/(1-ratio) required < 1, and the tail of
// squares has the closed form sum_{n>m} theta_n^2 = first^2 ratio^{2m} / (1-ratio^2).
struct ThetaRule {
  std::string name = "geometric";
  Rat first = Rat(1, 4);
  Rat ratio = Rat(1, 2);

  Rat theta(std::uint32_t n) const {
    if (n < 1) throw InternalError("theta index must be >= 1");
    Rat t = first;
    for (std::uint32_t i = 1; i < n; ++i) t *= ratio;
    return t;
  }

  Rat tail_sq_sum(std::uint32_t m) const {
    Rat r2 = ratio * ratio;
    Rat lead = first;
    for (std::uint32_t i = 0; i < m; ++i) lead *= ratio; // theta_{m+1}
    return lead * lead / (1 - r2);
  }

  Rat total_sum() const { return first / (1 - ratio); }

  void validate() const {
    if (name != "geometric") throw ConfigError("unknown theta rule '" + name + "'");
    if (!(first > 0)) throw ConfigError("theta rule needs first > 0");
    if (!(ratio > 0 && ratio < 1)) throw ConfigError("theta rule needs 0 < ratio < 1");
    if (!(total_sum() < 1)) throw ConfigError("theta rule needs sum of theta_n < 1");
  }
};

struct NormExpr;
using NormExprPtr = std::shared_ptr<const NormExpr>;

// One norm on finitely supported sequences. sup and ell1 are the classical
// endpoints; family is sup of coordinate-absolute sums over sets from a
// family; lift takes a base norm to sup over admissible interval
// decompositions of the aggregated interval values; tsirelson and mixed_z are
// the implicitly defined fixed-point norms; azimi is the weighted successive
// interval-sum norm (absolute value per interval).
struct NormExpr {
  enum class Kind { sup, ell1, family, lift, tsirelson, azimi, mixed_z };
  enum class Agg { sum, euclidean };
  enum class Outer { plain, max_with_c0 };

  Kind kind = Kind::sup;

  FamilyRef family_ref;          // family
  NormExprPtr base;              // lift
  Ordinal param;                 // lift: k_or_xi; tsirelson/mixed_z: xi
  Agg agg = Agg::sum;            // lift
  Rat theta = 1;                 // lift (0,1]; tsirelson (0,1)
  Outer outer = Outer::plain;    // lift
  AlphaRule alpha_rule;          // azimi
  ThetaRule theta_rule;          // mixed_z

  static NormExprPtr sup() { return make(Kind::sup); }
  static NormExprPtr ell1() { return make(Kind::ell1); }
  static NormExprPtr family(FamilyRef f) {
    auto n = make(Kind::family);
    n->family_ref = std::move(f);
    return n;
  }
  static NormExprPtr lift(NormExprPtr base, Ordinal k_or_xi, Agg agg = Agg::sum, Rat theta = 1,
                          Outer outer = Outer::plain) {
    auto n = make(Kind::lift);
    n->base = std::move(base);
    n->param = std::move(k_or_xi);
    n->agg = agg;
    n->theta = std::move(theta);
    n->outer = outer;
    n->validate();
    return n;
  }
  static NormExprPtr tsirelson(Ordinal xi, Rat theta) {
    auto n = make(Kind::tsirelson);
    n->param = std::move(xi);
    n->theta = std::move(theta);
    n->validate();
    return n;
  }
  static NormExprPtr azimi(AlphaRule rule = {}) {
    auto n = make(Kind::azimi);
    n->alpha_rule = std::move(rule);
    n->validate();
    return n;
  }
  static NormExprPtr mixed_z(Ordinal xi, ThetaRule rule = {}) {
    auto n = make(Kind::mixed_z);
    n->param = std::move(xi);
    n->theta_rule = std::move(rule);
    n->validate();
    return n;
  }

  void validate() const {
    switch (kind) {
      case Kind::lift:
        if (!base) throw ConfigError("lift needs a base norm");
        if (!(theta > 0 && theta <= 1)) throw ConfigError("lift weight must be in (0,1]");
        base->validate();
        break;
      case Kind::tsirelson:
        if (!(theta > 0 && theta < 1)) throw ConfigError("tsirelson weight must be in (0,1)");
        if (param.is_zero()) throw ConfigError("tsirelson index must be >= 1");
        break;
      case Kind::azimi:
        alpha_rule.validate();
        break;
      case Kind::mixed_z:
        theta_rule.validate();
        if (param.is_zero()) throw ConfigError("mixed norm index must be >= 1");
        break;
      default:
        break;
    }
  }

  // Invariance under coordinatewise sign flips. The interval-sum norm is the
  // one exception: signs inside an interval interact (|e_1 + e_2| sums, but
  // |e_1 - e_2| cancels).
  bool unconditional() const {
    switch (kind) {
      case Kind::azimi:
        return false;
      case Kind::lift:
        return base->unconditional();
      default:
        return true;
    }
  }

  // Whether moving the support rightwards (keeping values and order) can only
  // increase the norm. True for everything built on Schreier admissibility
  // (spreading families transport witnesses); false for explicit finite
  // families, which end at their universe.
  bool spreading_monotone() const {
    switch (kind) {
      case Kind::family:
        return family_ref.schreier;
      case Kind::lift:
        return base->spreading_monotone();
      default:
        return true;
    }
  }

  // Norms whose values are nested radicals have no exact rational evaluation.
  bool float_only() const {
    switch (kind) {
      case Kind::mixed_z:
        return true;
      case Kind::lift:
        return agg == Agg::euclidean || base->float_only();
      default:
        return false;
    }
  }

  std::string describe() const {
    switch (kind) {
      case Kind::sup:
        return "sup";
      case Kind::ell1:
        return "ell1";
      case Kind::family:
        return "family[" + family_ref.label() + "]";
      case Kind::lift:
        return std::string("lift[") + base->describe() + "; S_" + param.str() + "; " +
               (agg == Agg::sum ? "sum" : "euclidean") + "; theta=" + format_rat(theta) +
               (outer == Outer::max_with_c0 ? "; max_with_c0]" : "]");
      case Kind::tsirelson:
        return "tsirelson[S_" + param.str() + "; theta=" + format_rat(theta) + "]";
      case Kind::azimi:
        return "azimi[" + alpha_rule.name + "]";
      case Kind::mixed_z:
        return "mixed_z[S-scale " + param.str() + "; " + theta_rule.name + "]";
    }
    return "?";
  }

 private:
  static std::shared_ptr<NormExpr> make(Kind k) {
    auto n = std::make_shared<NormExpr>();
    n->kind = k;
    return n;
  }
};

} // namespace c00
