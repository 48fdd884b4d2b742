#pragma once

// Deadlocks, F-cliques, the stable tuple set W_mu = L G W, tuple projections
// x -> (x^L, x^G, x^W), and invariant tuple laws.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapwalk/errors.hpp"
#include "mapwalk/limits.hpp"
#include "mapwalk/measure.hpp"
#include "mapwalk/rees.hpp"
#include "mapwalk/semigroup.hpp"

namespace mapwalk {

// merged[x][y] iff some element of S maps x and y to the same point.
class DeadlockTable {
 public:
  explicit DeadlockTable(const Semigroup& s) : n_(s.degree()), merged_(n_ * n_, false) {
    for (const auto& t : s.elements()) {
      for (Point x = 0; x < n_; ++x) {
        for (Point y = x + 1; y < n_; ++y) {
          if (t(x) == t(y)) merged_[x * n_ + y] = merged_[y * n_ + x] = true;
        }
      }
    }
  }
  bool is_deadlock(Point x, Point y) const {
    if (x == y) throw InputError("a deadlock needs two distinct points");
    return !merged_[x * n_ + y];
  }
  std::size_t degree() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::vector<bool> merged_;
};

// No element of S merges x and y.
inline bool is_deadlock(const Semigroup& s, Point x, Point y) {
  if (x == y) throw InputError("a deadlock needs two distinct points");
  if (x >= s.degree() || y >= s.degree()) throw InputError("point outside the domain");
  for (const auto& t : s.elements()) {
    if (t(x) == t(y)) return false;
  }
  return true;
}

// {gV : g in the kernel}, deduplicated and sorted.
inline std::vector<std::vector<Point>> f_cliques(const Semigroup& s, const Kernel& k) {
  std::vector<std::vector<Point>> out;
  for (std::size_t z : k.elements) out.push_back(s[z].image_set());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct TupleFactors {
  std::size_t l;  // local L index
  std::size_t g;  // local G index
  std::size_t w;  // index into CliqueData::W
  bool operator==(const TupleFactors&) const = default;
};

struct CliqueData {
  std::size_t m_mu = 0;
  std::vector<std::vector<Point>> cliques;
  // Stable tuples on kernel images, lexicographic. Stable tuples of
  // transient points are left out: no stationary evolution visits them.
  std::vector<Tuple> W_mu;
  std::vector<Tuple> eW_mu;  // lexicographic
  std::vector<Tuple> W;      // lexicographic; smallest member of each G-orbit in eW_mu
  std::map<Tuple, std::size_t> orbit_of;  // eW_mu tuple -> index into W
  std::unordered_map<Tuple, TupleFactors, TupleHash> factors;  // W_mu tuple -> (l, g, w)

  bool in_W_mu(const Tuple& x) const { return factors.contains(x); }
  std::optional<std::size_t> w_index(const Tuple& w) const {
    auto it = std::lower_bound(W.begin(), W.end(), w);
    if (it == W.end() || *it != w) return std::nullopt;
    return static_cast<std::size_t>(it - W.begin());
  }
};

namespace detail {

inline Tuple apply_element(const Semigroup& s, std::size_t z, const Tuple& x) { return apply_tuple(s[z], x); }

}  // namespace detail

inline CliqueData compute_W(const Semigroup& s, const Kernel& k, const ReesData& rd) {
  CliqueData cd;
  cd.m_mu = k.min_rank;
  cd.cliques = f_cliques(s, k);
  const DeadlockTable dead(s);

  // Orderings of each F-clique, kept when every pair is a deadlock
  // (equivalently f x stays distinct for every f in S).
  for (const auto& clique : cd.cliques) {
    if (clique.size() != cd.m_mu) throw StructuralError("F-clique of the wrong size");
    std::vector<Point> perm = clique;
    do {
      bool stable = true;
      for (std::size_t i = 0; i < perm.size() && stable; ++i) {
        for (std::size_t j = i + 1; j < perm.size() && stable; ++j) {
          stable = dead.is_deadlock(perm[i], perm[j]);
        }
      }
      if (stable) cd.W_mu.emplace_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::sort(cd.W_mu.begin(), cd.W_mu.end());

  for (const auto& x : cd.W_mu) cd.eW_mu.push_back(detail::apply_element(s, rd.e, x));
  std::sort(cd.eW_mu.begin(), cd.eW_mu.end());
  cd.eW_mu.erase(std::unique(cd.eW_mu.begin(), cd.eW_mu.end()), cd.eW_mu.end());

  for (const auto& x : cd.eW_mu) {
    if (cd.orbit_of.contains(x)) continue;
    const std::size_t rep = cd.W.size();
    cd.W.push_back(x);
    for (std::size_t g : rd.G) {
      const Tuple y = detail::apply_element(s, g, x);
      auto [it, inserted] = cd.orbit_of.emplace(y, rep);
      if (!inserted && it->second != rep) throw StructuralError("G-orbits in eW_mu overlap");
    }
  }
  if (cd.orbit_of.size() != cd.eW_mu.size()) throw StructuralError("G-orbits leave eW_mu");

  // L x G x W -> W_mu must be a bijection.
  for (std::size_t l = 0; l < rd.L.size(); ++l) {
    for (std::size_t g = 0; g < rd.G.size(); ++g) {
      const std::size_t lg = s.multiply(rd.L[l], rd.G[g]);
      for (std::size_t w = 0; w < cd.W.size(); ++w) {
        Tuple x = detail::apply_element(s, lg, cd.W[w]);
        if (!std::binary_search(cd.W_mu.begin(), cd.W_mu.end(), x)) {
          throw StructuralError("l g w = " + x.to_string() + " is outside W_mu");
        }
        if (!cd.factors.emplace(std::move(x), TupleFactors{l, g, w}).second) {
          throw StructuralError("product map L x G x W -> W_mu is not injective");
        }
      }
    }
  }
  if (cd.factors.size() != cd.W_mu.size()) {
    throw StructuralError("product map L x G x W -> W_mu is not surjective");
  }
  return cd;
}

inline TupleFactors project_tuple(const CliqueData& cd, const Tuple& x) {
  auto it = cd.factors.find(x);
  if (it == cd.factors.end()) throw InputError(x.to_string() + " is not in W_mu");
  return it->second;
}

// Lambda = eta^L omega_G Lambda_W, checked to be fixed by mu.
inline TupleMeasure invariant_law(const Semigroup& s, const ElementMeasure& mu, const ReesData& rd,
                                  const CliqueData& cd, const CyclicLimit& limits,
                                  const TupleMeasure& lambda_w) {
  for (const auto& [w, q] : lambda_w) {
    if (!cd.w_index(w)) throw InputError(w.to_string() + " is not in W");
  }
  if (!lambda_w.is_probability()) throw InputError("Lambda_W is not a probability");
  std::vector<std::size_t> g_elems(rd.G.begin(), rd.G.end());
  const auto left = convolve(s, limits.eta_L, uniform(g_elems));
  auto lam = act_on_tuples(s, left, lambda_w);
  if (act_on_tuples(s, mu, lam) != lam) {
    throw StructuralError("eta^L omega_G Lambda_W is not mu-invariant");
  }
  return lam;
}

// A shift-compatible family Lambda_k = sum_i c_i eta^L gamma^(k+i) omega_H Lambda^i_W.
struct InvariantFamily {
  std::vector<Rational> c;
  std::vector<TupleMeasure> lambda_W;  // empty measure where c_i = 0

  std::size_t period() const noexcept { return c.size(); }
};

inline TupleMeasure family_law(const Semigroup& s, const ReesData& rd, const CliqueData& cd,
                               const CyclicLimit& limits, const InvariantFamily& fam, long long k) {
  if (fam.c.size() != rd.p || fam.lambda_W.size() != rd.p) {
    throw InputError("family must have exactly p = " + std::to_string(rd.p) + " components");
  }
  Rational total = 0;
  for (const auto& ci : fam.c) {
    if (ci < 0) throw InputError("family coefficients must be nonnegative");
    total += ci;
  }
  if (total != 1) throw InputError("family coefficients must sum to 1");
  std::vector<std::size_t> h_elems;
  for (std::size_t h : rd.H) h_elems.push_back(rd.G[h]);
  const auto omega_h = uniform(h_elems);
  TupleMeasure out;
  for (std::size_t i = 0; i < rd.p; ++i) {
    if (fam.c[i] == 0) continue;
    if (!fam.lambda_W[i].is_probability()) {
      throw InputError("Lambda^" + std::to_string(i) + "_W is not a probability");
    }
    for (const auto& [w, q] : fam.lambda_W[i]) {
      if (!cd.w_index(w)) throw InputError(w.to_string() + " is not in W");
    }
    const std::size_t gk = rd.G[rd.gamma_power(k + static_cast<long long>(i))];
    const auto left = measure_products(s, {limits.eta_L, gk, omega_h});
    for (const auto& [x, q] : act_on_tuples(s, left, fam.lambda_W[i])) out.add(x, q * fam.c[i]);
  }
  return out;
}

// Recovers (c_i, Lambda^i_W) from Lambda_0. With x = l gamma^i h w, the mass
// of Lambda_0 over {x : x^C = gamma^i, x^W = w} is c_i Lambda^i_W{w}.
inline InvariantFamily classify_family(const Semigroup& s, const ElementMeasure& mu, const ReesData& rd,
                                       const CliqueData& cd, const CyclicLimit& limits,
                                       const TupleMeasure& lambda0, std::size_t window = 0) {
  if (!lambda0.is_probability()) throw InputError("Lambda_0 is not a probability");
  InvariantFamily fam;
  fam.c.assign(rd.p, Rational(0));
  fam.lambda_W.assign(rd.p, TupleMeasure{});
  std::vector<TupleMeasure> joint(rd.p);
  for (const auto& [x, q] : lambda0) {
    if (!x.distinct()) {
      throw InputError(x.to_string() + " has repeated points; only laws on distinct tuples are classified");
    }
    auto it = cd.factors.find(x);
    if (it == cd.factors.end()) {
      throw ClassificationError("Lambda_0 charges a tuple outside W_mu",
                                x.to_string() + " carries " + to_string(q));
    }
    const std::size_t i = rd.coset_of(it->second.g);
    fam.c[i] += q;
    joint[i].add(cd.W[it->second.w], q);
  }
  for (std::size_t i = 0; i < rd.p; ++i) {
    if (fam.c[i] != 0) fam.lambda_W[i] = joint[i].scaled(1 / fam.c[i]);
  }

  const auto rebuilt = family_law(s, rd, cd, limits, fam, 0);
  if (rebuilt != lambda0) {
    std::string residual;
    for (const auto& x : cd.W_mu) {
      const Rational d = lambda0.weight(x) - rebuilt.weight(x);
      if (d != 0) residual += x.to_string() + ": " + to_string(d) + "\n";
    }
    throw ClassificationError("Lambda_0 is not of the form sum_i c_i eta^L gamma^i omega_H Lambda^i_W",
                              residual);
  }
  // Lambda_k = mu Lambda_{k-1} over a verification window.
  const std::size_t steps = window == 0 ? rd.p + 1 : window;
  TupleMeasure cur = lambda0;
  for (std::size_t k = 1; k <= steps; ++k) {
    cur = act_on_tuples(s, mu, cur);
    if (cur != family_law(s, rd, cd, limits, fam, static_cast<long long>(k))) {
      throw ClassificationError("family recursion Lambda_k = mu Lambda_{k-1} failed",
                                "k = " + std::to_string(k));
    }
  }
  return fam;
}

}  // namespace mapwalk
