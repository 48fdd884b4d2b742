#pragma once

// Limit structure of the convolution powers mu^n on a finite semigroup:
// the limit cycle {eta, mu eta, ..., mu^(p-1) eta}, the Cesaro limit nu,
// and the factors eta^L, eta^R, H, gamma, p of
//   mu^k eta = eta^L gamma^k omega_H eta^R,   nu = eta^L omega_G eta^R.
//
// Nothing here iterates convolutions to detect a limit. eta^L and eta^R are
// stationary laws of finite chains on L and R, solved exactly; H, gamma and p
// come from the cyclic classes of the chain z -> f z on Ke = LG. The float
// oracle at the bottom iterates mu^n independently as a cross-check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mapwalk/errors.hpp"
#include "mapwalk/linalg.hpp"
#include "mapwalk/measure.hpp"
#include "mapwalk/rees.hpp"
#include "mapwalk/semigroup.hpp"

namespace mapwalk {

struct LeftStationary {
  ElementMeasure beta;   // unique mu-invariant law on Ke, equals eta^L omega_G
  ElementMeasure eta_L;  // marginal on L (semigroup indices)
};

struct RightStationary {
  ElementMeasure beta;   // unique law on eK fixed by right convolution, omega_G eta^R
  ElementMeasure eta_R;  // marginal on R
};

namespace detail {

inline void require_kernel_projection(const ReesData& rd) {
  if (rd.e == ReesData::npos) throw InputError("Rees data not initialised");
}

}  // namespace detail

// beta = mu beta on Ke. The L-part of f z for z = l g is (f l)^L, so the L-marginal
// is itself a Markov chain on L whose stationary law is eta^L; beta is then
// eta^L x omega_G, checked to be mu-invariant.
inline LeftStationary left_stationary(const Semigroup& s, const ElementMeasure& mu, const ReesData& rd) {
  detail::require_kernel_projection(rd);
  const std::size_t nl = rd.L.size();
  RationalMatrix p(nl, std::vector<Rational>(nl, Rational(0)));
  for (std::size_t l = 0; l < nl; ++l) {
    for (const auto& [f, w] : mu) {
      const auto t = rd.project(s, s.multiply(f, rd.L[l]));
      p[l][t.l] += w;
    }
  }
  const auto pi = stationary_distribution(p);

  LeftStationary out;
  const Rational per_g(1, static_cast<long>(rd.G.size()));
  for (std::size_t l = 0; l < nl; ++l) {
    if (pi[l] <= 0) {
      throw StructuralError("eta^L puts no mass on " + s[rd.L[l]].to_string());
    }
    out.eta_L.add(rd.L[l], pi[l]);
    for (std::size_t g = 0; g < rd.G.size(); ++g) {
      out.beta.add(s.multiply(rd.L[l], rd.G[g]), pi[l] * per_g);
    }
  }
  if (convolve(s, mu, out.beta) != out.beta) {
    throw StructuralError("eta^L omega_G is not fixed by left convolution with mu");
  }
  return out;
}

// Mirror of left_stationary: the chain r -> (r f)^R on R, and beta' = beta' mu on eK.
inline RightStationary right_stationary(const Semigroup& s, const ElementMeasure& mu, const ReesData& rd) {
  detail::require_kernel_projection(rd);
  const std::size_t nr = rd.R.size();
  RationalMatrix p(nr, std::vector<Rational>(nr, Rational(0)));
  for (std::size_t r = 0; r < nr; ++r) {
    for (const auto& [f, w] : mu) {
      const auto t = rd.project(s, s.multiply(rd.R[r], f));
      p[r][t.r] += w;
    }
  }
  const auto pi = stationary_distribution(p);

  RightStationary out;
  const Rational per_g(1, static_cast<long>(rd.G.size()));
  for (std::size_t r = 0; r < nr; ++r) {
    if (pi[r] <= 0) {
      throw StructuralError("eta^R puts no mass on " + s[rd.R[r]].to_string());
    }
    out.eta_R.add(rd.R[r], pi[r]);
    for (std::size_t g = 0; g < rd.G.size(); ++g) {
      out.beta.add(s.multiply(rd.G[g], rd.R[r]), pi[r] * per_g);
    }
  }
  if (convolve(s, out.beta, mu) != out.beta) {
    throw StructuralError("omega_G eta^R is not fixed by right convolution with mu");
  }
  return out;
}

struct PeriodData {
  std::size_t p = 0;
  std::vector<std::size_t> H;           // local G indices
  std::size_t gamma = ReesData::npos;   // local G index
  // Cyclic class (0..p-1) of each state of the chain on Ke, keyed by the
  // state's (l, g) local pair as l * |G| + g.
  std::vector<std::size_t> state_class;
};

// Period of the irreducible chain z -> f z on Ke and the G-parts of its
// cyclic classes. The class of e has G-part set H, the next one gamma H.
inline PeriodData period_and_H(const Semigroup& s, const ElementMeasure& mu, const ReesData& rd) {
  detail::require_kernel_projection(rd);
  const std::size_t ng = rd.G.size();
  const std::size_t states = rd.L.size() * ng;
  auto state_of = [&](std::size_t z) {
    const auto t = rd.project(s, z);
    if (rd.R[t.r] != rd.e) throw StructuralError(s[z].to_string() + " left Ke");
    return t.l * ng + t.g;
  };
  std::vector<std::size_t> element(states);
  for (std::size_t l = 0; l < rd.L.size(); ++l) {
    for (std::size_t g = 0; g < ng; ++g) element[l * ng + g] = s.multiply(rd.L[l], rd.G[g]);
  }
  std::vector<std::vector<std::size_t>> succ(states);
  for (std::size_t st = 0; st < states; ++st) {
    for (const auto& [f, w] : mu) succ[st].push_back(state_of(s.multiply(f, element[st])));
  }

  constexpr long long kUnseen = -1;
  std::vector<long long> depth(states, kUnseen);
  const std::size_t start = state_of(rd.e);
  std::deque<std::size_t> queue{start};
  depth[start] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : succ[u]) {
      if (depth[v] == kUnseen) {
        depth[v] = depth[u] + 1;
        queue.push_back(v);
      }
    }
  }
  if (std::count(depth.begin(), depth.end(), kUnseen) != 0) {
    throw StructuralError("the chain on Ke is not irreducible from e");
  }
  long long period = 0;
  for (std::size_t u = 0; u < states; ++u) {
    for (std::size_t v : succ[u]) period = std::gcd(period, std::llabs(depth[u] + 1 - depth[v]));
  }
  if (period == 0) throw StructuralError("could not determine the period on Ke");

  PeriodData out;
  out.p = static_cast<std::size_t>(period);
  out.state_class.resize(states);
  std::vector<bool> in_h(ng, false), in_next(ng, false);
  std::vector<std::size_t> class_count(out.p, 0);
  for (std::size_t st = 0; st < states; ++st) {
    const std::size_t c = static_cast<std::size_t>(depth[st] % period);
    out.state_class[st] = c;
    ++class_count[c];
    if (c == 0) in_h[st % ng] = true;
    if (c == 1 % out.p) in_next[st % ng] = true;
  }
  if (std::adjacent_find(class_count.begin(), class_count.end(), std::not_equal_to<>()) !=
      class_count.end()) {
    throw StructuralError("cyclic classes on Ke have unequal sizes");
  }
  for (std::size_t g = 0; g < ng; ++g) {
    if (in_h[g]) out.H.push_back(g);
  }
  // Smallest element of the successor coset with gamma^p = e.
  for (std::size_t g = 0; g < ng && out.gamma == ReesData::npos; ++g) {
    if (in_next[g] && rd.g_pow(g, static_cast<long long>(out.p)) == rd.unit) out.gamma = g;
  }
  if (out.gamma == ReesData::npos) {
    throw StructuralError("no element of order dividing p in the successor coset");
  }
  return out;
}

struct CyclicLimit {
  std::size_t p = 0;
  ElementMeasure eta;
  std::vector<ElementMeasure> cycle;  // cycle[k] = mu^k eta
  ElementMeasure nu;
  ElementMeasure eta_L;
  ElementMeasure eta_R;
};

struct AssembleOptions {
  // Run the full set of convolution identities before returning.
  bool verify = true;
};

// cycle[k] = eta^L gamma^k omega_H eta^R, nu = (1/p) sum_k cycle[k].
inline CyclicLimit assemble_limits(const Semigroup& s, const ElementMeasure& mu, const Kernel& k,
                                   const ReesData& rd, const ElementMeasure& eta_L,
                                   const ElementMeasure& eta_R, AssembleOptions opt = {}) {
  if (!rd.has_cycle()) throw InputError("H, gamma and p must be attached first");
  std::vector<std::size_t> h_elems;
  for (std::size_t h : rd.H) h_elems.push_back(rd.G[h]);
  const ElementMeasure omega_h = uniform(h_elems);

  CyclicLimit out;
  out.p = rd.p;
  out.eta_L = eta_L;
  out.eta_R = eta_R;
  for (std::size_t j = 0; j < rd.p; ++j) {
    out.cycle.push_back(measure_products(s, {eta_L, rd.G[rd.C[j]], omega_h, eta_R}));
  }
  out.eta = out.cycle.front();
  const Rational inv_p(1, static_cast<long>(rd.p));
  for (const auto& c : out.cycle) out.nu = out.nu + c.scaled(inv_p);
  if (!opt.verify) return out;

  auto fail = [](const std::string& what) { throw StructuralError("limit identity failed: " + what); };
  if (!out.eta.is_probability() || !out.nu.is_probability()) fail("total mass");
  if (convolve(s, out.eta, out.eta) != out.eta) fail("eta^2 = eta");
  for (std::size_t j = 0; j < rd.p; ++j) {
    if (convolve(s, mu, out.cycle[j]) != out.cycle[(j + 1) % rd.p]) fail("mu cycle[k] = cycle[k+1]");
  }
  if (convolve(s, out.nu, out.nu) != out.nu) fail("nu^2 = nu");
  if (convolve(s, mu, out.nu) != out.nu) fail("mu nu = nu");
  if (convolve(s, out.nu, mu) != out.nu) fail("nu mu = nu");
  std::vector<std::size_t> g_elems(rd.G.begin(), rd.G.end());
  if (measure_products(s, {eta_L, uniform(g_elems), eta_R}) != out.nu) {
    fail("nu = eta^L omega_G eta^R");
  }
  {
    auto supp = out.nu.support();
    std::sort(supp.begin(), supp.end());
    auto ker = k.elements;
    std::sort(ker.begin(), ker.end());
    if (supp != ker) fail("supp(nu) = kernel");
  }
  for (std::size_t j = 0; j < rd.p; ++j) {
    for (const auto& [z, w] : out.cycle[j]) {
      const auto t = rd.project(s, z);
      if (rd.coset_of(t.g) != j) fail("supp(cycle[k]) inside L gamma^k H R");
    }
    if (out.cycle[j].support_size() != rd.L.size() * rd.H.size() * rd.R.size()) {
      fail("supp(cycle[k]) = L gamma^k H R");
    }
  }
  return out;
}

// Full exact pipeline after the Rees decomposition: stationary factors,
// cyclic structure (attached to `rd`), and the assembled limit cycle.
inline CyclicLimit analyze_limits(const Semigroup& s, const ElementMeasure& mu, const Kernel& k,
                                  ReesData& rd, AssembleOptions opt = {}) {
  const auto left = left_stationary(s, mu, rd);
  const auto right = right_stationary(s, mu, rd);
  const auto period = period_and_H(s, mu, rd);
  rd.attach_cycle(period.H, period.gamma, period.p);
  return assemble_limits(s, mu, k, rd, left.eta_L, right.eta_R, opt);
}

struct FloatLimitEstimate {
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t p_est = 0;
  std::vector<double> eta_est;  // indexed by semigroup position
  std::vector<double> nu_est;
  std::string note;
};

// Iterates mu^n in double precision until mu^n and mu^(n-q) agree within `tol`
// while every smaller lag still differs by more than `separation`. Distinct
// members of the limit cycle have disjoint supports, so a genuine period keeps
// the smaller lags far apart; slow oscillating transients do not. Reports q,
// the power mu^n' with n' a multiple of q in the final window (the idempotent
// of the cycle), and the window average.
inline FloatLimitEstimate float_limit_oracle(const Semigroup& s, const ElementMeasure& mu,
                                             std::size_t max_lag, double tol = 1e-12,
                                             std::size_t max_iter = 100'000, double separation = 1e-6) {
  FloatLimitEstimate out;
  if (tol <= 0) throw InputError("oracle tolerance must be positive");
  max_lag = std::max<std::size_t>(max_lag, 1);
  const std::size_t n = s.size();
  std::vector<std::pair<std::size_t, double>> gens;  // (generator position, weight)
  for (std::size_t g = 0; g < s.generator_count(); ++g) {
    const double w = to_double(mu.weight(s.generators()[g]));
    // Duplicated generators share one weight; count each element once.
    bool dup = false;
    for (std::size_t h = 0; h < g; ++h) dup |= s.generators()[h] == s.generators()[g];
    if (w > 0 && !dup) gens.emplace_back(g, w);
  }

  std::deque<std::vector<double>> history;  // history.back() = mu^iter
  std::vector<double> cur(n, 0.0);
  for (const auto& [z, w] : mu) cur[z] = to_double(w);
  history.push_back(cur);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    const auto& latest = history.back();
    if (history.size() > max_lag) {
      for (std::size_t q = 1; q <= max_lag; ++q) {
        const auto& past = history[history.size() - 1 - q];
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(latest[i] - past[i]));
        if (diff >= tol) {
          if (diff > separation) continue;
          break;  // lag q is still settling; a larger lag would be premature
        }
        out.converged = true;
        out.iterations = iter;
        out.p_est = q;
        out.nu_est.assign(n, 0.0);
        for (std::size_t j = 0; j < q; ++j) {
          const std::size_t power = iter - j;
          const auto& v = history[history.size() - 1 - j];
          for (std::size_t i = 0; i < n; ++i) out.nu_est[i] += v[i] / static_cast<double>(q);
          if (power % q == 0) out.eta_est = v;
        }
        return out;
      }
    }
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (latest[i] == 0.0) continue;
      for (const auto& [g, w] : gens) next[s.left(g, i)] += w * latest[i];
    }
    history.push_back(std::move(next));
    if (history.size() > max_lag + 1) history.pop_front();
  }
  out.iterations = max_iter;
  out.note = "no convergence within " + std::to_string(max_iter) + " iterations";
  return out;
}

// (1/n) sum_{k=1..n} mu^k in double precision.
inline std::vector<double> cesaro_average(const Semigroup& s, const ElementMeasure& mu, std::size_t n) {
  const std::size_t size = s.size();
  std::vector<std::pair<std::size_t, double>> gens;
  for (std::size_t g = 0; g < s.generator_count(); ++g) {
    bool dup = false;
    for (std::size_t h = 0; h < g; ++h) dup |= s.generators()[h] == s.generators()[g];
    if (!dup) gens.emplace_back(g, to_double(mu.weight(s.generators()[g])));
  }
  std::vector<double> power(size, 0.0), sum(size, 0.0);
  for (const auto& [z, w] : mu) power[z] = to_double(w);
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < size; ++i) sum[i] += power[i];
    if (k == n) break;
    std::vector<double> next(size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      if (power[i] == 0.0) continue;
      for (const auto& [g, w] : gens) next[s.left(g, i)] += w * power[i];
    }
    power = std::move(next);
  }
  for (double& v : sum) v /= static_cast<double>(n);
  return sum;
}

}  // namespace mapwalk
