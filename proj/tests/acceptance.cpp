// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "mapwalk/mapwalk.hpp"
#include "oracles.hpp"

using namespace mapwalk;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleTol = 1e-9;
constexpr double kCesaroTol = 1e-9;
constexpr std::size_t kCesaroN = 10'000;
constexpr double kAlpha = 0.001;
constexpr std::size_t kReplications = 10'000;
constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kFuzzCount = 220;
constexpr double kBudget1 = 1.0, kBudget2 = 10.0, kBudget3 = 30.0, kBudget5 = 60.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* title, const std::function<void(Outcome&)>& body, double budget = 0.0) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget > 0.0) o.require(secs < budget, "runtime over budget");
  char time_buf[64];
  std::snprintf(time_buf, sizeof time_buf, "%.2fs", secs);
  std::printf("[%s] criterion %d: %s (%s%s) %s\n", o.pass ? "PASS" : "FAIL", id, title, time_buf,
              budget > 0.0 ? (" of " + std::to_string(static_cast<int>(budget)) + "s").c_str() : "",
              o.detail.str().c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

Transformation t1(std::vector<long long> v) { return Transformation::from_one_based(v); }

double sup_distance(const std::vector<double>& x, const ElementMeasure& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - to_double(m.weight(i))));
  return d;
}

ElementMeasure two_point(const Semigroup& s, const Transformation& a, Rational qa, const Transformation& b,
                         Rational qb) {
  ElementMeasure m;
  m.add(s.index_of(a), qa);
  m.add(s.index_of(b), qb);
  return m;
}

void golden(Outcome& o) {
  const auto a = analyze(example_law());
  const auto& s = a.S;
  const auto& rd = a.rees;
  const auto f = t1({2, 3, 4, 1, 5}), g = t1({2, 5, 5, 2, 4});
  const auto e = t1({4, 2, 2, 4, 5}), h = t1({2, 4, 4, 2, 5});
  const auto fe = t1({1, 3, 3, 1, 5}), ef = t1({2, 2, 4, 4, 5});
  o.require(s[rd.e] == e, "e");
  o.require(compose(f, e) == fe && compose(e, f) == ef, "fe, ef");
  std::set<Transformation> L, R;
  for (auto z : rd.L) L.insert(s[z]);
  for (auto z : rd.R) R.insert(s[z]);
  o.require(L == std::set<Transformation>{e, fe}, "L");
  o.require(R == std::set<Transformation>{e, ef}, "R");
  o.require(rd.G.size() == 6, "|G|");
  o.require(rd.g_local(s.index_of(g)) && rd.g_local(s.index_of(h)), "g, h in G");
  o.require(compose(g, compose(g, g)) == e && compose(h, h) == e, "g^3 = h^2 = e");
  o.require(a.limits.eta_L == two_point(s, e, Rational(2, 3), fe, Rational(1, 3)), "eta^L");
  o.require(a.limits.eta_R == two_point(s, e, Rational(2, 3), ef, Rational(1, 3)), "eta^R");
  o.require(rd.H.size() == rd.G.size(), "H = G");
  o.require(a.limits.p == 1 && rd.p == 1, "p");
  const auto& cd = a.cliques;
  o.require(cd.m_mu == 3, "m_mu");
  o.require(cd.W_mu.size() == 12, "|W_mu|");
  o.require(cd.W.size() == 1 && cd.W[0] == Tuple::from_one_based({2, 4, 5}), "W");
  const auto t = project_tuple(cd, Tuple::from_one_based({3, 5, 1}));
  o.require(s[rd.L[t.l]] == fe && s[rd.G[t.g]] == compose(g, h) && cd.W[t.w] == cd.W[0], "projection of (3,5,1)");
  const auto lam = invariant_law(s, a.mu, rd, cd, a.limits, TupleMeasure::dirac(cd.W[0]));
  const auto marginal = coordinate_marginal(lam, 0, s.degree());
  const std::vector<Rational> expect{Rational(1, 9), Rational(2, 9), Rational(1, 9), Rational(2, 9), Rational(3, 9)};
  o.require(marginal == expect, "lambda");
  o.detail << "e = " << s[rd.e].to_string() << ", lambda = (";
  for (std::size_t i = 0; i < marginal.size(); ++i) o.detail << (i ? ", " : "") << to_string(marginal[i]);
  o.detail << ")";
}

void structural_one(Outcome& o, const Analysis& a, std::uint64_t seed) {
  const auto& s = a.S;
  const auto& k = a.K;
  const auto& rd = a.rees;
  const auto& lim = a.limits;
  const auto& cd = a.cliques;
  for (std::size_t z : k.elements) {
    for (std::size_t gi : s.generators()) {
      o.require(k.contains(s.multiply(gi, z)) && k.contains(s.multiply(z, gi)), "kernel is an ideal");
    }
    o.require(rd.compose_triple(s, rd.project(s, z)) == z, "psi(psi^-1(z)) = z");
  }
  for (std::size_t l = 0; l < rd.L.size(); ++l) {
    for (std::size_t g = 0; g < rd.G.size(); ++g) {
      for (std::size_t r = 0; r < rd.R.size(); ++r) {
        const ReesTriple t{l, g, r};
        const auto z = rd.compose_triple(s, t);
        o.require(rd.project(s, z) == t, "psi^-1(psi(l,g,r)) = (l,g,r)");
        const auto rl = rd.g_local(s.multiply(rd.R[r], rd.L[l]));
        o.require(rl.has_value(), "R L inside G");
        if (rl) o.require(s[z].is_idempotent() == (*rl == rd.g_inv(g)), "idempotent iff r l = g^-1");
      }
    }
  }
  // psi^-1 formula: z e (eze)^-1 in L and (eze)^-1 e z in R.
  for (std::size_t z : k.elements) {
    const auto t = rd.project(s, z);
    const auto eze = s.multiply(s.multiply(rd.e, z), rd.e);
    o.require(rd.G[t.g] == eze, "psi^-1 group factor is eze");
  }
  for (std::size_t x : rd.H) {
    for (std::size_t y = 0; y < rd.G.size(); ++y) {
      o.require(rd.in_H(rd.g_mul(rd.g_mul(rd.g_inv(y), x), y)), "H normal");
    }
  }
  o.require(rd.g_pow(rd.gamma, static_cast<long long>(rd.p)) == rd.unit, "gamma^p = e");
  std::vector<std::size_t> seen;
  for (const auto& c : coset_structure(rd)) seen.insert(seen.end(), c.begin(), c.end());
  std::sort(seen.begin(), seen.end());
  o.require(seen.size() == rd.G.size() && std::unique(seen.begin(), seen.end()) == seen.end(), "cosets partition G");

  o.require(convolve(s, lim.eta, lim.eta) == lim.eta, "eta^2 = eta");
  ElementMeasure pw = lim.eta;
  for (std::size_t i = 0; i < lim.p; ++i) pw = convolve(s, a.mu, pw);
  o.require(pw == lim.eta, "mu^p eta = eta");
  o.require(convolve(s, lim.nu, lim.nu) == lim.nu, "nu^2 = nu");
  o.require(convolve(s, a.mu, lim.nu) == lim.nu && convolve(s, lim.nu, a.mu) == lim.nu, "mu nu = nu mu = nu");
  const auto sup = lim.nu.support();
  o.require(sup.size() == k.size() && std::all_of(sup.begin(), sup.end(), [&](auto z) { return k.contains(z); }),
            "supp nu = kernel");
  bool in_lhr = true;
  for (const auto& [z, w] : lim.eta) in_lhr = in_lhr && rd.in_H(rd.project(s, z).g);
  o.require(in_lhr && lim.eta.support_size() == rd.L.size() * rd.H.size() * rd.R.size(), "supp eta = L H R");

  o.require(cd.W_mu.size() == rd.L.size() * rd.G.size() * cd.W.size(), "|W_mu| = |L||G||W|");
  for (const auto& x : cd.W_mu) {
    const auto t = project_tuple(cd, x);
    o.require(apply_tuple(compose(s[rd.L[t.l]], s[rd.G[t.g]]), cd.W[t.w]) == x, "W_mu = L G W");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cd.W.size() - 1);
  TupleMeasure lw;
  lw.add(cd.W[pick(rng)], Rational(1, 3));
  lw.add(cd.W[pick(rng)], Rational(2, 3));
  const auto lam = invariant_law(s, a.mu, rd, cd, lim, lw);
  o.require(act_on_tuples(a.law, lam) == lam, "invariant law fixed by mu");
}

void structural(Outcome& o) {
  const auto corpus = oracle::fuzz_corpus(kFuzzCount);
  structural_one(o, analyze(example_law()), 1);
  for (std::size_t c = 0; c < corpus.size(); ++c) structural_one(o, analyze(corpus[c]), c);
  o.detail << "example + " << corpus.size() << " fuzzed laws";
}

void oracle_equivalence(Outcome& o) {
  std::vector<MappingLaw> laws{example_law(), oracle::cyclic3_law()};
  const auto corpus = oracle::fuzz_corpus(kFuzzCount);
  laws.insert(laws.end(), corpus.begin(), corpus.end());
  double worst = 0.0;
  for (const auto& law : laws) {
    const auto a = analyze(law);
    const auto est = float_limit_oracle(a.S, a.mu, 12, 1e-13);
    o.require(est.converged, "oracle converged");
    o.require(est.p_est == a.limits.p, "p_est = p");
    const double d = std::max(sup_distance(est.eta_est, a.limits.eta), sup_distance(est.nu_est, a.limits.nu));
    worst = std::max(worst, d);
  }
  o.require(worst < kOracleTol, "eta, nu within tolerance");
  o.detail << laws.size() << " laws, worst sup distance " << worst;
}

void cesaro(Outcome& o) {
  const auto a = analyze(example_law());
  const double err = sup_distance(cesaro_average(a.S, a.mu, kCesaroN), a.limits.nu);
  o.require(err < kCesaroTol, "sup distance at n = 10^4");
  o.detail << "sup distance " << err << ", n * distance " << err * static_cast<double>(kCesaroN)
           << " (the running average converges at rate 1/n)";
}

VerificationReport& example_battery() {
  static VerificationReport r = [] {
    static const Analysis kept = analyze(example_law());
    const SimulationModel m(kept);
    SimulationConfig cfg;
    cfg.replications = kReplications;
    cfg.k_min = -1000;
    cfg.k_max = 0;
    cfg.k = 0;
    cfg.seed = kSeed;
    cfg.alpha = kAlpha;
    auto out = verify_third_noise(m, TupleMeasure::dirac(kept.cliques.W[0]), cfg);
    out.append(verify_mono_projection(m, cfg));
    return out;
  }();
  return r;
}

void simulation_exact(Outcome& o) {
  std::size_t n = 0;
  for (const auto& c : example_battery().checks) {
    if (c.kind != "exact") continue;
    ++n;
    o.require(c.pass, c.name + " (" + c.note + ")");
  }
  o.detail << n << " exact checks over " << kReplications << " paths of 1000 steps";
}

void simulation_statistical(Outcome& o) {
  std::size_t n = 0;
  double min_p = 1.0;
  for (const auto& c : example_battery().checks) {
    if (c.kind != "statistical") continue;
    ++n;
    min_p = std::min(min_p, c.p_value);
    o.require(c.pass, c.name);
  }
  o.detail << n << " chi-square checks, smallest p-value " << min_p;
}

void nonstationary(Outcome& o) {
  const auto a = analyze(oracle::hexagon_law());
  const auto& cd = a.cliques;
  o.require(a.rees.p == 3, "constructed instance has p = 3");
  TupleMeasure l0, l2;
  l0.add(cd.W[0], Rational(1, 2));
  l0.add(cd.W[5], Rational(1, 2));
  l2.add(cd.W[2], Rational(1, 3));
  l2.add(cd.W[7], Rational(2, 3));
  const InvariantFamily fam{{Rational(1, 4), Rational(0), Rational(3, 4)}, {l0, {}, l2}};
  const SimulationModel m(a);
  SimulationConfig cfg;
  cfg.replications = kReplications;
  cfg.seed = kSeed;
  cfg.alpha = kAlpha;
  const auto r = verify_nonstationary(m, fam, cfg);
  for (const auto& c : r.checks) {
    o.require(c.pass, c.name);
    if (c.name == "(Y_C, Z_W) ~ c_i Lambda^i_W") o.detail << "joint p-value " << c.p_value << "; ";
  }
  // Round trips on constructed families.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, cd.W.size() - 1);
  std::size_t trips = 0;
  for (int t = 0; t < 50; ++t) {
    InvariantFamily f;
    std::vector<long long> raw(3);
    for (auto& x : raw) x = std::uniform_int_distribution<long long>(0, 5)(rng);
    raw[t % 3] += 1;
    const long long total = raw[0] + raw[1] + raw[2];
    for (std::size_t i = 0; i < 3; ++i) {
      f.c.emplace_back(raw[i], total);
      TupleMeasure li;
      if (raw[i] != 0) {
        li.add(cd.W[pick(rng)], Rational(2, 5));
        li.add(cd.W[pick(rng)], Rational(3, 5));
      }
      f.lambda_W.push_back(li);
    }
    const auto lam0 = family_law(a.S, a.rees, cd, a.limits, f, 0);
    const auto back = classify_family(a.S, a.mu, a.rees, cd, a.limits, lam0);
    bool same = back.c == f.c;
    for (std::size_t i = 0; i < 3; ++i) same = same && back.lambda_W[i] == f.lambda_W[i];
    o.require(same, "classify round trip");
    trips += same;
  }
  o.detail << trips << "/50 classify round trips";
}

}  // namespace

int main() {
  report(1, "golden two-map example, exact", golden, kBudget1);
  report(2, "structural property suite, exact", structural, kBudget2);
  report(3, "exact limits match the float oracle", oracle_equivalence, kBudget3);
  report(4, "Cesaro average within 1e-9 of nu at n = 10^4", cesaro);
  report(5, "simulation exact checks at R = 10^4", simulation_exact, kBudget5);
  report(6, "statistical checks at alpha = 0.001, seed 42", simulation_statistical);
  report(7, "non-stationary reduction on a p = 3 instance", nonstationary);
  std::printf("%d criteria failed\n", failures);
  return failures;
}
