#pragma once

// Seeded simulation of m_mu-particle mu-evolutions X_k = N_k X_{k-1} on
// W_mu, extraction of the factor processes
//   X^L_k, X^G_k = gamma^k Y_C U^H_k, X^W_k = Z_W, M^G_k = X^G_k (X^G_{k-1})^-1,
// and the exact and statistical checks run on them.
//
// An infinite past is realised by starting at k_min from the exact law of
// the process at that time (stationary or one member of an invariant family).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapwalk/analysis.hpp"
#include "mapwalk/cliques.hpp"
#include "mapwalk/errors.hpp"
#include "mapwalk/stats.hpp"

namespace mapwalk {

// Per-replication generator: the base seed xor'ed with the replication index.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t replication = 0) {
  const std::uint64_t s = seed ^ replication;
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return std::mt19937_64(seq);
}

// Precomputed tables for fast stepping on W_mu. Holds a reference to the
// analysis, which must outlive it.
class SimulationModel {
 public:
  explicit SimulationModel(const Analysis& a) : a_(&a) {
    const auto& s = a.S;
    const auto& rd = a.rees;
    const auto& cd = a.cliques;
    if (!rd.has_cycle()) throw InputError("analysis lacks the cyclic structure");

    maps_ = a.law.support();
    for (const auto& w : a.law.weights()) weights_.push_back(to_double(w));
    for (const auto& f : maps_) elems_.push_back(s.index_of(f));

    tuples_ = cd.W_mu;
    for (std::size_t i = 0; i < tuples_.size(); ++i) tuple_index_.emplace(tuples_[i], i);
    next_.resize(maps_.size() * tuples_.size());
    for (std::size_t f = 0; f < maps_.size(); ++f) {
      for (std::size_t x = 0; x < tuples_.size(); ++x) {
        auto it = tuple_index_.find(apply_tuple(maps_[f], tuples_[x]));
        if (it == tuple_index_.end()) throw StructuralError("W_mu is not closed under the law");
        next_[f * tuples_.size() + x] = it->second;
      }
    }
    for (const auto& x : tuples_) factors_.push_back(project_tuple(cd, x));

    // (N L[l])^G through the semigroup's Rees projection.
    increment_.resize(maps_.size() * rd.L.size());
    for (std::size_t f = 0; f < maps_.size(); ++f) {
      for (std::size_t l = 0; l < rd.L.size(); ++l) {
        increment_[f * rd.L.size() + l] = rd.project(s, s.multiply(elems_[f], rd.L[l])).g;
      }
    }
    for (std::size_t l = 0; l < rd.L.size(); ++l) eta_l_.push_back(to_double(a.limits.eta_L.weight(rd.L[l])));
  }

  const Analysis& analysis() const noexcept { return *a_; }
  const ReesData& rees() const noexcept { return a_->rees; }
  const CliqueData& cliques() const noexcept { return a_->cliques; }
  const Semigroup& semigroup() const noexcept { return a_->S; }

  std::size_t law_size() const noexcept { return maps_.size(); }
  const Transformation& map(std::size_t f) const { return maps_[f]; }
  const std::vector<double>& law_weights() const noexcept { return weights_; }
  const std::vector<double>& eta_L_weights() const noexcept { return eta_l_; }

  std::size_t tuple_count() const noexcept { return tuples_.size(); }
  const Tuple& tuple(std::size_t x) const { return tuples_[x]; }
  std::size_t tuple_index(const Tuple& x) const {
    auto it = tuple_index_.find(x);
    if (it == tuple_index_.end()) throw StructuralError(x.to_string() + " left W_mu");
    return it->second;
  }
  std::size_t step(std::size_t f, std::size_t x) const { return next_[f * tuples_.size() + x]; }
  const TupleFactors& factors(std::size_t x) const { return factors_[x]; }
  std::size_t increment(std::size_t f, std::size_t l) const { return increment_[f * rees().L.size() + l]; }

  // L[l] G[g] applied to W[w], composed directly from the transformations.
  Tuple recompose(std::size_t l, std::size_t g, std::size_t w) const {
    const auto& s = semigroup();
    const auto& rd = rees();
    return apply_tuple(compose(s[rd.L[l]], s[rd.G[g]]), cliques().W[w]);
  }

 private:
  const Analysis* a_;
  std::vector<Transformation> maps_;
  std::vector<double> weights_;
  std::vector<std::size_t> elems_;
  std::vector<Tuple> tuples_;
  std::unordered_map<Tuple, std::size_t, TupleHash> tuple_index_;
  std::vector<std::size_t> next_;
  std::vector<TupleFactors> factors_;
  std::vector<std::size_t> increment_;
  std::vector<double> eta_l_;
};

struct EvolutionPath {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  long long k_min = 0;
  long long k_max = 0;
  std::uint64_t seed = 0;
  // Entry i describes time k_min + i. N[0] and MG[0] are npos.
  std::vector<std::size_t> N;   // position in the law's support
  std::vector<Tuple> X;
  std::vector<std::size_t> XL;  // local L
  std::vector<std::size_t> XG;  // local G
  std::vector<std::size_t> XC;  // j with X^C = gamma^j
  std::vector<std::size_t> XH;  // local G index of U^H_k
  std::vector<std::size_t> XW;  // index into W
  std::vector<std::size_t> MG;  // local G
  std::size_t YC = 0;           // j with Y_C = gamma^j
  std::size_t ZW = 0;

  std::size_t length() const noexcept { return X.size(); }
  std::size_t at(long long k) const {
    if (k < k_min || k > k_max) throw InputError("time " + std::to_string(k) + " outside the path");
    return static_cast<std::size_t>(k - k_min);
  }
};

namespace detail {

template <class Rng>
std::size_t draw(std::span<const double> weights, Rng& rng) {
  std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
  return d(rng);
}

inline std::size_t mod(long long k, std::size_t p) {
  const long long pp = static_cast<long long>(p);
  return static_cast<std::size_t>(((k % pp) + pp) % pp);
}

// Iterates from X_{k_min} and fills every derived factor.
template <class Rng>
EvolutionPath run_path(const SimulationModel& m, std::size_t x0, long long k_min, long long k_max,
                       std::uint64_t seed, Rng& rng) {
  const auto& rd = m.rees();
  EvolutionPath path;
  path.k_min = k_min;
  path.k_max = k_max;
  path.seed = seed;
  const std::size_t len = static_cast<std::size_t>(k_max - k_min) + 1;
  path.N.assign(len, EvolutionPath::npos);
  path.MG.assign(len, EvolutionPath::npos);
  std::vector<std::size_t> xs(len);
  xs[0] = x0;
  std::discrete_distribution<std::size_t> law(m.law_weights().begin(), m.law_weights().end());
  for (std::size_t i = 1; i < len; ++i) {
    path.N[i] = law(rng);
    xs[i] = m.step(path.N[i], xs[i - 1]);
  }
  path.X.reserve(len);
  path.XL.resize(len);
  path.XG.resize(len);
  path.XC.resize(len);
  path.XH.resize(len);
  path.XW.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const auto& fac = m.factors(xs[i]);
    path.X.push_back(m.tuple(xs[i]));
    path.XL[i] = fac.l;
    path.XG[i] = fac.g;
    path.XC[i] = rd.coset_of(fac.g);
    path.XH[i] = rd.h_part(fac.g);
    path.XW[i] = fac.w;
    if (i > 0) path.MG[i] = rd.g_mul(fac.g, rd.g_inv(path.XG[i - 1]));
  }
  path.ZW = path.XW[0];
  path.YC = mod(static_cast<long long>(path.XC[0]) - k_min, rd.p);
  return path;
}

inline void check_range(long long k_min, long long k_max) {
  if (k_min >= k_max) throw InputError("k_min must be smaller than k_max");
  if (k_max - k_min > 100'000'000) throw InputError("path too long");
}

}  // namespace detail

// X_{k_min} = l g w with l ~ eta^L, g ~ omega_G, w ~ Lambda_W independent,
// then N_k iid mu.
inline EvolutionPath sample_stationary(const SimulationModel& m, const TupleMeasure& lambda_w,
                                       long long k_min, long long k_max, std::uint64_t seed) {
  detail::check_range(k_min, k_max);
  const auto& cd = m.cliques();
  std::vector<std::size_t> w_idx;
  std::vector<double> w_weight;
  for (const auto& [w, q] : lambda_w) {
    const auto idx = cd.w_index(w);
    if (!idx) throw InputError(w.to_string() + " is not in W");
    w_idx.push_back(*idx);
    w_weight.push_back(to_double(q));
  }
  if (!lambda_w.is_probability()) throw InputError("Lambda_W is not a probability");
  auto rng = make_rng(seed);
  const std::size_t l = detail::draw(m.eta_L_weights(), rng);
  const std::size_t g = std::uniform_int_distribution<std::size_t>(0, m.rees().G.size() - 1)(rng);
  const std::size_t w = w_idx[detail::draw(w_weight, rng)];
  const std::size_t x0 = m.tuple_index(m.recompose(l, g, w));
  return detail::run_path(m, x0, k_min, k_max, seed, rng);
}

// Draws i ~ c, w ~ Lambda^i_W, then X_{k_min} ~ eta^L gamma^(k_min+i) omega_H delta_w.
inline EvolutionPath sample_nonstationary(const SimulationModel& m, const InvariantFamily& fam,
                                          long long k_min, long long k_max, std::uint64_t seed) {
  detail::check_range(k_min, k_max);
  const auto& rd = m.rees();
  const auto& cd = m.cliques();
  if (fam.c.size() != rd.p || fam.lambda_W.size() != rd.p) {
    throw InputError("family must have exactly p = " + std::to_string(rd.p) + " components");
  }
  std::vector<double> c;
  Rational total = 0;
  for (const auto& ci : fam.c) {
    if (ci < 0) throw InputError("family coefficients must be nonnegative");
    total += ci;
    c.push_back(to_double(ci));
  }
  if (total != 1) throw InputError("family coefficients must sum to 1");
  auto rng = make_rng(seed);
  const std::size_t i = detail::draw(c, rng);
  std::vector<std::size_t> w_idx;
  std::vector<double> w_weight;
  for (const auto& [w, q] : fam.lambda_W[i]) {
    const auto idx = cd.w_index(w);
    if (!idx) throw InputError(w.to_string() + " is not in W");
    w_idx.push_back(*idx);
    w_weight.push_back(to_double(q));
  }
  if (!fam.lambda_W[i].is_probability()) throw InputError("Lambda^i_W is not a probability");
  const std::size_t l = detail::draw(m.eta_L_weights(), rng);
  const std::size_t h = rd.H[std::uniform_int_distribution<std::size_t>(0, rd.H.size() - 1)(rng)];
  const std::size_t g = rd.g_mul(rd.gamma_power(k_min + static_cast<long long>(i)), h);
  const std::size_t w = w_idx[detail::draw(w_weight, rng)];
  const std::size_t x0 = m.tuple_index(m.recompose(l, g, w));
  return detail::run_path(m, x0, k_min, k_max, seed, rng);
}

struct Check {
  std::string name;
  std::string kind;  // "exact" or "statistical"
  bool pass = true;
  double statistic = 0.0;
  double threshold = 0.0;  // significance level for statistical checks
  double p_value = 1.0;
  std::size_t df = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::string note;
};

struct VerificationReport {
  std::vector<Check> checks;
  // Observed counts of (Y_C, Z_W) as [j][w]; empty when not collected.
  std::vector<std::vector<std::size_t>> phase_table;

  bool exact_ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.kind != "exact" || c.pass; });
  }
  bool statistical_ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.kind != "statistical" || c.pass; });
  }
  bool all_pass() const { return exact_ok() && statistical_ok(); }
  void append(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
};

inline Check exact_check(std::string name, bool pass, std::size_t replications, std::uint64_t seed,
                         std::string note = {}) {
  Check c;
  c.name = std::move(name);
  c.kind = "exact";
  c.pass = pass;
  c.replications = replications;
  c.seed = seed;
  c.note = std::move(note);
  return c;
}

inline Check statistical_check(std::string name, const stats::ChiSquare& t, double alpha,
                               std::size_t replications, std::uint64_t seed) {
  Check c;
  c.name = std::move(name);
  c.kind = "statistical";
  c.statistic = t.statistic;
  c.df = t.df;
  c.p_value = t.p_value;
  c.threshold = alpha;
  c.replications = replications;
  c.seed = seed;
  if (t.degenerate && !t.impossible_cell) {
    c.pass = true;
    c.note = "degenerate: fewer than two categories, vacuous pass";
  } else {
    c.pass = !t.impossible_cell && t.p_value >= alpha;
    if (t.impossible_cell) c.note = "observation in a cell of zero probability";
  }
  return c;
}

// Per-path failures of the exact invariants; an empty list means every
// invariant held at every time.
struct PathCheckResult {
  std::size_t recursion = 0;       // X_k = N_k X_{k-1}
  std::size_t membership = 0;      // X_k = X^L_k X^G_k X^W_k in L G W
  std::size_t w_constant = 0;      // X^W_k = Z_W
  std::size_t phase = 0;           // X^C_k = gamma^k Y_C
  std::size_t increment = 0;       // M^G_k = (N_k X^L_{k-1})^G
  std::size_t increment_phase = 0; // (M^G_k)^C = gamma

  bool ok() const {
    return recursion + membership + w_constant + phase + increment + increment_phase == 0;
  }
};

inline PathCheckResult check_path(const SimulationModel& m, const EvolutionPath& path) {
  const auto& rd = m.rees();
  PathCheckResult r;
  for (std::size_t i = 0; i < path.length(); ++i) {
    const long long k = path.k_min + static_cast<long long>(i);
    if (i > 0) {
      if (apply_tuple(m.map(path.N[i]), path.X[i - 1]) != path.X[i]) ++r.recursion;
      if (m.increment(path.N[i], path.XL[i - 1]) != path.MG[i]) ++r.increment;
      if (rd.coset_of(path.MG[i]) != 1 % rd.p) ++r.increment_phase;
    }
    if (m.recompose(path.XL[i], path.XG[i], path.XW[i]) != path.X[i]) ++r.membership;
    if (path.XW[i] != path.ZW) ++r.w_constant;
    if (path.XC[i] != detail::mod(k + static_cast<long long>(path.YC), rd.p)) ++r.phase;
  }
  return r;
}

// X_j = X^L_j (M^G_{k,j})^-1 (gamma^k Y_C) U^H_k Z_W for every j <= k on the
// path, where M^G_{k,j} = M^G_k ... M^G_{j+1} is rebuilt from the stored
// increments. Returns the number of mismatching j.
inline std::size_t verify_factorization(const SimulationModel& m, const EvolutionPath& path, long long k) {
  const auto& rd = m.rees();
  const std::size_t ik = path.at(k);
  const std::size_t phase = rd.gamma_power(k + static_cast<long long>(path.YC));
  const std::size_t at_k = rd.g_mul(phase, path.XH[ik]);  // gamma^k Y_C U^H_k
  std::size_t mkj = rd.unit;
  std::size_t mismatches = 0;
  for (std::size_t j = ik + 1; j-- > 0;) {
    if (j < ik) mkj = rd.g_mul(mkj, path.MG[j + 1]);
    const std::size_t g = rd.g_mul(rd.g_inv(mkj), at_k);
    if (m.recompose(path.XL[j], g, path.ZW) != path.X[j]) ++mismatches;
  }
  return mismatches;
}

// Largest l < k - n with N_{l+n} ... N_{l+1} = e, where n = |word|.
inline std::optional<long long> estimate_Te(const SimulationModel& m, const EvolutionPath& path, long long k,
                                            std::size_t word_length) {
  if (word_length == 0) throw InputError("witness word for e is empty");
  const auto& s = m.semigroup();
  const Transformation& e = s[m.rees().e];
  const long long n = static_cast<long long>(word_length);
  path.at(k);
  for (long long l = k - n - 1; l >= path.k_min; --l) {
    Transformation prod = m.map(path.N[path.at(l + 1)]);
    for (long long t = l + 2; t <= l + n; ++t) prod = compose(m.map(path.N[path.at(t)]), prod);
    if (prod == e) return l;
  }
  return std::nullopt;
}

// A word f_1, ..., f_n over the law's support with f_n ... f_1 = e, as
// positions in the law's support.
inline std::vector<std::size_t> witness_word(const SimulationModel& m) {
  const auto& s = m.semigroup();
  std::vector<std::size_t> word;
  for (std::size_t g : s.word_for(m.rees().e)) {
    const auto& f = s.generator(g);
    for (std::size_t i = 0; i < m.law_size(); ++i) {
      if (m.map(i) == f) {
        word.push_back(i);
        break;
      }
    }
  }
  if (word.empty()) throw StructuralError("no witness word for e");
  return word;
}

struct SimulationConfig {
  std::size_t replications = 10'000;
  long long k_min = -1000;
  long long k_max = 0;
  long long k = 0;             // observation time for statistics
  std::size_t window = 3;      // width of the N-window
  std::uint64_t seed = 42;
  double alpha = 0.001;
  std::size_t factorization_samples = 1;  // times k per path for the full factorization check
};

inline void validate(const SimulationConfig& c) {
  if (c.replications < 1) throw InputError("replications must be at least 1");
  detail::check_range(c.k_min, c.k_max);
  if (c.k < c.k_min || c.k > c.k_max) throw InputError("observation time k outside [k_min, k_max]");
  if (c.window < 1) throw InputError("window must be at least 1");
  if (c.k - static_cast<long long>(c.window) < c.k_min) throw InputError("N-window reaches before k_min");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

// Observations collected at time k across replications.
struct Sample {
  std::vector<std::size_t> uh;       // index into H
  std::vector<std::size_t> yc;       // j
  std::vector<std::size_t> zw;       // index into W
  std::vector<std::size_t> window;   // mixed-radix code of N_{k-w+1..k}
  std::vector<std::size_t> x;        // index into W_mu
  std::vector<std::size_t> first;    // first coordinate of X_k
  PathCheckResult exact;
  std::size_t factorization_mismatches = 0;
  std::size_t paths = 0;
};

namespace detail {

inline void accumulate(PathCheckResult& acc, const PathCheckResult& r) {
  acc.recursion += r.recursion;
  acc.membership += r.membership;
  acc.w_constant += r.w_constant;
  acc.phase += r.phase;
  acc.increment += r.increment;
  acc.increment_phase += r.increment_phase;
}

template <class Sampler>
Sample collect(const SimulationModel& m, const SimulationConfig& cfg, Sampler&& sampler) {
  validate(cfg);
  const auto& rd = m.rees();
  std::vector<std::size_t> h_index(rd.G.size(), 0);
  for (std::size_t i = 0; i < rd.H.size(); ++i) h_index[rd.H[i]] = i;
  Sample out;
  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    const std::uint64_t seed = cfg.seed ^ rep;
    const EvolutionPath path = sampler(seed);
    accumulate(out.exact, check_path(m, path));
    auto rng = make_rng(seed, 0x9e3779b97f4a7c15ULL);
    for (std::size_t t = 0; t < cfg.factorization_samples; ++t) {
      const long long k = std::uniform_int_distribution<long long>(cfg.k_min, cfg.k_max)(rng);
      out.factorization_mismatches += verify_factorization(m, path, k);
    }
    const std::size_t i = path.at(cfg.k);
    out.uh.push_back(h_index[path.XH[i]]);
    out.yc.push_back(path.YC);
    out.zw.push_back(path.ZW);
    std::size_t code = 0;
    for (std::size_t d = 0; d < cfg.window; ++d) code = code * m.law_size() + path.N[i - d];
    out.window.push_back(code);
    out.x.push_back(m.tuple_index(path.X[i]));
    out.first.push_back(path.X[i][0]);
    ++out.paths;
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> cross(const std::vector<std::size_t>& a, std::size_t na,
                                                   const std::vector<std::size_t>& b, std::size_t nb) {
  std::vector<std::vector<std::size_t>> t(na, std::vector<std::size_t>(nb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++t[a[i]][b[i]];
  return t;
}

inline std::vector<std::size_t> counts(const std::vector<std::size_t>& v, std::size_t n) {
  std::vector<std::size_t> c(n, 0);
  for (std::size_t x : v) ++c[x];
  return c;
}

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

inline VerificationReport exact_section(const Sample& s, const SimulationConfig& cfg) {
  VerificationReport r;
  const auto& e = s.exact;
  const std::size_t n = s.paths;
  r.checks.push_back(exact_check("recursion X_k = N_k X_{k-1}", e.recursion == 0, n, cfg.seed,
                                 std::to_string(e.recursion) + " violations"));
  r.checks.push_back(exact_check("X_k in L G W", e.membership == 0, n, cfg.seed,
                                 std::to_string(e.membership) + " violations"));
  r.checks.push_back(exact_check("X^W_k constant", e.w_constant == 0, n, cfg.seed,
                                 std::to_string(e.w_constant) + " violations"));
  r.checks.push_back(exact_check("X^C_k = gamma^k Y_C", e.phase == 0, n, cfg.seed,
                                 std::to_string(e.phase) + " violations"));
  r.checks.push_back(exact_check("M^G_k = (N_k X^L_{k-1})^G", e.increment == 0, n, cfg.seed,
                                 std::to_string(e.increment) + " violations"));
  r.checks.push_back(exact_check("(M^G_k)^C = gamma", e.increment_phase == 0, n, cfg.seed,
                                 std::to_string(e.increment_phase) + " violations"));
  r.checks.push_back(exact_check("factorization X_j = X^L_j (M^G_{k,j})^-1 gamma^k Y_C U^H_k Z_W",
                                 s.factorization_mismatches == 0, n, cfg.seed,
                                 std::to_string(s.factorization_mismatches) + " mismatching (j, k) pairs"));
  return r;
}

}  // namespace detail

// Stationary battery: exact path invariants, U^H_k ~ omega_H, Y_C ~ omega_C,
// (Y_C, Z_W) ~ omega_C x Lambda_W, pairwise independence among U^H_k,
// (Y_C, Z_W) and the N-window, and X_k ~ Lambda.
inline VerificationReport verify_third_noise(const SimulationModel& m, const TupleMeasure& lambda_w,
                                             const SimulationConfig& cfg) {
  if (cfg.replications < 1000) throw InputError("the stationary battery needs at least 1000 replications");
  const auto& a = m.analysis();
  const auto& rd = m.rees();
  const auto& cd = m.cliques();
  const Sample s = detail::collect(m, cfg, [&](std::uint64_t seed) {
    return sample_stationary(m, lambda_w, cfg.k_min, cfg.k_max, seed);
  });
  VerificationReport r = detail::exact_section(s, cfg);
  r.phase_table = detail::cross(s.yc, rd.p, s.zw, cd.W.size());
  const std::size_t n = s.paths;

  const std::vector<double> flat_h(rd.H.size(), 1.0 / static_cast<double>(rd.H.size()));
  r.checks.push_back(statistical_check("U^H_k uniform on H",
                                       stats::goodness_of_fit(detail::counts(s.uh, rd.H.size()), flat_h),
                                       cfg.alpha, n, cfg.seed));
  const std::vector<double> flat_c(rd.p, 1.0 / static_cast<double>(rd.p));
  r.checks.push_back(statistical_check("Y_C uniform on C",
                                       stats::goodness_of_fit(detail::counts(s.yc, rd.p), flat_c),
                                       cfg.alpha, n, cfg.seed));

  const std::size_t nw = cd.W.size();
  std::vector<std::size_t> joint(s.yc.size());
  for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = s.yc[i] * nw + s.zw[i];
  std::vector<double> joint_p(rd.p * nw, 0.0);
  for (std::size_t j = 0; j < rd.p; ++j) {
    for (std::size_t w = 0; w < nw; ++w) {
      joint_p[j * nw + w] = to_double(lambda_w.weight(cd.W[w])) / static_cast<double>(rd.p);
    }
  }
  r.checks.push_back(statistical_check("(Y_C, Z_W) ~ omega_C x Lambda_W",
                                       stats::goodness_of_fit(detail::counts(joint, rd.p * nw), joint_p),
                                       cfg.alpha, n, cfg.seed));

  const std::size_t nwin = detail::ipow(m.law_size(), cfg.window);
  r.checks.push_back(statistical_check(
      "U^H_k independent of N-window",
      stats::independence(detail::cross(s.uh, rd.H.size(), s.window, nwin)), cfg.alpha, n, cfg.seed));
  r.checks.push_back(statistical_check(
      "U^H_k independent of (Y_C, Z_W)",
      stats::independence(detail::cross(s.uh, rd.H.size(), joint, rd.p * nw)), cfg.alpha, n, cfg.seed));
  r.checks.push_back(statistical_check(
      "(Y_C, Z_W) independent of N-window",
      stats::independence(detail::cross(joint, rd.p * nw, s.window, nwin)), cfg.alpha, n, cfg.seed));

  const auto lambda = invariant_law(a.S, a.mu, rd, cd, a.limits, lambda_w);
  std::vector<double> x_p(m.tuple_count());
  for (std::size_t x = 0; x < m.tuple_count(); ++x) x_p[x] = to_double(lambda.weight(m.tuple(x)));
  r.checks.push_back(statistical_check("X_k ~ Lambda",
                                       stats::goodness_of_fit(detail::counts(s.x, m.tuple_count()), x_p),
                                       cfg.alpha, n, cfg.seed));
  const auto first = coordinate_marginal(lambda, 0, a.S.degree());
  std::vector<double> first_p;
  for (const auto& q : first) first_p.push_back(to_double(q));
  r.checks.push_back(statistical_check("X^1_k ~ first marginal of Lambda",
                                       stats::goodness_of_fit(detail::counts(s.first, a.S.degree()), first_p),
                                       cfg.alpha, n, cfg.seed));
  return r;
}

// Non-stationary battery: exact path invariants plus
// P(Y_C = gamma^i, Z_W = w) = c_i Lambda^i_W{w} and U^H_k ~ omega_H.
inline VerificationReport verify_nonstationary(const SimulationModel& m, const InvariantFamily& fam,
                                               const SimulationConfig& cfg) {
  const auto& rd = m.rees();
  const auto& cd = m.cliques();
  const Sample s = detail::collect(m, cfg, [&](std::uint64_t seed) {
    return sample_nonstationary(m, fam, cfg.k_min, cfg.k_max, seed);
  });
  VerificationReport r = detail::exact_section(s, cfg);
  r.phase_table = detail::cross(s.yc, rd.p, s.zw, cd.W.size());
  const std::size_t n = s.paths;
  const std::size_t nw = cd.W.size();
  std::vector<std::size_t> joint(s.yc.size());
  for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = s.yc[i] * nw + s.zw[i];
  std::vector<double> joint_p(rd.p * nw, 0.0);
  for (std::size_t j = 0; j < rd.p; ++j) {
    if (fam.c[j] == 0) continue;
    for (std::size_t w = 0; w < nw; ++w) {
      joint_p[j * nw + w] = to_double(fam.c[j] * fam.lambda_W[j].weight(cd.W[w]));
    }
  }
  r.checks.push_back(statistical_check("(Y_C, Z_W) ~ c_i Lambda^i_W",
                                       stats::goodness_of_fit(detail::counts(joint, rd.p * nw), joint_p),
                                       cfg.alpha, n, cfg.seed));
  const std::vector<double> flat_h(rd.H.size(), 1.0 / static_cast<double>(rd.H.size()));
  r.checks.push_back(statistical_check("U^H_k uniform on H",
                                       stats::goodness_of_fit(detail::counts(s.uh, rd.H.size()), flat_h),
                                       cfg.alpha, n, cfg.seed));
  return r;
}

// The worked two-map example: with L = {e, fe} and W = {(2,4,5)}, the first
// particle is determined by X^L_k and U^G_k 2 through five event identities.
// Returns the number of (replication, identity) violations at time k.
inline std::size_t mono_projection_violations(const SimulationModel& m, const EvolutionPath& path, long long k) {
  const auto& s = m.semigroup();
  const auto& rd = m.rees();
  const auto e = Transformation::from_one_based({4, 2, 2, 4, 5});
  const auto fe = Transformation::from_one_based({1, 3, 3, 1, 5});
  const std::size_t i = path.at(k);
  const Transformation& xl = s[rd.L[path.XL[i]]];
  const Transformation& ug = s[rd.G[path.XG[i]]];  // H = G, so U^G_k = X^G_k
  const Point u2 = ug(1) + 1;
  const Point x1 = path.X[i][0] + 1;
  std::size_t bad = 0;
  bad += (x1 == 1) != (xl == fe && u2 == 4);
  bad += (x1 == 2) != (xl == e && u2 == 2);
  bad += (x1 == 3) != (xl == fe && u2 == 2);
  bad += (x1 == 4) != (xl == e && u2 == 4);
  bad += (x1 == 5) != (u2 == 5);
  return bad;
}

inline VerificationReport verify_mono_projection(const SimulationModel& m, const SimulationConfig& cfg) {
  validate(cfg);
  const auto& a = m.analysis();
  if (!(a.law == example_law())) {
    throw InputError("the mono-particle event identities are stated for the built-in example law");
  }
  const auto& cd = m.cliques();
  const auto lambda_w = TupleMeasure::dirac(cd.W.front());
  std::size_t bad = 0;
  std::vector<std::size_t> first(a.S.degree(), 0);
  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    const auto path = sample_stationary(m, lambda_w, cfg.k_min, cfg.k_max, cfg.seed ^ rep);
    bad += mono_projection_violations(m, path, cfg.k);
    ++first[path.X[path.at(cfg.k)][0]];
  }
  VerificationReport r;
  r.checks.push_back(exact_check("five event identities for X^1_k", bad == 0, cfg.replications, cfg.seed,
                                 std::to_string(bad) + " violations"));
  const auto lambda = invariant_law(a.S, a.mu, m.rees(), cd, a.limits, lambda_w);
  std::vector<double> p;
  for (const auto& q : coordinate_marginal(lambda, 0, a.S.degree())) p.push_back(to_double(q));
  r.checks.push_back(statistical_check("X^1_k ~ lambda", stats::goodness_of_fit(first, p), cfg.alpha,
                                       cfg.replications, cfg.seed));
  return r;
}

// Empirical law of (f N'_1 ... N'_n h)^H for fixed kernel elements f, h,
// tested against omega_H for each n.
inline VerificationReport mixing_trend(const SimulationModel& m, std::size_t f, std::size_t h,
                                       const std::vector<std::size_t>& lengths, std::size_t replications,
                                       std::uint64_t seed, double alpha) {
  const auto& s = m.semigroup();
  const auto& rd = m.rees();
  std::vector<std::size_t> h_index(rd.G.size(), rd.H.size());
  for (std::size_t i = 0; i < rd.H.size(); ++i) h_index[rd.H[i]] = i;
  VerificationReport r;
  std::discrete_distribution<std::size_t> law(m.law_weights().begin(), m.law_weights().end());
  for (std::size_t n : lengths) {
    std::vector<std::size_t> counts(rd.H.size(), 0);
    for (std::size_t rep = 0; rep < replications; ++rep) {
      auto rng = make_rng(seed ^ rep, n);
      Transformation prod = s[f];
      for (std::size_t t = 0; t < n; ++t) prod = compose(prod, m.map(law(rng)));
      prod = compose(prod, s[h]);
      const auto z = s.index_of(prod);
      ++counts[h_index[rd.h_part(rd.project(s, z).g)]];
    }
    const std::vector<double> flat(rd.H.size(), 1.0 / static_cast<double>(rd.H.size()));
    r.checks.push_back(statistical_check("(f N'_1..N'_" + std::to_string(n) + " h)^H uniform on H",
                                         stats::goodness_of_fit(counts, flat), alpha, replications, seed));
  }
  return r;
}

// Tail of k - T^e_k over replications: counts[t] = #{k - T^e_k > t}, plus the
// number of windows where no T^e_k was observed.
struct TeTail {
  std::size_t word_length = 0;
  std::vector<std::size_t> exceed;  // exceed[t] for t = 0..max_t
  std::size_t unobserved = 0;
  std::size_t replications = 0;
};

inline TeTail te_tail(const SimulationModel& m, const TupleMeasure& lambda_w, const SimulationConfig& cfg,
                      std::size_t max_t) {
  validate(cfg);
  const auto word = witness_word(m);
  TeTail out;
  out.word_length = word.size();
  out.exceed.assign(max_t + 1, 0);
  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    const auto path = sample_stationary(m, lambda_w, cfg.k_min, cfg.k_max, cfg.seed ^ rep);
    const auto te = estimate_Te(m, path, cfg.k, word.size());
    ++out.replications;
    if (!te) {
      ++out.unobserved;
      continue;
    }
    const long long gap = cfg.k - *te;
    for (std::size_t t = 0; t <= max_t; ++t) out.exceed[t] += gap > static_cast<long long>(t);
  }
  return out;
}

}  // namespace mapwalk
