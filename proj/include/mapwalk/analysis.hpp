#pragma once

#include <cstddef>
#include <vector>

#include "mapwalk/cliques.hpp"
#include "mapwalk/limits.hpp"
#include "mapwalk/measure.hpp"
#include "mapwalk/rees.hpp"
#include "mapwalk/semigroup.hpp"

namespace mapwalk {

struct AnalysisOptions {
  std::size_t element_cap = kDefaultElementCap;
  bool verify_limits = true;
};

// Everything derived from a mapping law: S, its kernel and Rees decomposition
// at the canonical idempotent, the exact limit cycle, and the clique data.
struct Analysis {
  MappingLaw law;
  Semigroup S;
  ElementMeasure mu;  // the law on S
  Kernel K;
  ReesData rees;
  CyclicLimit limits;
  CliqueData cliques;

  std::size_t p() const noexcept { return rees.p; }
};

inline Analysis analyze(const MappingLaw& law, const AnalysisOptions& opt = {}) {
  Analysis a;
  a.law = law;
  const auto support = law.support();
  a.S = Semigroup::generate(support, opt.element_cap);
  a.mu = on_semigroup(a.S, law);
  a.K = kernel(a.S);
  a.rees = rees_at(a.S, a.K, canonical_idempotent(a.S, a.K));
  a.limits = analyze_limits(a.S, a.mu, a.K, a.rees, AssembleOptions{opt.verify_limits});
  a.cliques = compute_W(a.S, a.K, a.rees);
  return a;
}

// The law in the worked two-map example on V = {1..5}:
// mu = (delta_f + delta_g) / 2 with f = [2,3,4,1,5], g = [2,5,5,2,4].
inline MappingLaw example_law() {
  const std::vector<Transformation> maps{Transformation::from_one_based({2, 3, 4, 1, 5}),
                                         Transformation::from_one_based({2, 5, 5, 2, 4})};
  return MappingLaw::uniform(maps);
}

}  // namespace mapwalk
