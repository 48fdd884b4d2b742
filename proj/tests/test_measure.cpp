#include <gtest/gtest.h>

#include <random>

#include "mapwalk/analysis.hpp"
#include "mapwalk/linalg.hpp"
#include "oracles.hpp"

using namespace mapwalk;

namespace {

const auto f = Transformation::from_one_based({2, 3, 4, 1, 5});
const auto g = Transformation::from_one_based({2, 5, 5, 2, 4});
const auto e = Transformation::from_one_based({4, 2, 2, 4, 5});
const auto h = Transformation::from_one_based({2, 4, 4, 2, 5});
const auto fe = Transformation::from_one_based({1, 3, 3, 1, 5});

Rational q(long long a, long long b) { return Rational(a, b); }

}  // namespace

TEST(Measure, AddDropsZerosAndTracksTotal) {
  TupleMeasure m;
  const auto x = Tuple::parse("(1,2)");
  m.add(x, q(1, 2));
  m.add(x, q(-1, 2));
  EXPECT_TRUE(m.empty());
  m.add(x, q(1, 3));
  m.add(Tuple::parse("(2,1)"), q(2, 3));
  EXPECT_TRUE(m.is_probability());
  EXPECT_EQ(m.weight(Tuple::parse("(3,3)")), 0);
}

TEST(MappingLaw, Validation) {
  const std::vector<Transformation> maps{f, g};
  EXPECT_NO_THROW(MappingLaw(maps, std::vector<Rational>{q(1, 2), q(1, 2)}));
  EXPECT_THROW(MappingLaw(maps, std::vector<Rational>{q(1, 2), q(1, 3)}), InputError);
  EXPECT_THROW(MappingLaw(maps, std::vector<Rational>{q(3, 2), q(-1, 2)}), InputError);
  EXPECT_THROW(MappingLaw(maps, std::vector<Rational>{q(1, 1)}), InputError);
  const std::vector<Transformation> three{f, g, e};
  EXPECT_NO_THROW(MappingLaw(three, std::vector<Rational>{q(1, 3), q(1, 3), q(1, 3)}));
  const std::vector<Transformation> mixed{f, Transformation::identity(3)};
  EXPECT_THROW(MappingLaw(mixed, std::vector<Rational>{q(1, 2), q(1, 2)}), InputError);
  // Repeated maps merge.
  const std::vector<Transformation> dup{f, f};
  const MappingLaw merged(dup, std::vector<Rational>{q(1, 2), q(1, 2)});
  EXPECT_EQ(merged, MappingLaw::dirac(f));
}

TEST(Convolve, ExampleAgainstEtaL) {
  const auto a = analyze(example_law());
  const auto& s = a.S;
  ElementMeasure eta_l;
  eta_l.add(s.index_of(e), q(2, 3));
  eta_l.add(s.index_of(fe), q(1, 3));
  ElementMeasure expect;
  expect.add(s.index_of(fe), q(1, 3));
  expect.add(s.index_of(g), q(1, 2));
  expect.add(s.index_of(h), q(1, 6));
  EXPECT_EQ(convolve(s, a.mu, eta_l), expect);
}

TEST(Convolve, DiracAndHaar) {
  const auto a = analyze(example_law());
  const auto& s = a.S;
  const auto de = ElementMeasure::dirac(s.index_of(e));
  EXPECT_EQ(convolve(s, de, de), de);
  const auto omega = uniform(a.rees.G);
  EXPECT_EQ(convolve(s, omega, omega), omega);
  for (const auto& [z, w] : omega) EXPECT_EQ(w, q(1, 6));
  EXPECT_EQ(uniform(std::vector<std::size_t>{a.rees.e}), de);
  EXPECT_THROW(uniform(std::vector<std::size_t>{}), InputError);
}

TEST(Convolve, CarrierMismatch) {
  const auto a = analyze(example_law());
  ElementMeasure bad = ElementMeasure::dirac(a.S.size() + 3);
  EXPECT_THROW(convolve(a.S, a.mu, bad), InputError);
}

TEST(Convolve, AssociativeExactAndSupportIsProductSet) {
  std::mt19937_64 rng(11);
  const auto corpus = oracle::fuzz_corpus(40, 99);
  for (const auto& law : corpus) {
    const auto support = law.support();
    const auto s = Semigroup::generate(support);
    const auto mu = on_semigroup(s, law);
    // A second random law on S.
    ElementMeasure nu;
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    for (int i = 0; i < 4; ++i) nu.add(pick(rng), q(1, 4));
    const auto left = convolve(s, convolve(s, mu, nu), mu);
    const auto right = convolve(s, mu, convolve(s, nu, mu));
    EXPECT_EQ(left, right);
    EXPECT_TRUE(left.is_probability());
    std::set<std::size_t> products;
    for (const auto& [x, wx] : mu) {
      for (const auto& [y, wy] : nu) products.insert(s.multiply(x, y));
    }
    const auto sup = convolve(s, mu, nu).support();
    EXPECT_EQ(std::set<std::size_t>(sup.begin(), sup.end()), products);
    // Action is compatible with convolution.
    TupleMeasure lam;
    lam.add(Tuple(std::vector<Point>{0}), q(1, 1));
    EXPECT_EQ(act_on_tuples(s, convolve(s, mu, nu), lam), act_on_tuples(s, mu, act_on_tuples(s, nu, lam)));
  }
}

TEST(Convolve, RationalFallbackForHugeDenominators) {
  const auto a = analyze(example_law());
  const auto& s = a.S;
  // Denominators near 2^61 push the common denominator past the fast path.
  const Rational p1(1, (1LL << 61) - 1);
  const Rational p2(1, (1LL << 61) - 3);
  ElementMeasure m;
  m.add(s.index_of(f), p1);
  m.add(s.index_of(g), p2);
  m.add(s.index_of(e), 1 - p1 - p2);
  const auto c = convolve(s, m, m);
  EXPECT_TRUE(c.is_probability());
  EXPECT_EQ(c.weight(s.index_of(compose(f, f))), p1 * p1);
}

TEST(MeasureProducts, ExampleIdentities) {
  const auto a = analyze(example_law());
  const auto& s = a.S;
  EXPECT_EQ(measure_products(s, {a.limits.eta_L, uniform(a.rees.G), a.limits.eta_R}), a.limits.nu);
  EXPECT_EQ(a.limits.eta, a.limits.nu);
  EXPECT_EQ(measure_products(s, {a.rees.e}), ElementMeasure::dirac(a.rees.e));
  EXPECT_THROW(measure_products(s, std::span<const MeasureFactor>{}), InputError);
}

TEST(ActOnTuples, ExampleInvariants) {
  const auto law = example_law();
  const auto a = analyze(law);
  const auto& s = a.S;
  const auto w = TupleMeasure::dirac(Tuple::from_one_based({2, 4, 5}));
  const auto left = measure_products(s, {a.limits.eta_L, uniform(a.rees.G)});
  const auto lam = act_on_tuples(s, left, w);
  EXPECT_EQ(act_on_tuples(law, lam), lam);
  EXPECT_EQ(act_on_tuples(MappingLaw::dirac(Transformation::identity(5)), lam), lam);
  TupleMeasure single;
  const std::vector<Rational> lambda{q(1, 9), q(2, 9), q(1, 9), q(2, 9), q(3, 9)};
  for (Point x = 0; x < 5; ++x) single.add(Tuple(std::vector<Point>{x}), lambda[x]);
  EXPECT_EQ(act_on_tuples(law, single), single);
  EXPECT_THROW(act_on_tuples(MappingLaw::dirac(Transformation::identity(2)), single), InputError);
}

TEST(MarginalTransition, ExampleRows) {
  const auto p = marginal_transition_matrix(example_law());
  EXPECT_EQ(p[0], (std::vector<Rational>{0, 1, 0, 0, 0}));
  EXPECT_EQ(p[3], (std::vector<Rational>{q(1, 2), q(1, 2), 0, 0, 0}));
  for (const auto& row : p) {
    Rational sum = 0;
    for (const auto& v : row) sum += v;
    EXPECT_EQ(sum, 1);
  }
  const auto id = marginal_transition_matrix(MappingLaw::dirac(Transformation::identity(3)));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(id[i][j], i == j ? 1 : 0);
  }
  // lambda is the stationary law of the one-particle chain.
  const auto st = stationary_distribution(p);
  EXPECT_EQ(st, (std::vector<Rational>{q(1, 9), q(2, 9), q(1, 9), q(2, 9), q(1, 3)}));
}

TEST(Linalg, RankAndNonUniqueStationary) {
  RationalMatrix a{{1, 2}, {2, 4}};
  EXPECT_EQ(exact_rank(a), 1u);
  const RationalMatrix two_classes{{1, 0}, {0, 1}};
  EXPECT_THROW(stationary_distribution(two_classes), StructuralError);
  const RationalMatrix sys{{2, 1}, {1, 3}};
  EXPECT_EQ(solve_exact(sys, {3, 5}), (std::vector<Rational>{q(4, 5), q(7, 5)}));
}
