#pragma once

// Exact, finitely supported probability measures.
//
// Measure<Key> is a sparse map from carrier points to positive rational
// weights. Three carriers are used: semigroup positions (ElementMeasure),
// transformations (MappingLaw), and tuples of points (TupleMeasure).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mapwalk/errors.hpp"
#include "mapwalk/rational.hpp"
#include "mapwalk/semigroup.hpp"
#include "mapwalk/transformation.hpp"

namespace mapwalk {

template <class Key>
class Measure {
 public:
  using map_type = std::map<Key, Rational>;

  Measure() = default;

  static Measure dirac(Key k) {
    Measure m;
    m.weights_.emplace(std::move(k), Rational(1));
    return m;
  }

  // Adds `w` to the weight at `k`; zero results are erased.
  void add(const Key& k, const Rational& w) {
    if (w == 0) return;
    auto [it, inserted] = weights_.try_emplace(k, w);
    if (!inserted) {
      it->second += w;
      if (it->second == 0) weights_.erase(it);
    }
  }

  Rational weight(const Key& k) const {
    auto it = weights_.find(k);
    return it == weights_.end() ? Rational(0) : it->second;
  }

  Rational total() const {
    Rational t = 0;
    for (const auto& [k, w] : weights_) t += w;
    return t;
  }

  bool is_probability() const {
    if (weights_.empty()) return false;
    for (const auto& [k, w] : weights_) {
      if (w <= 0) return false;
    }
    return total() == 1;
  }

  std::vector<Key> support() const {
    std::vector<Key> s;
    s.reserve(weights_.size());
    for (const auto& [k, w] : weights_) s.push_back(k);
    return s;
  }

  std::size_t support_size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  const map_type& weights() const noexcept { return weights_; }
  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

  Measure scaled(const Rational& c) const {
    Measure out;
    if (c == 0) return out;
    for (const auto& [k, w] : weights_) out.weights_.emplace(k, w * c);
    return out;
  }

  template <class F>
  auto pushforward(F&& f) const {
    using K2 = std::decay_t<decltype(f(std::declval<const Key&>()))>;
    Measure<K2> out;
    for (const auto& [k, w] : weights_) out.add(f(k), w);
    return out;
  }

  bool operator==(const Measure&) const = default;

 private:
  map_type weights_;
};

template <class Key>
Measure<Key> operator+(const Measure<Key>& a, const Measure<Key>& b) {
  Measure<Key> out = a;
  for (const auto& [k, w] : b) out.add(k, w);
  return out;
}

using ElementMeasure = Measure<std::size_t>;
using TupleMeasure = Measure<Tuple>;

// A probability on transformations of one finite set.
class MappingLaw {
 public:
  MappingLaw() = default;

  MappingLaw(std::span<const Transformation> maps, std::span<const Rational> weights) {
    if (maps.empty()) throw InputError("mapping law needs at least one transformation");
    if (maps.size() != weights.size()) {
      throw InputError("got " + std::to_string(maps.size()) + " generators but " +
                       std::to_string(weights.size()) + " weights");
    }
    const std::size_t n = maps.front().size();
    for (std::size_t i = 0; i < maps.size(); ++i) {
      if (maps[i].size() != n) throw InputError("generators act on sets of different sizes");
      if (weights[i] <= 0) {
        throw InputError("weight " + to_string(weights[i]) + " of generator " +
                         std::to_string(i + 1) + " is not positive");
      }
      measure_.add(maps[i], weights[i]);
    }
    if (measure_.total() != 1) {
      throw InputError("weights sum to " + to_string(measure_.total()) + ", not 1");
    }
  }

  static MappingLaw dirac(const Transformation& f) {
    Rational one(1);
    return MappingLaw(std::span<const Transformation>(&f, 1), std::span<const Rational>(&one, 1));
  }

  static MappingLaw uniform(std::span<const Transformation> maps) {
    std::vector<Rational> w(maps.size(), Rational(1, static_cast<long>(maps.size())));
    return MappingLaw(maps, w);
  }

  std::size_t degree() const { return measure_.begin()->first.size(); }
  const Measure<Transformation>& measure() const noexcept { return measure_; }
  // Support in lexicographic order; matches weights().
  std::vector<Transformation> support() const { return measure_.support(); }
  std::vector<Rational> weights() const {
    std::vector<Rational> w;
    for (const auto& [f, q] : measure_) w.push_back(q);
    return w;
  }
  std::size_t support_size() const noexcept { return measure_.support_size(); }

  bool operator==(const MappingLaw&) const = default;

 private:
  Measure<Transformation> measure_;
};

// The law as a measure on the semigroup its support generates.
inline ElementMeasure on_semigroup(const Semigroup& s, const MappingLaw& mu) {
  ElementMeasure out;
  for (const auto& [f, w] : mu.measure()) out.add(s.index_of(f), w);
  return out;
}

inline ElementMeasure uniform(std::span<const std::size_t> subset) {
  if (subset.empty()) throw InputError("uniform law on an empty set");
  ElementMeasure out;
  const Rational w(1, static_cast<long>(subset.size()));
  for (std::size_t i : subset) out.add(i, w);
  return out;
}

namespace detail {

// Weights rewritten over a common denominator, when everything fits in a
// machine word. Lets the convolution inner loop run on integers.
struct ScaledWeights {
  std::vector<std::pair<std::size_t, std::int64_t>> items;
  BigInt denominator;
  std::int64_t max_numerator = 0;
};

inline std::optional<ScaledWeights> scale_to_integers(const ElementMeasure& m) {
  constexpr std::int64_t kLimit = std::numeric_limits<std::int64_t>::max() / 4;
  BigInt lcm = 1;
  for (const auto& [k, w] : m) {
    lcm = boost::multiprecision::lcm(lcm, denominator(w));
    if (lcm > kLimit) return std::nullopt;
  }
  ScaledWeights out;
  out.denominator = lcm;
  out.items.reserve(m.support_size());
  for (const auto& [k, w] : m) {
    BigInt num = numerator(w) * (lcm / denominator(w));
    if (num > kLimit || num < -kLimit) return std::nullopt;
    const auto v = num.convert_to<std::int64_t>();
    out.max_numerator = std::max(out.max_numerator, v < 0 ? -v : v);
    out.items.emplace_back(k, v);
  }
  return out;
}

}  // namespace detail

// (ab){z} = sum over xy = z of a{x} b{y}.
inline ElementMeasure convolve(const Semigroup& s, const ElementMeasure& a, const ElementMeasure& b) {
  for (const auto& [k, w] : a) {
    if (k >= s.size()) throw InputError("measure carrier is not inside the semigroup");
  }
  for (const auto& [k, w] : b) {
    if (k >= s.size()) throw InputError("measure carrier is not inside the semigroup");
  }
  ElementMeasure out;
  if (a.empty() || b.empty()) return out;

  const auto sa = detail::scale_to_integers(a);
  const auto sb = detail::scale_to_integers(b);
  const std::size_t terms = std::min(a.support_size(), b.support_size());
  const bool fast = sa && sb &&
                    static_cast<long double>(sa->max_numerator) * sb->max_numerator * terms <
                        0x1p120L;
  if (!fast) {
    for (const auto& [x, wx] : a) {
      for (const auto& [y, wy] : b) out.add(s.multiply(x, y), wx * wy);
    }
    return out;
  }

  std::map<std::size_t, __int128> acc;
  for (const auto& [x, nx] : sa->items) {
    for (const auto& [y, ny] : sb->items) {
      acc[s.multiply(x, y)] += static_cast<__int128>(nx) * ny;
    }
  }
  const BigInt den = sa->denominator * sb->denominator;
  for (const auto& [z, v] : acc) {
    if (v == 0) continue;
    // __int128 -> BigInt via two 64-bit halves.
    const bool neg = v < 0;
    const unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-v)
                                      : static_cast<unsigned __int128>(v);
    BigInt num = BigInt(static_cast<std::uint64_t>(mag >> 64));
    num <<= 64;
    num += BigInt(static_cast<std::uint64_t>(mag));
    if (neg) num = -num;
    out.add(z, Rational(num, den));
  }
  return out;
}

// A factor in a left-to-right convolution product: either a measure or an
// element standing for its Dirac mass.
using MeasureFactor = std::variant<ElementMeasure, std::size_t>;

inline ElementMeasure measure_products(const Semigroup& s, std::span<const MeasureFactor> pieces) {
  if (pieces.empty()) throw InputError("empty product");
  auto as_measure = [](const MeasureFactor& f) {
    if (const auto* m = std::get_if<ElementMeasure>(&f)) return *m;
    return ElementMeasure::dirac(std::get<std::size_t>(f));
  };
  ElementMeasure acc = as_measure(pieces.front());
  for (std::size_t i = 1; i < pieces.size(); ++i) acc = convolve(s, acc, as_measure(pieces[i]));
  return acc;
}

inline ElementMeasure measure_products(const Semigroup& s, std::initializer_list<MeasureFactor> pieces) {
  return measure_products(s, std::span<const MeasureFactor>(pieces.begin(), pieces.size()));
}

// (mu Lambda){A} = sum_f sum_x 1_A(f x) mu{f} Lambda{x}.
inline TupleMeasure act_on_tuples(const MappingLaw& mu, const TupleMeasure& lam) {
  TupleMeasure out;
  for (const auto& [x, wx] : lam) {
    if (x.size() > 0 && x.max_point() >= mu.degree()) {
      throw InputError("tuple " + x.to_string() + " does not live on the law's domain");
    }
    for (const auto& [f, wf] : mu.measure()) out.add(apply_tuple(f, x), wf * wx);
  }
  return out;
}

inline TupleMeasure act_on_tuples(const Semigroup& s, const ElementMeasure& mu, const TupleMeasure& lam) {
  TupleMeasure out;
  for (const auto& [x, wx] : lam) {
    if (x.size() > 0 && x.max_point() >= s.degree()) {
      throw InputError("tuple " + x.to_string() + " does not live on the semigroup's domain");
    }
    for (const auto& [f, wf] : mu) out.add(apply_tuple(s[f], x), wf * wx);
  }
  return out;
}

using RationalMatrix = std::vector<std::vector<Rational>>;

// P[x][y] = mu{f : f x = y}.
inline RationalMatrix marginal_transition_matrix(const MappingLaw& mu) {
  const std::size_t n = mu.degree();
  RationalMatrix p(n, std::vector<Rational>(n, Rational(0)));
  for (const auto& [f, w] : mu.measure()) {
    for (std::size_t x = 0; x < n; ++x) p[x][f(static_cast<Point>(x))] += w;
  }
  return p;
}

// Law of coordinate `i` under a tuple law, as a vector over {0..n-1}.
inline std::vector<Rational> coordinate_marginal(const TupleMeasure& lam, std::size_t i, std::size_t n) {
  std::vector<Rational> out(n, Rational(0));
  for (const auto& [x, w] : lam) out.at(x[i]) += w;
  return out;
}

}  // namespace mapwalk
