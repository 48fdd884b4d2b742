#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapwalk/errors.hpp"
#include "mapwalk/transformation.hpp"

namespace mapwalk {

inline constexpr std::size_t kDefaultElementCap = 1'000'000;

// The semigroup generated by a finite set of transformations.
//
// Elements are numbered breadth-first by word length; elements first reached
// at the same length are numbered in lexicographic order of their image
// tables. Products are not tabulated in full (|S|^2 is prohibitive for
// |S| ~ 10^4); instead the left and right Cayley graphs over the generators
// are stored and arbitrary products go through `multiply`.
class Semigroup {
 public:
  static Semigroup generate(std::span<const Transformation> generators,
                            std::size_t cap = kDefaultElementCap) {
    if (generators.empty()) throw InputError("empty generator list");
    const std::size_t n = generators.front().size();
    for (const auto& g : generators) {
      if (g.size() != n) throw InputError("generators act on sets of different sizes");
    }

    Semigroup s;
    s.degree_ = n;
    s.generator_maps_.assign(generators.begin(), generators.end());
    const std::size_t ng = generators.size();

    auto add = [&](const Transformation& t, std::size_t parent, std::size_t gen) {
      if (s.elements_.size() >= cap) {
        throw ResourceError("semigroup closure exceeded the cap of " + std::to_string(cap) +
                            " elements");
      }
      s.index_.emplace(t, s.elements_.size());
      s.elements_.push_back(t);
      s.parent_.push_back(parent);
      s.parent_gen_.push_back(gen);
    };

    std::vector<std::pair<Transformation, std::size_t>> first(s.generator_maps_.size());
    for (std::size_t g = 0; g < ng; ++g) first[g] = {s.generator_maps_[g], g};
    std::sort(first.begin(), first.end());
    for (const auto& [t, g] : first) {
      if (!s.index_.contains(t)) add(t, kNone, g);
    }

    std::size_t level_begin = 0;
    std::size_t level_end = s.elements_.size();
    while (level_begin < level_end) {
      // Candidates of length + 1: x o gen for x at the current length.
      std::vector<std::pair<Transformation, std::pair<std::size_t, std::size_t>>> fresh;
      std::unordered_map<Transformation, std::size_t, TransformationHash> fresh_seen;
      for (std::size_t i = level_begin; i < level_end; ++i) {
        for (std::size_t g = 0; g < ng; ++g) {
          Transformation t = compose(s.elements_[i], s.generator_maps_[g]);
          if (s.index_.contains(t) || fresh_seen.contains(t)) continue;
          fresh_seen.emplace(t, fresh.size());
          fresh.push_back({std::move(t), {i, g}});
        }
      }
      std::sort(fresh.begin(), fresh.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [t, origin] : fresh) add(t, origin.first, origin.second);
      level_begin = level_end;
      level_end = s.elements_.size();
    }

    s.generator_index_.resize(ng);
    for (std::size_t g = 0; g < ng; ++g) s.generator_index_[g] = s.index_.at(s.generator_maps_[g]);

    const std::size_t size = s.elements_.size();
    s.right_.resize(size * ng);
    s.left_.resize(size * ng);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t g = 0; g < ng; ++g) {
        s.right_[i * ng + g] = s.index_.at(compose(s.elements_[i], s.generator_maps_[g]));
        s.left_[i * ng + g] = s.index_.at(compose(s.generator_maps_[g], s.elements_[i]));
      }
    }
    return s;
  }

  std::size_t size() const noexcept { return elements_.size(); }
  std::size_t degree() const noexcept { return degree_; }
  const Transformation& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<Transformation>& elements() const noexcept { return elements_; }

  std::size_t generator_count() const noexcept { return generator_maps_.size(); }
  const Transformation& generator(std::size_t g) const { return generator_maps_[g]; }
  // Element index of each generator, in the order they were supplied.
  std::span<const std::size_t> generators() const noexcept { return generator_index_; }

  std::optional<std::size_t> find(const Transformation& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const Transformation& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) throw InputError(t.to_string() + " is not in the semigroup");
    return it->second;
  }

  bool contains(const Transformation& t) const { return index_.contains(t); }

  // Index of element_i o element_j.
  std::size_t multiply(std::size_t i, std::size_t j) const {
    return index_.at(compose(elements_[i], elements_[j]));
  }

  // element_i o generator_g.
  std::size_t right(std::size_t i, std::size_t g) const {
    return right_[i * generator_maps_.size() + g];
  }
  // generator_g o element_i.
  std::size_t left(std::size_t g, std::size_t i) const {
    return left_[i * generator_maps_.size() + g];
  }

  // Generator positions f_1, ..., f_k (in order of application, so the
  // element equals f_k o ... o f_1) of a shortest word for element i.
  std::vector<std::size_t> word_for(std::size_t i) const {
    std::vector<std::size_t> word;
    std::size_t cur = i;
    while (true) {
      word.push_back(parent_gen_[cur]);
      if (parent_[cur] == kNone) break;
      cur = parent_[cur];
    }
    return word;
  }

  // Indices sorted lexicographically by element.
  std::vector<std::size_t> canonical_order(std::vector<std::size_t> idx) const {
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return elements_[a] < elements_[b]; });
    return idx;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t degree_ = 0;
  std::vector<Transformation> generator_maps_;
  std::vector<std::size_t> generator_index_;
  std::vector<Transformation> elements_;
  std::unordered_map<Transformation, std::size_t, TransformationHash> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> parent_gen_;
  std::vector<std::size_t> right_;
  std::vector<std::size_t> left_;
};

// E(S) in lexicographic order.
inline std::vector<std::size_t> idempotents(const Semigroup& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].is_idempotent()) out.push_back(i);
  }
  return s.canonical_order(std::move(out));
}

struct Kernel {
  std::size_t min_rank = 0;
  std::vector<std::size_t> elements;  // lexicographic order
  std::vector<bool> member;           // indexed by semigroup position

  std::size_t size() const noexcept { return elements.size(); }
  bool contains(std::size_t i) const { return i < member.size() && member[i]; }
};

// The minimal ideal, found as the set of minimal-rank elements. The ideal
// property is checked against the generators, which suffices because every
// element is a product of generators.
inline Kernel kernel(const Semigroup& s) {
  Kernel k;
  k.min_rank = s.degree();
  for (const auto& t : s.elements()) k.min_rank = std::min(k.min_rank, t.rank());
  k.member.assign(s.size(), false);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].rank() == k.min_rank) {
      k.member[i] = true;
      idx.push_back(i);
    }
  }
  k.elements = s.canonical_order(std::move(idx));
  for (std::size_t i : k.elements) {
    for (std::size_t g = 0; g < s.generator_count(); ++g) {
      if (!k.member[s.left(g, i)] || !k.member[s.right(i, g)]) {
        throw StructuralError("minimal-rank set is not closed under multiplication by " +
                              s.generator(g).to_string());
      }
    }
  }
  return k;
}

}  // namespace mapwalk
