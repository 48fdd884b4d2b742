#pragma once

// Total maps of V = {1..n} into itself and their componentwise action on
// tuples of points. Points are stored 0-based; every textual form
// ("[2,3,4,1,5]", "(2,4,5)") is 1-based.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "mapwalk/errors.hpp"

namespace mapwalk {

using Point = std::uint32_t;

namespace detail {

// Parses "<open>a,b,c<close>" into 1-based integers.
inline std::vector<long long> parse_list(std::string_view text, char open, char close) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t' && c != '\n') s.push_back(c);
  }
  if (s.size() < 2 || s.front() != open || s.back() != close) {
    throw InputError("expected " + std::string(1, open) + "..." + std::string(1, close) +
                     " literal, got '" + std::string(text) + "'");
  }
  std::vector<long long> out;
  std::string_view body(s.data() + 1, s.size() - 2);
  if (body.empty()) return out;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto comma = body.find(',', start);
    if (comma == std::string_view::npos) comma = body.size();
    auto tok = body.substr(start, comma - start);
    if (tok.empty()) throw InputError("empty entry in '" + std::string(text) + "'");
    long long v = 0;
    for (char c : tok) {
      if (c < '0' || c > '9') throw InputError("non-numeric entry in '" + std::string(text) + "'");
      v = v * 10 + (c - '0');
      if (v > (1LL << 31)) throw InputError("entry too large in '" + std::string(text) + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

template <class Range>
std::string join_one_based(const Range& r, char open, char close) {
  std::string s(1, open);
  bool first = true;
  for (auto v : r) {
    if (!first) s += ',';
    s += std::to_string(v + 1);
    first = false;
  }
  s += close;
  return s;
}

}  // namespace detail

class Transformation {
 public:
  Transformation() = default;

  // `images[i]` is the 0-based image of the 0-based point i.
  explicit Transformation(std::vector<Point> images) : images_(std::move(images)) {
    if (images_.empty()) throw InputError("transformation on an empty set");
    for (Point y : images_) {
      if (y >= images_.size()) {
        throw InputError("image " + std::to_string(y + 1) + " outside {1.." +
                         std::to_string(images_.size()) + "}");
      }
    }
  }

  static Transformation from_one_based(std::span<const long long> images) {
    std::vector<Point> v;
    v.reserve(images.size());
    for (long long y : images) {
      if (y < 1 || y > static_cast<long long>(images.size())) {
        throw InputError("image " + std::to_string(y) + " outside {1.." +
                         std::to_string(images.size()) + "}");
      }
      v.push_back(static_cast<Point>(y - 1));
    }
    return Transformation(std::move(v));
  }

  static Transformation from_one_based(std::initializer_list<long long> images) {
    std::vector<long long> v(images);
    return from_one_based(std::span<const long long>(v));
  }

  static Transformation parse(std::string_view literal) {
    auto v = detail::parse_list(literal, '[', ']');
    return from_one_based(std::span<const long long>(v));
  }

  static Transformation identity(std::size_t n) {
    std::vector<Point> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Point>(i);
    return Transformation(std::move(v));
  }

  static Transformation constant(std::size_t n, Point value) {
    return Transformation(std::vector<Point>(n, value));
  }

  std::size_t size() const noexcept { return images_.size(); }
  Point operator()(Point x) const { return images_[x]; }
  std::span<const Point> images() const noexcept { return images_; }

  // Number of distinct images, #(fV).
  std::size_t rank() const {
    std::vector<bool> seen(images_.size(), false);
    std::size_t r = 0;
    for (Point y : images_) {
      if (!seen[y]) {
        seen[y] = true;
        ++r;
      }
    }
    return r;
  }

  // Sorted image set fV.
  std::vector<Point> image_set() const {
    std::vector<Point> s(images_);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }

  bool is_idempotent() const {
    for (Point y : images_) {
      if (images_[y] != y) return false;
    }
    return true;
  }

  bool is_permutation() const { return rank() == size(); }

  std::string to_string() const { return detail::join_one_based(images_, '[', ']'); }

  auto operator<=>(const Transformation&) const = default;
  bool operator==(const Transformation&) const = default;

 private:
  std::vector<Point> images_;
};

// fg: apply g first, then f.
inline Transformation compose(const Transformation& f, const Transformation& g) {
  if (f.size() != g.size()) {
    throw InputError("cannot compose maps on sets of size " + std::to_string(f.size()) +
                     " and " + std::to_string(g.size()));
  }
  std::vector<Point> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g(static_cast<Point>(i)));
  return Transformation(std::move(out));
}

inline Transformation operator*(const Transformation& f, const Transformation& g) {
  return compose(f, g);
}

inline std::size_t rank(const Transformation& f) { return f.rank(); }

class Tuple {
 public:
  Tuple() = default;
  explicit Tuple(std::vector<Point> points) : points_(std::move(points)) {}

  static Tuple from_one_based(std::initializer_list<long long> pts) {
    std::vector<Point> v;
    for (long long p : pts) {
      if (p < 1) throw InputError("tuple entries are 1-based");
      v.push_back(static_cast<Point>(p - 1));
    }
    return Tuple(std::move(v));
  }

  static Tuple parse(std::string_view literal) {
    // Accept both "(2,4,5)" and "[2,4,5]".
    std::string_view t = literal;
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    const bool bracket = !t.empty() && t.front() == '[';
    auto v = detail::parse_list(literal, bracket ? '[' : '(', bracket ? ']' : ')');
    std::vector<Point> pts;
    for (long long p : v) {
      if (p < 1) throw InputError("tuple entries are 1-based");
      pts.push_back(static_cast<Point>(p - 1));
    }
    return Tuple(std::move(pts));
  }

  std::size_t size() const noexcept { return points_.size(); }
  Point operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const noexcept { return points_; }

  // Membership in V^m_x.
  bool distinct() const {
    std::vector<Point> s(points_);
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
  }

  Point max_point() const {
    return points_.empty() ? 0 : *std::max_element(points_.begin(), points_.end());
  }

  std::string to_string() const { return detail::join_one_based(points_, '(', ')'); }

  auto operator<=>(const Tuple&) const = default;
  bool operator==(const Tuple&) const = default;

 private:
  std::vector<Point> points_;
};

// f x = (f x^1, ..., f x^m).
inline Tuple apply_tuple(const Transformation& f, const Tuple& x) {
  if (!x.points().empty() && x.max_point() >= f.size()) {
    throw InputError("tuple " + x.to_string() + " has a point outside the domain of " +
                     f.to_string());
  }
  std::vector<Point> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return Tuple(std::move(out));
}

inline Tuple operator*(const Transformation& f, const Tuple& x) { return apply_tuple(f, x); }

struct TransformationHash {
  std::size_t operator()(const Transformation& f) const noexcept {
    return boost::hash_range(f.images().begin(), f.images().end());
  }
};

struct TupleHash {
  std::size_t operator()(const Tuple& x) const noexcept {
    return boost::hash_range(x.points().begin(), x.points().end());
  }
};

}  // namespace mapwalk
