#pragma once

// Rees decomposition of the kernel K = L G R at a fixed idempotent e:
//   G = eKe (a group with unit e), L = E(Ke), R = E(eK),
//   z = z_L z_G z_R with z_G = eze, z_L = ze(eze)^-1, z_R = (eze)^-1 ez.
// The cyclic structure G/H = {H, gH, ..., g^(p-1)H} is attached later by
// the limit analysis.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mapwalk/errors.hpp"
#include "mapwalk/semigroup.hpp"

namespace mapwalk {

struct ReesTriple {
  std::size_t l;  // local index into ReesData::L
  std::size_t g;  // local index into ReesData::G
  std::size_t r;  // local index into ReesData::R
  bool operator==(const ReesTriple&) const = default;
};

class ReesData {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Semigroup indices, each list in lexicographic order.
  std::size_t e = npos;
  std::vector<std::size_t> L, G, R;
  std::size_t unit = npos;  // local index of e in G

  // Cyclic structure; empty until attach_cycle() succeeds.
  std::size_t p = 0;
  std::vector<std::size_t> H;  // local G indices, ascending
  std::size_t gamma = npos;    // local G index
  std::vector<std::size_t> C;  // local G indices: e, gamma, ..., gamma^(p-1)

  bool has_cycle() const noexcept { return p > 0; }

  std::size_t g_mul(std::size_t a, std::size_t b) const { return table_[a * G.size() + b]; }
  std::size_t g_inv(std::size_t a) const { return inverse_[a]; }
  std::size_t g_pow(std::size_t a, long long k) const {
    const long long order = static_cast<long long>(order_[a]);
    long long r = ((k % order) + order) % order;
    std::size_t acc = unit;
    for (long long i = 0; i < r; ++i) acc = g_mul(acc, a);
    return acc;
  }
  std::size_t g_order(std::size_t a) const { return order_[a]; }

  std::optional<std::size_t> l_local(std::size_t s) const { return lookup(l_pos_, s); }
  std::optional<std::size_t> g_local(std::size_t s) const { return lookup(g_pos_, s); }
  std::optional<std::size_t> r_local(std::size_t s) const { return lookup(r_pos_, s); }

  bool in_H(std::size_t g) const { return !h_member_.empty() && h_member_[g]; }
  // g = C[coset_of(g)] * h_part(g) with h_part(g) in H.
  std::size_t coset_of(std::size_t g) const { return coset_[g]; }
  std::size_t h_part(std::size_t g) const { return g_mul(g_inv(C[coset_[g]]), g); }
  std::size_t gamma_power(long long k) const {
    const long long pp = static_cast<long long>(p);
    return C[static_cast<std::size_t>(((k % pp) + pp) % pp)];
  }

  // Local indices of psi^-1(z) for z in the kernel.
  ReesTriple project(const Semigroup& s, std::size_t z) const {
    if (!kernel_member_[z]) {
      throw InputError(s[z].to_string() + " is not in the kernel");
    }
    const std::size_t eze = s.multiply(s.multiply(e, z), e);
    const auto zg = g_local(eze);
    if (!zg) throw StructuralError("eze left the group factor for z = " + s[z].to_string());
    const std::size_t inv = G[g_inv(*zg)];
    const std::size_t zl = s.multiply(s.multiply(z, e), inv);
    const std::size_t zr = s.multiply(s.multiply(inv, e), z);
    const auto l = l_local(zl);
    const auto r = r_local(zr);
    if (!l || !r) throw StructuralError("projection of " + s[z].to_string() + " left L or R");
    return {*l, *zg, *r};
  }

  // Semigroup index of L[l] G[g] R[r].
  std::size_t compose_triple(const Semigroup& s, const ReesTriple& t) const {
    return s.multiply(s.multiply(L[t.l], G[t.g]), R[t.r]);
  }

  // Installs H, gamma and p after checking that H is a normal subgroup,
  // gamma^p = e, and the cosets gamma^j H partition G.
  void attach_cycle(std::vector<std::size_t> h, std::size_t gamma_local, std::size_t period);

  friend ReesData rees_at(const Semigroup& s, const Kernel& k, std::size_t e_index);

 private:
  static std::optional<std::size_t> lookup(const std::vector<std::size_t>& pos, std::size_t s) {
    if (s >= pos.size() || pos[s] == npos) return std::nullopt;
    return pos[s];
  }

  std::vector<std::size_t> l_pos_, g_pos_, r_pos_;
  std::vector<bool> kernel_member_;
  std::vector<std::size_t> table_;
  std::vector<std::size_t> inverse_;
  std::vector<std::size_t> order_;
  std::vector<bool> h_member_;
  std::vector<std::size_t> coset_;
};

// First kernel idempotent in the semigroup's element order, i.e. the one with
// the shortest generating word, ties broken lexicographically.
inline std::size_t canonical_idempotent(const Semigroup& s, const Kernel& k) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (k.contains(i) && s[i].is_idempotent()) return i;
  }
  throw StructuralError("kernel has no idempotent");
}

inline ReesData rees_at(const Semigroup& s, const Kernel& k, std::size_t e_index) {
  if (!k.contains(e_index)) throw InputError(s[e_index].to_string() + " is not in the kernel");
  if (!s[e_index].is_idempotent()) throw InputError(s[e_index].to_string() + " is not idempotent");

  ReesData rd;
  rd.e = e_index;
  rd.kernel_member_ = k.member;
  std::vector<bool> in_ke(s.size(), false), in_ek(s.size(), false), in_eke(s.size(), false);
  for (std::size_t z : k.elements) {
    const std::size_t ze = s.multiply(z, e_index);
    const std::size_t ez = s.multiply(e_index, z);
    in_ke[ze] = true;
    in_ek[ez] = true;
    in_eke[s.multiply(ez, e_index)] = true;
  }
  std::vector<std::size_t> l, g, r;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (in_eke[i]) g.push_back(i);
    if (in_ke[i] && s[i].is_idempotent()) l.push_back(i);
    if (in_ek[i] && s[i].is_idempotent()) r.push_back(i);
  }
  rd.L = s.canonical_order(std::move(l));
  rd.G = s.canonical_order(std::move(g));
  rd.R = s.canonical_order(std::move(r));

  auto positions = [&](const std::vector<std::size_t>& v) {
    std::vector<std::size_t> pos(s.size(), ReesData::npos);
    for (std::size_t i = 0; i < v.size(); ++i) pos[v[i]] = i;
    return pos;
  };
  rd.l_pos_ = positions(rd.L);
  rd.g_pos_ = positions(rd.G);
  rd.r_pos_ = positions(rd.R);
  rd.unit = rd.g_pos_[e_index];
  if (rd.unit == ReesData::npos) throw StructuralError("e is not in eKe");

  const std::size_t ng = rd.G.size();
  rd.table_.resize(ng * ng);
  for (std::size_t a = 0; a < ng; ++a) {
    for (std::size_t b = 0; b < ng; ++b) {
      const std::size_t prod = rd.g_pos_[s.multiply(rd.G[a], rd.G[b])];
      if (prod == ReesData::npos) throw StructuralError("eKe is not closed under products");
      rd.table_[a * ng + b] = prod;
    }
  }
  // Inverses from cyclic order: g^-1 = g^(ord(g) - 1).
  rd.inverse_.resize(ng);
  rd.order_.resize(ng);
  for (std::size_t a = 0; a < ng; ++a) {
    std::size_t acc = a;
    std::size_t prev = rd.unit;
    std::size_t order = 1;
    while (acc != rd.unit) {
      prev = acc;
      acc = rd.table_[acc * ng + a];
      if (++order > ng) throw StructuralError("eKe element without finite order reaching e");
    }
    rd.order_[a] = order;
    rd.inverse_[a] = order == 1 ? rd.unit : prev;
  }
  for (std::size_t a = 0; a < ng; ++a) {
    if (rd.table_[a * ng + rd.unit] != a || rd.table_[rd.unit * ng + a] != a) {
      throw StructuralError("e is not a two-sided unit of eKe");
    }
  }

  // psi: L x G x R -> K must be a bijection.
  if (rd.L.size() * rd.G.size() * rd.R.size() != k.size()) {
    throw StructuralError("|L||G||R| = " + std::to_string(rd.L.size() * rd.G.size() * rd.R.size()) +
                          " differs from |K| = " + std::to_string(k.size()));
  }
  std::vector<bool> hit(s.size(), false);
  for (std::size_t a = 0; a < rd.L.size(); ++a) {
    for (std::size_t b = 0; b < ng; ++b) {
      const std::size_t lg = s.multiply(rd.L[a], rd.G[b]);
      for (std::size_t c = 0; c < rd.R.size(); ++c) {
        const std::size_t z = s.multiply(lg, rd.R[c]);
        if (!k.contains(z) || hit[z]) {
          throw StructuralError("product map L x G x R -> K is not injective");
        }
        hit[z] = true;
      }
    }
  }
  return rd;
}

inline void ReesData::attach_cycle(std::vector<std::size_t> h, std::size_t gamma_local,
                                   std::size_t period) {
  const std::size_t ng = G.size();
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  std::vector<bool> member(ng, false);
  for (std::size_t x : h) {
    if (x >= ng) throw StructuralError("H entry outside G");
    member[x] = true;
  }
  if (!member[unit]) throw StructuralError("H does not contain e");
  for (std::size_t a : h) {
    for (std::size_t b : h) {
      if (!member[g_mul(a, b)]) throw StructuralError("H is not closed under products");
    }
  }
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t x : h) {
      if (!member[g_mul(g_mul(g_inv(g), x), g)]) throw StructuralError("H is not normal in G");
    }
  }
  if (period == 0 || gamma_local >= ng) throw StructuralError("invalid period or gamma");
  std::vector<std::size_t> c;
  std::size_t acc = unit;
  for (std::size_t j = 0; j < period; ++j) {
    c.push_back(acc);
    acc = g_mul(acc, gamma_local);
  }
  if (acc != unit) throw StructuralError("gamma^p != e");
  std::vector<std::size_t> coset(ng, npos);
  for (std::size_t j = 0; j < period; ++j) {
    for (std::size_t x : h) {
      const std::size_t y = g_mul(c[j], x);
      if (coset[y] != npos) throw StructuralError("cosets gamma^j H overlap");
      coset[y] = j;
    }
  }
  if (std::count(coset.begin(), coset.end(), npos) != 0) {
    throw StructuralError("cosets gamma^j H do not cover G");
  }
  H = std::move(h);
  gamma = gamma_local;
  p = period;
  C = std::move(c);
  h_member_ = std::move(member);
  coset_ = std::move(coset);
}

// The cosets gamma^j H (local G indices), j = 0..p-1.
inline std::vector<std::vector<std::size_t>> coset_structure(const ReesData& rd) {
  if (!rd.has_cycle()) throw StructuralError("cycle structure not attached");
  std::vector<std::vector<std::size_t>> out(rd.p);
  for (std::size_t g = 0; g < rd.G.size(); ++g) out[rd.coset_of(g)].push_back(g);
  return out;
}

}  // namespace mapwalk
