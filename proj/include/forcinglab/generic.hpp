#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "forcinglab/condition.hpp"

namespace forcinglab {

/// D_n of the socks model: some column m where pair n carries both bits.
struct SockColumn {
  std::uint32_t pair = 0;
  friend bool operator==(const SockColumn&, const SockColumn&) = default;
};
/// i is in dom(p).
struct CoordInDomain {
  std::uint64_t coord = 0;
  friend bool operator==(const CoordInDomain&, const CoordInDomain&) = default;
};
/// beta occurs as a second coordinate of some value.
struct HitValue {
  std::uint64_t beta = 0;
  friend bool operator==(const HitValue&, const HitValue&) = default;
};

using DenseSetSpec = std::variant<SockColumn, CoordInDomain, HitValue>;

inline std::string to_string(const DenseSetSpec& s) {
  if (auto* x = std::get_if<SockColumn>(&s)) return "D_" + std::to_string(x->pair);
  if (auto* x = std::get_if<CoordInDomain>(&s)) return "coord " + std::to_string(x->coord);
  return "hit " + std::to_string(std::get<HitValue>(s).beta);
}

/// Least column m >= 0 at which pair n carries both bits, if any.
inline std::optional<std::uint64_t> sock_column_with_both_bits(const Condition& p, std::uint32_t pair) {
  const Atom a = Atom::sock(pair, Side::Left);
  const Atom b = Atom::sock(pair, Side::Right);
  std::set<std::uint64_t> columns;
  for (const auto& [pt, v] : p.entries()) {
    if (auto* c = std::get_if<AtomColumn>(&pt); c && (c->atom == a || c->atom == b)) columns.insert(c->column);
  }
  for (auto m : columns) {
    auto va = p.at(column(a, m));
    auto vb = p.at(column(b, m));
    if (va && vb && *va != *vb) return m;
  }
  return std::nullopt;
}

inline bool is_member(const DenseSetSpec& spec, const Condition& p) {
  if (auto* s = std::get_if<SockColumn>(&spec)) return sock_column_with_both_bits(p, s->pair).has_value();
  if (auto* s = std::get_if<CoordInDomain>(&spec)) return p.defines(nat(s->coord));
  const auto beta = std::get<HitValue>(spec).beta;
  for (const auto& [pt, v] : p.entries()) {
    if (auto* pv = std::get_if<PairVal>(&v); pv && pv->second == beta) return true;
  }
  return false;
}

namespace detail {

inline std::optional<Atom> least_fresh_atom(const Condition& p, const Universe& u) {
  std::set<Atom> used;
  for (const auto& [pt, v] : p.entries()) collect_atoms(v, used);
  for (const auto& a : u.plain()) {
    if (!used.contains(a)) return a;
  }
  return std::nullopt;
}

inline std::uint64_t least_free_nat(const Condition& p) {
  std::uint64_t n = 0;
  while (p.defines(nat(n))) ++n;
  return n;
}

}  // namespace detail

/// Deterministic extension of p into the dense set. Returns p itself when p
/// is already a member. With an rng, CoordInDomain draws the second
/// coordinate at random instead of taking the least one.
inline Condition dense_extend(const DenseSetSpec& spec, const Condition& p, const Universe& u,
                              std::mt19937_64* rng = nullptr) {
  if (is_member(spec, p)) return p;
  const auto& fam = p.family();

  if (auto* s = std::get_if<SockColumn>(&spec)) {
    if (fam.kind != FamilyKind::Fin2 || fam.points != PointKind::AtomColumn) {
      throw LabError(ErrorCode::FamilyMismatch, "sock columns live in Fin(A x omega, 2)");
    }
    if (s->pair >= u.sock_pairs) throw LabError(ErrorCode::AtomOutsideUniverse, "pair " + std::to_string(s->pair));
    // (a, b) is fixed once as (left, right).
    const Atom a = Atom::sock(s->pair, Side::Left);
    const Atom b = Atom::sock(s->pair, Side::Right);
    std::uint64_t m = 0;
    while (p.defines(column(a, m)) || p.defines(column(b, m))) ++m;
    return p.with(column(a, m), bit(0)).with(column(b, m), bit(1));
  }

  if (auto* s = std::get_if<CoordInDomain>(&spec)) {
    switch (fam.kind) {
      case FamilyKind::Fin2:
        if (fam.points != PointKind::Nat) throw LabError(ErrorCode::FamilyMismatch, "coordinates need nat points");
        return p.with(nat(s->coord), bit(rng ? (*rng)() % 2 : 0));
      case FamilyKind::FinInj:
      case FamilyKind::FinPi1Inj: {
        auto fresh = detail::least_fresh_atom(p, u);
        if (!fresh) throw LabError(ErrorCode::NoFreshAtom, "universe exhausted");
        if (fam.kind == FamilyKind::FinInj) return p.with(nat(s->coord), atom_val(*fresh));
        if (fam.value_bound == 0) throw LabError(ErrorCode::InvalidArgument, "empty second-coordinate range");
        return p.with(nat(s->coord), pair_val(*fresh, rng ? (*rng)() % fam.value_bound : 0));
      }
      case FamilyKind::FinSeqInj:
        throw LabError(ErrorCode::FamilyMismatch, "sequence domains are initial segments");
    }
  }

  const auto beta = std::get<HitValue>(spec).beta;
  if (fam.kind != FamilyKind::FinPi1Inj) throw LabError(ErrorCode::FamilyMismatch, "values need an (atom, beta) family");
  if (beta >= fam.value_bound) {
    throw LabError(ErrorCode::InvalidArgument, "beta " + std::to_string(beta) + " outside the declared target");
  }
  auto fresh = detail::least_fresh_atom(p, u);
  if (!fresh) throw LabError(ErrorCode::NoFreshAtom, "universe exhausted");
  return p.with(nat(detail::least_free_nat(p)), pair_val(*fresh, beta));
}

/// A finite descending chain plus a log of which dense set was met where.
struct GenericFragment {
  std::vector<Condition> chain;
  std::vector<std::pair<DenseSetSpec, std::size_t>> met;

  const Condition& final_condition() const { return chain.back(); }

  friend bool operator==(const GenericFragment&, const GenericFragment&) = default;

  friend GenericFragment act(const Permutation& pi, const GenericFragment& g) {
    return {forcinglab::act(pi, g.chain), g.met};
  }
  friend void collect_atoms(const GenericFragment& g, std::set<Atom>& out) { forcinglab::collect_atoms(g.chain, out); }
};

/// Greedy fold of dense_extend over the specs; strict extensions are
/// appended to the chain.
inline GenericFragment build_generic(const std::vector<DenseSetSpec>& specs, const Condition& start, const Universe& u,
                                     std::mt19937_64* rng = nullptr) {
  GenericFragment g;
  g.chain.push_back(start);
  for (const auto& spec : specs) {
    Condition next = dense_extend(spec, g.chain.back(), u, rng);
    if (next != g.chain.back()) g.chain.push_back(std::move(next));
    g.met.emplace_back(spec, g.chain.size() - 1);
  }
  return g;
}

inline std::vector<DenseSetSpec> sock_specs(std::uint32_t pairs) {
  std::vector<DenseSetSpec> specs;
  for (std::uint32_t n = 0; n < pairs; ++n) specs.push_back(SockColumn{n});
  return specs;
}

/// Random start condition for the socks poset: each of the first `columns`
/// columns of each pair gets each sock set with probability 1/2 to a random bit.
inline Condition random_sock_condition(std::uint32_t pairs, std::uint64_t columns, std::mt19937_64& rng) {
  Condition p(PosetFamily::fin2(PointKind::AtomColumn));
  for (std::uint32_t n = 0; n < pairs; ++n) {
    for (std::uint64_t m = 0; m < columns; ++m) {
      for (Side s : {Side::Left, Side::Right}) {
        if (rng() % 2) p = p.with(column(Atom::sock(n, s), m), bit(rng() % 2));
      }
    }
  }
  return p;
}

/// The well-order of the socks read off a fragment.
struct SockOrder {
  /// m_n: least column where pair n carries both bits.
  std::vector<std::uint64_t> columns;
  /// All 2N socks in increasing order.
  std::vector<Atom> order;
  /// Position of each sock in `order`.
  std::map<Atom, std::size_t> rank;

  friend bool operator==(const SockOrder&, const SockOrder&) = default;
};

/// Orders pair n by comparing the two bits at column m_n; pairs by index.
inline SockOrder extract_sock_order(const GenericFragment& frag, std::uint32_t pairs) {
  SockOrder r;
  const Condition& g = frag.final_condition();
  for (std::uint32_t n = 0; n < pairs; ++n) {
    auto m = sock_column_with_both_bits(g, n);
    if (!m) throw LabError(ErrorCode::NotGenericEnough, "D_" + std::to_string(n) + " not met");
    const Atom a = Atom::sock(n, Side::Left);
    const Atom b = Atom::sock(n, Side::Right);
    const bool a_first = std::get<Bit>(*g.at(column(a, *m))).b < std::get<Bit>(*g.at(column(b, *m))).b;
    r.columns.push_back(*m);
    r.order.push_back(a_first ? a : b);
    r.order.push_back(a_first ? b : a);
  }
  for (std::size_t i = 0; i < r.order.size(); ++i) r.rank.emplace(r.order[i], i);
  return r;
}

/// Image of an extracted order under a permutation of the socks.
inline SockOrder transport(const Permutation& pi, const SockOrder& o) {
  SockOrder r;
  r.columns = o.columns;
  for (const auto& a : o.order) r.order.push_back(pi(a));
  for (const auto& [a, k] : o.rank) r.rank.emplace(pi(a), k);
  return r;
}

/// Length-N string of second coordinates at 0..N-1.
inline std::string extract_bits(const GenericFragment& frag, std::uint64_t n) {
  const Condition& g = frag.final_condition();
  if (g.family().kind != FamilyKind::FinPi1Inj) throw LabError(ErrorCode::FamilyMismatch, "needs Fin_pi1-inj");
  std::string out;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto v = g.at(nat(i));
    if (!v) throw LabError(ErrorCode::NotGenericEnough, "coordinate " + std::to_string(i) + " not in the domain");
    out += std::to_string(std::get<PairVal>(*v).second);
  }
  return out;
}

/// The map i -> second coordinate, checked to cover every beta in the target.
inline std::map<std::uint64_t, std::uint64_t> extract_surjection(const GenericFragment& frag,
                                                                 const std::set<std::uint64_t>& target) {
  const Condition& g = frag.final_condition();
  if (g.family().kind != FamilyKind::FinPi1Inj) throw LabError(ErrorCode::FamilyMismatch, "needs Fin_pi1-inj");
  std::map<std::uint64_t, std::uint64_t> f;
  std::set<std::uint64_t> range;
  for (const auto& [pt, v] : g.entries()) {
    const auto beta = std::get<PairVal>(v).second;
    f.emplace(std::get<NatPoint>(pt).n, beta);
    range.insert(beta);
  }
  for (auto beta : target) {
    if (!range.contains(beta)) throw LabError(ErrorCode::NotGenericEnough, "value " + std::to_string(beta) + " not hit");
  }
  return f;
}

}  // namespace forcinglab
