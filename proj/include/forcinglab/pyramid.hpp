#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "forcinglab/names.hpp"
#include "forcinglab/poset.hpp"

namespace forcinglab {

/// Disjoint levels P_0..P_(depth-1) in which every member of a non-final
/// level has something below it in a later level.
///
/// A closed pyramid consists of exactly the materialized levels. An open
/// pyramid is the truncation of a pyramid with a level for every natural
/// number; `level_of` then names the level of any element, including
/// elements past the materialized depth.
template <class E>
struct Pyramid {
  std::vector<std::vector<E>> levels;
  std::function<std::optional<std::size_t>(const E&)> level_of;

  std::size_t depth() const { return levels.size(); }
  bool open() const { return static_cast<bool>(level_of); }
};

/// Singleton levels {p_0}, {p_1}, ... of a strictly descending chain.
template <class E>
Pyramid<E> singleton_pyramid(const std::vector<E>& chain) {
  Pyramid<E> p;
  for (const auto& e : chain) p.levels.push_back({e});
  return p;
}

/// P_n = all conditions of Fin(omega, 2) with exactly n entries, materialized
/// inside the bounds to the given depth. Open: the levels go on forever.
inline Pyramid<Condition> cohen_level_pyramid(const ConditionSpace& space, std::size_t depth) {
  Pyramid<Condition> p;
  p.levels.resize(depth);
  for (const auto& c : space.elements()) {
    if (c.size() < depth) p.levels[c.size()].push_back(c);
  }
  p.level_of = [](const Condition& c) -> std::optional<std::size_t> { return c.size(); };
  return p;
}

template <class E>
struct PyramidViolation {
  std::size_t level = 0;
  E member;
  std::string reason;
};

namespace detail {

template <FinitePoset P>
std::map<typename P::value_type, std::size_t> level_index(const Pyramid<typename P::value_type>& pyr) {
  std::map<typename P::value_type, std::size_t> idx;
  for (std::size_t n = 0; n < pyr.depth(); ++n) {
    for (const auto& e : pyr.levels[n]) idx.emplace(e, n);
  }
  return idx;
}

template <class E>
std::optional<std::size_t> level_lookup(const Pyramid<E>& pyr, const std::map<E, std::size_t>& idx, const E& e) {
  if (auto it = idx.find(e); it != idx.end()) return it->second;
  if (pyr.open()) {
    auto n = pyr.level_of(e);
    if (n && *n >= pyr.depth()) return n;
  }
  return std::nullopt;
}

}  // namespace detail

/// Checks disjointness and, for every member below the last level, that some
/// element of a later level lies below it (searched downward in the poset).
template <FinitePoset P>
std::optional<PyramidViolation<typename P::value_type>> validate_pyramid(const P& poset,
                                                                         const Pyramid<typename P::value_type>& pyr,
                                                                         const Budget& budget = {}) {
  using E = typename P::value_type;
  std::map<E, std::size_t> idx;
  for (std::size_t n = 0; n < pyr.depth(); ++n) {
    for (const auto& e : pyr.levels[n]) {
      auto [it, inserted] = idx.emplace(e, n);
      if (!inserted) {
        return PyramidViolation<E>{n, e, "also a member of level " + std::to_string(it->second)};
      }
      if (pyr.open() && pyr.level_of(e) != n) {
        return PyramidViolation<E>{n, e, "level oracle disagrees with the materialized level"};
      }
    }
  }
  if (pyr.depth() == 0) return std::nullopt;

  for (std::size_t n = 0; n + 1 < pyr.depth(); ++n) {
    for (const auto& p : pyr.levels[n]) {
      // Breadth-first search below p for a member of a later level.
      std::set<E> visited{p};
      std::deque<E> queue{p};
      bool found = false;
      while (!queue.empty() && !found) {
        budget.check("validate_pyramid");
        E cur = std::move(queue.front());
        queue.pop_front();
        for (auto& q : poset.successors(cur)) {
          if (!visited.insert(q).second) continue;
          auto k = detail::level_lookup(pyr, idx, q);
          if (k && *k > n) {
            found = true;
            break;
          }
          queue.push_back(std::move(q));
        }
      }
      if (!found) return PyramidViolation<E>{n, p, "no later-level member lies below it"};
    }
  }
  return std::nullopt;
}

template <class E>
struct Capstone {
  E q;
  /// (k, witness): a member of a level >= k lying above q, for each k < depth.
  std::vector<std::pair<std::size_t, E>> witnesses;
};

struct NoneWithinBudget {
  std::string reason;
  /// Deepest level that any candidate lies below, when known.
  std::optional<std::size_t> deepest_witnessed_level;
};

template <class E>
using CapstoneSearch = std::variant<Capstone<E>, NoneWithinBudget>;

/// Searches the poset, in canonical order, for a capstone q: for every k
/// there is a member p of some level >= k with q <= p.
///
/// For a closed pyramid "every k" means every k < depth. For an open pyramid
/// it means every natural number k; since each candidate lies below only
/// finitely many elements of a finite poset, the search then reports the
/// deepest level any candidate reaches.
template <FinitePoset P>
CapstoneSearch<typename P::value_type> find_capstone(const P& poset, const Pyramid<typename P::value_type>& pyr,
                                                     const Budget& budget = {}) {
  using E = typename P::value_type;
  const auto idx = detail::level_index<P>(pyr);

  if (pyr.open()) {
    // Every element is a candidate below itself, so the deepest level any
    // candidate reaches is the deepest level of any element.
    std::size_t deepest = 0;
    bool any = false;
    for (const auto& p : poset.elements()) {
      budget.check("find_capstone");
      if (auto k = detail::level_lookup(pyr, idx, p)) {
        deepest = any ? std::max(deepest, *k) : *k;
        any = true;
      }
    }
    NoneWithinBudget r;
    r.reason = "open pyramid: levels continue past every bound, but no candidate lies below a member of level " +
               std::to_string(any ? deepest + 1 : 0) + " or later";
    if (any) r.deepest_witnessed_level = deepest;
    return r;
  }

  for (const auto& q : poset.elements()) {
    budget.check("find_capstone");
    // Scan from the deepest level; the witness for k is the nearest member
    // above q in a level >= k.
    std::vector<std::pair<std::size_t, E>> witnesses;
    std::optional<std::pair<std::size_t, E>> nearest;
    for (std::size_t n = pyr.depth(); n-- > 0;) {
      for (const auto& p : pyr.levels[n]) {
        if (poset.leq(q, p)) {
          nearest = std::make_pair(n, p);
          break;
        }
      }
      if (!nearest) break;
      witnesses.push_back(*nearest);
    }
    if (witnesses.size() == pyr.depth()) {
      std::reverse(witnesses.begin(), witnesses.end());
      for (std::size_t k = 0; k < witnesses.size(); ++k) witnesses[k].first = k;
      return Capstone<E>{q, std::move(witnesses)};
    }
  }
  return NoneWithinBudget{"no candidate lies below a member of the last level", std::nullopt};
}

/// Picks, for a member p of level n, a later level k and a member q <= p.
template <class E>
using LevelSelector = std::function<std::optional<std::pair<std::size_t, E>>(std::size_t, const E&)>;

/// Maps a descending chain to a lower bound, if it has one.
template <class E>
using LowerBoundOracle = std::function<std::optional<E>(std::span<const E>)>;

/// Deterministic selector over the materialized levels: least later level,
/// first member in canonical order.
template <FinitePoset P>
LevelSelector<typename P::value_type> canonical_selector(const P& poset, const Pyramid<typename P::value_type>& pyr) {
  using E = typename P::value_type;
  return [&poset, &pyr](std::size_t n, const E& p) -> std::optional<std::pair<std::size_t, E>> {
    for (std::size_t k = n + 1; k < pyr.depth(); ++k) {
      for (const auto& q : pyr.levels[k]) {
        if (poset.leq(q, p)) return std::make_pair(k, q);
      }
    }
    return std::nullopt;
  };
}

/// First element of the poset, in canonical order, below the whole chain.
template <FinitePoset P>
LowerBoundOracle<typename P::value_type> exhaustive_lower_bound(const P& poset) {
  using E = typename P::value_type;
  return [&poset](std::span<const E> chain) -> std::optional<E> {
    for (const auto& q : poset.elements()) {
      bool ok = true;
      for (const auto& p : chain) {
        if (!poset.leq(q, p)) {
          ok = false;
          break;
        }
      }
      if (ok) return q;
    }
    return std::nullopt;
  };
}

/// Cohen levels |dom p| = n: extend by the least undefined natural with bit 0.
/// Ignores the bounds, so the chain eventually leaves any finite space.
inline LevelSelector<Condition> cohen_extension_selector() {
  return [](std::size_t n, const Condition& p) -> std::optional<std::pair<std::size_t, Condition>> {
    std::uint64_t m = 0;
    while (p.defines(nat(m))) ++m;
    return std::make_pair(n + 1, p.with(nat(m), bit(0)));
  };
}

template <class E>
struct CapstoneConstruction {
  /// (k_n, p_n) with k strictly increasing and p descending.
  std::vector<std::pair<std::size_t, E>> chain;
  std::optional<Capstone<E>> capstone;
  bool oracle_failed = false;
  std::string failure;

  bool ok() const { return capstone.has_value(); }
};

/// Builds p_n in P_(k_n) with the selector, asks the oracle for a lower
/// bound of the chain, and checks that the bound is a capstone witnessed by
/// the p_n. For an open pyramid the chain is followed until it leaves the
/// poset. A missing lower bound is reported as OracleFailed in `failure`.
template <FinitePoset P>
CapstoneConstruction<typename P::value_type> capstone_from_chain(const P& poset,
                                                                 const Pyramid<typename P::value_type>& pyr,
                                                                 const LevelSelector<typename P::value_type>& selector,
                                                                 const LowerBoundOracle<typename P::value_type>& oracle,
                                                                 const Budget& budget = {}) {
  using E = typename P::value_type;
  if (auto v = validate_pyramid(poset, pyr, budget)) {
    throw LabError(ErrorCode::InvalidArgument, "not a pyramid: level " + std::to_string(v->level) + ": " + v->reason);
  }
  CapstoneConstruction<E> r;
  for (std::size_t n = 0; n < pyr.depth(); ++n) {
    if (!pyr.levels[n].empty()) {
      r.chain.emplace_back(n, pyr.levels[n].front());
      break;
    }
  }
  if (r.chain.empty()) {
    r.failure = "pyramid has no members";
    return r;
  }

  const std::size_t cap = poset.elements().size() + pyr.depth() + 1;
  bool escaped = false;
  while (r.chain.size() < cap) {
    budget.check("capstone_from_chain");
    const auto& [k, p] = r.chain.back();
    if (!pyr.open() && k + 1 >= pyr.depth()) break;
    auto next = selector(k, p);
    if (!next) {
      if (pyr.open()) break;
      throw LabError(ErrorCode::InvalidArgument, "selector found no later-level member below a non-final member");
    }
    if (next->first <= k || !poset.leq(next->second, p)) {
      throw LabError(ErrorCode::InvalidArgument, "selector broke the descending/increasing contract");
    }
    r.chain.push_back(std::move(*next));
    if (!poset.contains(r.chain.back().second)) {
      escaped = true;
      break;
    }
  }

  std::vector<E> elems;
  for (const auto& [k, p] : r.chain) elems.push_back(p);
  auto q = oracle(elems);
  if (!q) {
    r.oracle_failed = true;
    r.failure = std::string("OracleFailed: no lower bound in bounds") +
                (escaped ? " (the chain leaves the bounds at " + poset.describe(elems.back()) + ")" : "");
    return r;
  }
  for (const auto& p : elems) {
    if (!poset.leq(*q, p)) {
      r.failure = "oracle answer is not below the chain";
      return r;
    }
  }
  if (pyr.open()) {
    r.failure = "open pyramid: a bounded lower bound of a finite chain does not witness every level";
    return r;
  }
  Capstone<E> cap_result{*q, {}};
  for (std::size_t k = 0; k < pyr.depth(); ++k) {
    auto it = std::find_if(r.chain.begin(), r.chain.end(), [&](const auto& kp) { return kp.first >= k; });
    if (it == r.chain.end()) {
      r.failure = "chain never reaches level " + std::to_string(k);
      return r;
    }
    cap_result.witnesses.emplace_back(k, it->second);
  }
  r.capstone = std::move(cap_result);
  return r;
}

// ---------------------------------------------------------------------------
// Names for sequences omega -> Ord

/// A nice name read as x: omega -> Ord (coordinate n decides x(n)), examined
/// to the given depth below the root condition p*.
struct NameOracle {
  NiceName name;
  std::size_t depth = 0;
  Condition root;
};

/// Values of x(0..n-1) if p decides all of them.
inline std::optional<std::vector<std::uint64_t>> decided_prefix(const Condition& p, const NiceName& name,
                                                                std::size_t n) {
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = decides(p, name, i);
    if (!v) return std::nullopt;
    s.push_back(*v);
  }
  return s;
}

/// Level n: p decides x restricted to n but not x(n). nullopt level: p
/// decides every coordinate below the depth.
struct Classification {
  std::optional<std::size_t> level;
  bool decides_all() const { return !level.has_value(); }
};

inline Classification classify_condition(const Condition& p, const NameOracle& oracle) {
  if (!leq(p, oracle.root)) throw LabError(ErrorCode::InvalidArgument, "condition is not below the root");
  if (oracle.depth > oracle.name.arity) throw LabError(ErrorCode::OutOfArity, "depth exceeds the name's arity");
  for (std::size_t n = 0; n < oracle.depth; ++n) {
    if (!decides(p, oracle.name, n)) return {n};
  }
  return {};
}

struct NamePyramid {
  Pyramid<Condition> pyramid;
  std::vector<Condition> decides_all;
  std::size_t cone_size = 0;
};

/// P_n = conditions below p* (inside the space) that decide x up to n but
/// not x(n). Together with the members that decide everything to depth they
/// partition the cone below p*.
inline NamePyramid pyramid_from_name(const ConditionSpace& space, const NameOracle& oracle) {
  NamePyramid r;
  r.pyramid.levels.resize(oracle.depth);
  for (const auto& p : space.elements()) {
    if (!leq(p, oracle.root)) continue;
    ++r.cone_size;
    auto c = classify_condition(p, oracle);
    if (c.decides_all()) {
      r.decides_all.push_back(p);
    } else {
      r.pyramid.levels[*c.level].push_back(p);
    }
  }
  std::set<Condition> seen(r.decides_all.begin(), r.decides_all.end());
  std::size_t total = r.decides_all.size();
  for (const auto& level : r.pyramid.levels) {
    total += level.size();
    seen.insert(level.begin(), level.end());
  }
  if (total != r.cone_size || seen.size() != r.cone_size) throw std::logic_error("name levels do not partition the cone");
  return r;
}

/// Two conditions forcing different values for x restricted to n.
class IncompatiblePrefixesError : public LabError {
 public:
  IncompatiblePrefixesError(std::size_t n, Condition first, std::vector<std::uint64_t> first_prefix, Condition second,
                            std::vector<std::uint64_t> second_prefix, const std::string& context)
      : LabError(ErrorCode::IncompatiblePrefixes,
                 "length " + std::to_string(n) + ": " + to_string(first) + " and " + to_string(second) + " " + context),
        n_(n),
        first_(std::move(first)),
        second_(std::move(second)),
        first_prefix_(std::move(first_prefix)),
        second_prefix_(std::move(second_prefix)) {}

  std::size_t length() const { return n_; }
  const Condition& first() const { return first_; }
  const Condition& second() const { return second_; }
  const std::vector<std::uint64_t>& first_prefix() const { return first_prefix_; }
  const std::vector<std::uint64_t>& second_prefix() const { return second_prefix_; }

 private:
  std::size_t n_;
  Condition first_, second_;
  std::vector<std::uint64_t> first_prefix_, second_prefix_;
};

/// Reads off s* from q acting as a capstone: for each n <= depth the prefix
/// s_n forced by the members p with q <= p that decide x up to n. The s_n
/// must agree and extend each other.
///
/// When nothing above q decides x up to n, q does not play the capstone
/// role. If two strengthenings of q inside the space force different
/// prefixes of length n, that clash is reported as IncompatiblePrefixes;
/// otherwise the result is NoWitness(n).
inline std::vector<std::uint64_t> evaluate_via_capstone(const ConditionSpace& space, const Condition& q,
                                                        const NameOracle& oracle) {
  std::vector<std::uint64_t> prev;
  for (std::size_t n = 1; n <= oracle.depth; ++n) {
    std::optional<std::pair<Condition, std::vector<std::uint64_t>>> witness;
    for (const auto& p : space.above(q)) {
      auto s = decided_prefix(p, oracle.name, n);
      if (!s) continue;
      if (!witness) {
        witness.emplace(p, *s);
      } else if (witness->second != *s) {
        throw IncompatiblePrefixesError(n, witness->first, witness->second, p, *s,
                                        "lie above q yet force different prefixes (malformed name)");
      }
    }
    if (!witness) {
      std::map<std::vector<std::uint64_t>, Condition> by_prefix;
      for (const auto& r : space.elements()) {
        if (!leq(r, q)) continue;
        auto s = decided_prefix(r, oracle.name, n);
        if (!s) continue;
        by_prefix.emplace(*s, r);
        if (by_prefix.size() == 2) {
          auto a = by_prefix.begin();
          auto b = std::next(a);
          // Report in discovery order: the earlier canonical condition first.
          if (b->second < a->second) std::swap(a, b);
          throw IncompatiblePrefixesError(n, a->second, a->first, b->second, b->first,
                                          "extend q and force different prefixes, so q decides nothing here");
        }
      }
      throw LabError(ErrorCode::NoWitness, "nothing above " + to_string(q) + " decides x up to " + std::to_string(n));
    }
    if (!std::equal(prev.begin(), prev.end(), witness->second.begin())) {
      throw IncompatiblePrefixesError(n, witness->first, witness->second, q, prev, "extend inconsistently");
    }
    prev = witness->second;
  }
  return prev;
}

/// Coordinate n is decided by {n -> 0} (value 0) and {n -> 1} (value 1).
inline NiceName cohen_bit_name(std::size_t arity) {
  NiceName name{arity, {}};
  const auto fam = PosetFamily::fin2(PointKind::Nat);
  for (std::size_t n = 0; n < arity; ++n) {
    name.coords.push_back({{Condition(fam, {{nat(n), bit(0)}}), 0}, {Condition(fam, {{nat(n), bit(1)}}), 1}});
  }
  return name;
}

/// Every coordinate decided by the empty condition.
inline NiceName constant_name(const PosetFamily& fam, const std::vector<std::uint64_t>& values) {
  NiceName name{values.size(), {}};
  for (auto v : values) name.coords.push_back({{Condition(fam), v}});
  return name;
}

}  // namespace forcinglab
