#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "forcinglab/poset.hpp"
#include "forcinglab/support.hpp"

namespace forcinglab {

/// A descending sequence, either listed or produced by a deterministic rule
/// p_(i+1) = step(p_i, i). Rule chains can be continued past `length`.
template <class E>
struct ChainGen {
  struct Explicit {
    std::vector<E> elements;
  };
  struct Rule {
    E seed;
    std::function<E(const E&, std::size_t)> step;
    std::size_t length = 0;
    std::string descriptor;
  };

  std::variant<Explicit, Rule> gen;

  static ChainGen listed(std::vector<E> elements) { return {Explicit{std::move(elements)}}; }
  static ChainGen rule(E seed, std::function<E(const E&, std::size_t)> step, std::size_t length,
                       std::string descriptor = "rule") {
    return {Rule{std::move(seed), std::move(step), length, std::move(descriptor)}};
  }

  bool is_rule() const { return std::holds_alternative<Rule>(gen); }
};

/// Rule p_(n+1) = p_n + {n -> bits[n mod |bits|]} in Fin(omega, 2).
inline ChainGen<Condition> append_bits_chain(const std::string& bits, std::size_t length) {
  if (bits.empty() || bits.find_first_not_of("01") != std::string::npos) {
    throw LabError(ErrorCode::InvalidArgument, "bit pattern must be a nonempty 0/1 string");
  }
  return ChainGen<Condition>::rule(
      Condition(PosetFamily::fin2(PointKind::Nat)),
      [bits](const Condition& p, std::size_t i) { return p.with(nat(i), bit(bits[i % bits.size()] == '1')); }, length,
      "append-bits:" + bits);
}

/// Rule p_(n+1) = p_n + {n -> atoms[n]} in Fin_inj(omega, atoms); stationary
/// once the list is used up.
inline ChainGen<Condition> append_atoms_chain(std::vector<Atom> atoms, std::size_t length) {
  return ChainGen<Condition>::rule(
      Condition(PosetFamily::fin_inj()),
      [atoms](const Condition& p, std::size_t i) { return i < atoms.size() ? p.with(nat(i), atom_val(atoms[i])) : p; },
      length, "append-atoms");
}

/// The first `length` (or all listed) elements.
template <class E>
std::vector<E> elements_of(const ChainGen<E>& chain) {
  std::vector<E> out;
  if (auto* e = std::get_if<typename ChainGen<E>::Explicit>(&chain.gen)) {
    out = e->elements;
  } else {
    const auto& r = std::get<typename ChainGen<E>::Rule>(chain.gen);
    if (r.length > 0) out.push_back(r.seed);
    while (out.size() < r.length) out.push_back(r.step(out.back(), out.size() - 1));
  }
  return out;
}

/// Materializes the chain and checks that it descends in the poset.
template <FinitePoset P>
std::vector<typename P::value_type> materialize(const P& poset, const ChainGen<typename P::value_type>& chain) {
  auto out = elements_of(chain);
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!poset.leq(out[i], out[i - 1])) {
      throw LabError(ErrorCode::InvalidChain, "element " + std::to_string(i) + " is not below its predecessor");
    }
  }
  return out;
}

struct Stabilized {
  std::size_t index = 0;
};
template <class E>
struct LowerBound {
  E bound;
};
struct NoBoundWithinBudget {
  std::string reason;
};

template <class E>
using SigmaVerdict = std::variant<Stabilized, LowerBound<E>, NoBoundWithinBudget>;

/// Bounded sigma-closedness probe for one chain. Reports observed constancy,
/// a lower bound inside the poset, or that the bounded search found none; it
/// never claims that the poset fails to be sigma-closed.
///
/// A chain not seen to stabilize is treated as the prefix of an infinite
/// strictly descending sequence: rule chains are continued past their length
/// while they stay inside the poset, and a lower bound of a listed chain must
/// lie strictly below its last element.
template <FinitePoset P>
SigmaVerdict<typename P::value_type> check_sigma_closed_bounded(const P& poset,
                                                                const ChainGen<typename P::value_type>& chain,
                                                                const Budget& budget = {}) {
  using E = typename P::value_type;
  const auto elems = materialize(poset, chain);
  if (elems.empty()) throw LabError(ErrorCode::InvalidChain, "empty chain");

  std::size_t tail = 0;
  for (std::size_t i = 1; i < elems.size(); ++i) {
    if (!(elems[i] == elems[i - 1])) tail = i;
  }
  if (elems.size() == 1 || tail + 1 < elems.size()) return Stabilized{tail};

  if (chain.is_rule()) {
    const auto& r = std::get<typename ChainGen<E>::Rule>(chain.gen);
    E cur = elems.back();
    const std::size_t limit = poset.elements().size() + 1;
    for (std::size_t i = elems.size() - 1, steps = 0; steps < limit; ++i, ++steps) {
      budget.check("sigma continuation");
      E next = r.step(cur, i);
      if (!poset.leq(next, cur)) throw LabError(ErrorCode::InvalidChain, "rule step is not descending");
      if (next == cur) return LowerBound<E>{cur};
      if (!poset.contains(next)) {
        return NoBoundWithinBudget{"continuation element " + std::to_string(i + 1) + " = " + poset.describe(next) +
                                   " leaves the bounds, so no bounded condition lies below the whole chain"};
      }
      cur = std::move(next);
    }
    return NoBoundWithinBudget{"continuation did not settle within the poset size"};
  }

  for (const auto& q : poset.elements()) {
    budget.check("sigma lower bound");
    if (q == elems.back()) continue;
    bool below_all = true;
    for (const auto& p : elems) {
      if (!poset.leq(q, p)) {
        below_all = false;
        break;
      }
    }
    if (below_all) return LowerBound<E>{q};
  }
  return NoBoundWithinBudget{"no element of the poset lies strictly below the last listed element"};
}

// ---------------------------------------------------------------------------
// Support stabilization for Fin_inj(omega, atoms)

struct StabilizationStep {
  std::size_t index = 0;            // position of the strict step in the chain
  std::uint64_t first_new_point = 0;  // s(n)
  Atom value;                       // x_n = p(s(n))
};

struct StabilizationTrace {
  std::vector<StabilizationStep> steps;
  std::size_t strict_steps = 0;
  /// Index from which the chain is constant.
  std::size_t stable_from = 0;
};

/// Along an S-supported descending chain, the first new domain point s(n) of
/// each strict step carries a value x_n in S, and the x_n are distinct; so
/// there are at most |S| strict steps.
inline StabilizationTrace support_stabilization(const std::vector<Condition>& chain, const Support& s,
                                                const Universe& u) {
  StabilizationTrace t;
  std::set<Atom> seen;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& p = chain[i];
    if (p.family().kind != FamilyKind::FinInj) throw LabError(ErrorCode::FamilyMismatch, "needs Fin_inj(omega, atoms)");
    if (auto viol = validate(p)) {
      throw LabError(ErrorCode::InvalidCondition, "chain element " + std::to_string(i) + ": " + viol->message);
    }
    if (auto w = find_support_violation(p, s, GroupSpec::FullSymmetric, u)) {
      throw NotSupportedError(*w, "chain element " + std::to_string(i) + " " + to_string(p), i);
    }
    if (i == 0 || p == chain[i - 1]) continue;
    if (!leq(p, chain[i - 1])) throw LabError(ErrorCode::InvalidChain, "element " + std::to_string(i) + " not below");
    std::optional<IndexPoint> first_new;
    for (const auto& [pt, v] : p.entries()) {
      if (!chain[i - 1].defines(pt)) {
        first_new = pt;
        break;
      }
    }
    const Atom x = std::get<AtomVal>(*p.at(*first_new)).atom;
    if (!s.contains(x)) throw std::logic_error("supported condition takes a value outside its support");
    if (!seen.insert(x).second) throw std::logic_error("injective chain repeated a value");
    t.steps.push_back({i, std::get<NatPoint>(*first_new).n, x});
    ++t.strict_steps;
    t.stable_from = i;
    if (t.strict_steps > s.size()) {
      throw LabError(ErrorCode::ChainTooLong, "more than |S| = " + std::to_string(s.size()) + " strict steps");
    }
  }
  return t;
}

inline StabilizationTrace support_stabilization(const ChainGen<Condition>& chain, const Support& s,
                                                const Universe& u) {
  return support_stabilization(elements_of(chain), s, u);
}

}  // namespace forcinglab
