#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forcinglab/action.hpp"

namespace forcinglab {

/// Raised when an object is not fixed by the pointwise stabilizer of the
/// claimed support. `witness` is a generator of that stabilizer that moves it.
class NotSupportedError : public LabError {
 public:
  NotSupportedError(Permutation witness, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : LabError(ErrorCode::NotSupported, what + " (moved by " + to_string(witness) + ")"),
        witness_(std::move(witness)),
        index_(index) {}

  const Permutation& witness() const { return witness_; }
  /// Position in a sequence, when the offending object is a sequence member.
  std::optional<std::size_t> index() const { return index_; }

 private:
  Permutation witness_;
  std::optional<std::size_t> index_;
};

/// Minimum number of atoms outside atoms(obj) and S that a support test needs.
inline constexpr std::size_t kFreshnessMargin = 2;

namespace detail {

inline std::size_t count_fresh(GroupSpec g, const Universe& u, const std::set<Atom>& obj_atoms, const Support& s) {
  // Every atom of obj and S lies in the universe (checked by the caller).
  const bool plain = g == GroupSpec::FullSymmetric;
  std::size_t total = plain ? u.plain_atoms : 2 * std::size_t{u.sock_pairs};
  for (const auto& a : s) {
    if (a.is_plain() == plain) --total;
  }
  for (const auto& a : obj_atoms) {
    if (a.is_plain() == plain && !s.contains(a)) --total;
  }
  return total;
}

}  // namespace detail

/// Generators of the subgroup fixing S pointwise, restricted to the universe,
/// in canonical order. Transpositions of non-S plain atoms for the full
/// symmetric group, swaps of untouched pairs for the socks group.
inline std::vector<Permutation> stabilizer_generators(const Support& s, GroupSpec g, const Universe& u) {
  std::vector<Permutation> gens;
  if (g == GroupSpec::FullSymmetric) {
    std::vector<Atom> free;
    for (const auto& a : u.plain()) {
      if (!s.contains(a)) free.push_back(a);
    }
    for (std::size_t i = 0; i < free.size(); ++i) {
      for (std::size_t j = i + 1; j < free.size(); ++j) gens.push_back(Permutation::transposition(free[i], free[j]));
    }
  } else {
    for (std::uint32_t n = 0; n < u.sock_pairs; ++n) {
      if (!s.contains(Atom::sock(n, Side::Left)) && !s.contains(Atom::sock(n, Side::Right))) {
        gens.push_back(Permutation::sock_swap(n));
      }
    }
  }
  return gens;
}

/// First stabilizer generator (canonical order) that moves `obj`, or nullopt
/// when `obj` is S-supported. Enforces the freshness margin.
template <class T>
std::optional<Permutation> find_support_violation(const T& obj, const Support& s, GroupSpec g, const Universe& u) {
  const auto obj_atoms = atoms_of(obj);
  for (const auto* atoms : {&obj_atoms, &s}) {
    for (const auto& a : *atoms) {
      if (!u.contains(a)) throw LabError(ErrorCode::AtomOutsideUniverse, to_string(a));
    }
  }
  const auto fresh = detail::count_fresh(g, u, obj_atoms, s);
  if (fresh < kFreshnessMargin) {
    throw LabError(ErrorCode::InsufficientUniverse,
                   "need " + std::to_string(kFreshnessMargin) + " fresh atoms beyond the object and support, have " +
                       std::to_string(fresh));
  }
  // Same canonical order as stabilizer_generators, but a generator touching
  // no atom of obj fixes it structurally and is never built.
  if (g == GroupSpec::FullSymmetric) {
    std::vector<Atom> free;
    for (const auto& a : u.plain()) {
      if (!s.contains(a)) free.push_back(a);
    }
    for (std::size_t i = 0; i < free.size(); ++i) {
      const bool first_in = obj_atoms.contains(free[i]);
      for (std::size_t j = i + 1; j < free.size(); ++j) {
        if (!first_in && !obj_atoms.contains(free[j])) continue;
        auto gen = Permutation::transposition(free[i], free[j]);
        if (act(gen, obj) != obj) return gen;
      }
    }
    return std::nullopt;
  }
  for (const auto& gen : stabilizer_generators(s, g, u)) {
    bool touches = std::any_of(gen.moved().begin(), gen.moved().end(),
                               [&](const auto& kv) { return obj_atoms.contains(kv.first); });
    if (!touches) continue;
    if (act(gen, obj) != obj) return gen;
  }
  return std::nullopt;
}

template <class T>
bool is_supported_by(const T& obj, const Support& s, GroupSpec g, const Universe& u) {
  return !find_support_violation(obj, s, g, u).has_value();
}

/// A selector on a family of sets: maps each set to one of its elements.
using Selector = std::map<std::set<Atom>, Atom>;

struct ChoiceRefutation {
  std::uint32_t pair = 0;
  Permutation swap;
  /// Both candidate selectors {A_n -> left}, {A_n -> right}, each moved by swap.
  std::vector<Selector> moved_selectors;
};

/// Finds the least sock pair untouched by S. Its swap fixes S pointwise yet
/// moves every selector on that pair, so no S-supported choice function exists.
inline ChoiceRefutation refute_choice(const Support& s, std::uint32_t n_pairs) {
  for (std::uint32_t n = 0; n < n_pairs; ++n) {
    const auto pair = sock_pair(n);
    if (std::any_of(pair.begin(), pair.end(), [&](const Atom& a) { return s.contains(a); })) continue;

    ChoiceRefutation r{n, Permutation::sock_swap(n), {}};
    if (!r.swap.fixes_pointwise(s) || !r.swap.in_group(GroupSpec::SocksGroup)) {
      throw std::logic_error("pair swap must fix an untouching support");
    }
    for (const auto& choice : pair) {
      Selector sel{{pair, choice}};
      if (act(r.swap, sel) == sel) throw std::logic_error("pair swap fixed a selector");
      r.moved_selectors.push_back(std::move(sel));
    }
    return r;
  }
  throw LabError(ErrorCode::NoUntouchedPair, "every one of the " + std::to_string(n_pairs) + " pairs meets the support");
}

/// A map Atom -> natural that takes `default_value` on all but finitely many
/// atoms. Kept canonical: explicit entries never equal the default.
class SupportedFunction {
 public:
  explicit SupportedFunction(std::uint64_t default_value = 0) : default_(default_value) {}
  SupportedFunction(std::map<Atom, std::uint64_t> values, std::uint64_t default_value) : default_(default_value) {
    for (const auto& [a, v] : values) set(a, v);
  }

  void set(const Atom& a, std::uint64_t v) {
    if (v == default_) {
      values_.erase(a);
    } else {
      values_[a] = v;
    }
  }

  std::uint64_t operator()(const Atom& a) const {
    auto it = values_.find(a);
    return it == values_.end() ? default_ : it->second;
  }

  const std::map<Atom, std::uint64_t>& exceptions() const { return values_; }
  std::uint64_t default_value() const { return default_; }

  friend bool operator==(const SupportedFunction&, const SupportedFunction&) = default;

  friend SupportedFunction act(const Permutation& pi, const SupportedFunction& f) {
    return SupportedFunction(forcinglab::act(pi, f.values_), f.default_);
  }
  friend void collect_atoms(const SupportedFunction& f, std::set<Atom>& out) {
    for (const auto& [a, v] : f.values_) out.insert(a);
  }

 private:
  std::map<Atom, std::uint64_t> values_;
  std::uint64_t default_;
};

struct FunctionVerdict {
  std::uint64_t off_support_constant = 0;
  std::set<std::uint64_t> range;
  /// Always false: the range of a supported function is finite.
  bool onto_omega = false;
};

/// Orbit argument for the amorphous proxy: an S-supported f must be constant
/// off S, so its range is f[S] plus one value and f cannot be onto omega.
inline FunctionVerdict classify_supported_function(const SupportedFunction& f, const Support& s, const Universe& u) {
  if (auto w = find_support_violation(f, s, GroupSpec::FullSymmetric, u)) {
    throw NotSupportedError(*w, "function is not supported by the given set");
  }
  FunctionVerdict v;
  std::optional<std::uint64_t> constant;
  for (const auto& a : u.plain()) {
    if (s.contains(a)) continue;
    if (constant && *constant != f(a)) throw std::logic_error("supported function not constant off its support");
    constant = f(a);
  }
  // The freshness margin guarantees at least two off-support atoms.
  v.off_support_constant = constant.value_or(f.default_value());
  for (const auto& a : s) v.range.insert(f(a));
  v.range.insert(v.off_support_constant);
  return v;
}

}  // namespace forcinglab
