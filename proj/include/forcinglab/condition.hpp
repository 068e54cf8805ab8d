#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "forcinglab/action.hpp"

namespace forcinglab {

// ---------------------------------------------------------------------------
// Index points and values

struct NatPoint {
  std::uint64_t n = 0;
  friend auto operator<=>(const NatPoint&, const NatPoint&) = default;
};
struct AtomPoint {
  Atom atom;
  friend auto operator<=>(const AtomPoint&, const AtomPoint&) = default;
};
struct AtomColumn {
  Atom atom;
  std::uint64_t column = 0;
  friend auto operator<=>(const AtomColumn&, const AtomColumn&) = default;
};

/// Domain element of a condition: a natural, an atom, or an (atom, column) pair.
using IndexPoint = std::variant<NatPoint, AtomPoint, AtomColumn>;

inline IndexPoint nat(std::uint64_t n) { return NatPoint{n}; }
inline IndexPoint at(const Atom& a) { return AtomPoint{a}; }
inline IndexPoint column(const Atom& a, std::uint64_t m) { return AtomColumn{a, m}; }

struct Bit {
  std::uint8_t b = 0;
  friend auto operator<=>(const Bit&, const Bit&) = default;
};
struct AtomVal {
  Atom atom;
  friend auto operator<=>(const AtomVal&, const AtomVal&) = default;
};
struct PairVal {
  Atom atom;
  std::uint64_t second = 0;
  friend auto operator<=>(const PairVal&, const PairVal&) = default;
};

/// Value of a condition: a bit, an atom, or an (atom, natural) pair.
using Value = std::variant<Bit, AtomVal, PairVal>;

inline Value bit(unsigned b) { return Bit{static_cast<std::uint8_t>(b)}; }
inline Value atom_val(const Atom& a) { return AtomVal{a}; }
inline Value pair_val(const Atom& a, std::uint64_t c) { return PairVal{a, c}; }

inline IndexPoint act(const Permutation& pi, const IndexPoint& p) {
  return std::visit(
      [&](const auto& x) -> IndexPoint {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NatPoint>) {
          return x;
        } else if constexpr (std::is_same_v<T, AtomPoint>) {
          return AtomPoint{pi(x.atom)};
        } else {
          return AtomColumn{pi(x.atom), x.column};
        }
      },
      p);
}
inline void collect_atoms(const IndexPoint& p, std::set<Atom>& out) {
  if (auto* a = std::get_if<AtomPoint>(&p)) out.insert(a->atom);
  if (auto* c = std::get_if<AtomColumn>(&p)) out.insert(c->atom);
}

inline Value act(const Permutation& pi, const Value& v) {
  if (auto* a = std::get_if<AtomVal>(&v)) return AtomVal{pi(a->atom)};
  if (auto* p = std::get_if<PairVal>(&v)) return PairVal{pi(p->atom), p->second};
  return v;
}
inline void collect_atoms(const Value& v, std::set<Atom>& out) {
  if (auto* a = std::get_if<AtomVal>(&v)) out.insert(a->atom);
  if (auto* p = std::get_if<PairVal>(&v)) out.insert(p->atom);
}

inline std::string to_string(const IndexPoint& p) {
  if (auto* n = std::get_if<NatPoint>(&p)) return std::to_string(n->n);
  if (auto* a = std::get_if<AtomPoint>(&p)) return to_string(a->atom);
  const auto& c = std::get<AtomColumn>(p);
  return "(" + to_string(c.atom) + "," + std::to_string(c.column) + ")";
}

inline std::string to_string(const Value& v) {
  if (auto* b = std::get_if<Bit>(&v)) return std::to_string(b->b);
  if (auto* a = std::get_if<AtomVal>(&v)) return to_string(a->atom);
  const auto& p = std::get<PairVal>(v);
  return "(" + to_string(p.atom) + "," + std::to_string(p.second) + ")";
}

// ---------------------------------------------------------------------------
// Poset families

enum class FamilyKind : std::uint8_t {
  Fin2,       // Fin(D, 2)
  FinInj,     // Fin_inj(omega, atoms)
  FinSeqInj,  // FinSeq_inj(atoms): injective sequences, domain an initial segment
  FinPi1Inj,  // Fin_{pi1-inj}(omega, atoms x C)
};

enum class PointKind : std::uint8_t { Nat, Atom, AtomColumn };

struct PosetFamily {
  FamilyKind kind = FamilyKind::Fin2;
  /// Shape of the index points; Nat for every family except Fin2 over atoms.
  PointKind points = PointKind::Nat;
  /// C, the finite stand-in for omega_1 in FinPi1Inj; unused elsewhere.
  std::uint64_t value_bound = 0;

  static PosetFamily fin2(PointKind points) { return {FamilyKind::Fin2, points, 0}; }
  static PosetFamily fin_inj() { return {FamilyKind::FinInj, PointKind::Nat, 0}; }
  static PosetFamily finseq_inj() { return {FamilyKind::FinSeqInj, PointKind::Nat, 0}; }
  static PosetFamily fin_pi1_inj(std::uint64_t c) { return {FamilyKind::FinPi1Inj, PointKind::Nat, c}; }

  friend bool operator==(const PosetFamily&, const PosetFamily&) = default;
  friend auto operator<=>(const PosetFamily&, const PosetFamily&) = default;
};

inline std::string to_string(const PosetFamily& f) {
  switch (f.kind) {
    case FamilyKind::Fin2:
      return f.points == PointKind::Nat ? "fin2(nat)" : f.points == PointKind::Atom ? "fin2(atom)" : "fin2(column)";
    case FamilyKind::FinInj: return "fin-inj";
    case FamilyKind::FinSeqInj: return "finseq-inj";
    case FamilyKind::FinPi1Inj: return "fin-pi1-inj(" + std::to_string(f.value_bound) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Conditions

/// A finite partial function from index points to values, tagged with its
/// family. Extension is superset: q <= p iff q's map extends p's.
class Condition {
 public:
  using Entries = std::map<IndexPoint, Value>;

  Condition() = default;
  explicit Condition(PosetFamily family, Entries entries = {}) : family_(family), entries_(std::move(entries)) {}

  const PosetFamily& family() const { return family_; }
  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool defines(const IndexPoint& p) const { return entries_.contains(p); }
  std::optional<Value> at(const IndexPoint& p) const {
    auto it = entries_.find(p);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::set<IndexPoint> domain() const {
    std::set<IndexPoint> d;
    for (const auto& [p, v] : entries_) d.insert(p);
    return d;
  }

  /// Copy with one more entry (overwrites if already present).
  Condition with(const IndexPoint& p, const Value& v) const {
    Condition c = *this;
    c.entries_[p] = v;
    return c;
  }

  friend bool operator==(const Condition&, const Condition&) = default;
  friend auto operator<=>(const Condition& a, const Condition& b) {
    if (auto c = a.family_ <=> b.family_; c != 0) return c;
    // Shorter conditions first, then lexicographic on entries.
    if (auto c = a.entries_.size() <=> b.entries_.size(); c != 0) return c;
    if (a.entries_ < b.entries_) return std::strong_ordering::less;
    if (b.entries_ < a.entries_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend Condition act(const Permutation& pi, const Condition& c) {
    return Condition(c.family_, forcinglab::act(pi, c.entries_));
  }
  friend void collect_atoms(const Condition& c, std::set<Atom>& out) { forcinglab::collect_atoms(c.entries_, out); }

 private:
  PosetFamily family_;
  Entries entries_;
};

inline std::string to_string(const Condition& c) {
  std::string out = "{";
  bool first = true;
  for (const auto& [p, v] : c.entries()) {
    if (!first) out += ", ";
    first = false;
    out += to_string(p) + ":" + to_string(v);
  }
  return out + "}";
}

struct Violation {
  std::string message;
  /// The offending pair of domain points (equal when a single entry is at fault).
  std::pair<IndexPoint, IndexPoint> points;
};

/// Checks typing and the family constraint: injectivity for FinInj,
/// pi1-injectivity for FinPi1Inj, initial-segment domain plus injectivity for
/// FinSeqInj.
inline std::optional<Violation> validate(const Condition& c) {
  const auto& fam = c.family();
  std::map<Atom, IndexPoint> first_coord;
  std::uint64_t expected_index = 0;
  for (const auto& [p, v] : c.entries()) {
    auto single = [&](std::string msg) { return Violation{std::move(msg) + " at " + to_string(p), {p, p}}; };

    const bool point_ok = fam.kind != FamilyKind::Fin2 ? std::holds_alternative<NatPoint>(p)
                          : fam.points == PointKind::Nat  ? std::holds_alternative<NatPoint>(p)
                          : fam.points == PointKind::Atom ? std::holds_alternative<AtomPoint>(p)
                                                          : std::holds_alternative<AtomColumn>(p);
    if (!point_ok) return single("index point of the wrong kind");

    const Atom* key = nullptr;
    switch (fam.kind) {
      case FamilyKind::Fin2: {
        auto* b = std::get_if<Bit>(&v);
        if (!b || b->b > 1) return single("value is not a bit");
        break;
      }
      case FamilyKind::FinSeqInj:
        if (std::get<NatPoint>(p).n != expected_index++) return single("domain is not an initial segment");
        [[fallthrough]];
      case FamilyKind::FinInj: {
        auto* a = std::get_if<AtomVal>(&v);
        if (!a) return single("value is not an atom");
        key = &a->atom;
        break;
      }
      case FamilyKind::FinPi1Inj: {
        auto* pv = std::get_if<PairVal>(&v);
        if (!pv) return single("value is not an (atom, natural) pair");
        if (pv->second >= fam.value_bound) return single("second coordinate exceeds the declared bound");
        key = &pv->atom;
        break;
      }
    }
    if (key) {
      auto [it, inserted] = first_coord.emplace(*key, p);
      if (!inserted) {
        const char* what = fam.kind == FamilyKind::FinPi1Inj ? "pi1-injectivity" : "injectivity";
        return Violation{std::string(what) + " violated: " + to_string(it->second) + " and " + to_string(p) +
                             " share " + to_string(*key),
                         {it->second, p}};
      }
    }
  }
  return std::nullopt;
}

/// Validating constructor.
inline Condition make_condition(PosetFamily family, Condition::Entries entries) {
  Condition c(family, std::move(entries));
  if (auto v = validate(c)) throw LabError(ErrorCode::InvalidCondition, v->message);
  return c;
}

inline void require_same_family(const Condition& a, const Condition& b) {
  if (a.family() != b.family()) {
    throw LabError(ErrorCode::FamilyMismatch, to_string(a.family()) + " vs " + to_string(b.family()));
  }
}

/// q <= p: q is stronger, i.e. q's map extends p's.
inline bool leq(const Condition& q, const Condition& p) {
  require_same_family(q, p);
  if (q.size() < p.size()) return false;
  for (const auto& [pt, v] : p.entries()) {
    auto w = q.at(pt);
    if (!w || *w != v) return false;
  }
  return true;
}

struct Incompatible {
  enum class Kind { ValueClash, ConstraintClash };
  Kind kind = Kind::ValueClash;
  /// For a value clash, the point with two values; for a constraint clash,
  /// the pair of points that violate the family constraint in p union q.
  std::pair<IndexPoint, IndexPoint> points;
  std::string reason;
};

using ExtensionResult = std::variant<Condition, Incompatible>;

/// The greatest common extension p union q, or the reason none exists.
inline ExtensionResult common_extension(const Condition& p, const Condition& q) {
  require_same_family(p, q);
  Condition::Entries merged = p.entries();
  for (const auto& [pt, v] : q.entries()) {
    auto [it, inserted] = merged.emplace(pt, v);
    if (!inserted && it->second != v) {
      return Incompatible{Incompatible::Kind::ValueClash, {pt, pt},
                          "values " + to_string(it->second) + " and " + to_string(v) + " at " + to_string(pt)};
    }
  }
  Condition u(p.family(), std::move(merged));
  if (auto viol = validate(u)) return Incompatible{Incompatible::Kind::ConstraintClash, viol->points, viol->message};
  return u;
}

inline bool compatible(const Condition& p, const Condition& q) {
  return std::holds_alternative<Condition>(common_extension(p, q));
}

// ---------------------------------------------------------------------------
// Bounded extension enumeration

/// Finite window on a family's universe: the index points a condition may
/// use and the atoms its values may mention.
struct Bounds {
  std::vector<IndexPoint> points;
  std::vector<Atom> atoms;

  static Bounds nat_points(std::uint64_t count, std::vector<Atom> atoms = {}) {
    Bounds b;
    for (std::uint64_t i = 0; i < count; ++i) b.points.push_back(nat(i));
    b.atoms = std::move(atoms);
    return b;
  }
};

/// Candidate values for the family in canonical order.
inline std::vector<Value> candidate_values(const PosetFamily& fam, const Bounds& bounds) {
  std::vector<Value> vals;
  switch (fam.kind) {
    case FamilyKind::Fin2:
      vals = {bit(0), bit(1)};
      break;
    case FamilyKind::FinInj:
    case FamilyKind::FinSeqInj:
      for (const auto& a : bounds.atoms) vals.push_back(atom_val(a));
      break;
    case FamilyKind::FinPi1Inj:
      for (const auto& a : bounds.atoms) {
        for (std::uint64_t c = 0; c < fam.value_bound; ++c) vals.push_back(pair_val(a, c));
      }
      break;
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

/// All valid one-entry extensions of p inside the bounds, point-major then
/// value order.
inline std::vector<Condition> extensions_one_step(const Condition& p, const Bounds& bounds) {
  std::vector<IndexPoint> points = bounds.points;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const auto values = candidate_values(p.family(), bounds);

  std::vector<Condition> out;
  for (const auto& pt : points) {
    if (p.defines(pt)) continue;
    if (p.family().kind == FamilyKind::FinSeqInj && pt != nat(p.size())) continue;
    for (const auto& v : values) {
      Condition c = p.with(pt, v);
      if (!validate(c)) out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace forcinglab
