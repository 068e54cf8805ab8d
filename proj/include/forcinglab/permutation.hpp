#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "forcinglab/atom.hpp"

namespace forcinglab {

/// The two permutation groups the models use.
///  - FullSymmetric: all finitary permutations of the plain atoms.
///  - SocksGroup: generated by the per-pair swaps Sock(n,L) <-> Sock(n,R).
enum class GroupSpec { FullSymmetric, SocksGroup };

inline const char* to_string(GroupSpec g) {
  return g == GroupSpec::FullSymmetric ? "full-symmetric" : "socks";
}

/// A finitary permutation of atoms, stored as the map on its moved atoms.
class Permutation {
 public:
  Permutation() = default;

  /// Builds from an explicit atom map; fixed points are dropped. Throws if
  /// the map is not a bijection of its support.
  explicit Permutation(const std::map<Atom, Atom>& mapping) {
    std::set<Atom> sources, targets;
    for (const auto& [from, to] : mapping) {
      if (from == to) continue;
      moved_.emplace(from, to);
      sources.insert(from);
      targets.insert(to);
    }
    if (sources != targets) {
      throw LabError(ErrorCode::InvalidArgument, "atom map is not a permutation of its moved set");
    }
  }

  static Permutation identity() { return {}; }

  static Permutation transposition(const Atom& a, const Atom& b) {
    Permutation p;
    if (a != b) {
      p.moved_.emplace(a, b);
      p.moved_.emplace(b, a);
    }
    return p;
  }

  static Permutation sock_swap(std::uint32_t pair) {
    return transposition(Atom::sock(pair, Side::Left), Atom::sock(pair, Side::Right));
  }

  Atom operator()(const Atom& a) const {
    auto it = moved_.find(a);
    return it == moved_.end() ? a : it->second;
  }

  const std::map<Atom, Atom>& moved() const { return moved_; }
  bool is_identity() const { return moved_.empty(); }

  bool fixes_pointwise(const std::set<Atom>& s) const {
    for (const auto& a : s) {
      if ((*this)(a) != a) return false;
    }
    return true;
  }

  Permutation inverse() const {
    Permutation p;
    for (const auto& [from, to] : moved_) p.moved_.emplace(to, from);
    return p;
  }

  /// (this * rhs)(a) = this(rhs(a)).
  Permutation operator*(const Permutation& rhs) const {
    std::map<Atom, Atom> m;
    for (const auto& [from, to] : rhs.moved_) m[from] = (*this)(to);
    for (const auto& [from, to] : moved_) {
      if (!rhs.moved_.contains(from)) m[from] = to;
    }
    return Permutation(m);
  }

  bool in_group(GroupSpec g) const {
    for (const auto& [from, to] : moved_) {
      if (g == GroupSpec::FullSymmetric) {
        if (!from.is_plain() || !to.is_plain()) return false;
      } else {
        if (!from.is_sock() || to != from.partner()) return false;
      }
    }
    return true;
  }

  bool within(const Universe& u) const {
    for (const auto& [from, to] : moved_) {
      if (!u.contains(from) || !u.contains(to)) return false;
    }
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::map<Atom, Atom> moved_;
};

inline std::string to_string(const Permutation& p) {
  if (p.is_identity()) return "id";
  // Cycle notation over the canonical atom order.
  std::string out;
  std::set<Atom> seen;
  for (const auto& [start, _] : p.moved()) {
    if (seen.contains(start)) continue;
    out += "(";
    Atom a = start;
    bool first = true;
    do {
      if (!first) out += " ";
      first = false;
      out += to_string(a);
      seen.insert(a);
      a = p(a);
    } while (a != start);
    out += ")";
  }
  return out;
}

}  // namespace forcinglab
