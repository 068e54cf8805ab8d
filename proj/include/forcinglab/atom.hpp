#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "forcinglab/error.hpp"

namespace forcinglab {

enum class AtomKind : std::uint8_t { Plain = 0, Sock = 1 };
enum class Side : std::uint8_t { Left = 0, Right = 1 };

/// An urelement of the permutation model. Plain atoms stand in for an
/// amorphous set; sock atoms come in pairs {Sock(n,L), Sock(n,R)}.
///
/// Ordering: all plain atoms (by id) precede all sock atoms, which are ordered
/// by (pair, left < right).
struct Atom {
  AtomKind kind = AtomKind::Plain;
  std::uint32_t index = 0;  // plain id or sock pair
  Side side = Side::Left;   // meaningful for socks only

  static constexpr Atom plain(std::uint32_t id) { return Atom{AtomKind::Plain, id, Side::Left}; }
  static constexpr Atom sock(std::uint32_t pair, Side side) { return Atom{AtomKind::Sock, pair, side}; }

  bool is_plain() const { return kind == AtomKind::Plain; }
  bool is_sock() const { return kind == AtomKind::Sock; }

  /// The other sock of the same pair.
  Atom partner() const { return sock(index, side == Side::Left ? Side::Right : Side::Left); }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.index <=> b.index; c != 0) return c;
    if (a.kind == AtomKind::Plain) return std::strong_ordering::equal;
    return a.side <=> b.side;
  }
};

inline std::string to_string(const Atom& a) {
  if (a.is_plain()) return "P" + std::to_string(a.index);
  return "S" + std::to_string(a.index) + (a.side == Side::Left ? "L" : "R");
}

inline Atom parse_atom(const std::string& s) {
  auto fail = [&] { return LabError(ErrorCode::InvalidArgument, "malformed atom '" + s + "'"); };
  if (s.size() < 2) throw fail();
  auto digits = [&](std::size_t from, std::size_t to) {
    if (from >= to) throw fail();
    std::uint64_t v = 0;
    for (std::size_t i = from; i < to; ++i) {
      if (s[i] < '0' || s[i] > '9') throw fail();
      v = v * 10 + static_cast<std::uint64_t>(s[i] - '0');
      if (v > 0xffffffffu) throw fail();
    }
    return static_cast<std::uint32_t>(v);
  };
  if (s[0] == 'P') return Atom::plain(digits(1, s.size()));
  if (s[0] == 'S') {
    char last = s.back();
    if (last != 'L' && last != 'R') throw fail();
    return Atom::sock(digits(1, s.size() - 1), last == 'L' ? Side::Left : Side::Right);
  }
  throw fail();
}

/// Declared finite universe: plain atoms P0..P(plain_atoms-1) and sock pairs
/// 0..sock_pairs-1.
struct Universe {
  std::uint32_t plain_atoms = 0;
  std::uint32_t sock_pairs = 0;

  bool contains(const Atom& a) const {
    return a.is_plain() ? a.index < plain_atoms : a.index < sock_pairs;
  }

  std::vector<Atom> plain() const {
    std::vector<Atom> out;
    out.reserve(plain_atoms);
    for (std::uint32_t i = 0; i < plain_atoms; ++i) out.push_back(Atom::plain(i));
    return out;
  }

  std::vector<Atom> socks() const {
    std::vector<Atom> out;
    out.reserve(2 * static_cast<std::size_t>(sock_pairs));
    for (std::uint32_t n = 0; n < sock_pairs; ++n) {
      out.push_back(Atom::sock(n, Side::Left));
      out.push_back(Atom::sock(n, Side::Right));
    }
    return out;
  }

  std::vector<Atom> atoms() const {
    auto out = plain();
    auto s = socks();
    out.insert(out.end(), s.begin(), s.end());
    return out;
  }

  friend bool operator==(const Universe&, const Universe&) = default;
};

using Support = std::set<Atom>;

/// The two socks of pair n, i.e. the set A_n.
inline std::set<Atom> sock_pair(std::uint32_t n) {
  return {Atom::sock(n, Side::Left), Atom::sock(n, Side::Right)};
}

}  // namespace forcinglab
