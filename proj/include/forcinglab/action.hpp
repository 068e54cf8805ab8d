#pragma once

#include <map>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "forcinglab/permutation.hpp"

namespace forcinglab {

// Group action on atom-bearing objects by structural recursion. Every type
// that carries atoms provides an `act` and an `collect_atoms` overload found
// by ADL; containers recurse into their elements.

inline Atom act(const Permutation& pi, const Atom& a) { return pi(a); }
inline void collect_atoms(const Atom& a, std::set<Atom>& out) { out.insert(a); }

template <class T>
  requires std::is_arithmetic_v<T> || std::is_enum_v<T>
T act(const Permutation&, T v) {
  return v;
}
template <class T>
  requires std::is_arithmetic_v<T> || std::is_enum_v<T>
void collect_atoms(T, std::set<Atom>&) {}

inline std::string act(const Permutation&, const std::string& s) { return s; }
inline void collect_atoms(const std::string&, std::set<Atom>&) {}

template <class A, class B>
std::pair<A, B> act(const Permutation& pi, const std::pair<A, B>& p) {
  return {act(pi, p.first), act(pi, p.second)};
}
template <class A, class B>
void collect_atoms(const std::pair<A, B>& p, std::set<Atom>& out) {
  collect_atoms(p.first, out);
  collect_atoms(p.second, out);
}

template <class T>
std::vector<T> act(const Permutation& pi, const std::vector<T>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(act(pi, x));
  return out;
}
template <class T>
void collect_atoms(const std::vector<T>& v, std::set<Atom>& out) {
  for (const auto& x : v) collect_atoms(x, out);
}

template <class T>
std::set<T> act(const Permutation& pi, const std::set<T>& s) {
  std::set<T> out;
  for (const auto& x : s) out.insert(act(pi, x));
  return out;
}
template <class T>
void collect_atoms(const std::set<T>& s, std::set<Atom>& out) {
  for (const auto& x : s) collect_atoms(x, out);
}

template <class K, class V>
std::map<K, V> act(const Permutation& pi, const std::map<K, V>& m) {
  std::map<K, V> out;
  for (const auto& [k, v] : m) out.emplace(act(pi, k), act(pi, v));
  return out;
}
template <class K, class V>
void collect_atoms(const std::map<K, V>& m, std::set<Atom>& out) {
  for (const auto& [k, v] : m) {
    collect_atoms(k, out);
    collect_atoms(v, out);
  }
}

template <class T>
std::set<Atom> atoms_of(const T& obj) {
  std::set<Atom> out;
  collect_atoms(obj, out);
  return out;
}

/// Checked action: every atom of `obj` and every atom `pi` moves must lie in
/// the declared universe.
template <class T>
T apply_perm(const Permutation& pi, const T& obj, const Universe& universe) {
  for (const auto& a : atoms_of(obj)) {
    if (!universe.contains(a)) throw LabError(ErrorCode::AtomOutsideUniverse, to_string(a));
  }
  if (!pi.within(universe)) {
    throw LabError(ErrorCode::AtomOutsideUniverse, "permutation " + to_string(pi) + " leaves the universe");
  }
  return act(pi, obj);
}

}  // namespace forcinglab
