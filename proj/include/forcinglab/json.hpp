#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "forcinglab/names.hpp"
#include "forcinglab/ordinal.hpp"
#include "forcinglab/permutation.hpp"

namespace forcinglab {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad_json(const std::string& what, const Json& j) {
  throw LabError(ErrorCode::ConfigInvalid, what + ": " + j.dump());
}

inline std::uint64_t json_nat(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) bad_json(what, j);
  return j.get<std::uint64_t>();
}

}  // namespace detail

inline Json atom_to_json(const Atom& a) { return to_string(a); }

inline Atom atom_from_json(const Json& j) {
  if (!j.is_string()) detail::bad_json("atom must be a string", j);
  try {
    return parse_atom(j.get<std::string>());
  } catch (const LabError&) {
    detail::bad_json("malformed atom", j);
  }
}

inline Json support_to_json(const Support& s) {
  Json out = Json::array();
  for (const auto& a : s) out.push_back(atom_to_json(a));
  return out;
}

inline Support support_from_json(const Json& j) {
  if (!j.is_array()) detail::bad_json("support must be an array of atoms", j);
  Support s;
  for (const auto& a : j) s.insert(atom_from_json(a));
  return s;
}

inline Json universe_to_json(const Universe& u) { return {{"plain_atoms", u.plain_atoms}, {"sock_pairs", u.sock_pairs}}; }

inline Universe universe_from_json(const Json& j) {
  if (!j.is_object()) detail::bad_json("universe must be an object", j);
  Universe u{0, 0};
  for (const auto& [k, v] : j.items()) {
    if (k == "plain_atoms") {
      u.plain_atoms = static_cast<std::uint32_t>(detail::json_nat(v, "plain_atoms"));
    } else if (k == "sock_pairs") {
      u.sock_pairs = static_cast<std::uint32_t>(detail::json_nat(v, "sock_pairs"));
    } else {
      detail::bad_json("unknown universe key '" + k + "'", j);
    }
  }
  return u;
}

/// Cycle notation is for people; the wire form is the list of moved pairs.
inline Json permutation_to_json(const Permutation& p) {
  Json out = Json::array();
  for (const auto& [from, to] : p.moved()) out.push_back({atom_to_json(from), atom_to_json(to)});
  return out;
}

inline Permutation permutation_from_json(const Json& j) {
  if (!j.is_array()) detail::bad_json("permutation must be a list of [from, to]", j);
  std::map<Atom, Atom> m;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) detail::bad_json("permutation entry", e);
    m[atom_from_json(e[0])] = atom_from_json(e[1]);
  }
  try {
    return Permutation(m);
  } catch (const LabError&) {
    detail::bad_json("not a permutation", j);
  }
}

// ---------------------------------------------------------------------------
// Conditions

inline const char* family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Fin2: return "fin2";
    case FamilyKind::FinInj: return "fin-inj";
    case FamilyKind::FinSeqInj: return "finseq-inj";
    case FamilyKind::FinPi1Inj: return "fin-pi1-inj";
  }
  return "?";
}

inline const char* point_kind_name(PointKind k) {
  switch (k) {
    case PointKind::Nat: return "nat";
    case PointKind::Atom: return "atom";
    case PointKind::AtomColumn: return "column";
  }
  return "?";
}

inline Json family_to_json(const PosetFamily& f) {
  Json j{{"kind", family_kind_name(f.kind)}, {"points", point_kind_name(f.points)}};
  if (f.kind == FamilyKind::FinPi1Inj) j["value_bound"] = f.value_bound;
  return j;
}

inline PosetFamily family_from_json(const Json& j) {
  if (j.is_string()) {
    // Shorthand: "cohen" for Fin(omega, 2).
    if (j == "cohen" || j == "fin2") return PosetFamily::fin2(PointKind::Nat);
    if (j == "fin-inj") return PosetFamily::fin_inj();
    if (j == "finseq-inj") return PosetFamily::finseq_inj();
    detail::bad_json("unknown family", j);
  }
  if (!j.is_object() || !j.contains("kind")) detail::bad_json("family must be an object with a kind", j);
  PosetFamily f;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "fin2") {
    f.kind = FamilyKind::Fin2;
  } else if (kind == "fin-inj") {
    f.kind = FamilyKind::FinInj;
  } else if (kind == "finseq-inj") {
    f.kind = FamilyKind::FinSeqInj;
  } else if (kind == "fin-pi1-inj") {
    f.kind = FamilyKind::FinPi1Inj;
  } else {
    detail::bad_json("unknown family kind", j);
  }
  const auto points = j.value("points", std::string("nat"));
  if (points == "nat") {
    f.points = PointKind::Nat;
  } else if (points == "atom") {
    f.points = PointKind::Atom;
  } else if (points == "column") {
    f.points = PointKind::AtomColumn;
  } else {
    detail::bad_json("unknown point kind", j);
  }
  if (f.kind != FamilyKind::Fin2 && f.points != PointKind::Nat) detail::bad_json("only fin2 takes atom points", j);
  if (f.kind == FamilyKind::FinPi1Inj) f.value_bound = detail::json_nat(j.at("value_bound"), "value_bound");
  for (const auto& [k, v] : j.items()) {
    if (k != "kind" && k != "points" && k != "value_bound") detail::bad_json("unknown family key '" + k + "'", j);
  }
  return f;
}

inline Json point_to_json(const IndexPoint& p) {
  if (auto* n = std::get_if<NatPoint>(&p)) return n->n;
  if (auto* a = std::get_if<AtomPoint>(&p)) return atom_to_json(a->atom);
  const auto& c = std::get<AtomColumn>(p);
  return {atom_to_json(c.atom), c.column};
}

inline IndexPoint point_from_json(const Json& j) {
  if (j.is_number()) return nat(detail::json_nat(j, "point"));
  if (j.is_string()) return at(atom_from_json(j));
  if (j.is_array() && j.size() == 2) return column(atom_from_json(j[0]), detail::json_nat(j[1], "column"));
  detail::bad_json("malformed point", j);
}

inline Json value_to_json(const Value& v) {
  if (auto* b = std::get_if<Bit>(&v)) return b->b;
  if (auto* a = std::get_if<AtomVal>(&v)) return atom_to_json(a->atom);
  const auto& pv = std::get<PairVal>(v);
  return {atom_to_json(pv.atom), pv.second};
}

inline Value value_from_json(const Json& j) {
  if (j.is_number()) {
    auto b = detail::json_nat(j, "bit");
    if (b > 1) detail::bad_json("bit value must be 0 or 1", j);
    return bit(static_cast<unsigned>(b));
  }
  if (j.is_string()) return atom_val(atom_from_json(j));
  if (j.is_array() && j.size() == 2) return pair_val(atom_from_json(j[0]), detail::json_nat(j[1], "second coordinate"));
  detail::bad_json("malformed value", j);
}

inline Json condition_to_json(const Condition& c) {
  Json entries = Json::array();
  for (const auto& [p, v] : c.entries()) entries.push_back({point_to_json(p), value_to_json(v)});
  return {{"family", family_to_json(c.family())}, {"entries", entries}};
}

/// Parses and validates. `fallback` supplies the family when the document
/// omits it (names and chains state it once).
inline Condition condition_from_json(const Json& j, const std::optional<PosetFamily>& fallback = std::nullopt) {
  if (!j.is_object() || !j.contains("entries")) detail::bad_json("condition must be an object with entries", j);
  for (const auto& [k, v] : j.items()) {
    if (k != "family" && k != "entries") detail::bad_json("unknown condition key '" + k + "'", j);
  }
  PosetFamily fam;
  if (j.contains("family")) {
    fam = family_from_json(j.at("family"));
  } else if (fallback) {
    fam = *fallback;
  } else {
    detail::bad_json("condition without a family", j);
  }
  Condition::Entries e;
  for (const auto& entry : j.at("entries")) {
    if (!entry.is_array() || entry.size() != 2) detail::bad_json("entry must be [point, value]", entry);
    if (!e.emplace(point_from_json(entry[0]), value_from_json(entry[1])).second) {
      detail::bad_json("duplicate point", entry);
    }
  }
  Condition c(fam, std::move(e));
  if (auto viol = validate(c)) throw LabError(ErrorCode::InvalidCondition, viol->message + " in " + j.dump());
  return c;
}

inline Json conditions_to_json(std::span<const Condition> cs) {
  Json out = Json::array();
  for (const auto& c : cs) out.push_back(condition_to_json(c));
  return out;
}

inline std::vector<Condition> conditions_from_json(const Json& j,
                                                   const std::optional<PosetFamily>& fallback = std::nullopt) {
  if (!j.is_array()) detail::bad_json("expected a list of conditions", j);
  std::vector<Condition> out;
  for (const auto& c : j) out.push_back(condition_from_json(c, fallback));
  return out;
}

// ---------------------------------------------------------------------------
// Names and ordinals

inline Json name_to_json(const NiceName& n) {
  Json coords = Json::array();
  for (const auto& coord : n.coords) {
    Json members = Json::array();
    for (const auto& [c, v] : coord) members.push_back({condition_to_json(c), v});
    coords.push_back(members);
  }
  return {{"arity", n.arity}, {"coords", coords}};
}

inline NiceName name_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("arity") || !j.contains("coords")) detail::bad_json("name needs arity and coords", j);
  std::optional<PosetFamily> fam;
  if (j.contains("family")) fam = family_from_json(j.at("family"));
  for (const auto& [k, v] : j.items()) {
    if (k != "arity" && k != "coords" && k != "family") detail::bad_json("unknown name key '" + k + "'", j);
  }
  NiceName n;
  n.arity = detail::json_nat(j.at("arity"), "arity");
  for (const auto& coord : j.at("coords")) {
    NiceName::Coordinate members;
    for (const auto& m : coord) {
      if (!m.is_array() || m.size() != 2) detail::bad_json("name member must be [condition, value]", m);
      members.emplace_back(condition_from_json(m[0], fam), detail::json_nat(m[1], "value"));
    }
    n.coords.push_back(std::move(members));
  }
  validate_name(n);
  return n;
}

inline Json ordinal_to_json(const OrdinalCNF& o) { return to_string(o); }

inline OrdinalCNF ordinal_from_json(const Json& j) {
  if (j.is_number()) return OrdinalCNF(detail::json_nat(j, "ordinal"));
  if (!j.is_string()) detail::bad_json("ordinal must be a CNF string", j);
  return parse_ordinal(j.get<std::string>());
}

}  // namespace forcinglab
