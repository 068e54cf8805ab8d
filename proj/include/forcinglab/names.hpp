#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "forcinglab/antichain.hpp"

namespace forcinglab {

/// A nice name: for each coordinate alpha < arity, an antichain of
/// (condition, value) pairs; a condition below a member forces that value.
struct NiceName {
  using Coordinate = std::vector<std::pair<Condition, std::uint64_t>>;

  std::size_t arity = 0;
  std::vector<Coordinate> coords;

  friend bool operator==(const NiceName&, const NiceName&) = default;
};

/// Checks arity, a single family, and the per-coordinate antichain property.
inline void validate_name(const NiceName& name) {
  if (name.coords.size() != name.arity) throw LabError(ErrorCode::InvalidArgument, "coordinate count != arity");
  std::optional<PosetFamily> fam;
  for (std::size_t alpha = 0; alpha < name.arity; ++alpha) {
    std::vector<Condition> conds;
    for (const auto& [c, v] : name.coords[alpha]) {
      if (fam && *fam != c.family()) throw LabError(ErrorCode::FamilyMismatch, "name mixes families");
      fam = c.family();
      if (auto viol = validate(c)) throw LabError(ErrorCode::InvalidCondition, viol->message);
      conds.push_back(c);
    }
    if (!is_antichain(conds).is_antichain) {
      throw LabError(ErrorCode::NotAntichain, "coordinate " + std::to_string(alpha) + " is not an antichain");
    }
  }
}

/// The value p forces at alpha: p extends some member. At most one member
/// can be extended since members are pairwise incompatible.
inline std::optional<std::uint64_t> decides(const Condition& p, const NiceName& name, std::size_t alpha) {
  if (alpha >= name.arity) {
    throw LabError(ErrorCode::OutOfArity, std::to_string(alpha) + " >= " + std::to_string(name.arity));
  }
  for (const auto& [q, value] : name.coords[alpha]) {
    if (leq(p, q)) return value;
  }
  return std::nullopt;
}

/// A_{alpha,k}: values forced at alpha by some q <= p with |dom q| = k and
/// dom q inside the declared points. Bounded by 2^k.
inline std::set<std::uint64_t> compute_A_alpha_k(const NiceName& name, const Condition& p, std::size_t alpha,
                                                 std::size_t k, std::span<const IndexPoint> points) {
  if (points.size() > 5) throw LabError(ErrorCode::BudgetExceeded, "|X| > 5");
  if (p.family().kind != FamilyKind::Fin2) throw LabError(ErrorCode::FamilyMismatch, "needs Fin(X,2)");
  if (alpha >= name.arity) throw LabError(ErrorCode::OutOfArity, std::to_string(alpha));

  std::vector<IndexPoint> free;
  for (const auto& x : points) {
    if (!p.defines(x)) free.push_back(x);
  }
  if (free.size() + p.size() != points.size()) {
    throw LabError(ErrorCode::InvalidArgument, "p uses points outside the declared set");
  }

  std::set<std::uint64_t> values;
  if (k < p.size()) return values;
  const std::size_t extra = k - p.size();
  for (std::uint32_t dom = 0; dom < (1u << free.size()); ++dom) {
    if (static_cast<std::size_t>(std::popcount(dom)) != extra) continue;
    for (std::uint32_t val = dom;; val = (val - 1) & dom) {
      Condition q = p;
      for (std::size_t i = 0; i < free.size(); ++i) {
        if (dom >> i & 1u) q = q.with(free[i], bit(val >> i & 1u));
      }
      if (auto v = decides(q, name, alpha)) values.insert(*v);
      if (val == 0) break;
    }
  }
  if (k < 64 && values.size() > (std::uint64_t{1} << k)) throw std::logic_error("A_{alpha,k} exceeds 2^k");
  return values;
}

/// Random antichain in Fin(points, 2): draws random conditions and keeps
/// those incompatible with everything kept so far.
inline std::vector<Condition> random_antichain(std::span<const IndexPoint> points, std::size_t attempts,
                                               std::mt19937_64& rng) {
  const auto fam = PosetFamily::fin2(std::holds_alternative<NatPoint>(points[0]) ? PointKind::Nat : PointKind::Atom);
  std::vector<Condition> out;
  for (std::size_t t = 0; t < attempts; ++t) {
    Condition c(fam);
    for (const auto& x : points) {
      if (rng() % 2) c = c.with(x, bit(rng() % 2));
    }
    bool ok = true;
    for (const auto& d : out) ok = ok && !compatible(c, d);
    if (ok) out.push_back(std::move(c));
  }
  return out;
}

inline NiceName random_nice_name(std::span<const IndexPoint> points, std::size_t arity, std::uint64_t value_limit,
                                 std::mt19937_64& rng) {
  NiceName name{arity, {}};
  for (std::size_t alpha = 0; alpha < arity; ++alpha) {
    NiceName::Coordinate coord;
    for (auto& c : random_antichain(points, 1 + rng() % 12, rng)) coord.emplace_back(std::move(c), rng() % value_limit);
    name.coords.push_back(std::move(coord));
  }
  return name;
}

/// Name whose coordinate alpha is the full cube on `cube`, member i carrying
/// value i; other coordinates are empty.
inline NiceName full_cube_name(std::span<const IndexPoint> cube, std::size_t arity, std::size_t alpha) {
  NiceName name{arity, std::vector<NiceName::Coordinate>(arity)};
  std::uint64_t v = 0;
  for (auto& c : full_cube_antichain(cube)) name.coords[alpha].emplace_back(std::move(c), v++);
  return name;
}

}  // namespace forcinglab
