#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forcinglab/condition.hpp"
#include "forcinglab/support.hpp"

namespace forcinglab {

struct AntichainCheck {
  bool is_antichain = true;
  /// Indices of the first compatible pair found, when not an antichain.
  std::optional<std::pair<std::size_t, std::size_t>> compatible_pair;
};

/// Pairwise incompatibility test. Throws FamilyMismatch on mixed families.
inline AntichainCheck is_antichain(std::span<const Condition> c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (compatible(c[i], c[j])) return {false, std::make_pair(i, j)};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Exhaustive maximum-antichain search

/// Incompatibility graph over a list of conditions; a maximum antichain is a
/// maximum clique of this graph.
class IncompatibilityGraph {
 public:
  using Row = std::vector<std::uint64_t>;

  explicit IncompatibilityGraph(std::span<const Condition> conds) : n_(conds.size()), words_((n_ + 63) / 64) {
    rows_.assign(n_, Row(words_, 0));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (!compatible(conds[i], conds[j])) {
          set(rows_[i], j);
          set(rows_[j], i);
        }
      }
    }
  }

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_; }
  const Row& row(std::size_t i) const { return rows_[i]; }

  static void set(Row& r, std::size_t i) { r[i / 64] |= std::uint64_t{1} << (i % 64); }
  static void reset(Row& r, std::size_t i) { r[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  static std::size_t count(const Row& r) {
    std::size_t c = 0;
    for (auto w : r) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<Row> rows_;
};

struct SearchStats {
  std::size_t best = 0;
  std::vector<std::size_t> best_members;
  /// Antichains visited by the search (every node of the search tree).
  std::size_t visited = 0;
};

/// Branch and bound over cliques of the incompatibility graph. Each visited
/// antichain (as vertex indices, increasing) is handed to `visit`. A branch is
/// cut when it cannot beat the best size found so far.
template <class Visitor>
SearchStats max_antichain_search(const IncompatibilityGraph& g, Visitor&& visit, const Budget& budget = {}) {
  SearchStats stats;
  std::vector<std::size_t> current;
  IncompatibilityGraph::Row all(g.words(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) IncompatibilityGraph::set(all, i);

  auto expand = [&](auto&& self, IncompatibilityGraph::Row cand) -> void {
    budget.check("max_antichain_search");
    ++stats.visited;
    visit(std::span<const std::size_t>(current));
    if (current.size() > stats.best) {
      stats.best = current.size();
      stats.best_members = current;
    }
    for (std::size_t w = 0; w < cand.size(); ++w) {
      while (cand[w] != 0) {
        if (current.size() + IncompatibilityGraph::count(cand) <= stats.best) return;
        const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(cand[w]));
        IncompatibilityGraph::reset(cand, v);
        IncompatibilityGraph::Row next(cand.size());
        for (std::size_t k = 0; k < cand.size(); ++k) next[k] = cand[k] & g.row(v)[k];
        current.push_back(v);
        self(self, std::move(next));
        current.pop_back();
      }
    }
  };
  expand(expand, all);
  return stats;
}

// ---------------------------------------------------------------------------
// Packing verification

/// Numbers from the counting argument for a uniform antichain: each member
/// has exactly 2^(d-k) total extensions on D, and these are pairwise
/// disjoint, so size * 2^(d-k) <= 2^d.
struct AntichainReport {
  std::size_t size = 0;
  std::size_t k = 0;
  std::set<IndexPoint> D;
  std::size_t d = 0;
  std::uint64_t packing_left = 0;
  std::uint64_t packing_right = 0;
};

inline AntichainReport verify_packing(std::span<const Condition> c) {
  if (auto chk = is_antichain(c); !chk.is_antichain) {
    throw LabError(ErrorCode::NotAntichain, to_string(c[chk.compatible_pair->first]) + " and " +
                                                to_string(c[chk.compatible_pair->second]) + " are compatible");
  }
  AntichainReport r;
  r.size = c.size();
  if (!c.empty()) r.k = c.front().size();
  for (const auto& a : c) {
    if (a.size() != r.k) throw LabError(ErrorCode::NonUniformSize, "domain sizes " + std::to_string(r.k) + " and " +
                                                                       std::to_string(a.size()));
    if (a.family().kind != FamilyKind::Fin2) throw LabError(ErrorCode::InvalidArgument, "packing needs Fin(X,2)");
    for (const auto& [p, v] : a.entries()) r.D.insert(p);
  }
  r.d = r.D.size();
  if (r.d > 20) throw LabError(ErrorCode::BudgetExceeded, "2^d too large to materialize");

  const std::vector<IndexPoint> points(r.D.begin(), r.D.end());
  const std::uint64_t total = std::uint64_t{1} << r.d;
  const std::uint64_t expected = std::uint64_t{1} << (r.d - r.k);
  // owner[t] = index+1 of the member that total map t extends, 0 if none.
  std::vector<std::size_t> owner(total, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::uint64_t count = 0;
    for (std::uint64_t t = 0; t < total; ++t) {
      bool extends = true;
      for (std::size_t j = 0; j < points.size() && extends; ++j) {
        if (auto v = c[i].at(points[j])) extends = std::get<Bit>(*v).b == ((t >> j) & 1u);
      }
      if (!extends) continue;
      ++count;
      if (owner[t] != 0) {
        throw std::logic_error("extension sets of " + to_string(c[owner[t] - 1]) + " and " + to_string(c[i]) +
                               " overlap");
      }
      owner[t] = i + 1;
    }
    if (count != expected) throw std::logic_error("extension count differs from 2^(d-k)");
  }
  r.packing_left = static_cast<std::uint64_t>(r.size) * expected;
  r.packing_right = total;
  if (r.packing_left > r.packing_right) throw std::logic_error("packing inequality violated");
  return r;
}

namespace detail {

/// A Fin(X,2) condition over at most six points as (domain mask, value mask).
struct CompactCondition {
  std::uint32_t dom = 0;
  std::uint32_t val = 0;
};

/// Packing check on compact conditions: extension sets into 2^D, as bitsets
/// over the at most 64 value masks, must be disjoint and of size 2^(d-k).
inline bool compact_packing_ok(std::span<const CompactCondition> members, std::size_t k) {
  std::uint32_t D = 0;
  for (const auto& m : members) D |= m.dom;
  const auto d = static_cast<std::size_t>(std::popcount(D));
  const std::uint64_t expected = std::uint64_t{1} << (d - k);
  std::uint64_t seen = 0;
  for (const auto& m : members) {
    std::uint64_t ext = 0;
    // Enumerate all submasks t of D (total maps D -> 2).
    for (std::uint32_t t = D;; t = (t - 1) & D) {
      if (((t ^ m.val) & m.dom) == 0) ext |= std::uint64_t{1} << t;
      if (t == 0) break;
    }
    if (static_cast<std::uint64_t>(std::popcount(ext)) != expected) return false;
    if (ext & seen) return false;
    seen |= ext;
  }
  return static_cast<std::uint64_t>(members.size()) * expected <= (std::uint64_t{1} << d);
}

inline std::vector<IndexPoint> plain_points(std::size_t n) {
  std::vector<IndexPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(at(Atom::plain(static_cast<std::uint32_t>(i))));
  return pts;
}

}  // namespace detail

/// All conditions of Fin(points, 2) with domain size exactly k, canonical order.
inline std::vector<Condition> conditions_of_size(std::span<const IndexPoint> points, std::size_t k) {
  std::vector<Condition> out;
  const auto n = points.size();
  if (n > 20) throw LabError(ErrorCode::BudgetExceeded, "too many points");
  const auto fam = PosetFamily::fin2(points.empty() ? PointKind::Atom
                                     : std::holds_alternative<NatPoint>(points[0])  ? PointKind::Nat
                                     : std::holds_alternative<AtomPoint>(points[0]) ? PointKind::Atom
                                                                                    : PointKind::AtomColumn);
  for (std::uint32_t dom = 0; dom < (1u << n); ++dom) {
    if (static_cast<std::size_t>(std::popcount(dom)) != k) continue;
    for (std::uint32_t val = dom;; val = (val - 1) & dom) {
      Condition::Entries e;
      for (std::size_t i = 0; i < n; ++i) {
        if (dom >> i & 1u) e.emplace(points[i], bit(val >> i & 1u));
      }
      out.emplace_back(fam, std::move(e));
      if (val == 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct BruteForceResult {
  std::size_t max_size = 0;
  std::vector<Condition> witness;
  std::size_t conditions = 0;
  std::size_t antichains_checked = 0;
  std::size_t packing_failures = 0;
};

/// Exact maximum size of an antichain of domain-size-k conditions in
/// Fin(X,2), |X| = x_size, by exhaustive clique search. Every antichain the
/// search visits also has its packing count verified.
inline BruteForceResult max_antichain_size_bruteforce(std::size_t x_size, std::size_t k, const Budget& budget = {}) {
  if (x_size > 5 || k > x_size) {
    throw LabError(ErrorCode::BudgetExceeded, "guard is x_size <= 5 and k <= x_size");
  }
  const auto points = detail::plain_points(x_size);
  const auto conds = conditions_of_size(points, k);

  std::vector<detail::CompactCondition> compact;
  for (const auto& c : conds) {
    detail::CompactCondition cc;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (auto v = c.at(points[i])) {
        cc.dom |= 1u << i;
        if (std::get<Bit>(*v).b) cc.val |= 1u << i;
      }
    }
    compact.push_back(cc);
  }

  BruteForceResult r;
  r.conditions = conds.size();
  IncompatibilityGraph g(conds);
  std::vector<detail::CompactCondition> members;
  auto stats = max_antichain_search(
      g,
      [&](std::span<const std::size_t> idx) {
        members.clear();
        for (auto i : idx) members.push_back(compact[i]);
        if (!detail::compact_packing_ok(members, k)) ++r.packing_failures;
      },
      budget);
  r.max_size = stats.best;
  r.antichains_checked = stats.visited;
  for (auto i : stats.best_members) r.witness.push_back(conds[i]);
  return r;
}

/// Exact maximum antichain size among an arbitrary finite list of
/// conditions. Larger conditions are tried first, which finds big antichains
/// early and tightens the bound.
inline std::pair<std::size_t, std::vector<Condition>> max_antichain(std::vector<Condition> conds,
                                                                    const Budget& budget = {}) {
  std::stable_sort(conds.begin(), conds.end(),
                   [](const Condition& a, const Condition& b) { return a.size() > b.size(); });
  IncompatibilityGraph g(conds);
  auto stats = max_antichain_search(g, [](std::span<const std::size_t>) {}, budget);
  std::vector<Condition> best;
  for (auto i : stats.best_members) best.push_back(conds[i]);
  std::sort(best.begin(), best.end());
  return {stats.best, best};
}

/// All 2^|E| total maps E -> 2: an antichain that meets the 2^k bound.
inline std::vector<Condition> full_cube_antichain(std::span<const IndexPoint> e) {
  if (e.empty()) throw LabError(ErrorCode::InvalidArgument, "cube over an empty point set");
  std::vector<IndexPoint> pts(e.begin(), e.end());
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end()) {
    throw LabError(ErrorCode::InvalidArgument, "cube points must be distinct");
  }
  return conditions_of_size(pts, pts.size());
}

// ---------------------------------------------------------------------------
// Level decomposition of an antichain

struct FConstruction {
  /// levels[n] = C_n, the members with at most n entries.
  std::vector<std::vector<Condition>> levels;
  /// supports[n] = X_n, the union of the domains of C_n.
  std::vector<std::set<IndexPoint>> supports;
  /// f(x) = least n with x in X_n, on the union of the X_n; 0 elsewhere.
  std::map<IndexPoint, std::size_t> f;
  std::size_t default_value = 0;
  /// Values of f on the union of the X_n.
  std::set<std::size_t> range;
  /// {n : C_n != C_(n-1)}: sizes that actually occur in the antichain.
  std::set<std::size_t> realized_levels;
  /// {n : X_n != X_(n-1)}: levels where the union of domains grows.
  std::set<std::size_t> growth_levels;
};

inline FConstruction f_construction(std::span<const Condition> c) {
  if (auto chk = is_antichain(c); !chk.is_antichain) {
    throw LabError(ErrorCode::NotAntichain, "input is not an antichain");
  }
  FConstruction r;
  std::size_t max_size = 0;
  for (const auto& a : c) max_size = std::max(max_size, a.size());

  for (std::size_t n = 0; n <= max_size; ++n) {
    std::vector<Condition> level;
    std::set<IndexPoint> support;
    bool new_size = false;
    for (const auto& a : c) {
      if (a.size() > n) continue;
      level.push_back(a);
      new_size |= a.size() == n;
      for (const auto& [p, v] : a.entries()) support.insert(p);
    }
    // Sum over sizes j <= n of the 2^j bound.
    if (n < 63 && level.size() > (std::uint64_t{1} << (n + 1)) - 1) {
      throw std::logic_error("level exceeds the summed antichain bound");
    }
    if (new_size) r.realized_levels.insert(n);
    const bool grows = n == 0 ? !support.empty() : support != r.supports.back();
    if (grows) r.growth_levels.insert(n);
    for (const auto& p : support) r.f.emplace(p, n);  // emplace keeps the least n
    r.levels.push_back(std::move(level));
    r.supports.push_back(std::move(support));
  }
  for (const auto& [p, n] : r.f) r.range.insert(n);
  return r;
}

// ---------------------------------------------------------------------------
// Supported antichains in the amorphous proxy

struct RenameWitness {
  Condition member;
  Condition renamed;
  Permutation transposition;
};

struct SupportedAntichainRefutation {
  std::size_t bound = 0;
  std::vector<Condition> maximum;
  std::vector<RenameWitness> witnesses;
  std::vector<std::string> log;
};

/// For an S-supported antichain in Fin(Atoms,2) every member has domain
/// inside S: a member mentioning x outside S and its image under (x y), y
/// fresh, are distinct and compatible, and both would lie in the antichain.
/// Returns the exact maximum antichain size of Fin(S,2) together with a
/// rename witness for each candidate member that mentions a non-S atom.
inline SupportedAntichainRefutation refute_supported_infinite_antichain(const Support& s, const Universe& u,
                                                                        std::span<const Condition> candidates = {},
                                                                        const Budget& budget = {}) {
  for (const auto& a : s) {
    if (!a.is_plain() || !u.contains(a)) throw LabError(ErrorCode::AtomOutsideUniverse, to_string(a));
  }
  if (u.plain_atoms < s.size() + 3) {
    throw LabError(ErrorCode::InsufficientUniverse, "need at least |S| + 3 plain atoms");
  }
  if (s.size() > 5) throw LabError(ErrorCode::BudgetExceeded, "support too large for exhaustive search");

  SupportedAntichainRefutation r;
  for (const auto& c : candidates) {
    const auto atoms = atoms_of(c);
    auto outside = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& a) { return !s.contains(a); });
    if (outside == atoms.end()) continue;
    std::optional<Atom> fresh;
    for (const auto& y : u.plain()) {
      if (!s.contains(y) && !atoms.contains(y)) {
        fresh = y;
        break;
      }
    }
    if (!fresh) throw LabError(ErrorCode::InsufficientUniverse, "no fresh atom to rename " + to_string(*outside));
    auto tau = Permutation::transposition(*outside, *fresh);
    Condition renamed = act(tau, c);
    if (renamed == c || !compatible(c, renamed)) throw std::logic_error("rename did not produce a compatible twin");
    r.log.push_back(to_string(c) + " mentions " + to_string(*outside) + " outside S; " + to_string(tau) + " fixes S and gives " +
                    to_string(renamed) + ", distinct and compatible");
    r.witnesses.push_back({c, std::move(renamed), std::move(tau)});
  }

  std::vector<IndexPoint> pts;
  for (const auto& a : s) pts.push_back(at(a));
  std::vector<Condition> all;
  for (std::size_t k = 0; k <= pts.size(); ++k) {
    auto level = conditions_of_size(pts, k);
    all.insert(all.end(), level.begin(), level.end());
  }
  auto [best, members] = max_antichain(std::move(all), budget);
  r.bound = best;
  r.maximum = std::move(members);
  r.log.push_back("every S-supported antichain lies in Fin(S,2); its maximum antichain size is " + std::to_string(best));
  return r;
}

}  // namespace forcinglab
