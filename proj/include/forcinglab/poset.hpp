#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forcinglab/condition.hpp"

namespace forcinglab {

/// A finite poset with q <= p read as "q is stronger than p".
///  - elements(): every element, in canonical order.
///  - successors(e): elements strictly below e (at least the one-step ones).
///  - above(e): every element p with e <= p.
///  - minimal(e): nothing lies strictly below e.
template <class P>
concept FinitePoset = requires(const P& poset, const typename P::value_type& a) {
  typename P::value_type;
  { poset.elements() } -> std::convertible_to<const std::vector<typename P::value_type>&>;
  { poset.leq(a, a) } -> std::convertible_to<bool>;
  { poset.contains(a) } -> std::convertible_to<bool>;
  { poset.successors(a) } -> std::convertible_to<std::vector<typename P::value_type>>;
  { poset.above(a) } -> std::convertible_to<std::vector<typename P::value_type>>;
  { poset.minimal(a) } -> std::convertible_to<bool>;
  { poset.describe(a) } -> std::convertible_to<std::string>;
};

/// All valid conditions of one family whose entries stay inside the bounds.
class ConditionSpace {
 public:
  using value_type = Condition;

  ConditionSpace(PosetFamily family, Bounds bounds, const Budget& budget = {})
      : family_(family), bounds_(std::move(bounds)) {
    std::sort(bounds_.points.begin(), bounds_.points.end());
    bounds_.points.erase(std::unique(bounds_.points.begin(), bounds_.points.end()), bounds_.points.end());
    values_ = candidate_values(family_, bounds_);
    point_set_.insert(bounds_.points.begin(), bounds_.points.end());
    value_set_.insert(values_.begin(), values_.end());
    enumerate(Condition(family_), 0, budget);
    std::sort(elements_.begin(), elements_.end());
  }

  const PosetFamily& family() const { return family_; }
  const Bounds& bounds() const { return bounds_; }
  const std::vector<Condition>& elements() const { return elements_; }

  bool leq(const Condition& q, const Condition& p) const { return forcinglab::leq(q, p); }

  bool contains(const Condition& c) const {
    if (c.family() != family_ || validate(c)) return false;
    for (const auto& [p, v] : c.entries()) {
      if (!point_set_.contains(p) || !value_set_.contains(v)) return false;
    }
    return true;
  }

  std::vector<Condition> successors(const Condition& c) const { return extensions_one_step(c, bounds_); }

  /// Sub-conditions of c that are themselves valid.
  std::vector<Condition> above(const Condition& c) const {
    std::vector<std::pair<IndexPoint, Value>> entries(c.entries().begin(), c.entries().end());
    if (entries.size() > 24) throw LabError(ErrorCode::BudgetExceeded, "condition too large");
    std::vector<Condition> out;
    for (std::uint32_t mask = 0; mask < (1u << entries.size()); ++mask) {
      Condition::Entries e;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (mask >> i & 1u) e.insert(entries[i]);
      }
      Condition p(family_, std::move(e));
      if (!validate(p)) out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool minimal(const Condition& c) const {
    for (const auto& pt : bounds_.points) {
      if (c.defines(pt)) continue;
      for (const auto& v : values_) {
        if (!validate(c.with(pt, v))) return false;
      }
    }
    return true;
  }

  std::string describe(const Condition& c) const { return to_string(c); }

 private:
  // Violations only grow with more entries, so invalid prefixes are pruned.
  void enumerate(const Condition& prefix, std::size_t i, const Budget& budget) {
    budget.check("ConditionSpace");
    if (i == bounds_.points.size()) {
      elements_.push_back(prefix);
      return;
    }
    enumerate(prefix, i + 1, budget);
    for (const auto& v : values_) {
      Condition c = prefix.with(bounds_.points[i], v);
      if (!validate(c)) enumerate(c, i + 1, budget);
    }
  }

  PosetFamily family_;
  Bounds bounds_;
  std::vector<Value> values_;
  std::set<IndexPoint> point_set_;
  std::set<Value> value_set_;
  std::vector<Condition> elements_;
};

/// A finite poset given by its order relation on element ids 0..n-1.
class ExplicitPoset {
 public:
  using value_type = std::size_t;

  /// `below` lists pairs (a, b) with a < b; the order is their reflexive
  /// transitive closure, which must be antisymmetric.
  ExplicitPoset(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& below,
                std::vector<std::string> names = {})
      : n_(n), leq_(n, std::vector<bool>(n, false)), names_(std::move(names)) {
    for (std::size_t i = 0; i < n; ++i) {
      leq_[i][i] = true;
      elements_.push_back(i);
    }
    for (const auto& [a, b] : below) {
      if (a >= n || b >= n) throw LabError(ErrorCode::InvalidArgument, "element id out of range");
      leq_[a][b] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!leq_[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (leq_[k][j]) leq_[i][j] = true;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (leq_[i][j] && leq_[j][i]) throw LabError(ErrorCode::InvalidArgument, "relation is not antisymmetric");
      }
    }
    if (names_.size() < n) {
      for (std::size_t i = names_.size(); i < n; ++i) names_.push_back("e" + std::to_string(i));
    }
  }

  /// Complete `branching`-ary tree of the given height (root = weakest
  /// element, id 1) with an extra bottom element, id 0, below every leaf.
  static ExplicitPoset tree_with_bottom(std::size_t branching, std::size_t height) {
    std::vector<std::pair<std::size_t, std::size_t>> below;
    std::vector<std::string> names{"bottom", "root"};
    std::vector<std::size_t> frontier{1};
    std::size_t next = 2;
    for (std::size_t h = 0; h < height; ++h) {
      std::vector<std::size_t> children;
      for (auto parent : frontier) {
        for (std::size_t b = 0; b < branching; ++b) {
          below.emplace_back(next, parent);
          names.push_back(names[parent] + "." + std::to_string(b));
          children.push_back(next++);
        }
      }
      frontier = std::move(children);
    }
    for (auto leaf : frontier) below.emplace_back(0, leaf);
    return ExplicitPoset(next, below, std::move(names));
  }

  std::size_t size() const { return n_; }
  const std::vector<std::size_t>& elements() const { return elements_; }
  bool leq(std::size_t q, std::size_t p) const { return leq_.at(q).at(p); }
  bool contains(std::size_t e) const { return e < n_; }

  std::vector<std::size_t> successors(std::size_t e) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i != e && leq_[i][e]) out.push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> above(std::size_t e) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
      if (leq_[e][i]) out.push_back(i);
    }
    return out;
  }
  bool minimal(std::size_t e) const { return successors(e).empty(); }
  std::string describe(std::size_t e) const { return names_.at(e); }

 private:
  std::size_t n_;
  std::vector<std::vector<bool>> leq_;
  std::vector<std::string> names_;
  std::vector<std::size_t> elements_;
};

static_assert(FinitePoset<ConditionSpace>);
static_assert(FinitePoset<ExplicitPoset>);

}  // namespace forcinglab
