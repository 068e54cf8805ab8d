// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forcinglab/forcinglab.hpp"

using namespace forcinglab;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const char* what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
  void expect(bool cond, const std::string& what) { expect(cond, what.c_str()); }
};

Atom P(std::uint32_t i) { return Atom::plain(i); }

const PosetFamily kCohen = PosetFamily::fin2(PointKind::Nat);

/// All subsets of `atoms` with at most `max` elements.
std::vector<Support> small_subsets(const std::vector<Atom>& atoms, std::size_t max) {
  std::vector<Support> out;
  std::function<void(std::size_t, Support)> go = [&](std::size_t i, Support s) {
    if (i == atoms.size()) {
      out.push_back(s);
      return;
    }
    go(i + 1, s);
    if (s.size() < max) {
      s.insert(atoms[i]);
      go(i + 1, s);
    }
  };
  go(0, {});
  return out;
}

std::size_t pow2(std::size_t k) { return std::size_t{1} << k; }

// 1 + 2: exact antichain maximum and the packing count on every antichain.
void antichain_bound(Check& c) {
  std::size_t cases = 0, visited = 0;
  for (std::size_t k = 0; k <= 3; ++k) {
    for (std::size_t x = k; x <= 5; ++x) {
      auto r = max_antichain_size_bruteforce(x, k);
      ++cases;
      visited += r.antichains_checked;
      c.expect(r.max_size == pow2(k), "|X|=" + std::to_string(x) + " k=" + std::to_string(k) + " max " +
                                          std::to_string(r.max_size));
      c.expect(r.packing_failures == 0, "packing failure at |X|=" + std::to_string(x) + " k=" + std::to_string(k));
      c.expect(r.witness.size() == pow2(k), "witness size");
      for (std::size_t i = 0; i < r.witness.size(); ++i) {
        c.expect(r.witness[i].size() == k, "witness member of the wrong size");
        for (std::size_t j = i + 1; j < r.witness.size(); ++j) {
          c.expect(!compatible(r.witness[i], r.witness[j]), "witness is not an antichain");
        }
      }
    }
  }
  c.detail << cases << " (k, |X|) cases, " << visited << " antichains";
}

void packing(Check& c) {
  std::size_t cases = 0, visited = 0, failures = 0;
  for (std::size_t k = 0; k <= 3; ++k) {
    for (std::size_t x = k; x <= 5; ++x) {
      auto r = max_antichain_size_bruteforce(x, k);
      ++cases;
      visited += r.antichains_checked;
      failures += r.packing_failures;
      auto rep = verify_packing(r.witness);
      c.expect(rep.packing_left <= rep.packing_right, "witness packing");
    }
  }
  c.expect(visited > 0, "no antichain visited");
  c.expect(failures == 0, std::to_string(failures) + " packing failures");
  c.detail << visited << " antichains over " << cases << " cases, " << failures << " failures";
}

// 3: socks generic and equivariance.
void socks(Check& c) {
  const std::uint32_t n = 16;
  const Universe u{0, n};
  auto frag = build_generic(sock_specs(n), Condition(PosetFamily::fin2(PointKind::AtomColumn)), u);
  std::set<std::uint32_t> met;
  for (const auto& [spec, idx] : frag.met) {
    if (auto* s = std::get_if<SockColumn>(&spec); s && is_member(spec, frag.chain.at(idx))) met.insert(s->pair);
  }
  c.expect(met.size() == n, "met " + std::to_string(met.size()) + " of 16 dense sets");
  auto order = extract_sock_order(frag, n);
  std::set<Atom> distinct(order.order.begin(), order.order.end());
  c.expect(order.order.size() == 2 * n && distinct.size() == 2 * n, "order is not total on 32 atoms");
  for (std::uint32_t i = 0; i < n; ++i) {
    for (auto side : {Side::Left, Side::Right}) c.expect(distinct.contains(Atom::sock(i, side)), "sock missing");
  }
  std::mt19937_64 rng(2024);
  std::size_t failures = 0;
  for (int t = 0; t < 100; ++t) {
    Permutation pi;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (rng() % 2) pi = pi * Permutation::sock_swap(i);
    }
    c.expect(pi.in_group(GroupSpec::SocksGroup), "permutation outside the socks group");
    if (extract_sock_order(act(pi, frag), n) != transport(pi, order)) ++failures;
  }
  c.expect(failures == 0, std::to_string(failures) + " equivariance failures");
  c.detail << "32 atoms ordered, 100 permutations, " << failures << " failures";
}

// 4: choice refutation over every small support.
void choice(Check& c) {
  const std::uint32_t pairs = 10;
  std::vector<Atom> socks;
  for (std::uint32_t i = 0; i < pairs; ++i) {
    socks.push_back(Atom::sock(i, Side::Left));
    socks.push_back(Atom::sock(i, Side::Right));
  }
  std::size_t supports = 0;
  for (const auto& s : small_subsets(socks, 6)) {
    ++supports;
    auto r = refute_choice(s, pairs);
    const Atom l = Atom::sock(r.pair, Side::Left), rr = Atom::sock(r.pair, Side::Right);
    c.expect(!s.contains(l) && !s.contains(rr), "witness pair meets S");
    c.expect(r.swap.fixes_pointwise(s), "swap moves S");
    c.expect(r.swap(l) == rr && r.swap(rr) == l, "swap does not exchange the pair");
    c.expect(r.swap.in_group(GroupSpec::SocksGroup), "swap outside the group");
    c.expect(r.moved_selectors.size() == 2, "need both selectors");
    std::set<Atom> chosen;
    for (const auto& sel : r.moved_selectors) {
      const std::set<Atom> pair{l, rr};
      c.expect(sel.size() == 1 && sel.begin()->first == pair, "selector is not on the witness pair");
      chosen.insert(sel.begin()->second);
      c.expect(r.swap(sel.begin()->second) != sel.begin()->second, "selector fixed");
    }
    c.expect(chosen.size() == 2, "selectors coincide");
  }
  c.detail << supports << " supports over 20 socks";
}

// 5: name bounds, the equality case, and the ordinal injections.
void names(Check& c) {
  std::mt19937_64 rng(5);
  const auto pts = Bounds::nat_points(4).points;
  const Condition empty(kCohen);
  std::size_t checks = 0;
  for (int t = 0; t < 100; ++t) {
    auto name = random_nice_name(pts, 8, 16, rng);
    for (std::size_t alpha = 0; alpha < 8; ++alpha) {
      for (std::size_t k = 0; k <= 4; ++k) {
        ++checks;
        auto a = compute_A_alpha_k(name, empty, alpha, k, pts);
        c.expect(a.size() <= pow2(k), "|A| > 2^k");
        for (auto v : a) c.expect(v < 16, "value out of range");
      }
    }
  }
  bool equality = false;
  for (std::size_t k = 1; k <= 4; ++k) {
    std::vector<IndexPoint> cube(pts.begin(), pts.begin() + k);
    equality = equality || compute_A_alpha_k(full_cube_name(cube, 1, 0), empty, 0, k, pts).size() == pow2(k);
  }
  c.expect(equality, "no equality case");

  std::set<OrdinalCNF, OrdinalLess> grid;
  for (std::uint64_t a = 0; a < 32; ++a) {
    for (std::uint64_t k = 0; k < 32; ++k) grid.insert(omega_times_plus(a, k));
  }
  c.expect(grid.size() == 1024, "omega_times_plus collides on the grid");

  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<OrdinalCNF>> fam(1 + rng() % 8);
    std::set<OrdinalCNF, OrdinalLess> all;
    for (auto& b : fam) {
      const auto size = rng() % 6;
      for (std::size_t i = 0; i < size; ++i) {
        std::vector<std::uint64_t> co{rng() % 4, rng() % 3, rng() % 2};
        while (!co.empty() && co.back() == 0) co.pop_back();
        b.push_back(OrdinalCNF::from_coefficients(co));
        all.insert(b.back());
      }
    }
    auto m = embed_finite_family(fam);
    std::set<OrdinalCNF, OrdinalLess> image;
    for (const auto& [x, y] : m) image.insert(y);
    c.expect(m.size() == all.size() && image.size() == m.size(), "embedding not injective");
  }
  c.detail << checks << " A-set checks, 1024 grid values, 100 families";
}

Condition inj(const std::vector<Atom>& values) {
  Condition c(PosetFamily::fin_inj());
  for (std::size_t i = 0; i < values.size(); ++i) c = c.with(nat(i), atom_val(values[i]));
  return c;
}

std::vector<Condition> prefix_chain(const std::vector<Atom>& values) {
  std::vector<Condition> chain;
  for (std::size_t n = 0; n <= values.size(); ++n) chain.push_back(inj({values.begin(), values.begin() + n}));
  return chain;
}

// 6: stabilization of supported chains.
void stabilization(Check& c) {
  const std::uint32_t atoms = 9;
  const Universe u{atoms, 0};
  std::vector<Atom> pool;
  for (std::uint32_t i = 0; i < atoms; ++i) pool.push_back(P(i));
  std::size_t supports = 0, chains = 0, refusals = 0;
  for (const auto& s : small_subsets(pool, 5)) {
    ++supports;
    std::size_t longest = 0;
    std::function<void(const std::vector<Atom>&)> dfs = [&](const std::vector<Atom>& vals) {
      ++chains;
      auto t = support_stabilization(prefix_chain(vals), s, u);
      c.expect(t.strict_steps == vals.size() && t.strict_steps <= s.size(), "too many strict steps");
      longest = std::max(longest, t.strict_steps);
      for (const auto& x : pool) {
        if (std::find(vals.begin(), vals.end(), x) != vals.end()) continue;
        auto next = vals;
        next.push_back(x);
        if (s.contains(x)) {
          dfs(next);
          continue;
        }
        // Further strict steps are attempted once the chain has used up S.
        if (vals.size() < s.size()) continue;
        try {
          support_stabilization(prefix_chain(next), s, u);
          c.expect(false, "step outside S accepted");
        } catch (const NotSupportedError& e) {
          ++refusals;
          const auto moved = e.witness().moved();
          c.expect(moved.size() == 2 && moved.contains(x), "witness is not a transposition moving the new value");
          c.expect(e.witness().fixes_pointwise(s), "witness moves S");
        }
      }
    };
    dfs({});
    c.expect(longest == s.size(), "bound |S| not attained");
  }
  c.detail << supports << " supports, " << chains << " chains, " << refusals << " NotSupported refusals";
}

// 7: Cohen real and collapse extractions.
void extractions(Check& c) {
  std::vector<DenseSetSpec> coords;
  for (std::uint64_t i = 0; i < 8; ++i) coords.push_back(CoordInDomain{i});
  auto bits_frag = build_generic(coords, Condition(PosetFamily::fin_pi1_inj(2)), Universe{10, 0});
  for (const auto& [spec, idx] : bits_frag.met) c.expect(is_member(spec, bits_frag.chain.at(idx)), "bits: dense set missed");
  c.expect(bits_frag.met.size() == 8, "bits: not all dense sets met");
  auto bits = extract_bits(bits_frag, 8);
  c.expect(bits.size() == 8 && bits.find_first_not_of("01") == std::string::npos, "bits: bad string");

  std::vector<DenseSetSpec> hits;
  for (std::uint64_t b = 0; b < 6; ++b) hits.push_back(HitValue{b});
  auto surj_frag = build_generic(hits, Condition(PosetFamily::fin_pi1_inj(6)), Universe{8, 0});
  c.expect(surj_frag.met.size() == 6, "surjection: not all dense sets met");
  std::set<std::uint64_t> target{0, 1, 2, 3, 4, 5}, range;
  for (const auto& [i, b] : extract_surjection(surj_frag, target)) range.insert(b);
  c.expect(range == target, "surjection is not onto");
  c.detail << "bits " << bits << ", onto 6 values";
}

// 8: pyramids and capstones.
void pyramids(Check& c) {
  ConditionSpace space(kCohen, Bounds::nat_points(10));
  auto pyr = cohen_level_pyramid(space, 10);
  c.expect(!validate_pyramid(space, pyr).has_value(), "Cohen pyramid invalid");
  auto search = find_capstone(space, pyr);
  c.expect(std::holds_alternative<NoneWithinBudget>(search), "Cohen pyramid has a capstone inside the bounds");
  auto built = capstone_from_chain(space, pyr, cohen_extension_selector(), exhaustive_lower_bound(space));
  c.expect(!built.ok() && built.oracle_failed, "Cohen chain construction should fail the oracle");

  // Every strictly descending 8-chain of a binary tree with a bottom.
  auto tree = ExplicitPoset::tree_with_bottom(2, 7);
  std::size_t chains = 0;
  std::function<void(std::vector<std::size_t>)> dfs = [&](std::vector<std::size_t> chain) {
    if (chain.size() == 8) {
      ++chains;
      auto p = singleton_pyramid(chain);
      c.expect(!validate_pyramid(tree, p).has_value(), "singleton pyramid invalid");
      auto s = find_capstone(tree, p);
      auto* cap = std::get_if<Capstone<std::size_t>>(&s);
      c.expect(cap != nullptr, "no capstone for a descending chain");
      auto b = capstone_from_chain(tree, p, canonical_selector(tree, p), exhaustive_lower_bound(tree));
      c.expect(b.ok(), "construction failed: " + b.failure);
      if (cap && b.ok()) {
        c.expect(b.capstone->q == cap->q, "construction and search disagree");
        for (const auto& [k, w] : cap->witnesses) c.expect(tree.leq(cap->q, w) && w == chain[k], "bad witness");
      }
      return;
    }
    for (auto e : tree.successors(chain.back())) {
      auto next = chain;
      next.push_back(e);
      dfs(next);
    }
  };
  for (auto e : tree.elements()) dfs({e});
  c.expect(chains > 0, "no chains");
  c.detail << "Cohen depth 10 none-within-budget, " << chains << " tree chains with capstones";
}

// 9: names through pyramids and capstones.
void name_machinery(Check& c) {
  ConditionSpace space(kCohen, Bounds::nat_points(4));
  const NameOracle oracle{cohen_bit_name(4), 4, Condition(kCohen)};
  auto np = pyramid_from_name(space, oracle);
  std::set<Condition> seen;
  std::size_t total = 0;
  auto decided_len = [](const Condition& p) {
    std::size_t m = 0;
    while (m < 4 && p.defines(nat(m))) ++m;
    return m;
  };
  for (std::size_t n = 0; n < np.pyramid.depth(); ++n) {
    for (const auto& p : np.pyramid.levels[n]) {
      ++total;
      seen.insert(p);
      c.expect(decided_len(p) == n, "level mismatch for " + to_string(p));
    }
  }
  for (const auto& p : np.decides_all) {
    ++total;
    seen.insert(p);
    c.expect(decided_len(p) == 4, "decides-all member decides less");
  }
  c.expect(total == seen.size(), "levels overlap");
  c.expect(seen.size() == space.elements().size() && np.cone_size == 81, "partition does not cover the cone");

  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    std::vector<std::uint64_t> vals(1 + rng() % 4);
    for (auto& v : vals) v = rng() % 5;
    const NameOracle constant{constant_name(kCohen, vals), vals.size(), Condition(kCohen)};
    c.expect(evaluate_via_capstone(space, Condition(kCohen), constant) == vals, "constant prefix not returned");
  }

  try {
    evaluate_via_capstone(space, Condition(kCohen), oracle);
    c.expect(false, "Cohen name evaluated without a clash");
  } catch (const IncompatiblePrefixesError& e) {
    c.expect(e.first_prefix() != e.second_prefix(), "prefixes agree");
    c.expect(!compatible(e.first(), e.second()), "witnesses are compatible");
    for (const auto* w : {&e.first(), &e.second()}) {
      auto pre = decided_prefix(*w, oracle.name, e.length());
      c.expect(pre.has_value(), "witness does not decide the prefix");
    }
    c.detail << "cone 81 partitioned, clash " << to_string(e.first()) << " vs " << to_string(e.second());
  }
}

// 10: supported antichains live inside Fin(S,2).
void supported_antichain(Check& c) {
  const Universe u{8, 0};
  std::vector<Atom> pool;
  for (std::uint32_t i = 0; i < 8; ++i) pool.push_back(P(i));
  const PosetFamily fam = PosetFamily::fin2(PointKind::Atom);
  std::size_t supports = 0, witnesses = 0;
  for (const auto& s : small_subsets(pool, 4)) {
    ++supports;
    std::vector<Condition> cands;
    Atom outside = P(0);
    for (const auto& a : pool) {
      if (!s.contains(a)) {
        outside = a;
        break;
      }
    }
    cands.push_back(Condition(fam, {{at(outside), bit(0)}}));
    if (!s.empty()) {
      cands.push_back(Condition(fam, {{at(*s.begin()), bit(1)}}));
      cands.push_back(Condition(fam, {{at(*s.begin()), bit(1)}, {at(outside), bit(1)}}));
    }
    auto r = refute_supported_infinite_antichain(s, u, cands);
    c.expect(r.bound == pow2(s.size()), "bound " + std::to_string(r.bound) + " for |S|=" + std::to_string(s.size()));
    c.expect(r.witnesses.size() == (s.empty() ? 1u : 2u), "rename witness count");
    for (const auto& w : r.witnesses) {
      ++witnesses;
      c.expect(w.transposition.moved().size() == 2 && w.transposition.fixes_pointwise(s), "bad transposition");
      c.expect(act(w.transposition, w.member) == w.renamed, "renamed is not the image");
      c.expect(w.renamed != w.member && compatible(w.member, w.renamed), "rename twin not distinct and compatible");
    }
  }
  c.detail << supports << " supports, " << witnesses << " rename witnesses";
}

struct Criterion {
  int id;
  double limit_s;
  void (*run)(Check&);
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, 10, antichain_bound}, {2, 10, packing},       {3, 5, socks},  {4, 5, choice},
      {5, 20, names},           {6, 5, stabilization}, {7, 2, extractions}, {8, 10, pyramids},
      {9, 10, name_machinery},  {10, 5, supported_antichain},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < cr.limit_s, "over the time limit");
    if (!c.ok) ++failed;
    std::printf("criterion %d: %s (%.2f s, limit %.0f s) %s\n", cr.id, c.ok ? "PASS" : "FAIL", secs, cr.limit_s,
                c.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
