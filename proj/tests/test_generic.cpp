#include <gtest/gtest.h>

#include <random>

#include "forcinglab/forcinglab.hpp"

using namespace forcinglab;

namespace {

Atom L(std::uint32_t n) { return Atom::sock(n, Side::Left); }
Atom R(std::uint32_t n) { return Atom::sock(n, Side::Right); }

const PosetFamily kSocks = PosetFamily::fin2(PointKind::AtomColumn);

Permutation random_socks_perm(std::uint32_t pairs, std::mt19937_64& rng) {
  Permutation pi;
  for (std::uint32_t n = 0; n < pairs; ++n) {
    if (rng() % 2) pi = pi * Permutation::sock_swap(n);
  }
  return pi;
}

}  // namespace

TEST(DenseExtend, SockColumnFromEmpty) {
  Universe u{0, 2};
  auto q = dense_extend(SockColumn{0}, Condition(kSocks), u);
  EXPECT_EQ(q, Condition(kSocks, {{column(L(0), 0), bit(0)}, {column(R(0), 0), bit(1)}}));
}

TEST(DenseExtend, MemberIsFixed) {
  Universe u{0, 2};
  Condition p(kSocks, {{column(L(1), 4), bit(1)}, {column(R(1), 4), bit(0)}});
  EXPECT_EQ(dense_extend(SockColumn{1}, p, u), p);
}

TEST(DenseExtend, SkipsOccupiedColumn) {
  Universe u{0, 2};
  Condition p(kSocks, {{column(L(1), 0), bit(0)}, {column(R(1), 0), bit(0)}});
  auto q = dense_extend(SockColumn{1}, p, u);
  EXPECT_EQ(sock_column_with_both_bits(q, 1), std::optional<std::uint64_t>(1));
  EXPECT_TRUE(leq(q, p));
}

TEST(DenseExtend, ResultIsMemberAndBelow) {
  Universe u{6, 4};
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    auto p = random_sock_condition(4, 3, rng);
    for (std::uint32_t n = 0; n < 4; ++n) {
      auto q = dense_extend(SockColumn{n}, p, u);
      EXPECT_TRUE(is_member(SockColumn{n}, q));
      EXPECT_TRUE(leq(q, p));
    }
  }
  Condition c(PosetFamily::fin_pi1_inj(3));
  for (std::uint64_t i = 0; i < 3; ++i) {
    auto q = dense_extend(HitValue{i}, c, u);
    EXPECT_TRUE(is_member(HitValue{i}, q));
    EXPECT_FALSE(validate(q).has_value());
    c = q;
  }
  EXPECT_THROW(dense_extend(HitValue{3}, Condition(PosetFamily::fin_pi1_inj(3)), u), LabError);
}

TEST(BuildGeneric, NoSpecs) {
  Universe u{0, 1};
  auto g = build_generic({}, Condition(kSocks), u);
  EXPECT_EQ(g.chain.size(), 1u);
  EXPECT_TRUE(g.met.empty());
}

TEST(BuildGeneric, ThreePairs) {
  Universe u{0, 3};
  auto g = build_generic(sock_specs(3), Condition(kSocks), u);
  EXPECT_EQ(g.final_condition().size(), 6u);
  auto o = extract_sock_order(g, 3);
  EXPECT_EQ(o.columns, (std::vector<std::uint64_t>{0, 0, 0}));
  std::vector<DenseSetSpec> rev{SockColumn{2}, SockColumn{0}, SockColumn{1}};
  EXPECT_EQ(build_generic(rev, Condition(kSocks), u).final_condition(), g.final_condition());
  for (std::size_t i = 1; i < g.chain.size(); ++i) EXPECT_TRUE(leq(g.chain[i], g.chain[i - 1]));
}

TEST(SockOrder, SinglePair) {
  Universe u{0, 3};
  auto g = build_generic(sock_specs(3), Condition(kSocks), u);
  auto o = extract_sock_order(g, 1);
  EXPECT_EQ(o.columns, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(o.order, (std::vector<Atom>{L(0), R(0)}));
  EXPECT_EQ(o.rank.at(L(0)), 0u);
  EXPECT_EQ(o.rank.at(R(0)), 1u);
  EXPECT_TRUE(extract_sock_order(g, 0).order.empty());
  EXPECT_THROW(extract_sock_order(g, 4), LabError);
}

TEST(SockOrder, SwapReversesPair) {
  Universe u{0, 3};
  auto g = build_generic(sock_specs(3), Condition(kSocks), u);
  auto swapped = apply_perm(Permutation::sock_swap(0), g, u);
  auto o = extract_sock_order(swapped, 3);
  EXPECT_EQ(o.order[0], R(0));
  EXPECT_EQ(o.order[1], L(0));
  EXPECT_EQ(o, transport(Permutation::sock_swap(0), extract_sock_order(g, 3)));
}

TEST(SockOrder, EquivarianceOnRandomStarts) {
  const std::uint32_t N = 8;
  Universe u{0, N + 2};
  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    auto g = build_generic(sock_specs(N), random_sock_condition(N, 3, rng), u);
    auto o = extract_sock_order(g, N);
    EXPECT_EQ(o.order.size(), 2 * N);
    auto pi = random_socks_perm(N, rng);
    EXPECT_EQ(extract_sock_order(act(pi, g), N), transport(pi, o));
  }
}

TEST(Extraction, BitsFromCanonicalBuild) {
  Universe u{10, 0};
  std::vector<DenseSetSpec> specs;
  for (std::uint64_t i = 0; i < 8; ++i) specs.push_back(CoordInDomain{i});
  auto g = build_generic(specs, Condition(PosetFamily::fin_pi1_inj(2)), u);
  EXPECT_EQ(extract_bits(g, 8), "00000000");
  EXPECT_EQ(extract_bits(g, 0), "");
  EXPECT_THROW(extract_bits(g, 9), LabError);
}

TEST(Extraction, SeededBitsAreReproducible) {
  Universe u{10, 0};
  std::vector<DenseSetSpec> specs;
  for (std::uint64_t i = 0; i < 8; ++i) specs.push_back(CoordInDomain{i});
  std::mt19937_64 a(99), b(99);
  auto ga = build_generic(specs, Condition(PosetFamily::fin_pi1_inj(2)), u, &a);
  auto gb = build_generic(specs, Condition(PosetFamily::fin_pi1_inj(2)), u, &b);
  EXPECT_EQ(extract_bits(ga, 8), extract_bits(gb, 8));
  EXPECT_FALSE(validate(ga.final_condition()).has_value());
}

TEST(Extraction, SurjectionOntoTarget) {
  Universe u{5, 0};
  std::vector<DenseSetSpec> specs{HitValue{0}, HitValue{1}, HitValue{2}};
  auto g = build_generic(specs, Condition(PosetFamily::fin_pi1_inj(3)), u);
  auto f = extract_surjection(g, {0, 1, 2});
  EXPECT_EQ(f.size(), 3u);
  std::set<std::uint64_t> range;
  for (auto [i, beta] : f) range.insert(beta);
  EXPECT_EQ(range, (std::set<std::uint64_t>{0, 1, 2}));
  EXPECT_THROW(extract_surjection(g, {0, 1, 2, 3}), LabError);
}
