#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "forcinglab/forcinglab.hpp"

using namespace forcinglab;

namespace {

Atom P(std::uint32_t i) { return Atom::plain(i); }
Atom L(std::uint32_t n) { return Atom::sock(n, Side::Left); }
Atom R(std::uint32_t n) { return Atom::sock(n, Side::Right); }

// Every permutation of the plain atoms of u that fixes S pointwise.
std::vector<Permutation> full_stabilizer(const Support& s, const Universe& u) {
  std::vector<Atom> free;
  for (auto a : u.plain()) {
    if (!s.contains(a)) free.push_back(a);
  }
  std::vector<Atom> img = free;
  std::vector<Permutation> out;
  do {
    std::map<Atom, Atom> m;
    for (std::size_t i = 0; i < free.size(); ++i) m[free[i]] = img[i];
    out.emplace_back(m);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

template <class T>
bool supported_by_orbit(const T& obj, const Support& s, const Universe& u) {
  for (const auto& pi : full_stabilizer(s, u)) {
    if (act(pi, obj) != obj) return false;
  }
  return true;
}

}  // namespace

TEST(Atom, SerializationRoundTrip) {
  for (auto a : {P(0), P(17), L(3), R(0)}) EXPECT_EQ(parse_atom(to_string(a)), a);
  EXPECT_EQ(to_string(L(2)), "S2L");
  EXPECT_EQ(to_string(P(5)), "P5");
  EXPECT_THROW(parse_atom("Q1"), LabError);
  EXPECT_THROW(parse_atom("S1X"), LabError);
}

TEST(Atom, CanonicalOrder) {
  std::vector<Atom> v{R(1), P(3), L(1), P(0), L(0)};
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, (std::vector<Atom>{P(0), P(3), L(0), L(1), R(1)}));
  EXPECT_EQ(L(4).partner(), R(4));
}

TEST(Permutation, CompositionAndInverse) {
  auto a = Permutation::transposition(P(0), P(1));
  auto b = Permutation::transposition(P(1), P(2));
  auto ab = a * b;
  EXPECT_EQ(ab(P(2)), P(0));  // b first, then a
  EXPECT_EQ(ab(P(0)), P(1));
  EXPECT_TRUE((ab * ab.inverse()).is_identity());
  EXPECT_EQ(to_string(Permutation::identity()), "id");
  EXPECT_THROW(Permutation(std::map<Atom, Atom>{{P(0), P(1)}}), LabError);
}

TEST(Permutation, GroupMembership) {
  EXPECT_TRUE(Permutation::sock_swap(2).in_group(GroupSpec::SocksGroup));
  EXPECT_FALSE(Permutation::transposition(L(0), L(1)).in_group(GroupSpec::SocksGroup));
  EXPECT_TRUE(Permutation::transposition(P(0), P(4)).in_group(GroupSpec::FullSymmetric));
  EXPECT_FALSE(Permutation::sock_swap(0).in_group(GroupSpec::FullSymmetric));
}

TEST(ApplyPerm, IdentityFixesConditions) {
  Universe u{4, 2};
  Condition c(PosetFamily::fin2(PointKind::AtomColumn), {{column(L(0), 0), bit(0)}, {column(R(1), 2), bit(1)}});
  EXPECT_EQ(apply_perm(Permutation::identity(), c, u), c);
}

TEST(ApplyPerm, SockSwapTransportsColumn) {
  Universe u{0, 4};
  auto fam = PosetFamily::fin2(PointKind::AtomColumn);
  Condition c(fam, {{column(L(3), 0), bit(0)}});
  EXPECT_EQ(apply_perm(Permutation::sock_swap(3), c, u), Condition(fam, {{column(R(3), 0), bit(0)}}));
}

TEST(ApplyPerm, TranspositionMovesCube) {
  Universe u{4, 0};
  auto fam = PosetFamily::fin2(PointKind::Atom);
  std::vector<IndexPoint> e1{at(P(1))}, e2{at(P(2))};
  auto cube1 = full_cube_antichain(e1);
  auto cube2 = full_cube_antichain(e2);
  auto moved = apply_perm(Permutation::transposition(P(1), P(2)), cube1, u);
  // Element-wise comparison of the two sides as sets.
  std::set<Condition> lhs(moved.begin(), moved.end()), rhs(cube2.begin(), cube2.end());
  EXPECT_EQ(lhs, rhs);
  for (const auto& c : lhs) EXPECT_EQ(c.family(), fam);
}

TEST(ApplyPerm, RejectsAtomsOutsideUniverse) {
  Universe u{2, 0};
  Condition c(PosetFamily::fin_inj(), {{nat(0), atom_val(P(5))}});
  EXPECT_THROW(apply_perm(Permutation::identity(), c, u), LabError);
  Condition d(PosetFamily::fin_inj(), {{nat(0), atom_val(P(1))}});
  EXPECT_THROW(apply_perm(Permutation::transposition(P(0), P(7)), d, u), LabError);
}

TEST(Support, AllAtomsInSupport) {
  Universe u{0, 4};
  Condition c(PosetFamily::fin2(PointKind::AtomColumn), {{column(L(0), 0), bit(0)}, {column(R(0), 1), bit(1)}});
  EXPECT_TRUE(is_supported_by(c, {L(0), R(0)}, GroupSpec::SocksGroup, u));
}

TEST(Support, ChoiceLikeMapIsUnsupported) {
  Universe u{0, 4};
  Selector sel{{sock_pair(1), L(1)}};
  auto w = find_support_violation(sel, {}, GroupSpec::SocksGroup, u);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, Permutation::sock_swap(1));
}

TEST(Support, CubeSupportedByItsPoints) {
  Universe u{5, 0};
  std::vector<IndexPoint> e{at(P(1)), at(P(2))};
  auto cube = full_cube_antichain(e);
  std::set<Condition> as_set(cube.begin(), cube.end());
  EXPECT_TRUE(is_supported_by(as_set, {P(1), P(2)}, GroupSpec::FullSymmetric, u));
  auto w = find_support_violation(as_set, {P(1)}, GroupSpec::FullSymmetric, u);
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(w->fixes_pointwise({P(1)}));
  EXPECT_NE(act(*w, as_set), as_set);
}

TEST(Support, InsufficientUniverse) {
  Universe u{3, 0};
  Condition c(PosetFamily::fin_inj(), {{nat(0), atom_val(P(0))}, {nat(1), atom_val(P(1))}});
  EXPECT_THROW(is_supported_by(c, {}, GroupSpec::FullSymmetric, u), LabError);
}

// Generator-based check agrees with the full stabilizer on random objects.
TEST(Support, GeneratorsAgreeWithFullStabilizer) {
  Universe u{6, 0};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::set<Atom>> obj;
    for (int k = rng() % 3; k >= 0; --k) {
      std::set<Atom> member;
      for (std::uint32_t i = 0; i < 4; ++i) {
        if (rng() % 2) member.insert(P(i));
      }
      obj.insert(member);
    }
    Support s;
    for (std::uint32_t i = 0; i < 4; ++i) {
      if (rng() % 2) s.insert(P(i));
    }
    EXPECT_EQ(is_supported_by(obj, s, GroupSpec::FullSymmetric, u), supported_by_orbit(obj, s, u));
  }
}

TEST(Support, SupersetOfSupportStillSupports) {
  Universe u{7, 0};
  std::vector<Atom> obj{P(0), P(2)};
  EXPECT_TRUE(is_supported_by(obj, {P(0), P(2)}, GroupSpec::FullSymmetric, u));
  EXPECT_TRUE(is_supported_by(obj, {P(0), P(2), P(4)}, GroupSpec::FullSymmetric, u));
}

TEST(Support, EquivariantUnderConjugation) {
  Universe u{6, 0};
  std::vector<Atom> obj{P(0), P(1)};
  Support s{P(0), P(1)};
  auto pi = Permutation::transposition(P(1), P(3));
  EXPECT_EQ(is_supported_by(obj, s, GroupSpec::FullSymmetric, u),
            is_supported_by(act(pi, obj), act(pi, s), GroupSpec::FullSymmetric, u));
}

TEST(RefuteChoice, LeastUntouchedPair) {
  EXPECT_EQ(refute_choice({}, 4).pair, 0u);
  auto r = refute_choice({L(0), R(1)}, 4);
  EXPECT_EQ(r.pair, 2u);
  EXPECT_EQ(r.swap, Permutation::sock_swap(2));
  ASSERT_EQ(r.moved_selectors.size(), 2u);
  for (const auto& sel : r.moved_selectors) EXPECT_NE(act(r.swap, sel), sel);
}

TEST(RefuteChoice, NoUntouchedPair) {
  try {
    refute_choice({L(0), R(1), L(2)}, 3);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoUntouchedPair);
  }
}

TEST(SupportedFunction, ConstantMap) {
  Universe u{5, 0};
  auto v = classify_supported_function(SupportedFunction(0), {}, u);
  EXPECT_EQ(v.off_support_constant, 0u);
  EXPECT_EQ(v.range, (std::set<std::uint64_t>{0}));
  EXPECT_FALSE(v.onto_omega);
}

TEST(SupportedFunction, SingleException) {
  Universe u{5, 0};
  SupportedFunction f({{P(1), 5}}, 0);
  auto v = classify_supported_function(f, {P(1)}, u);
  EXPECT_EQ(v.off_support_constant, 0u);
  EXPECT_EQ(v.range, (std::set<std::uint64_t>{0, 5}));
}

TEST(SupportedFunction, TwoValuesOffSupport) {
  Universe u{6, 0};
  SupportedFunction f({{P(2), 1}, {P(3), 2}}, 0);
  try {
    classify_supported_function(f, {P(0)}, u);
    FAIL();
  } catch (const NotSupportedError& e) {
    EXPECT_EQ(e.witness().moved().size(), 2u);
    EXPECT_TRUE(e.witness().fixes_pointwise({P(0)}));
    EXPECT_NE(act(e.witness(), f), f);
  }
}
