#include <gtest/gtest.h>

#include <fstream>

#include "forcinglab/experiment.hpp"

using namespace forcinglab;

namespace {

ExperimentConfig cfg(const char* text) { return config_from_json(Json::parse(text)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const LabError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no LabError thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Config, RejectsUnknownTopLevelKey) {
  EXPECT_EQ(code_of([] { cfg(R"({"experiment":"collapse","bogus":1})"); }), ErrorCode::ConfigInvalid);
}

TEST(Config, RejectsUnknownParameter) {
  auto c = cfg(R"({"experiment":"collapse","parameters":{"target":3,"tagret":4}})");
  EXPECT_EQ(code_of([&] { run_experiment(c); }), ErrorCode::ConfigInvalid);
}

TEST(Config, RejectsUnknownExperiment) {
  auto c = cfg(R"({"experiment":"no-such-lab"})");
  EXPECT_EQ(code_of([&] { run_experiment(c); }), ErrorCode::ConfigInvalid);
}

TEST(Config, RejectsMissingExperiment) {
  EXPECT_EQ(code_of([] { cfg(R"({"parameters":{}})"); }), ErrorCode::ConfigInvalid);
}

TEST(Config, RoundTrip) {
  auto c = cfg(R"({"experiment":"socks-generic","name":"s","seed":9,"expect":"pass",
                   "universe":{"plain_atoms":3,"sock_pairs":2},"parameters":{"pairs":2}})");
  EXPECT_EQ(config_to_json(config_from_json(config_to_json(c))), config_to_json(c));
  EXPECT_EQ(*c.seed, 9u);
  EXPECT_EQ(c.universe->sock_pairs, 2u);
}

TEST(Json, ConditionRoundTrip) {
  std::vector<Condition> cs{
      Condition(PosetFamily::fin2(PointKind::Nat), {{nat(0), bit(1)}, {nat(3), bit(0)}}),
      Condition(PosetFamily::fin2(PointKind::Atom), {{at(Atom::plain(2)), bit(1)}}),
      Condition(PosetFamily::fin2(PointKind::AtomColumn), {{column(Atom::sock(1, Side::Right), 4), bit(0)}}),
      Condition(PosetFamily::fin_inj(), {{nat(0), atom_val(Atom::plain(5))}, {nat(1), atom_val(Atom::plain(0))}}),
      Condition(PosetFamily::fin_pi1_inj(3), {{nat(2), pair_val(Atom::plain(1), 2)}}),
  };
  for (const auto& c : cs) {
    auto j = condition_to_json(c);
    EXPECT_EQ(condition_from_json(j), c) << j.dump();
    EXPECT_EQ(condition_from_json(Json::parse(j.dump())), c);
  }
}

TEST(Json, InvalidConditionRejected) {
  auto j = Json::parse(R"({"family":"fin-inj","entries":[[0,"P1"],[1,"P1"]]})");
  EXPECT_THROW(condition_from_json(j), LabError);
}

TEST(Json, NameRoundTrip) {
  for (const auto& n : {cohen_bit_name(4), constant_name(PosetFamily::fin2(PointKind::Nat), {3, 1, 4})}) {
    EXPECT_EQ(name_from_json(name_to_json(n)), n);
  }
}

TEST(Json, OrdinalRoundTrip) {
  for (const char* s : {"0", "7", "w", "w^2*3+w+1"}) {
    auto o = ordinal_from_json(Json(s));
    EXPECT_EQ(ordinal_from_json(ordinal_to_json(o)), o) << s;
  }
}

TEST(Report, RoundTrip) {
  auto r = run_experiment(cfg(R"({"experiment":"antichain-cube","parameters":{"points":2}})"), {}, "k");
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
  EXPECT_EQ(report_from_json(Json::parse(emit_report(r, Format::Json))), r);
}

TEST(Report, DeterministicBytes) {
  const char* text = R"({"experiment":"socks-generic","seed":5,"parameters":{"pairs":6}})";
  auto a = emit_report(run_experiment(cfg(text)), Format::Json);
  auto b = emit_report(run_experiment(cfg(text)), Format::Json);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("elapsed_ms"), std::string::npos);
}

TEST(Report, TimingsOnRequest) {
  RunOptions o;
  o.timings = true;
  auto r = run_experiment(cfg(R"({"experiment":"collapse","parameters":{"target":2}})"), o);
  EXPECT_TRUE(r.elapsed_ms.has_value());
}

TEST(Labs, AntichainBoundX4K2) {
  auto r = run_experiment(cfg(R"({"experiment":"antichain-bound","parameters":{"xsize":4,"k":2}})"));
  EXPECT_EQ(r.results.at("max"), 4);
  EXPECT_EQ(r.results.at("bound"), 4);
  EXPECT_EQ(r.results.at("packing_failures"), 0);
  EXPECT_EQ(r.verdict, "pass");
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Labs, SocksEmpty) {
  auto r = run_experiment(cfg(R"({"experiment":"socks-generic","parameters":{"pairs":0}})"));
  EXPECT_TRUE(r.results.at("order").empty());
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Labs, CohenPyramidExpectNone) {
  auto r = run_experiment(
      cfg(R"({"experiment":"pyramid-capstone","expect":"none-within-budget","parameters":{"family":"cohen","depth":10}})"));
  EXPECT_EQ(r.verdict, "none-within-budget");
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Labs, BoundedNegativeWithoutExpectIsBudget) {
  auto r = run_experiment(cfg(R"({"experiment":"pyramid-capstone","parameters":{"family":"cohen","depth":4}})"));
  EXPECT_EQ(r.verdict, "none-within-budget");
  EXPECT_EQ(r.exit_code(), 3);
}

TEST(Labs, WrongExpectIsViolation) {
  auto r = run_experiment(cfg(R"({"experiment":"pyramid-capstone","expect":"capstone","parameters":{"family":"cohen","depth":3}})"));
  EXPECT_EQ(r.exit_code(), 2);
}

TEST(Labs, ClashingWitnessesParseBack) {
  auto name = name_to_json(cohen_bit_name(4));
  Json params{{"name", name}, {"capstone", condition_to_json(Condition(PosetFamily::fin2(PointKind::Nat), {}))}};
  ExperimentConfig c;
  c.experiment = "evaluate";
  c.parameters = params;
  auto r = run_experiment(c);
  ASSERT_EQ(r.verdict, "incompatible-prefixes");
  EXPECT_EQ(r.exit_code(), 2);
  auto first = condition_from_json(r.results.at("first").at("condition"));
  auto second = condition_from_json(r.results.at("second").at("condition"));
  const auto kCohen = PosetFamily::fin2(PointKind::Nat);
  EXPECT_EQ(first, Condition(kCohen, {{nat(0), bit(0)}}));
  EXPECT_EQ(second, Condition(kCohen, {{nat(0), bit(1)}}));
  EXPECT_FALSE(compatible(first, second));
  EXPECT_NE(r.results.at("first").at("prefix"), r.results.at("second").at("prefix"));
}

TEST(Suite, SortedAndExitCodes) {
  auto cfgs = suite_from_json(Json::parse(R"([
    {"name":"b","experiment":"collapse","parameters":{"target":2}},
    {"name":"a","experiment":"pyramid-capstone","parameters":{"family":"cohen","depth":2}}])"));
  auto rs = run_suite(cfgs);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].key, "a");
  EXPECT_EQ(rs[1].key, "b");
  EXPECT_EQ(suite_exit_code(rs), 3);
  rs[1].outcome = Outcome::Violation;
  EXPECT_EQ(suite_exit_code(rs), 2);
  EXPECT_EQ(suite_exit_code({}), 0);
}

TEST(Suite, DefaultKeysAndDuplicates) {
  auto rs = run_suite(suite_from_json(Json::parse(R"([{"experiment":"collapse","parameters":{"target":1}},{"experiment":"collapse","parameters":{"target":2}}])")));
  EXPECT_EQ(rs[0].key, "collapse#000");
  EXPECT_EQ(rs[1].key, "collapse#001");
  auto dup = suite_from_json(Json::parse(R"([{"name":"x","experiment":"collapse"},{"name":"x","experiment":"collapse"}])"));
  EXPECT_EQ(code_of([&] { run_suite(dup); }), ErrorCode::ConfigInvalid);
}

TEST(Suite, SampleConfigsPass) {
  std::ifstream in(std::string(FORCINGLAB_CONFIG_DIR) + "/suite.json");
  ASSERT_TRUE(in);
  auto rs = run_suite(suite_from_json(Json::parse(in)));
  EXPECT_GE(rs.size(), 10u);
  for (const auto& r : rs) EXPECT_EQ(r.exit_code(), 0) << r.key << ": " << r.verdict;
  EXPECT_EQ(suite_exit_code(rs), 0);
}
