// forcinglab command line: experiment suites and single-lab shortcuts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "forcinglab/experiment.hpp"

using namespace forcinglab;

namespace {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LabError(ErrorCode::ConfigInvalid, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LabError(ErrorCode::ConfigInvalid, path + ": " + e.what());
  }
}

// "P0,P1" or "S0L,S2R" -> JSON list of atoms; "" -> empty list.
Json atom_list(const std::string& csv) {
  Json out = Json::array();
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(atom_to_json(parse_atom(item)));
  }
  return out;
}

struct Output {
  std::string format = "json";
  std::string out_dir;
  bool timings = false;
};

int emit(const std::vector<Report>& reports, const Output& o, bool suite) {
  const auto fmt = parse_format(o.format);
  const std::string text = suite ? emit_suite(reports, fmt) : emit_report(reports.front(), fmt);
  if (o.out_dir.empty()) {
    std::cout << text;
  } else {
    std::filesystem::create_directories(o.out_dir);
    const auto path = std::filesystem::path(o.out_dir) / (fmt == Format::Json ? "report.json" : "report.txt");
    std::ofstream(path) << text;
    std::cout << detail::text_table(reports) << "written to " << path.string() << '\n';
  }
  return suite_exit_code(reports);
}

int run_single(ExperimentConfig cfg, const Output& o) {
  RunOptions opts{budget_from_env(), o.timings};
  return emit({run_experiment(cfg, opts)}, o, false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forcinglab: finite-scale experiments with forcing posets, atoms and names"};
  app.require_subcommand(1);
  Output out;
  auto add_output = [&out](CLI::App* sub) {
    sub->add_option("--format", out.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", out.out_dir, "write the report into this directory");
    sub->add_flag("--timings", out.timings, "include wall-clock timings (reports are then not byte-stable)");
  };

  std::string suite_path;
  auto* run = app.add_subcommand("run", "run an experiment suite");
  run->add_option("suite", suite_path, "suite JSON file")->required();
  add_output(run);

  std::uint64_t xsize = 0, k = 0, cube = 0;
  std::string refute;
  auto* antichain = app.add_subcommand("antichain", "antichain bounds in Fin(X,2)");
  auto* o_x = antichain->add_option("--xsize", xsize, "|X| for the brute-force bound");
  auto* o_k = antichain->add_option("--k", k, "domain size of the conditions");
  auto* o_cube = antichain->add_option("--cube", cube, "build the full cube on this many points");
  auto* o_ref = antichain->add_option("--refute-support", refute, "support S, e.g. P0,P1");
  o_x->needs(o_k);
  o_k->needs(o_x);
  o_cube->excludes(o_x)->excludes(o_ref);
  o_ref->excludes(o_x);
  add_output(antichain);

  std::uint32_t pairs = 0;
  std::uint64_t seed = 0;
  auto* socks = app.add_subcommand("socks", "well-order the socks along a generic fragment");
  socks->add_option("--pairs", pairs, "number of sock pairs")->required();
  auto* o_seed = socks->add_option("--seed", seed, "random start condition");
  add_output(socks);

  std::uint64_t bits = 0;
  std::uint64_t cohen_seed = 0;
  auto* cohen = app.add_subcommand("cohen", "read a Cohen real off a generic fragment");
  cohen->add_option("--bits", bits, "number of bits")->required();
  auto* o_cseed = cohen->add_option("--seed", cohen_seed, "randomized second coordinates");
  add_output(cohen);

  std::uint64_t target = 0;
  auto* collapse = app.add_subcommand("collapse", "surjection onto a declared finite target");
  collapse->add_option("--target", target, "size of the target")->required();
  add_output(collapse);

  std::string family = "cohen";
  std::uint64_t depth = 0, height = 6;
  auto* pyramid = app.add_subcommand("pyramid", "pyramid validation and capstone search");
  pyramid->add_option("--family", family, "cohen or tree")->check(CLI::IsMember({"cohen", "tree"}));
  pyramid->add_option("--depth", depth, "number of Cohen levels (and points)");
  pyramid->add_option("--height", height, "tree height for --family tree");
  std::string expect;
  pyramid->add_option("--expect", expect, "declared verdict, e.g. none-within-budget");
  add_output(pyramid);

  std::string name_path, capstone_path;
  auto* evaluate = app.add_subcommand("evaluate", "read a prefix off a capstone");
  evaluate->add_option("--name", name_path, "NiceName JSON")->required();
  evaluate->add_option("--capstone", capstone_path, "condition JSON")->required();
  add_output(evaluate);

  std::string chain_path, support;
  bool has_support = false;
  auto* sigma = app.add_subcommand("sigma", "bounded sigma-closedness and support stabilization");
  sigma->add_option("--chain", chain_path, "chain JSON")->required();
  auto* o_sup = sigma->add_option("--support", support, "support S, e.g. P0,P1");
  add_output(sigma);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfgs = suite_from_json(read_json_file(suite_path));
      RunOptions opts{budget_from_env(), out.timings};
      return emit(run_suite(cfgs, opts), out, true);
    }
    ExperimentConfig cfg;
    if (antichain->parsed()) {
      if (*o_x) {
        cfg.experiment = "antichain-bound";
        cfg.parameters = {{"xsize", xsize}, {"k", k}};
      } else if (*o_cube) {
        cfg.experiment = "antichain-cube";
        cfg.parameters = {{"points", cube}};
      } else if (*o_ref) {
        cfg.experiment = "antichain-refute";
        cfg.parameters = {{"support", atom_list(refute)}};
      } else {
        throw LabError(ErrorCode::ConfigInvalid, "antichain needs --xsize/--k, --cube or --refute-support");
      }
    } else if (socks->parsed()) {
      cfg.experiment = "socks-generic";
      cfg.parameters = {{"pairs", pairs}};
      if (*o_seed) cfg.seed = seed;
    } else if (cohen->parsed()) {
      cfg.experiment = "cohen-real";
      cfg.parameters = {{"bits", bits}};
      if (*o_cseed) cfg.seed = cohen_seed;
    } else if (collapse->parsed()) {
      cfg.experiment = "collapse";
      cfg.parameters = {{"target", target}};
    } else if (pyramid->parsed()) {
      cfg.experiment = "pyramid-capstone";
      cfg.parameters = family == "cohen" ? Json{{"family", "cohen"}, {"depth", depth}}
                                         : Json{{"family", "tree"}, {"height", height}};
      if (!expect.empty()) cfg.expect = expect;
    } else if (evaluate->parsed()) {
      cfg.experiment = "evaluate";
      cfg.parameters = {{"name", read_json_file(name_path)}, {"capstone", read_json_file(capstone_path)}};
    } else if (sigma->parsed()) {
      cfg.experiment = "sigma";
      cfg.parameters = {{"chain", read_json_file(chain_path)}};
      has_support = static_cast<bool>(*o_sup);
      if (has_support) cfg.parameters["support"] = atom_list(support);
    }
    return run_single(cfg, out);
  } catch (const LabError& e) {
    std::cerr << "forcinglab: " << e.what() << '\n';
    return 1;
  }
}
