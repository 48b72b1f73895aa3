#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flowlog/error.hpp"
#include "flowlog/io.hpp"
#include "flowlog/oracle.hpp"
#include "flowlog/parser.hpp"
#include "flowlog/pipeline.hpp"

namespace fs = std::filesystem;
using namespace flowlog;

namespace {

const char* kExitCodes = R"(Exit codes:
  0   success
  1   unexpected failure
  2   invalid argument
  3   syntax error
  4   arity mismatch
  5   undeclared relation
  6   unsafe rule
  7   invalid program
  8   unstratifiable program
  9   search space exceeded
  10  rewrite not applicable
  11  monoid mismatch
  12  unsupported monoid
  13  unsupported lift
  14  non-termination (--max-iterations reached)
  15  malformed row
  16  I/O error
  17  negative weight
)";

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loads `.input` relations (required) and any other EDB with a facts file.
Facts load_inputs(const Program& program, Dictionary& dict, const fs::path& dir, char delimiter) {
  Facts facts;
  for (const auto& name : program.declaration_order) {
    if (program.is_idb(name)) continue;
    const RelationDecl& decl = program.relation(name);
    const fs::path file = facts_file(dir, name);
    if (!decl.input && !fs::exists(file)) continue;
    const Collection rows = load_relation(file, decl, dict, Monoid::presence(), delimiter);
    const auto tuples = rows.tuples();
    facts[name] = std::set<Tuple>(tuples.begin(), tuples.end());
  }
  return facts;
}

void write_outputs(const Program& program, const Facts& results, const Dictionary& dict, const fs::path& dir,
                   char delimiter) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& name : program.output_relations()) {
    auto it = results.find(name);
    static const std::set<Tuple> empty;
    write_relation(it == results.end() ? empty : it->second, facts_file(dir, name), program.relation(name), dict,
                   delimiter);
  }
}

void write_stats(const CompiledProgram& compiled, const EvalStats& stats, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  nlohmann::json summary = {{"type", "summary"},
                            {"join_output_tuples", stats.join_output_tuples},
                            {"stratum_iterations", stats.stratum_iterations},
                            {"dag_nodes", compiled.dag.nodes.size()},
                            {"shared_subplans", compiled.dag.shared_count},
                            {"sip_rewrites", compiled.sip.size()}};
  out << summary.dump() << '\n';
  for (const auto& [rule, derived] : stats.rule_derived) {
    out << nlohmann::json{{"type", "rule"}, {"rule", rule}, {"derived", derived}}.dump() << '\n';
  }
  for (std::size_t i = 0; i < stats.nodes.size() && i < compiled.dag.nodes.size(); ++i) {
    const NodeStats& n = stats.nodes[i];
    const IRNode& op = compiled.dag.nodes[i].op;
    out << nlohmann::json{{"type", "node"},
                          {"id", i},
                          {"kind", ir_kind_name(op.kind)},
                          {"relation", op.relation},
                          {"evaluations", n.evaluations},
                          {"incremental_updates", n.incremental_updates},
                          {"output_tuples", n.output_tuples},
                          {"peak_size", n.peak_size},
                          {"arrangement_builds", n.arrangement_builds}}
               .dump()
        << '\n';
  }
  std::cerr << "join_output_tuples=" << stats.join_output_tuples << '\n'
            << "dag_nodes=" << compiled.dag.nodes.size() << '\n'
            << "shared_subplans=" << compiled.dag.shared_count << '\n';
  for (std::size_t s = 0; s < stats.stratum_iterations.size(); ++s) {
    std::cerr << "stratum" << s << "_iterations=" << stats.stratum_iterations[s] << '\n';
  }
}

char delimiter_of(const std::string& text) {
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() != 1) throw Error(ErrorKind::InvalidArgument, "delimiter must be a single character");
  return text[0];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowlog: Datalog evaluation over dataflow collections"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string program_path, facts_dir, out_dir, stats_path, delimiter = "\\t";
  std::size_t workers = 1;
  std::optional<std::size_t> max_iterations;
  bool no_plan_opt = false, no_sip = false, sip_all = false, no_fusion = false, no_sharing = false;
  bool count_diffs = false, explain_only = false, also_run = false;

  auto* run = app.add_subcommand("run", "evaluate a program");
  run->add_option("program", program_path, "Datalog program")->required();
  run->add_option("--facts", facts_dir, "directory of <relation>.facts files")->default_val(".");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--no-plan-opt", no_plan_opt, "use listing-order join plans");
  run->add_flag("--no-sip", no_sip, "disable semijoin prefiltering");
  run->add_flag("--sip-all", sip_all, "apply semijoin prefiltering to every eligible rule");
  run->add_flag("--no-fusion", no_fusion, "disable operator fusion");
  run->add_flag("--no-sharing", no_sharing, "disable subplan sharing");
  run->add_flag("--count-diffs", count_diffs, "count diffs with distinct instead of presence diffs");
  run->add_option("--stats", stats_path, "write JSONL statistics here");
  run->add_flag("--explain", explain_only, "print plans and exit");
  run->add_flag("--run", also_run, "with --explain, evaluate as well");
  run->add_option("--delimiter", delimiter, "field delimiter");
  run->add_option("--max-iterations", max_iterations, "iteration cap per stratum");

  auto* oracle = app.add_subcommand("oracle", "evaluate with the naive reference evaluator");
  oracle->add_option("program", program_path, "Datalog program")->required();
  oracle->add_option("--facts", facts_dir, "facts directory")->default_val(".");
  oracle->add_option("--out", out_dir, "output directory")->required();
  oracle->add_option("--delimiter", delimiter, "field delimiter");

  RandomGraphSpec spec;
  std::string gen_out;
  std::optional<std::size_t> edge_count;
  auto* gen = app.add_subcommand("gen", "write a seeded random graph");
  gen->add_option("--nodes", spec.nodes, "node count")->required();
  gen->add_option("--prob", spec.probability, "edge probability");
  gen->add_option("--edges", edge_count, "exact edge count");
  gen->add_option("--seed", spec.seed, "seed");
  gen->add_flag("--weighted", spec.weighted, "append a weight column (1..10)");
  gen->add_flag("--undirected", spec.undirected, "emit both directions");
  gen->add_flag("--self-loops", spec.self_loops, "allow self loops");
  gen->add_option("--out", gen_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code_for(ErrorKind::InvalidArgument);
  }

  try {
    const char delim = delimiter_of(delimiter);
    if (*gen) {
      spec.edge_count = edge_count;
      const GraphInstance g = generate_graph(spec);
      std::ofstream out(gen_out, std::ios::trunc);
      if (!out) throw Error(ErrorKind::IoError, "cannot write " + gen_out);
      for (std::size_t i = 0; i < g.edges.size(); ++i) {
        out << g.edges[i].first << delim << g.edges[i].second;
        if (spec.weighted) out << delim << g.weights[i];
        out << '\n';
      }
      return 0;
    }

    const Program parsed = parse_program(read_file(program_path));
    if (*oracle) {
      Dictionary dict = parsed.symbols;
      const Facts inputs = load_inputs(parsed, dict, facts_dir, delim);
      write_outputs(parsed, naive_evaluate(parsed, inputs), dict, out_dir, delim);
      return 0;
    }

    if (no_sip && sip_all) throw Error(ErrorKind::InvalidArgument, "--no-sip and --sip-all are exclusive");
    Toggles toggles;
    toggles.plan_opt = !no_plan_opt;
    toggles.sip = no_sip ? SipMode::Never : sip_all ? SipMode::Always : SipMode::Auto;
    toggles.fusion = !no_fusion;
    toggles.sharing = !no_sharing;
    toggles.boolean_spec = !count_diffs;
    const CompiledProgram compiled = compile(parsed, toggles);
    if (explain_only) {
      std::cout << explain(compiled);
      if (!also_run) return 0;
    }
    if (out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");

    Dictionary dict = compiled.program.symbols;
    const Facts inputs = load_inputs(compiled.program, dict, facts_dir, delim);
    EngineOptions options;
    options.workers = workers;
    options.max_iterations = max_iterations;
    const EvaluationResult result = evaluate(compiled, inputs, options);
    write_outputs(compiled.program, result.outputs, dict, out_dir, delim);
    if (!stats_path.empty()) write_stats(compiled, result.stats, stats_path);
    return 0;
  } catch (const Error& e) {
    std::cerr << "flowlog: " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "flowlog: " << e.what() << '\n';
    return 1;
  }
}
