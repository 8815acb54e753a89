#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "groundr/catalog.hpp"
#include "groundr/corpusgen.hpp"
#include "groundr/dependence.hpp"
#include "groundr/dsl.hpp"
#include "groundr/growth.hpp"
#include "groundr/layout.hpp"
#include "groundr/pareto.hpp"
#include "groundr/scheduler.hpp"
#include "groundr/sweep.hpp"

namespace fs = std::filesystem;
using namespace groundr;

namespace {

enum Exit { ok = 0, infeasible = 1, usage = 2, defect = 3 };

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(flag + ": '" + s + "' is not a number");
}

/// "1-4", "1,2,5" or a mix such as "1-3,6".
std::vector<std::size_t> parse_range(const std::string& s, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s, ',')) {
    auto dash = item.find('-');
    const double lo = to_double(item.substr(0, dash), flag);
    const double hi = dash == std::string::npos ? lo : to_double(item.substr(dash + 1), flag);
    if (lo < 0 || hi < lo || lo != std::floor(lo) || hi != std::floor(hi))
      throw ConfigError(flag + ": bad range item '" + item + "'");
    for (auto v = static_cast<std::size_t>(lo); v <= static_cast<std::size_t>(hi); ++v) out.push_back(v);
  }
  if (out.empty()) throw ConfigError(flag + ": empty range");
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item, flag));
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Corpus load_corpus(const std::string& path, CorpusRole role) {
  Corpus c = parse_corpus(path);
  c.role = role;
  return c;
}

void set_log_level(const std::string& flag) {
  std::string level = flag;
  if (const char* env = std::getenv("GROUNDR_LOG"); env && *env) level = env;
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") throw ConfigError("unknown log level '" + level + "'");
  spdlog::set_level(parsed);
}

struct Options {
  std::string corpus, universe, scaling, catalog, layout, front, out;
  std::string k = "1-6", l = "1-3", fractions = "0,0.25,0.5,0.75,1", seeds, weights;
  double sigma = 1.2;
  double dt_throughput = 5e4;
  double dt_util = 1e4;
  double cost_max = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  bool project = false;
  std::string log_level = "warn";
  GenParams gen;
  CatalogParams gen_catalog;
};

nlohmann::json pdg_to_json(const DependenceGraph& g) {
  nlohmann::json nodes = nlohmann::json::array(), edges = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i) nodes.push_back({{"id", g.op_ids[i]}, {"op_type", g.op_types[i]}});
  for (const auto& e : g.edges)
    edges.push_back({{"from", g.op_ids[e.producer]}, {"to", g.op_ids[e.consumer]}, {"resource", e.resource}});
  return {{"protocol", g.protocol}, {"nodes", nodes}, {"edges", edges}, {"acyclic", g.is_acyclic()}};
}

int run_compile(const Options& o) {
  const Corpus c = load_corpus(o.corpus, CorpusRole::target);
  for (const auto& p : c.protocols) {
    write_file(fs::path(o.out) / (p.name + ".json"), serialize_protocol(p).dump(2) + "\n");
    write_file(fs::path(o.out) / (p.name + ".pdg.json"), pdg_to_json(build_pdg(p)).dump(2) + "\n");
  }
  std::cout << "compiled " << c.size() << " protocol(s) into " << o.out << "\n";
  return ok;
}

int run_profile(const Options& o) {
  const Corpus c = load_corpus(o.corpus, CorpusRole::target);
  const DependencyMatrix m = o.catalog.empty() ? profile_dependencies(c) : profile_capabilities(c, load_catalog(o.catalog));
  write_file(fs::path(o.out) / "dependency.csv", matrix_to_csv(m));
  write_file(fs::path(o.out) / "dependency.json", matrix_to_json(m).dump(2) + "\n");
  std::cout << matrix_to_csv(m);
  return ok;
}

int run_verify(const Options& o) {
  const Catalog cat = load_catalog(o.catalog);
  const Corpus c = load_corpus(o.corpus, CorpusRole::target);
  const Layout l = load_layout(o.layout);
  check_types(l, cat);
  ExecOptions eo;
  eo.seed = o.seed;
  const ExecutabilityReport r = check_executable(c, l, cat, eo);
  const std::string text = report_to_json(r).dump(2) + "\n";
  if (!o.out.empty()) write_file(fs::path(o.out) / "report.json", text);
  std::cout << text;
  return r.verdict ? ok : infeasible;
}

void write_candidates(const fs::path& out, std::vector<Candidate>& cs, const std::string& x, const std::string& y) {
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (!cs[i].layout) continue;
    std::string stem;
    for (const auto& [key, value] : cs[i].config.items())
      stem += (stem.empty() ? "" : "_") + key + (value.is_number_float() ? format_number(value.get<double>()) : value.dump());
    cs[i].layout_path = "layouts/" + stem + ".json";
    write_file(out / cs[i].layout_path, layout_to_json(*cs[i].layout).dump(2) + "\n");
    write_file(out / ("layouts/" + stem + ".dot"), export_dot(*cs[i].layout));
  }
  auto strip = [](std::vector<Candidate> v) {
    for (auto& c : v) c.layout.reset();
    return v;
  };
  const auto front = pareto_front(cs);
  write_file(out / "sweep.json", candidates_to_json(strip(cs)).dump(2) + "\n");
  write_file(out / "front.json", candidates_to_json(strip(front)).dump(2) + "\n");
  write_file(out / (x + "_" + y + ".csv"), projection_csv(front, x, y));
  std::size_t feasible = 0;
  for (const auto& c : cs) feasible += c.feasible;
  std::cout << cs.size() << " candidate(s), " << feasible << " feasible, " << front.size() << " on the front\n";
  for (const auto& c : front) {
    std::cout << "  " << c.config.dump();
    for (std::size_t i = 0; i < c.names.size(); ++i) std::cout << " " << c.names[i] << "=" << format_number(c.values[i]);
    std::cout << "\n";
  }
}

int run_synth_exec(const Options& o) {
  const Catalog cat = load_catalog(o.catalog);
  const Corpus target = load_corpus(o.corpus, CorpusRole::target);
  const Corpus universe = o.universe.empty() ? target : load_corpus(o.universe, CorpusRole::universe);
  Corpus scaling;
  scaling.role = CorpusRole::scaling;
  if (!o.scaling.empty()) scaling = load_corpus(o.scaling, CorpusRole::scaling);
  ExecSweep grid;
  grid.k_values = parse_range(o.k, "--k");
  grid.l_values = parse_range(o.l, "--l");
  auto cs = sweep_exec(target, universe, scaling, cat, grid);
  write_candidates(o.out, cs, "flexibility", "reliability");
  return ok;
}

int run_synth_eff(const Options& o) {
  const Catalog cat = load_catalog(o.catalog);
  const Corpus c = load_corpus(o.corpus, CorpusRole::target);
  EffSweep grid;
  grid.fractions = parse_list(o.fractions, "--fractions");
  grid.seeds.clear();
  if (o.seeds.empty())
    grid.seeds.push_back(o.seed);
  else
    for (std::size_t s : parse_range(o.seeds, "--seeds")) grid.seeds.push_back(s);
  grid.growth.sigma = o.sigma;
  grid.eff.dt_throughput = o.dt_throughput;
  grid.eff.dt_util = o.dt_util;
  grid.eff.cost_max = o.cost_max;
  auto cs = sweep_eff(c, cat, grid);
  write_candidates(o.out, cs, "throughput", "response_time");
  return ok;
}

int run_simulate(const Options& o) {
  const Catalog cat = load_catalog(o.catalog);
  const Corpus c = load_corpus(o.corpus, CorpusRole::schedule_subset);
  const Layout l = o.layout.empty() ? minimal_layout(c, cat) : load_layout(o.layout);
  check_types(l, cat);
  SimulationOptions so;
  so.seed = o.seed;
  so.max_parallel = 50;
  const ScheduleTrace tr = simulate(l, c, cat, so);
  nlohmann::json metrics = {{"makespan_s", makespan(tr)},
                            {"throughput", throughput(tr, o.dt_throughput)},
                            {"dt_throughput_s", o.dt_throughput},
                            {"response_time_s", response_time(tr)},
                            {"resource_utilization", resource_utilization(tr, o.dt_util)},
                            {"empty_active_fraction", empty_active_fraction(tr, o.dt_util)},
                            {"dt_util_s", o.dt_util},
                            {"system_complexity", system_complexity(l, cat)},
                            {"cost", cost(l, cat)},
                            {"operations", tr.ops.size()},
                            {"transfers", tr.transfers.size()}};
  write_file(fs::path(o.out) / "trace.jsonl", trace_to_jsonl(tr));
  write_file(fs::path(o.out) / "metrics.json", metrics.dump(2) + "\n");
  if (o.layout.empty()) write_file(fs::path(o.out) / "layout.json", layout_to_json(l).dump(2) + "\n");
  std::cout << metrics.dump(2) << "\n";
  return ok;
}

int run_select(const Options& o) {
  auto cs = candidates_from_json(read_json(o.front));
  std::vector<Candidate> front;
  if (o.project) {
    front = pareto_front(cs);
  } else {
    for (auto& c : cs)
      if (c.feasible) front.push_back(std::move(c));
  }
  if (front.empty()) throw InfeasibleError("no feasible candidate to select from");
  std::vector<double> weights =
      o.weights.empty() ? std::vector<double>(front.front().names.size(), 1.0) : parse_list(o.weights, "--weights");
  const Candidate& pick = front[select_by_preference(front, weights)];
  const std::string text = candidate_to_json(pick).dump(2) + "\n";
  if (!o.out.empty()) write_file(fs::path(o.out) / "selection.json", text);
  std::cout << text;
  return ok;
}

int run_gen_corpus(const Options& o) {
  const GenParams& gp = o.gen;
  CatalogParams cp = o.gen_catalog;
  cp.seed = gp.seed;
  const GeneratedSuite s = generate_suite(gp, cp);
  write_suite(s, o.out);
  std::cout << "wrote " << s.target.size() << " target, " << s.universe.size() << " universe and " << s.scaling.size()
            << " scaling protocol(s) plus catalog.json into " << o.out << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("groundr"));
  Options o;
  CLI::App app{"groundr: ground protocol corpora into laboratory hardware layouts", "groundr"};
  app.require_subcommand(1);
  app.add_option("--log-level", o.log_level, "trace, debug, info, warn, error, critical or off")->capture_default_str();
  app.fallthrough();

  auto corpus = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--corpus", o.corpus, "protocol file or directory of .proto.dsl files")
                    ->check(CLI::ExistingPath);
    if (required) opt->required();
  };
  auto catalog = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--catalog", o.catalog, "catalog JSON")->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  auto out = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--out", o.out, "output directory");
    if (required) opt->required();
  };
  auto windows = [&](CLI::App* sub) {
    sub->add_option("--dt-throughput", o.dt_throughput, "throughput window, seconds")->capture_default_str();
    sub->add_option("--dt-util", o.dt_util, "utilization window, seconds")->capture_default_str();
  };
  auto seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "seed")->capture_default_str(); };

  auto* compile = app.add_subcommand("compile", "DSL to interchange JSON plus dependence graphs");
  corpus(compile);
  out(compile);

  auto* profile = app.add_subcommand("profile", "dependency matrix as CSV and JSON");
  corpus(profile);
  catalog(profile, false);
  out(profile);

  auto* verify = app.add_subcommand("verify", "executability report of a corpus on a layout");
  corpus(verify);
  catalog(verify);
  verify->add_option("--layout", o.layout, "layout JSON")->required()->check(CLI::ExistingFile);
  out(verify, false);
  seed(verify);

  auto* synth_exec = app.add_subcommand("synth-exec", "partition sweep, executability objectives, Pareto front");
  corpus(synth_exec);
  catalog(synth_exec);
  synth_exec->add_option("--universe", o.universe, "universe corpus (default: the target)")->check(CLI::ExistingPath);
  synth_exec->add_option("--scaling", o.scaling, "scaling corpus (default: empty)")->check(CLI::ExistingPath);
  synth_exec->add_option("--k", o.k, "group counts, e.g. 1-6 or 1,2,4")->capture_default_str();
  synth_exec->add_option("--l", o.l, "recursion depths")->capture_default_str();
  out(synth_exec);

  auto* synth_eff = app.add_subcommand("synth-eff", "growth sweep, efficiency objectives, Pareto front");
  corpus(synth_eff);
  catalog(synth_eff);
  synth_eff->add_option("--fractions", o.fractions, "scheduled fractions of the corpus")->capture_default_str();
  synth_eff->add_option("--seeds", o.seeds, "seed range, e.g. 0-2 (default: --seed)");
  synth_eff->add_option("--sigma", o.sigma, "required parallel speedup")->capture_default_str();
  synth_eff->add_option("--cost-max", o.cost_max, "cost budget (default unbounded)");
  windows(synth_eff);
  seed(synth_eff);
  out(synth_eff);

  auto* sim = app.add_subcommand("simulate", "FCFS trace and metrics");
  corpus(sim);
  catalog(sim);
  sim->add_option("--layout", o.layout, "layout JSON (default: minimal layout)")->check(CLI::ExistingFile);
  windows(sim);
  seed(sim);
  out(sim);

  auto* select = app.add_subcommand("select", "preference pick from a front or sweep file");
  select->add_option("--front", o.front, "front.json or sweep.json")->required()->check(CLI::ExistingFile);
  select->add_option("--weights", o.weights, "comma-separated weights in objective order (default: equal)");
  select->add_flag("--project", o.project, "reduce the file to its Pareto front first");
  out(select, false);

  auto* gen = app.add_subcommand("gen-corpus", "synthetic corpora plus a matching catalog");
  out(gen);
  gen->add_option("--seed", o.gen.seed, "seed")->capture_default_str();
  gen->add_option("--protocols", o.gen.n_protocols, "target protocols")->capture_default_str();
  gen->add_option("--op-types", o.gen.n_op_types, "op type vocabulary size")->capture_default_str();
  gen->add_option("--min-ops", o.gen.min_ops)->capture_default_str();
  gen->add_option("--max-ops", o.gen.max_ops)->capture_default_str();
  gen->add_option("--density", o.gen.density, "chance an input is an earlier product")->capture_default_str();
  gen->add_option("--clusters", o.gen.n_clusters)->capture_default_str();
  gen->add_option("--reverse-prob", o.gen.reverse_prob)->capture_default_str();
  gen->add_option("--expansion-prob", o.gen_catalog.expansion_prob)->capture_default_str();

  try {
    if (argc <= 1) {
      std::cerr << app.help();
      return usage;
    }
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    set_log_level(o.log_level);
    if (!o.out.empty()) fs::create_directories(o.out);
    if (*compile) return run_compile(o);
    if (*profile) return run_profile(o);
    if (*verify) return run_verify(o);
    if (*synth_exec) return run_synth_exec(o);
    if (*synth_eff) return run_synth_eff(o);
    if (*sim) return run_simulate(o);
    if (*select) return run_select(o);
    if (*gen) return run_gen_corpus(o);
    std::cerr << app.help();
    return usage;
  } catch (const InfeasibleError& e) {
    spdlog::error("{}", e.what());
    return infeasible;
  } catch (const DslError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.str() << "\n";
    return usage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return usage;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return usage;
  } catch (const std::exception& e) {
    spdlog::critical("internal error: {}", e.what());
    return defect;
  }
}
