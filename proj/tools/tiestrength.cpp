#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiestrength/tiestrength.hpp"

namespace ts = tiestrength;

namespace {

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string format = "auto";
  std::string measure = "common";
  std::vector<std::string> measures;
  ts::MeasureParams params;
  std::string out;
  std::uint64_t seed = 42;
  std::size_t trials = 1000;
  std::string a2_mode = "positive";
  std::size_t threads = 0;
  double width_scale = 5.0;
  std::string dataset_label;
  std::string results;
  bool all_pairs = false;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void print_config(const RunConfig& c, const ts::MeasureSpec* spec) {
  std::ostringstream line;
  line << "config: subcommand=" << c.subcommand << " input=" << (c.input.empty() ? "-" : c.input)
       << " format=" << c.format;
  if (spec) {
    const auto& p = spec->params();
    line << " measure=" << spec->name() << " katz_gamma=" << num(p.katz_gamma)
         << " katz_max_walk_length=" << p.katz_max_walk_length << " rwr_alpha=" << num(p.rwr_alpha)
         << " simrank_gamma=" << num(p.simrank_gamma) << " epsilon=" << num(p.epsilon)
         << " temporal_init=" << num(p.temporal_init) << " tolerance=" << num(p.tolerance)
         << " max_iterations=" << p.max_iterations;
  }
  if (!c.measures.empty()) {
    line << " measures=";
    for (std::size_t i = 0; i < c.measures.size(); ++i) line << (i ? "," : "") << c.measures[i];
  }
  line << " seed=" << c.seed << " trials=" << c.trials << " a2_mode=" << c.a2_mode
       << " threads=" << c.threads << " width_scale=" << num(c.width_scale)
       << " all_pairs=" << (c.all_pairs ? "true" : "false") << " dataset_label=" << c.dataset_label
       << " results=" << (c.results.empty() ? "-" : c.results) << " out=" << (c.out.empty() ? "-" : c.out);
  std::cerr << line.str() << '\n';
}

ts::BipartiteGraph load(const RunConfig& c, std::vector<ts::EventRecord>* records = nullptr) {
  if (c.input.empty()) throw ts::ConfigError("--input is required for " + c.subcommand);
  const auto fmt = c.format == "auto" ? ts::format_for_path(c.input) : ts::parse_format(c.format);
  auto parsed = ts::parse_events(c.input, fmt);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  if (records) *records = parsed.events;
  return ts::build_graph(parsed.events);
}

/// Writes through `body` to --out, or to stdout when unset.
template <typename Body>
void emit(const RunConfig& c, Body body) {
  if (c.out.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ts::InputError("cannot write '" + c.out + "'");
  body(f);
  if (!f) throw ts::InputError("write to '" + c.out + "' failed");
}

ts::ScoreOptions score_options(const RunConfig& c) {
  return {c.all_pairs ? ts::PairScope::AllPairs : ts::PairScope::Ties, c.threads};
}

void print_census(const std::string& label, const ts::CensusResult& r, const RunConfig& c) {
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.2f", r.percentage());
  std::cout << r.total << " pairs, " << r.count << ' ' << label << " (" << pct << "%)\n";
  if (!c.results.empty()) {
    ts::append_census_record(c.results, c.dataset_label.empty() ? c.input : c.dataset_label, r);
  }
}

int cmd_compute(const RunConfig& c, const ts::MeasureSpec& spec) {
  const auto g = load(c);
  const auto table = ts::score_all(g, spec, score_options(c));
  emit(c, [&](std::ostream& o) { ts::write_edges(o, g, table); });
  if (table.convergence) {
    std::cerr << "converged: iterations=" << table.convergence->iterations
              << " residual=" << num(table.convergence->residual) << '\n';
  }
  return 0;
}

int cmd_axioms(const RunConfig& c, const ts::MeasureSpec& spec) {
  ts::GraphSampler sampler(c.seed);
  if (!c.input.empty()) {
    std::vector<ts::EventRecord> records;
    load(c, &records);
    sampler.set_base(std::move(records));
  }
  auto report = ts::check_all_axioms(spec, sampler, c.trials, ts::parse_baseline_mode(c.a2_mode));
  for (auto& v : report.verdicts) {
    if (v.counterexample) v.counterexample = ts::shrink_counterexample(std::move(*v.counterexample));
  }
  const auto json = ts::to_json(report);

  std::ostream& row = c.out.empty() ? std::cerr : std::cout;
  row << "measure";
  for (ts::AxiomId a : ts::kAllAxioms) row << ',' << ts::axiom_code(a);
  row << ",A2-strict,A2-positive\n" << spec.name();
  for (ts::AxiomId a : ts::kAllAxioms) row << ',' << ts::verdict_name(report[a].kind);
  row << ',' << ts::verdict_name(report.a2_strict.kind) << ',' << ts::verdict_name(report.a2_positive.kind)
      << '\n';
  for (const auto& d : json["discrepancies"]) row << "discrepancy: " << d.get<std::string>() << '\n';

  emit(c, [&](std::ostream& o) { o << json.dump(2) << '\n'; });
  return 0;
}

int cmd_order_census(const RunConfig& c) {
  const auto g = load(c);
  print_census("incomparable", ts::incomparability_census(g, c.threads), c);
  return 0;
}

int cmd_conflicts(const RunConfig& c, const ts::MeasureSpec& spec) {
  const auto g = load(c);
  const auto table = ts::score_all(g, spec, {ts::PairScope::Ties, c.threads});
  print_census("conflicts", ts::conflict_census(g, table, c.threads), c);
  return 0;
}

int cmd_tau(const RunConfig& c, const ts::MeasureParams& params) {
  const auto g = load(c);
  std::vector<ts::MeasureSpec> specs;
  for (const auto& m : c.measures) specs.emplace_back(ts::parse_measure(m), params);
  const auto matrix = ts::tau_matrix(g, specs, score_options(c));
  for (const auto& m : matrix.missing) std::cerr << "missing: " << m << '\n';
  emit(c, [&](std::ostream& o) { ts::write_tau_matrix(o, matrix, score_options(c).scope); });
  return 0;
}

int cmd_histogram(const RunConfig& c) {
  const auto g = load(c);
  emit(c, [&](std::ostream& o) { ts::write_histogram(o, ts::event_size_histogram(g)); });
  return 0;
}

int cmd_dot(const RunConfig& c, const ts::MeasureSpec& spec) {
  const auto g = load(c);
  const auto table = ts::score_all(g, spec, score_options(c));
  bool any = false;
  emit(c, [&](std::ostream& o) { any = ts::write_dot(o, g, table, c.width_scale); });
  if (!any) std::cerr << "warning: no ties to draw\n";
  return 0;
}

int cmd_linext(const RunConfig& c) {
  const auto g = load(c);
  const auto profiles = ts::tie_profiles(g, ts::all_ties(g));
  const auto table = ts::build_linear_extension(profiles);
  const auto check = ts::verify_linear_extension(table);
  emit(c, [&](std::ostream& o) {
    o << "profile,value\n";
    for (const auto& e : table.entries()) o << '"' << e.profile.to_string() << "\"," << num(e.value) << '\n';
  });
  std::ostream& summary = c.out.empty() ? std::cerr : std::cout;
  summary << table.size() << " profiles, " << check.violations.size() << " violations\n";
  return check.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tie strength in implicit social networks"};
  app.require_subcommand(1);
  RunConfig c;
  ts::MeasureParams& p = c.params;

  auto add_input = [&](CLI::App* s) {
    s->add_option("--input", c.input, "Event log (jsonl or csv)");
    s->add_option("--format", c.format, "jsonl, csv or auto (by extension)")->capture_default_str();
    s->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  };
  auto add_measure = [&](CLI::App* s) {
    s->add_option("--measure", c.measure, "Measure name")->capture_default_str();
    s->add_option("--katz-gamma", p.katz_gamma)->capture_default_str();
    s->add_option("--katz-max-len", p.katz_max_walk_length)->capture_default_str();
    s->add_option("--rwr-alpha", p.rwr_alpha)->capture_default_str();
    s->add_option("--simrank-gamma", p.simrank_gamma)->capture_default_str();
    s->add_option("--epsilon", p.epsilon)->capture_default_str();
    s->add_option("--temporal-init", p.temporal_init)->capture_default_str();
    s->add_option("--tolerance", p.tolerance)->capture_default_str();
    s->add_option("--max-iterations", p.max_iterations)->capture_default_str();
  };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", c.out, "Output file (default stdout)"); };
  auto add_census_record = [&](CLI::App* s) {
    s->add_option("--results", c.results, "Append a dataset,total,count,percentage record here");
    s->add_option("--dataset-label", c.dataset_label, "Dataset name for --results");
  };

  auto* compute = app.add_subcommand("compute", "Score every tie and write an edge file");
  add_input(compute);
  add_measure(compute);
  add_out(compute);
  compute->add_flag("--all-pairs", c.all_pairs, "Score every pair, not just ties");

  auto* axioms = app.add_subcommand("axioms", "Check the eight axioms against a measure");
  add_input(axioms);
  add_measure(axioms);
  add_out(axioms);
  axioms->add_option("--seed", c.seed)->capture_default_str();
  axioms->add_option("--trials", c.trials)->capture_default_str();
  axioms->add_option("--a2-mode", c.a2_mode, "strict or positive")->capture_default_str();

  auto* census = app.add_subcommand("order-census", "Count incomparable tie pairs");
  add_input(census);
  add_census_record(census);

  auto* conflicts = app.add_subcommand("conflicts", "Count tie pairs a measure ranks against the order");
  add_input(conflicts);
  add_measure(conflicts);
  add_census_record(conflicts);

  auto* tau = app.add_subcommand("tau", "Kendall tau-b matrix between measures");
  add_input(tau);
  add_measure(tau);
  add_out(tau);
  tau->add_option("--measures", c.measures, "Comma-separated measure names")->delimiter(',')->required();
  tau->add_flag("--all-pairs", c.all_pairs, "Use every pair as a key, not just ties");

  auto* histogram = app.add_subcommand("histogram", "Event size histogram");
  add_input(histogram);
  add_out(histogram);

  auto* dot = app.add_subcommand("dot", "Weighted graph description");
  add_input(dot);
  add_measure(dot);
  add_out(dot);
  dot->add_option("--width-scale", c.width_scale)->capture_default_str();

  auto* linext = app.add_subcommand("linext", "Linear extension of the tie profiles");
  add_input(linext);
  add_out(linext);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    c.subcommand = sub->get_name();
    if (c.threads == 0) c.threads = ts::default_threads();
    if (c.trials < 1) throw ts::ConfigError("--trials must be >= 1");
    ts::parse_baseline_mode(c.a2_mode);
    if (c.format != "auto") ts::parse_format(c.format);

    const bool takes_measure = c.subcommand == "compute" || c.subcommand == "axioms" ||
                               c.subcommand == "conflicts" || c.subcommand == "dot";
    std::unique_ptr<ts::MeasureSpec> spec;
    if (takes_measure) spec = std::make_unique<ts::MeasureSpec>(ts::parse_measure(c.measure), p);
    if (c.subcommand == "tau") {
      for (const auto& m : c.measures) (void)ts::MeasureSpec(ts::parse_measure(m), p);
    }
    print_config(c, spec.get());

    if (c.subcommand == "compute") return cmd_compute(c, *spec);
    if (c.subcommand == "axioms") return cmd_axioms(c, *spec);
    if (c.subcommand == "order-census") return cmd_order_census(c);
    if (c.subcommand == "conflicts") return cmd_conflicts(c, *spec);
    if (c.subcommand == "tau") return cmd_tau(c, p);
    if (c.subcommand == "histogram") return cmd_histogram(c);
    if (c.subcommand == "dot") return cmd_dot(c, *spec);
    if (c.subcommand == "linext") return cmd_linext(c);
    throw ts::ConfigError("unknown subcommand");
  } catch (const ts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ts::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const ts::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << " (residual " << num(e.residual()) << " after "
              << e.iterations() << " iterations)\n";
    return 4;
  } catch (const ts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
