// fsmprint command line: learning, identification and incremental
// fingerprinting of Mealy-machine implementations.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsmprint/fsmprint.hpp"

namespace fp = fsmprint;

namespace {

struct Common {
  std::vector<std::string> impls;
  std::string models_dir;
  std::string inputs;
  std::string fingerprint = "adg";
  std::string fcq = "randomwp:100:1:5";
  std::string lcq = "randomwp:100:1:5";
  std::string learner = "alsharp";
  std::uint64_t seed = 0;
  std::optional<std::size_t> budget;
  std::size_t copies = 1;
  std::string out;
  std::string format = "json";
  std::string trace;
};

/// Writes `text` to --out, or stdout when no path was given.
void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    fp::write_text_file(c.out, text);
}

std::vector<std::pair<std::string, fp::MealyMachine>> load_models(const Common& c) {
  if (c.models_dir.empty()) return {};
  return fp::load_dot_directory(c.models_dir);
}

fp::Alphabet alphabet_from(const Common& c,
                           const std::vector<std::pair<std::string, fp::MealyMachine>>& models) {
  if (!c.inputs.empty()) {
    fp::Alphabet a;
    std::stringstream ss(c.inputs);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) a.add(item);
    return a;
  }
  if (!models.empty()) return models.front().second.inputs();
  throw fp::ConfigError("a tcp implementation needs --inputs or --models-dir");
}

/// One `--impl` argument: dot:<file> or tcp:<host:port>.
struct ImplSpec {
  std::string id;
  std::optional<fp::MealyMachine> machine;
  std::string address;
};

ImplSpec parse_impl(const std::string& arg) {
  ImplSpec s;
  if (arg.rfind("dot:", 0) == 0) {
    const std::filesystem::path path = arg.substr(4);
    s.machine = fp::load_dot_file(path);
    s.id = path.stem().string();
  } else if (arg.rfind("tcp:", 0) == 0) {
    s.address = arg.substr(4);
    fp::parse_address(s.address);
    s.id = s.address;
  } else {
    throw fp::ConfigError("--impl must be dot:<file> or tcp:<host:port>, got '" + arg + "'");
  }
  return s;
}

class TraceWriter {
public:
  explicit TraceWriter(const std::string& path) {
    if (path.empty()) return;
    out_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*out_) throw fp::IoError("cannot open trace file '" + path + "'");
  }

  void attach(fp::SulSession& s, const std::string& impl) {
    if (!out_) return;
    const fp::Alphabet inputs = s.inputs();
    s.set_trace([this, impl, inputs](const fp::TraceRecord& r) {
      fp::Json j;
      j["impl"] = impl;
      j["kind"] = r.kind;
      j["phase"] = std::string(fp::to_string(r.phase));
      j["inputs"] = fp::Json::array();
      for (auto a : r.inputs) j["inputs"].push_back(inputs[a]);
      if (r.kind == "oq") {
        j["outputs"] = r.outputs;
        j["cached"] = r.cached;
      } else {
        j["passed"] = r.passed;
      }
      *out_ << j.dump() << "\n";
    });
  }

private:
  std::unique_ptr<std::ofstream> out_;
};

std::vector<fp::Implementation> make_impls(const Common& c, const std::vector<ImplSpec>& specs,
                                           const fp::Alphabet& tcp_inputs, TraceWriter& trace) {
  std::vector<fp::Implementation> impls;
  for (const auto& s : specs)
    for (std::size_t k = 0; k < c.copies; ++k) {
      const std::string id = c.copies == 1 ? s.id : s.id + "#" + std::to_string(k);
      std::function<fp::SulSession()> connect;
      if (s.machine) {
        connect = [m = *s.machine, id, &trace] {
          auto session = fp::make_simulated_sul(m);
          trace.attach(session, id);
          return session;
        };
      } else {
        connect = [addr = s.address, tcp_inputs, id, &trace] {
          auto session = fp::make_remote_sul(addr, tcp_inputs);
          trace.attach(session, id);
          return session;
        };
      }
      impls.push_back({id, std::move(connect)});
    }
  return impls;
}

fp::PipelineConfig pipeline_from(const Common& c) {
  fp::PipelineConfig p;
  p.fingerprinting = fp::parse_fingerprint_kind(c.fingerprint);
  p.fcq = fp::parse_cq_config(c.fcq);
  p.lcq = fp::parse_cq_config(c.lcq);
  p.learner = fp::parse_learner_kind(c.learner);
  p.seed = c.seed;
  p.budget = c.budget;
  p.validate();
  return p;
}

void add_common(CLI::App* app, Common& c, bool many_impls) {
  if (many_impls)
    app->add_option("--impl", c.impls, "dot:<file> or tcp:<host:port> (repeatable)")->required();
  else
    app->add_option("--impl", c.impls, "dot:<file> or tcp:<host:port>")->required()->expected(1);
  app->add_option("--models-dir", c.models_dir, "directory of reference DOT models");
  app->add_option("--inputs", c.inputs, "comma-separated input alphabet for tcp implementations");
  app->add_option("--fingerprint", c.fingerprint, "sepseq or adg")->capture_default_str();
  app->add_option("--fcq", c.fcq, "conformance query after fingerprinting")->capture_default_str();
  app->add_option("--lcq", c.lcq, "conformance query used as equivalence oracle")->capture_default_str();
  app->add_option("--learner", c.learner, "lsharp or alsharp")->capture_default_str();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--budget", c.budget, "symbol budget per implementation");
  app->add_option("--out", c.out, "output file (default stdout)");
  app->add_option("--format", c.format, "json or csv")->capture_default_str();
  app->add_option("--trace", c.trace, "write a JSON-lines query log");
}

std::string render_run(const Common& c, const fp::RunReport& report, const std::string& algorithm,
                       const std::vector<ImplSpec>& specs) {
  // Ground truth is known when every implementation is a DOT file.
  std::optional<fp::MetricsRow> row;
  bool simulated = true;
  for (const auto& s : specs) simulated = simulated && s.machine.has_value();
  if (simulated) {
    std::map<std::string, fp::MealyMachine> truth;
    for (const auto& s : specs)
      for (std::size_t k = 0; k < c.copies; ++k)
        truth.emplace(c.copies == 1 ? s.id : s.id + "#" + std::to_string(k), *s.machine);
    const auto verdicts = fp::misclassification_check(report, truth);
    row = fp::make_metrics("cli", fp::parse_algorithm(algorithm), c.seed, report, verdicts);
  }
  if (fp::parse_report_format(c.format) == fp::ReportFormat::Csv) {
    if (!row) {
      row = fp::MetricsRow{};
      row->benchmark = "cli";
      row->algorithm = algorithm;
      row->seed = c.seed;
      row->fingerprint_symbols = report.phase_total(fp::Phase::Fingerprint).symbols;
      row->cq_symbols = report.phase_total(fp::Phase::Fcq).symbols;
      row->learn_symbols = report.phase_total(fp::Phase::Learn).symbols;
      row->total_symbols = report.total_symbols();
      row->eq_queries = report.eq_queries();
    }
    return fp::metrics_csv({*row});
  }
  auto j = fp::report_to_json(report);
  if (row) j["row"] = fp::Json{{"correct_models", row->correct_models},
                               {"correct_pct", row->correct_pct},
                               {"misclassification_rate", row->misclassification_rate}};
  return j.dump(2) + "\n";
}

int run_learn(const Common& c) {
  const auto models = load_models(c);
  const auto spec = parse_impl(c.impls.front());
  TraceWriter trace(c.trace);
  auto session = spec.machine ? fp::make_simulated_sul(*spec.machine)
                              : fp::make_remote_sul(spec.address, alphabet_from(c, models));
  trace.attach(session, spec.id);
  session.set_budget(c.budget);
  const auto p = pipeline_from(c);
  const auto eq = p.lcq.with_seed(c.seed);
  std::vector<fp::MealyMachine> refs;
  for (const auto& [_, m] : models) refs.push_back(m);
  auto r = p.learner == fp::LearnerKind::ALSharp ? fp::alsharp_learn(session, refs, eq)
                                                 : fp::lsharp_learn(session, eq);
  emit(c, fp::serialize_dot(fp::minimize(r.model)));
  std::cerr << "states=" << fp::minimize(r.model).num_states() << " eq_queries=" << r.eq_queries
            << " symbols=" << r.oq_symbols << (r.budget_exhausted ? " budget_exhausted" : "") << "\n";
  return 0;
}

int run_identify(const Common& c) {
  const auto named = load_models(c);
  if (named.empty()) throw fp::ConfigError("identify needs --models-dir with at least one model");
  const auto spec = parse_impl(c.impls.front());
  TraceWriter trace(c.trace);
  auto session = spec.machine ? fp::make_simulated_sul(*spec.machine)
                              : fp::make_remote_sul(spec.address, alphabet_from(c, named));
  trace.attach(session, spec.id);
  session.set_budget(c.budget);
  std::vector<fp::MealyMachine> models;
  for (const auto& [_, m] : named)
    models.push_back(m.inputs() == session.inputs() ? m : fp::reorder_inputs(m, session.inputs()));
  const auto fingerprint = fp::build_fingerprint(models);
  fp::PhaseScope scope(session, fp::Phase::Fingerprint);
  const auto r = fp::parse_fingerprint_kind(c.fingerprint) == fp::FingerprintKind::Adg
                     ? fp::adg_identify(session, models, fingerprint)
                     : fp::sepseq_identify(session, models, fingerprint, c.seed);
  fp::Json j;
  j["match"] = r.match ? fp::Json(named[*r.match].first) : fp::Json(nullptr);
  j["executed"] = fp::Json::array();
  for (const auto& w : r.order) {
    fp::Json seq = fp::Json::array();
    for (auto a : w) seq.push_back(session.inputs()[a]);
    j["executed"].push_back(seq);
  }
  j["symbols"] = session.symbols_sent();
  if (c.format == "json")
    emit(c, j.dump(2) + "\n");
  else
    emit(c, (r.match ? named[*r.match].first : std::string("None")) + "\n");
  return 0;
}

int run_batch(const Common& c, std::optional<fp::BaselineKind> baseline) {
  const auto named = load_models(c);
  std::vector<ImplSpec> specs;
  for (const auto& arg : c.impls) specs.push_back(parse_impl(arg));
  TraceWriter trace(c.trace);
  const bool needs_inputs = std::any_of(specs.begin(), specs.end(), [](const auto& s) { return !s.machine; });
  const fp::Alphabet tcp_inputs = needs_inputs ? alphabet_from(c, named) : fp::Alphabet{};
  const auto impls = make_impls(c, specs, tcp_inputs, trace);
  std::vector<fp::MealyMachine> initial;
  for (const auto& [_, m] : named) initial.push_back(m);
  const auto p = pipeline_from(c);
  const auto report = baseline ? fp::run_baseline(*baseline, impls, initial, p)
                               : fp::incremental_fingerprinting(impls, initial, p);
  const std::string algorithm = baseline ? std::string(fp::to_string(*baseline)) : "incremental";
  emit(c, render_run(c, report, algorithm, specs));
  for (const auto& r : report.records)
    if (!r.error.empty()) std::cerr << r.id << ": " << r.error << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioural fingerprinting of Mealy-machine implementations"};
  app.require_subcommand(1);

  Common c;
  auto* learn = app.add_subcommand("learn", "learn one implementation and print it as DOT");
  add_common(learn, c, false);
  auto* identify = app.add_subcommand("identify", "match one implementation against --models-dir");
  add_common(identify, c, false);
  auto* incremental = app.add_subcommand("incremental", "fingerprint a batch, learning unknown models");
  add_common(incremental, c, true);
  incremental->add_option("--copies", c.copies, "query each implementation this many times")
      ->capture_default_str();

  std::string baseline_kind;
  auto* baseline = app.add_subcommand("baseline", "learn every implementation (rl# or ral#)");
  baseline->add_option("kind", baseline_kind, "rl# or ral#")->required();
  add_common(baseline, c, true);
  baseline->add_option("--copies", c.copies, "query each implementation this many times")
      ->capture_default_str();

  std::string mutate_model, mutate_kind = "divert";
  std::uint64_t mutate_seed = 0;
  std::string mutate_out;
  auto* mutate = app.add_subcommand("mutate", "print a random mutant of a DOT model");
  mutate->add_option("model", mutate_model, "DOT file")->required();
  mutate->add_option("--kind", mutate_kind, "divert, remove-state, add-state or change-output")
      ->capture_default_str();
  mutate->add_option("--seed", mutate_seed, "random seed")->capture_default_str();
  mutate->add_option("--out", mutate_out, "output file (default stdout)");

  std::string bench_config, bench_out, bench_format = "json";
  std::optional<std::size_t> bench_jobs;
  auto* bench = app.add_subcommand("bench", "run an experiment described by a key=value file");
  bench->add_option("config", bench_config, "experiment configuration")->required();
  bench->add_option("--out", bench_out, "output file (default stdout)");
  bench->add_option("--format", bench_format, "json or csv")->capture_default_str();
  bench->add_option("--jobs", bench_jobs, "concurrent replications");

  std::string serve_model;
  std::uint16_t serve_port = 0;
  auto* serve = app.add_subcommand("serve", "serve a DOT model over the TCP line protocol");
  serve->add_option("model", serve_model, "DOT file")->required();
  serve->add_option("--port", serve_port, "port (0 picks a free one)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn->parsed()) return run_learn(c);
    if (identify->parsed()) return run_identify(c);
    if (incremental->parsed()) return run_batch(c, std::nullopt);
    if (baseline->parsed()) return run_batch(c, fp::parse_baseline_kind(baseline_kind));
    if (mutate->parsed()) {
      const auto m = fp::load_dot_file(mutate_model);
      fp::Rng rng(mutate_seed);
      const auto r = fp::mutate(m, fp::parse_mutation_kind(mutate_kind), rng);
      const auto text = fp::serialize_dot(r.machine);
      if (mutate_out.empty())
        std::cout << text;
      else
        fp::write_text_file(mutate_out, text);
      std::cerr << r.description << (r.equivalent_to_original ? " (equivalent)" : "") << "\n";
      return 0;
    }
    if (bench->parsed()) {
      auto spec = fp::load_experiment_config(bench_config);
      if (bench_jobs) spec.jobs = *bench_jobs;
      const auto result = fp::run_experiment(spec);
      const auto text = fp::render_experiment(result, fp::parse_report_format(bench_format));
      if (bench_out.empty())
        std::cout << text;
      else
        fp::write_text_file(bench_out, text);
      return 0;
    }
    if (serve->parsed()) {
      fp::SulServer server(fp::load_dot_file(serve_model), serve_port);
      std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
      server.wait();
      return 0;
    }
  } catch (const fp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
