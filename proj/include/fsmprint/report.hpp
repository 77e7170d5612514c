#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsmprint/bench.hpp"
#include "fsmprint/dot.hpp"
#include "fsmprint/incremental.hpp"

namespace fsmprint {

using Json = nlohmann::ordered_json;

enum class ReportFormat { Json, Csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw ConfigError("unknown report format '" + s + "'");
}

namespace report_detail {

inline Json word_json(const Word& w, const Alphabet& inputs) {
  Json a = Json::array();
  for (auto s : w) a.push_back(inputs[s]);
  return a;
}

inline Json metrics_json(const MetricsRow& r) {
  return Json{{"benchmark", r.benchmark},
              {"algorithm", r.algorithm},
              {"correct_models", r.correct_models},
              {"correct_pct", r.correct_pct},
              {"misclassification_rate", r.misclassification_rate},
              {"fingerprint_symbols", r.fingerprint_symbols},
              {"cq_symbols", r.cq_symbols},
              {"learn_symbols", r.learn_symbols},
              {"total_symbols", r.total_symbols},
              {"eq_queries", r.eq_queries},
              {"seed", r.seed}};
}

/// Fixed-point rendering so CSV output does not depend on stream defaults.
inline std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace report_detail

/// {models, mu, gamma, outcomes, errors, metrics}. Sequences are arrays of
/// input names; models are DOT text.
inline Json report_to_json(const RunReport& report) {
  Json j;
  j["models"] = Json::array();
  for (const auto& m : report.models) j["models"].push_back(serialize_dot(m));
  j["mu"] = Json::object();
  for (const auto& [id, idx] : report.mu()) j["mu"][id] = idx;
  j["gamma"] = Json::object();
  for (const auto& r : report.records) {
    if (!r.model) continue;
    const auto& inputs = report.models[*r.model].inputs();
    Json seqs = Json::array();
    for (const auto& w : r.gamma) seqs.push_back(report_detail::word_json(w, inputs));
    j["gamma"][r.id] = std::move(seqs);
  }
  j["outcomes"] = Json::object();
  for (const auto& r : report.records) j["outcomes"][r.id] = std::string(to_string(r.outcome));
  j["errors"] = Json::object();
  for (const auto& r : report.records)
    if (!r.error.empty()) j["errors"][r.id] = r.error;

  Json metrics;
  metrics["initial_models"] = report.initial_models;
  metrics["final_models"] = report.models.size();
  metrics["learner_invocations"] = report.learner_invocations();
  metrics["eq_queries"] = report.eq_queries();
  std::size_t total = 0;
  for (auto p : kAllPhases) {
    const auto c = report.phase_total(p);
    metrics[std::string(to_string(p)) + "_symbols"] = c.symbols;
    total += c.symbols;
  }
  metrics["total_symbols"] = total;
  Json per = Json::object();
  for (const auto& r : report.records) {
    Json e;
    for (auto p : kAllPhases) e[std::string(to_string(p)) + "_symbols"] = r.phase(p).symbols;
    e["eq_queries"] = r.eq_queries;
    e["budget_exhausted"] = r.budget_exhausted;
    per[r.id] = std::move(e);
  }
  metrics["implementations"] = std::move(per);
  j["metrics"] = std::move(metrics);
  return j;
}

/// What a report's JSON form carries about the classification.
struct ParsedReport {
  std::vector<MealyMachine> models;
  std::map<std::string, std::size_t> mu;
  std::map<std::string, Language> gamma;
};

inline ParsedReport parse_report_json(const std::string& text) {
  ParsedReport p;
  Json j;
  try {
    j = Json::parse(text);
    for (const auto& dot : j.at("models")) p.models.push_back(parse_dot(dot.get<std::string>()));
    for (const auto& [id, idx] : j.at("mu").items()) p.mu[id] = idx.get<std::size_t>();
    for (const auto& [id, seqs] : j.at("gamma").items()) {
      const auto& inputs = p.models.at(p.mu.at(id)).inputs();
      Language lang;
      for (const auto& seq : seqs) {
        Word w;
        for (const auto& s : seq) w.push_back(inputs.index(s.get<std::string>()));
        lang.insert(std::move(w));
      }
      p.gamma[id] = std::move(lang);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return p;
}

inline constexpr const char* kMetricsCsvHeader =
    "benchmark,algorithm,correct_models,correct_pct,misclassification_rate,fingerprint_symbols,"
    "cq_symbols,learn_symbols,total_symbols,eq_queries,seed";

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << kMetricsCsvHeader << "\n";
  for (const auto& r : rows)
    os << r.benchmark << "," << r.algorithm << "," << r.correct_models << ","
       << report_detail::fixed(r.correct_pct, 2) << "," << report_detail::fixed(r.misclassification_rate)
       << "," << r.fingerprint_symbols << "," << r.cq_symbols << "," << r.learn_symbols << ","
       << r.total_symbols << "," << r.eq_queries << "," << r.seed << "\n";
  return os.str();
}

inline Json experiment_to_json(const ExperimentResult& result) {
  Json j;
  j["benchmark"] = result.rows.empty() ? "" : result.rows.front().benchmark;
  j["runs"] = Json::array();
  for (const auto& run : result.runs) {
    Json r = report_to_json(run.report);
    r["algorithm"] = std::string(to_string(run.algorithm));
    r["seed"] = run.seed;
    r["row"] = report_detail::metrics_json(run.metrics);
    j["runs"].push_back(std::move(r));
  }
  j["summary"] = Json::array();
  for (const auto& s : result.summary) {
    Json e{{"algorithm", s.algorithm}, {"runs", s.runs}};
    for (const auto& [name, ms] : s.columns) {
      e["mean"][name] = ms.first;
      e["sd"][name] = ms.second;
    }
    j["summary"].push_back(std::move(e));
  }
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Renders an experiment in `format`; CSV carries only the per-run rows.
inline std::string render_experiment(const ExperimentResult& result, ReportFormat format) {
  if (result.rows.empty()) throw ConfigError("nothing to report");
  if (format == ReportFormat::Csv) return metrics_csv(result.rows);
  return experiment_to_json(result).dump(2) + "\n";
}

inline void emit_report(const ExperimentResult& result, ReportFormat format,
                        const std::filesystem::path& path) {
  write_text_file(path, render_experiment(result, format));
}

}  // namespace fsmprint
