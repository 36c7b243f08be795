#include "gmi/eval.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>

#include "gmi/checkpoint.h"
#include "gmi/image_io.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gmi {

double chance_expectation(int num_problems, int num_choices) {
  if (num_problems < 1 || num_choices < 1)
    fail(Err::IndexOutOfRange, "counts must be >= 1");
  return double(num_problems) / double(num_choices);
}

NormTable load_norms(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Err::IoError, "cannot open norm file " + path);
  NormTable table;
  try {
    json j;
    f >> j;
    for (auto& [key, value] : j.items()) {
      int total = std::stoi(key);
      std::vector<double> comp = value.get<std::vector<double>>();
      double sum = 0;
      for (double v : comp) sum += v;
      if (std::abs(sum - double(total)) > 1e-9)
        fail(Err::IoError, "norm composition for " + key + " does not sum to its total");
      table.by_total[total] = std::move(comp);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Err::IoError, std::string("bad norm file: ") + e.what());
  }
  return table;
}

std::vector<double> score_discrepancy(const std::vector<double>& per_set,
                                      const NormTable& norms) {
  double sum = 0;
  for (double v : per_set) sum += v;
  const int total = int(std::lround(sum));
  auto it = norms.by_total.find(total);
  if (it == norms.by_total.end())
    fail(Err::TotalNotInNorms, "no norm entry for total " + std::to_string(total));
  if (it->second.size() != per_set.size())
    fail(Err::LengthMismatch, "norm composition length does not match set count");
  std::vector<double> out(per_set.size());
  for (size_t i = 0; i < per_set.size(); ++i) out[i] = per_set[i] - it->second[i];
  return out;
}

namespace {

EvalReport merge_solutions(const std::vector<ProblemInstance>& problems,
                           const std::vector<Solution>& solutions,
                           const std::string& backend_id, const NormTable* norms,
                           uint64_t seed) {
  EvalReport report;
  report.backend_id = backend_id;
  report.seed = seed;
  std::map<std::string, SetScore> sets;
  for (size_t i = 0; i < problems.size(); ++i) {
    const ProblemInstance& p = problems[i];
    const Solution& s = solutions[i];
    SetScore& ss = sets[p.set_label];
    ss.set_label = p.set_label;
    ss.total += 1;
    const bool correct = s.chosen == *p.truth;
    if (correct) {
      ss.correct += 1;
      report.total += 1;
    }
    report.chance += 1.0 / double(p.num_choices);
    if (s.degenerate) report.degenerate_count += 1;
    report.outcomes.push_back(
        {p.id, p.set_label, s.chosen, p.truth, correct, s.degenerate, s.prediction});
  }
  for (auto& [label, ss] : sets) report.sets.push_back(ss);
  if (norms) {
    std::vector<double> per_set;
    for (const SetScore& ss : report.sets) per_set.push_back(double(ss.correct));
    report.discrepancies = score_discrepancy(per_set, *norms);
  }
  return report;
}

void require_labeled(const std::vector<ProblemInstance>& problems) {
  if (problems.empty()) fail(Err::EmptySet, "no problems to evaluate");
  for (const ProblemInstance& p : problems)
    if (!p.truth) fail(Err::UnlabeledProblem, p.id + " has no truth label");
}

}  // namespace

EvalReport evaluate(const InpainterContract& backend,
                    const std::vector<ProblemInstance>& problems,
                    const NormTable* norms, uint64_t seed, const SolverConfig& scfg) {
  require_labeled(problems);
  const int n = int(problems.size());
  std::vector<Solution> solutions(n);
  if (backend.deterministic()) {
    std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        solutions[i] = solve(backend, problems[i], scfg);
      } catch (...) {
#pragma omp critical
        if (!eptr) eptr = std::current_exception();
      }
    }
    if (eptr) std::rethrow_exception(eptr);
  } else {
    for (int i = 0; i < n; ++i) solutions[i] = solve(backend, problems[i], scfg);
  }
  return merge_solutions(problems, solutions, backend.id(), norms, seed);
}

EvalReport evaluate_oracle(const std::vector<ProblemInstance>& problems,
                           const NormTable* norms, const SolverConfig& scfg) {
  require_labeled(problems);
  std::vector<Solution> solutions(problems.size());
  std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < int(problems.size()); ++i) {
    try {
      const ProblemInstance& p = problems[i];
      OracleInpainter oracle(canonical_cell(p.choices[*p.truth], scfg));
      solutions[i] = solve(oracle, p, scfg);
    } catch (...) {
#pragma omp critical
      if (!eptr) eptr = std::current_exception();
    }
  }
  if (eptr) std::rethrow_exception(eptr);
  return merge_solutions(problems, solutions, "oracle", norms, 0);
}

SweepResult sweep_checkpoints(const std::vector<std::string>& ckpt_paths,
                              const std::vector<ProblemInstance>& problems,
                              const SolverConfig& scfg) {
  if (ckpt_paths.empty()) fail(Err::EmptySet, "no checkpoints to sweep");
  SweepResult result;
  result.paths = ckpt_paths;
  for (const std::string& path : ckpt_paths) {
    ConvVaeGan model = load_checkpoint(path);
    EvalReport r = evaluate(model, problems, nullptr, 0, scfg);
    r.checkpoint_id = fs::path(path).filename().string();
    result.reports.push_back(std::move(r));
  }
  result.best = 0;
  for (size_t i = 1; i < result.reports.size(); ++i)
    if (result.reports[i].total > result.reports[result.best].total)
      result.best = int(i);
  return result;
}

void emit_report(const EvalReport& report, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "preds");

  json j;
  j["backend"] = report.backend_id;
  j["checkpoint"] = report.checkpoint_id;
  j["seed"] = report.seed;
  j["total"] = report.total;
  j["problems"] = report.outcomes.size();
  j["chance"] = report.chance;
  j["degenerate"] = report.degenerate_count;
  json sets = json::array();
  for (const SetScore& s : report.sets)
    sets.push_back({{"set", s.set_label}, {"correct", s.correct}, {"total", s.total}});
  j["sets"] = sets;
  if (report.discrepancies) j["discrepancies"] = *report.discrepancies;
  json outcomes = json::array();
  for (const ProblemOutcome& o : report.outcomes) {
    json e = {{"id", o.id},
              {"set", o.set_label},
              {"chosen", o.chosen},
              {"correct", o.correct},
              {"degenerate", o.degenerate}};
    if (o.truth) e["truth"] = *o.truth;
    outcomes.push_back(e);
  }
  j["outcomes"] = outcomes;
  std::ofstream jf(fs::path(dir) / "report.json");
  if (!jf) fail(Err::IoError, "cannot write report.json under " + dir);
  jf << j.dump(2) << "\n";

  {
    std::ofstream csv(fs::path(dir) / "set_scores.csv");
    if (!csv) fail(Err::IoError, "cannot write set_scores.csv");
    csv << "set,correct,total\n";
    for (const SetScore& s : report.sets)
      csv << s.set_label << "," << s.correct << "," << s.total << "\n";
  }
  if (report.discrepancies) {
    std::ofstream csv(fs::path(dir) / "discrepancy.csv");
    if (!csv) fail(Err::IoError, "cannot write discrepancy.csv");
    csv << "set,observed,discrepancy\n";
    char buf[64];
    for (size_t i = 0; i < report.sets.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", (*report.discrepancies)[i]);
      csv << report.sets[i].set_label << "," << report.sets[i].correct << "," << buf
          << "\n";
    }
  }
  for (const ProblemOutcome& o : report.outcomes) {
    std::string name = "pred_" + o.id + (o.degenerate ? "_degenerate" : "") + ".png";
    write_png(o.prediction, (fs::path(dir) / "preds" / name).string());
  }
}

}  // namespace gmi
