#pragma once
#include <map>
#include <optional>

#include "gmi/solver.h"

namespace gmi {

struct SetScore {
  std::string set_label;
  int correct = 0;
  int total = 0;
};

struct ProblemOutcome {
  std::string id, set_label;
  int chosen = -1;
  std::optional<int> truth;
  bool correct = false;
  bool degenerate = false;
  Image prediction;
};

// Total score -> expected per-set composition, aligned with the evaluated
// sets in sorted label order.
struct NormTable {
  std::map<int, std::vector<double>> by_total;
};

NormTable load_norms(const std::string& path);

struct EvalReport {
  std::string backend_id;
  std::string checkpoint_id;
  uint64_t seed = 0;
  int total = 0;
  double chance = 0;
  int degenerate_count = 0;
  std::vector<SetScore> sets;  // sorted by set label
  std::optional<std::vector<double>> discrepancies;
  std::vector<ProblemOutcome> outcomes;  // problem order
};

// num_problems / num_choices: expected score of a uniform-random selector.
double chance_expectation(int num_problems, int num_choices);

// Observed minus normative composition for the achieved total (= sum of
// per_set, which must have an entry in the table).
std::vector<double> score_discrepancy(const std::vector<double>& per_set,
                                      const NormTable& norms);

EvalReport evaluate(const InpainterContract& backend,
                    const std::vector<ProblemInstance>& problems,
                    const NormTable* norms = nullptr, uint64_t seed = 0,
                    const SolverConfig& scfg = {});

// Upper-bound run: a per-problem OracleInpainter holding that problem's
// canonicalized truth choice.
EvalReport evaluate_oracle(const std::vector<ProblemInstance>& problems,
                           const NormTable* norms = nullptr,
                           const SolverConfig& scfg = {});

struct SweepResult {
  std::vector<std::string> paths;
  std::vector<EvalReport> reports;
  int best = 0;  // argmax of total, lowest index on ties
};

SweepResult sweep_checkpoints(const std::vector<std::string>& ckpt_paths,
                              const std::vector<ProblemInstance>& problems,
                              const SolverConfig& scfg = {});

// report.json, set_scores.csv, discrepancy.csv (when present), and predicted
// cells as PNGs ("_degenerate" suffix on flagged ones).
void emit_report(const EvalReport& report, const std::string& dir);

}  // namespace gmi
