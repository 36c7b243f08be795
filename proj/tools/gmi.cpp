// Command-line front end: problem generation, training, solving, evaluation,
// and checkpoint sweeps.
#include <fnmatch.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gmi/checkpoint.h"
#include "gmi/eval.h"
#include "gmi/image_io.h"
#include "gmi/patch_inpaint.h"
#include "gmi/train.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gmi;

namespace {

GeneratorConfig parse_rules(const std::string& rules, GeneratorConfig cfg) {
  if (rules.empty()) return cfg;
  cfg.rule_weights.clear();
  std::stringstream ss(rules);
  std::string name;
  while (std::getline(ss, name, ',')) {
    auto rule = rule_from_name(name);
    if (!rule) {
      std::cerr << "unknown rule: " << name << "\n";
      std::exit(2);
    }
    cfg.rule_weights.emplace_back(*rule, 1.0);
  }
  return cfg;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  fs::path pat(pattern);
  fs::path dir = pat.parent_path().empty() ? "." : pat.parent_path();
  std::string base = pat.filename().string();
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (fnmatch(base.c_str(), e.path().filename().string().c_str(), 0) == 0)
      out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<InpainterContract> make_backend(const std::string& backend,
                                                const std::string& ckpt,
                                                const ProblemInstance* problem,
                                                uint64_t seed) {
  if (backend == "vae") {
    if (ckpt.empty()) {
      std::cerr << "--ckpt is required for the vae backend\n";
      std::exit(2);
    }
    return std::make_unique<ConvVaeGan>(load_checkpoint(ckpt));
  }
  if (backend == "patch") return std::make_unique<PatchInpainter>();
  if (backend == "random") return std::make_unique<NoiseFeatureInpainter>(seed);
  if (backend == "oracle") {
    if (!problem || !problem->truth) {
      std::cerr << "oracle backend needs a problem with a truth label\n";
      std::exit(2);
    }
    return std::make_unique<OracleInpainter>(
        canonical_cell(problem->choices[*problem->truth], SolverConfig{}));
  }
  std::cerr << "unknown backend: " << backend << "\n";
  std::exit(2);
}

int cmd_gen(const std::string& rules, int count, int cell_size, int choices,
            uint64_t seed, const std::string& out) {
  GeneratorConfig cfg;
  cfg.cell_size = cell_size;
  cfg.num_choices = choices;
  cfg.grid = choices == 8 ? 3 : 2;
  cfg.seed = seed;
  cfg = parse_rules(rules, cfg);
  std::vector<ProblemInstance> problems = generate_problems(cfg, count);
  save_problem_set(problems, out);
  std::cout << "wrote " << problems.size() << " problems to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& corpus_src, int corpus_count, int iters, int batch,
              double lr, double beta, double lambda_adv, uint64_t seed,
              const std::string& probe_dir, const std::string& out,
              const std::string& curves, const std::string& snapshots,
              int eval_every) {
  TrainConfig cfg;
  cfg.iterations = iters;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.weights.beta = beta;
  cfg.weights.lambda_adv = lambda_adv;
  cfg.seed = seed;
  cfg.snapshot_dir = snapshots;
  cfg.eval_every = eval_every;

  Corpus corpus = make_corpus(corpus_src, corpus_count, 64, seed ^ 0xc0c0);
  std::cout << "corpus '" << corpus.label << "': " << corpus.images.size()
            << " images\n";

  ConvVaeGan model(VaeGanArch{}, seed);
  std::cout << "model " << model.id() << ": " << model.param_count()
            << " parameters\n";

  std::vector<ProblemInstance> probe;
  if (!probe_dir.empty()) probe = load_problem_set(probe_dir);

  TrainResult result = train(model, corpus, cfg, probe.empty() ? nullptr : &probe);
  if (!out.empty()) {
    save_checkpoint(model, out);
    std::cout << "checkpoint: " << out << "\n";
  }
  if (!curves.empty()) {
    export_curves(result.curve, curves);
    std::cout << "curves: " << curves << "\n";
  }
  if (!result.curve.empty()) {
    const CurvePoint& last = result.curve.back();
    std::cout << "final losses: recon " << last.recon << " kl " << last.kl << " adv_g "
              << last.adv_g << " adv_d " << last.adv_d;
    if (last.score) std::cout << " probe " << *last.score;
    std::cout << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& ckpt, const std::string& backend,
              const std::string& problem_ref, const std::string& out) {
  auto slash = problem_ref.find_last_of('/');
  if (slash == std::string::npos) {
    std::cerr << "--problem must look like DIR/ID\n";
    return 2;
  }
  std::string dir = problem_ref.substr(0, slash);
  std::string id = problem_ref.substr(slash + 1);
  std::vector<ProblemInstance> set = load_problem_set(dir);
  auto it = std::find_if(set.begin(), set.end(),
                         [&](const ProblemInstance& p) { return p.id == id; });
  if (it == set.end()) {
    std::cerr << "no problem '" << id << "' in " << dir << "\n";
    return 2;
  }
  auto be = make_backend(backend, ckpt, &*it, 0);
  Solution sol = solve(*be, *it);

  fs::create_directories(out);
  nlohmann::json j;
  j["problem"] = it->id;
  j["set"] = it->set_label;
  j["backend"] = sol.backend_id;
  j["chosen"] = sol.chosen;
  j["distances"] = sol.distances;
  j["degenerate"] = sol.degenerate;
  if (it->truth) {
    j["truth"] = *it->truth;
    j["correct"] = sol.chosen == *it->truth;
  }
  std::ofstream f(fs::path(out) / "solution.json");
  f << j.dump(2) << "\n";
  write_png(sol.prediction, (fs::path(out) / "prediction.png").string());
  std::cout << "chosen: " << sol.chosen;
  if (it->truth) std::cout << " (truth " << *it->truth << ")";
  std::cout << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& backend,
             const std::string& problems_dir, const std::string& norms_path,
             uint64_t seed, const std::string& out) {
  std::vector<ProblemInstance> problems = load_problem_set(problems_dir);
  NormTable norms;
  bool have_norms = !norms_path.empty();
  if (have_norms) norms = load_norms(norms_path);

  EvalReport report;
  if (backend == "oracle") {
    report = evaluate_oracle(problems, have_norms ? &norms : nullptr);
  } else {
    auto be = make_backend(backend, ckpt, nullptr, seed);
    report = evaluate(*be, problems, have_norms ? &norms : nullptr, seed);
  }
  if (!ckpt.empty()) report.checkpoint_id = fs::path(ckpt).filename().string();
  emit_report(report, out);
  std::cout << report.backend_id << ": " << report.total << "/" << problems.size()
            << " (chance " << report.chance << ", degenerate "
            << report.degenerate_count << ")\n";
  for (const SetScore& s : report.sets)
    std::cout << "  " << s.set_label << ": " << s.correct << "/" << s.total << "\n";
  return 0;
}

int cmd_sweep(const std::string& ckpts_glob, const std::string& problems_dir,
              const std::string& out) {
  std::vector<std::string> paths = expand_glob(ckpts_glob);
  if (paths.empty()) {
    std::cerr << "no checkpoints match " << ckpts_glob << "\n";
    return 2;
  }
  std::vector<ProblemInstance> problems = load_problem_set(problems_dir);
  SweepResult sweep = sweep_checkpoints(paths, problems);

  fs::create_directories(out);
  nlohmann::json j;
  j["best_index"] = sweep.best;
  j["best_checkpoint"] = sweep.paths[sweep.best];
  nlohmann::json totals = nlohmann::json::array();
  for (size_t i = 0; i < sweep.reports.size(); ++i) {
    totals.push_back({{"checkpoint", sweep.paths[i]},
                      {"total", sweep.reports[i].total},
                      {"degenerate", sweep.reports[i].degenerate_count}});
    emit_report(sweep.reports[i],
                (fs::path(out) / fs::path(sweep.paths[i]).stem()).string());
  }
  j["checkpoints"] = totals;
  std::ofstream f(fs::path(out) / "sweep.json");
  f << j.dump(2) << "\n";
  std::cout << "best: " << sweep.paths[sweep.best] << " ("
            << sweep.reports[sweep.best].total << "/" << problems.size() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raven's-style matrix solving via generative inpainting"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a labeled problem set");
  std::string rules;
  int count = 100, cell_size = 32, choices = 6;
  uint64_t seed = 0;
  std::string out_dir;
  gen->add_option("--rules", rules, "comma-separated rule names");
  gen->add_option("--count", count, "number of problems");
  gen->add_option("--cell-size", cell_size, "cell side in pixels");
  gen->add_option("--choices", choices, "answer choices (6 or 8)")
      ->check(CLI::IsMember({6, 8}));
  gen->add_option("--seed", seed, "master seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* tr = app.add_subcommand("train", "train the inpainting model");
  std::string corpus_src = "builtin:structured", probe_dir, ckpt_out, curves_out,
              snapshots_dir;
  int iters = 2000, batch = 16, corpus_count = 2000, eval_every = 50;
  double lr = 1e-3, beta = 1e-3, lambda_adv = 1e-2;
  uint64_t train_seed = 1;
  tr->add_option("--corpus", corpus_src, "directory or builtin:NAME");
  tr->add_option("--corpus-count", corpus_count, "images for builtin corpora");
  tr->add_option("--iters", iters, "training iterations");
  tr->add_option("--batch", batch, "batch size");
  tr->add_option("--lr", lr, "learning rate");
  tr->add_option("--beta", beta, "KL weight");
  tr->add_option("--lambda-adv", lambda_adv, "adversarial weight (0 disables)");
  tr->add_option("--seed", train_seed, "seed");
  tr->add_option("--probe", probe_dir, "problem set scored at eval points");
  tr->add_option("--out", ckpt_out, "final checkpoint path");
  tr->add_option("--curves", curves_out, "loss-curve CSV path");
  tr->add_option("--snapshots", snapshots_dir, "directory for periodic checkpoints");
  tr->add_option("--eval-every", eval_every, "iterations between eval points");

  auto* so = app.add_subcommand("solve", "solve one problem");
  std::string ckpt, backend = "vae", problem_ref;
  so->add_option("--ckpt", ckpt, "checkpoint for the vae backend");
  so->add_option("--backend", backend, "vae|patch|oracle|random");
  so->add_option("--problem", problem_ref, "problem as DIR/ID")->required();
  so->add_option("--out", out_dir, "output directory")->required();

  auto* ev = app.add_subcommand("eval", "evaluate on a problem set");
  std::string problems_dir, norms_path;
  ev->add_option("--ckpt", ckpt, "checkpoint for the vae backend");
  ev->add_option("--backend", backend, "vae|patch|oracle|random");
  ev->add_option("--problems", problems_dir, "problem-set directory")->required();
  ev->add_option("--norms", norms_path, "norm table JSON");
  ev->add_option("--seed", seed, "seed (random backend)");
  ev->add_option("--out", out_dir, "report directory")->required();

  auto* sw = app.add_subcommand("sweep", "evaluate a series of checkpoints");
  std::string ckpts_glob;
  sw->add_option("--ckpts", ckpts_glob, "checkpoint glob, e.g. 'snaps/ckpt_*.gmi'")
      ->required();
  sw->add_option("--problems", problems_dir, "problem-set directory")->required();
  sw->add_option("--out", out_dir, "report directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(rules, count, cell_size, choices, seed, out_dir);
    if (tr->parsed())
      return cmd_train(corpus_src, corpus_count, iters, batch, lr, beta, lambda_adv,
                       train_seed, probe_dir, ckpt_out, curves_out, snapshots_dir,
                       eval_every);
    if (so->parsed()) return cmd_solve(ckpt, backend, problem_ref, out_dir);
    if (ev->parsed())
      return cmd_eval(ckpt, backend, problems_dir, norms_path, seed, out_dir);
    if (sw->parsed()) return cmd_sweep(ckpts_glob, problems_dir, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
