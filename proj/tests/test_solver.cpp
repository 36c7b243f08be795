#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gmi/checkpoint.h"
#include "gmi/eval.h"
#include "gmi/patch_inpaint.h"
#include "gmi/train.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gmi;

namespace {

GeneratorConfig single_rule(RuleKind rule, uint64_t seed = 0) {
  GeneratorConfig cfg;
  cfg.rule_weights = {{rule, 1.0}};
  cfg.seed = seed;
  return cfg;
}

// Feature-scaling wrapper used for the selection-invariance property.
class ScaledFeatures final : public InpainterContract {
 public:
  ScaledFeatures(const InpainterContract& inner, float scale)
      : inner_(inner), scale_(scale) {}
  LatentFeatures encode(const Image& image, const Mask& mask) const override {
    LatentFeatures f = inner_.encode(image, mask);
    for (float& v : f.v) v *= scale_;
    return f;
  }
  Image raw_inpaint(const Composite& comp) const override {
    return inner_.raw_inpaint(comp);
  }
  std::string id() const override { return inner_.id(); }

 private:
  const InpainterContract& inner_;
  float scale_;
};

class FlatOutput final : public InpainterContract {
 public:
  LatentFeatures encode(const Image& image, const Mask&) const override {
    return pixel_features(image);
  }
  Image raw_inpaint(const Composite& comp) const override {
    return Image(comp.image.h, comp.image.w, 0.5f);
  }
  std::string id() const override { return "flat"; }
};

}  // namespace

TEST_CASE("oracle backend picks its stored choice with distance zero") {
  Rng rng(1);
  ProblemInstance p = generate_problem(single_rule(RuleKind::reflect_rows), rng);
  // place the truth at index 2
  std::swap(p.choices[*p.truth], p.choices[2]);
  p.truth = 2;
  OracleInpainter oracle(canonical_cell(p.choices[2], SolverConfig{}));
  Solution sol = solve(oracle, p);
  CHECK(sol.chosen == 2);
  CHECK(sol.distances[2] == 0.0);
  for (size_t k = 0; k < sol.distances.size(); ++k)
    if (k != 2) CHECK(sol.distances[k] > 0.0);
}

TEST_CASE("a hand-built reflection problem selects the reflected element") {
  // top row: glyph and its mirror; bottom row starts with a second glyph, so
  // the answer is that glyph mirrored - placed at choice index 1.
  GeneratorConfig gcfg;
  gcfg.shapes = {ShapeKind::triangle};
  Rng rng(2);
  Image g1 = render_glyph_cell(gcfg, rng);
  Image g2 = render_glyph_cell(gcfg, rng);
  Image answer = hflip(g2);

  ProblemInstance p;
  p.id = "reflection";
  p.set_label = "handmade";
  p.grid = {2, 2};
  p.missing = {1, 1};
  p.cells = {g1, hflip(g1), g2};
  Rng drng(3);
  std::vector<Image> foils = make_distractors(answer, gcfg, drng);
  p.choices = {foils[0], answer, foils[1], foils[2], foils[3], foils[4]};
  p.truth = 1;
  p.num_choices = 6;

  OracleInpainter oracle(canonical_cell(answer, SolverConfig{}));
  Solution sol = solve(oracle, p);
  CHECK(sol.chosen == 1);
}

TEST_CASE("patch backend solves exactly periodic texture problems") {
  GeneratorConfig cfg = single_rule(RuleKind::texture_continuation, 4);
  cfg.texture_periods = {4, 8};
  auto problems = generate_problems(cfg, 10);
  PatchInpainter patch(8, 1);
  SolverConfig scfg;
  scfg.crop_cells = false;  // cropping would break the exact periodicity
  int correct = 0;
  for (const ProblemInstance& p : problems) {
    // tiling oracle: with origin-aligned periods the continuation equals the
    // top-left cell
    CHECK(p.choices[*p.truth].px == cell_at(p, 0, 0).px);
    Solution sol = solve(patch, p, scfg);
    if (sol.chosen == *p.truth) ++correct;
  }
  CHECK(correct >= 9);
}

TEST_CASE("chance expectation arithmetic") {
  CHECK(chance_expectation(36, 6) == 6.0);
  CHECK(chance_expectation(12, 8) == 1.5);
  CHECK(chance_expectation(17, 1) == 17.0);
  CHECK_THROWS_AS(chance_expectation(0, 6), Error);
}

TEST_CASE("score discrepancies against the norms-at-27 fixture") {
  NormTable norms;
  norms.by_total[27] = {10, 10, 7};
  SUBCASE("matching composition gives the zero vector") {
    auto d = score_discrepancy({10, 10, 7}, norms);
    CHECK(d == std::vector<double>{0, 0, 0});
  }
  SUBCASE("shifted composition") {
    auto d = score_discrepancy({12, 10, 5}, norms);
    CHECK(d == std::vector<double>{2, 0, -2});
  }
  SUBCASE("total without a norm entry") {
    CHECK_THROWS_AS(score_discrepancy({5, 5, 5}, norms), Error);
    try {
      score_discrepancy({5, 5, 5}, norms);
    } catch (const Error& e) {
      CHECK(e.code == Err::TotalNotInNorms);
    }
  }
}

TEST_CASE("norm files load and validate") {
  std::string path = "/tmp/gmi_test_norms.json";
  {
    std::ofstream f(path);
    f << R"({"27": [10, 10, 7], "20": [9, 7, 4]})";
  }
  NormTable norms = load_norms(path);
  CHECK(norms.by_total.at(27) == std::vector<double>{10, 10, 7});
  {
    std::ofstream f(path);
    f << R"({"27": [10, 10, 8]})";  // sums to 28
  }
  CHECK_THROWS_AS(load_norms(path), Error);
  fs::remove(path);
}

TEST_CASE("oracle evaluation is perfect and evaluation errors are raised") {
  GeneratorConfig cfg;
  cfg.seed = 5;
  auto problems = generate_problems(cfg, 50);
  EvalReport report = evaluate_oracle(problems);
  CHECK(report.total == 50);
  CHECK(report.chance == doctest::Approx(50.0 / 6));

  CHECK_THROWS_AS(evaluate_oracle({}), Error);
  problems[3].truth.reset();
  PatchInpainter patch;
  try {
    evaluate(patch, problems);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == Err::UnlabeledProblem);
  }
}

TEST_CASE("degenerate predictions are flagged") {
  Rng rng(6);
  ProblemInstance p = generate_problem(single_rule(RuleKind::constant), rng);
  FlatOutput flat;
  Solution sol = solve(flat, p);
  CHECK(sol.degenerate);
}

TEST_CASE("permuting the choices permutes distances and the selection") {
  Rng rng(7);
  ProblemInstance p = generate_problem(single_rule(RuleKind::reflect_rows), rng);
  PatchInpainter patch;
  Solution base = solve(patch, p);

  ProblemInstance rotated = p;
  std::rotate(rotated.choices.begin(), rotated.choices.begin() + 1,
              rotated.choices.end());
  rotated.truth = (*p.truth + int(p.choices.size()) - 1) % int(p.choices.size());
  Solution perm = solve(patch, rotated);
  for (size_t k = 0; k < p.choices.size(); ++k)
    CHECK(perm.distances[k] == base.distances[(k + 1) % p.choices.size()]);
  CHECK(perm.chosen == (base.chosen + int(p.choices.size()) - 1) % int(p.choices.size()));
}

TEST_CASE("selection is invariant to a common feature scale") {
  Rng rng(8);
  ProblemInstance p = generate_problem(single_rule(RuleKind::constant), rng);
  PatchInpainter patch;
  ScaledFeatures scaled(patch, 3.7f);
  CHECK(solve(patch, p).chosen == solve(scaled, p).chosen);
}

TEST_CASE("appending the exact prediction as a choice makes it win") {
  Rng rng(9);
  ProblemInstance p = generate_problem(single_rule(RuleKind::reflect_cols), rng);
  SolverConfig scfg;
  Image truth_canon = canonical_cell(p.choices[*p.truth], scfg);
  OracleInpainter oracle(truth_canon);
  ProblemInstance extended = p;
  extended.choices.push_back(truth_canon);
  extended.num_choices += 1;
  Solution sol = solve(oracle, extended);
  CHECK(sol.distances[sol.chosen] == 0.0);
  CHECK(canonical_cell(extended.choices[sol.chosen], scfg).px == sol.prediction.px);
}

TEST_CASE("sweep picks the best checkpoint with lowest-index ties") {
  GeneratorConfig pcfg = single_rule(RuleKind::constant, 10);
  pcfg.shapes = {ShapeKind::square, ShapeKind::circle};
  auto probe = generate_problems(pcfg, 5);

  // corpus = the five completed matrices; training on them memorizes the
  // probe distribution
  SolverConfig scfg;
  Corpus corpus;
  corpus.label = "probe-composites";
  for (const ProblemInstance& p : probe) {
    Composite comp = problem_composite(p, scfg);
    Image full = comp.image;
    Image truth = canonical_cell(p.choices[*p.truth], scfg);
    Rect rect = comp.missing_rect();
    for (int r = 0; r < rect.height; ++r)
      for (int c = 0; c < rect.width; ++c)
        full.at(rect.top + r, rect.left + c) = truth.at(r, c);
    corpus.images.push_back(full);
  }

  ConvVaeGan untrained(VaeGanArch{}, 61);
  ConvVaeGan trained(VaeGanArch{}, 61);
  TrainConfig tcfg;
  tcfg.iterations = 600;
  tcfg.batch_size = 4;
  tcfg.eval_every = 200;
  tcfg.weights.lambda_adv = 0;
  tcfg.seed = 17;
  train(trained, corpus, tcfg);

  std::string dir = "/tmp/gmi_test_sweep";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_checkpoint(untrained, dir + "/a_untrained.gmi");
  save_checkpoint(trained, dir + "/b_trained.gmi");

  SweepResult sweep =
      sweep_checkpoints({dir + "/a_untrained.gmi", dir + "/b_trained.gmi"}, probe);
  CHECK(sweep.reports[1].total > sweep.reports[0].total);
  CHECK(sweep.best == 1);

  // identical checkpoints tie to the lowest index
  SweepResult tie =
      sweep_checkpoints({dir + "/b_trained.gmi", dir + "/b_trained.gmi"}, probe);
  CHECK(tie.best == 0);

  SweepResult solo = sweep_checkpoints({dir + "/b_trained.gmi"}, probe);
  CHECK(solo.best == 0);
  fs::remove_all(dir);
}

TEST_CASE("emit_report writes the full report bundle deterministically") {
  std::vector<ProblemInstance> problems;
  for (RuleKind rule :
       {RuleKind::constant, RuleKind::reflect_rows, RuleKind::reflect_cols}) {
    auto batch = generate_problems(single_rule(rule, 11), 2);
    for (auto& p : batch) {
      p.id = std::string(rule_name(rule)) + "_" + p.id;
      problems.push_back(std::move(p));
    }
  }
  NormTable norms;
  norms.by_total[6] = {2, 2, 2};
  EvalReport report = evaluate_oracle(problems, &norms);
  REQUIRE(report.sets.size() == 3);
  REQUIRE(report.discrepancies.has_value());
  CHECK(*report.discrepancies == std::vector<double>{0, 0, 0});

  std::string dir = "/tmp/gmi_test_report";
  fs::remove_all(dir);
  emit_report(report, dir);

  std::ifstream jf(dir + "/report.json");
  nlohmann::json j;
  jf >> j;
  CHECK(j["total"] == 6);
  CHECK(j["sets"].size() == 3);
  CHECK(j["chance"].get<double>() == doctest::Approx(1.0));
  CHECK(j["outcomes"].size() == 6);

  std::ifstream csv(dir + "/set_scores.csv");
  int lines = 0;
  std::string line;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 4);  // header + 3 sets
  CHECK(fs::exists(dir + "/discrepancy.csv"));
  for (const ProblemOutcome& o : report.outcomes)
    CHECK(fs::exists(dir + "/preds/pred_" + o.id + ".png"));

  // repeated evaluation emits byte-identical reports
  EvalReport again = evaluate_oracle(problems, &norms);
  std::string dir2 = "/tmp/gmi_test_report2";
  fs::remove_all(dir2);
  emit_report(again, dir2);
  std::ifstream a(dir + "/report.json"), b(dir2 + "/report.json");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("degenerate prediction files carry the suffix") {
  GeneratorConfig cfg = single_rule(RuleKind::constant, 12);
  auto problems = generate_problems(cfg, 1);
  FlatOutput flat;
  EvalReport report = evaluate(flat, problems);
  REQUIRE(report.degenerate_count == 1);
  std::string dir = "/tmp/gmi_test_degen";
  fs::remove_all(dir);
  emit_report(report, dir);
  CHECK(fs::exists(dir + "/preds/pred_" + problems[0].id + "_degenerate.png"));
  fs::remove_all(dir);
}
