#pragma once
#include <optional>
#include <string>
#include <vector>

#include "gmi/image.h"
#include "gmi/rng.h"

namespace gmi {

enum class RuleKind {
  constant,
  reflect_rows,  // second column element is the horizontal flip of the first
  reflect_cols,  // second row element is the vertical flip of the first
  rotate90,      // column c holds the base rotated 90 degrees c times
  texture_continuation,
};

const char* rule_name(RuleKind r);
std::optional<RuleKind> rule_from_name(const std::string& name);

enum class ShapeKind { circle, square, triangle, bars, composite };

struct GeneratorConfig {
  std::vector<std::pair<RuleKind, double>> rule_weights = {
      {RuleKind::constant, 1.0},
      {RuleKind::reflect_rows, 1.0},
      {RuleKind::reflect_cols, 1.0},
      {RuleKind::rotate90, 1.0},
      {RuleKind::texture_continuation, 1.0},
  };
  int cell_size = 32;
  int grid = 2;  // 2 -> 2x2 matrix, 3 -> 3x3
  int num_choices = 6;
  double stroke_width = 2.0;  // full stroke width in pixels
  std::vector<ShapeKind> shapes = {ShapeKind::circle, ShapeKind::square,
                                   ShapeKind::triangle, ShapeKind::bars,
                                   ShapeKind::composite};
  bool blank_distractor = true;
  std::vector<int> texture_periods = {4, 8};
  uint64_t seed = 0;
};

// One matrix problem: occupied cells in row-major order (the missing cell is
// skipped), answer choices, and the ground-truth index when known.
struct ProblemInstance {
  std::string id;
  std::string set_label;
  GridShape grid{2, 2};
  CellIndex missing{1, 1};
  std::vector<Image> cells;
  std::vector<Image> choices;
  std::optional<int> truth;
  int num_choices = 6;
};

// Cell at an occupied position (row-major indexing that skips the missing
// cell). Out-of-range or the missing position itself is an error.
const Image& cell_at(const ProblemInstance& p, int row, int col);

ProblemInstance generate_problem(const GeneratorConfig& cfg, Rng& rng);

// Batch helper: per-problem rngs split from cfg.seed, ids "p0000", "p0001"...
std::vector<ProblemInstance> generate_problems(const GeneratorConfig& cfg, int count);

// Distractors pairwise distinct from the truth and each other by at least 1%
// of pixels differing by >= 0.1 intensity.
std::vector<Image> make_distractors(const Image& truth, const GeneratorConfig& cfg,
                                    Rng& rng);

void save_problem_set(const std::vector<ProblemInstance>& problems,
                      const std::string& dir);
std::vector<ProblemInstance> load_problem_set(const std::string& dir);

// Rendering helpers shared with the corpus generators.
Image render_glyph_cell(const GeneratorConfig& cfg, Rng& rng);
Image render_texture(int h, int w, int period, Rng& rng);

}  // namespace gmi
