#include "gmi/solver.h"

namespace gmi {

Image canonical_cell(const Image& cell, const SolverConfig& cfg) {
  Image base = cell;
  if (cfg.crop_cells) {
    try {
      base = crop_whitespace(cell, cfg.white_threshold);
    } catch (const Error& e) {
      if (e.code != Err::AllWhite) throw;  // blank cells stay as they are
    }
  }
  return resize_nearest(base, cfg.cell_size, cfg.cell_size);
}

Composite problem_composite(const ProblemInstance& p, const SolverConfig& cfg) {
  if (p.cells.size() != size_t(p.grid.rows) * p.grid.cols - 1)
    fail(Err::BadCellCount, "problem has wrong cell count");
  std::vector<Image> canon;
  canon.reserve(p.cells.size());
  for (const Image& cell : p.cells) canon.push_back(canonical_cell(cell, cfg));
  return compose_matrix(canon, p.grid, p.missing, cfg.fill);
}

Solution solve(const InpainterContract& backend, const ProblemInstance& problem,
               const SolverConfig& cfg) {
  if (problem.choices.empty()) fail(Err::BadCellCount, "problem has no answer choices");
  Composite comp = problem_composite(problem, cfg);
  InpaintResult filled = inpaint(backend, comp);

  Solution sol;
  sol.backend_id = backend.id();
  sol.prediction = filled.prediction;
  sol.degenerate = pixel_variance(filled.prediction) < cfg.degenerate_variance;

  const Mask all_known(cfg.cell_size, cfg.cell_size, true);
  LatentFeatures pred = backend.encode(filled.prediction, all_known);
  sol.distances.reserve(problem.choices.size());
  for (const Image& choice : problem.choices) {
    LatentFeatures cf = backend.encode(canonical_cell(choice, cfg), all_known);
    sol.distances.push_back(l2_distance(pred.v, cf.v));
  }
  sol.chosen = 0;
  for (size_t k = 1; k < sol.distances.size(); ++k)
    if (sol.distances[k] < sol.distances[sol.chosen]) sol.chosen = int(k);
  return sol;
}

}  // namespace gmi
