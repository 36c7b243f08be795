#pragma once
#include "gmi/inpaint.h"
#include "gmi/problems.h"

namespace gmi {

struct SolverConfig {
  int cell_size = 32;            // canonical cell size after crop+resize
  float white_threshold = 0.95f;
  float fill = 0.5f;             // masked-region placeholder intensity
  bool crop_cells = true;        // squeeze out white margins per cell
  double degenerate_variance = 1e-4;
};

struct Solution {
  int chosen = -1;                 // argmin of distances, lowest index on ties
  std::vector<double> distances;   // one per answer choice
  Image prediction;                // filled missing cell
  bool degenerate = false;         // near-constant prediction
  std::string backend_id;
};

// Crop white margins (all-white cells pass through) and resize to the
// canonical cell size. Applied identically to matrix cells and choices.
Image canonical_cell(const Image& cell, const SolverConfig& cfg);

Composite problem_composite(const ProblemInstance& p, const SolverConfig& cfg);

// Constructive matching: inpaint the missing cell, then pick the answer
// choice whose encoded features are nearest to the prediction's.
Solution solve(const InpainterContract& backend, const ProblemInstance& problem,
               const SolverConfig& cfg = {});

}  // namespace gmi
