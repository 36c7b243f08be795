#pragma once
#include <string>
#include <vector>

#include "gmi/image.h"
#include "gmi/rng.h"

namespace gmi {

// Training images at one canonical size, grayscale.
struct Corpus {
  std::string label;
  int canonical_size = 64;
  std::vector<Image> images;
};

// Built-in generators for the corpus-sensitivity experiment:
//   structured - rendered shape scenes with tiled repetition / mirror symmetry
//   textures   - origin-aligned periodic patterns (stripes, checkers, dots)
//   noise      - per-pixel white noise
Corpus builtin_corpus(const std::string& name, int count, int size, uint64_t seed);

// Every .png/.pgm under dir (sorted), converted to grayscale and resized.
Corpus load_corpus_dir(const std::string& dir, int size);

// "builtin:NAME" or a directory path.
Corpus make_corpus(const std::string& source, int count, int size, uint64_t seed);

}  // namespace gmi
