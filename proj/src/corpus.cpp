#include "gmi/corpus.h"

#include <algorithm>
#include <filesystem>

#include "gmi/image_io.h"
#include "gmi/problems.h"

namespace fs = std::filesystem;

namespace gmi {

namespace {

// Squeeze out white margins the way the solver canonicalizes cells, so the
// corpus statistics match what the composites will look like.
Image squeezed_tile(const GeneratorConfig& gcfg, Rng& rng) {
  Image tile = render_glyph_cell(gcfg, rng);
  try {
    tile = crop_whitespace(tile, 0.95f);
  } catch (const Error&) {
  }
  return resize_nearest(tile, gcfg.cell_size, gcfg.cell_size);
}

// 2x2 tile patterns echo the regularities the matrices are built from:
// plain repetition, mirrored columns/rows, and a rotation cycle. Glyphs sit
// on a fixed grid so the pooled encoder features can place them.
Image structured_scene(int size, Rng& rng) {
  GeneratorConfig gcfg;
  gcfg.cell_size = size / 2;
  const int draw = rng.uniform_int(10);
  if (draw < 7) {
    Image tile = squeezed_tile(gcfg, rng);
    Image right, bottom, diag;
    switch (rng.uniform_int(4)) {
      case 0:  // repeat
        right = tile; bottom = tile; diag = tile;
        break;
      case 1:  // mirrored columns
        right = hflip(tile); bottom = tile; diag = hflip(tile);
        break;
      case 2:  // mirrored rows
        right = tile; bottom = vflip(tile); diag = vflip(tile);
        break;
      default:  // rotation cycle along each row
        right = rot90(tile); bottom = tile; diag = rot90(tile);
        break;
    }
    Composite comp = compose_matrix({tile, right, bottom}, {2, 2}, {1, 1}, 1.f);
    Image out = comp.image;
    Rect rect = comp.missing_rect();
    for (int r = 0; r < rect.height; ++r)
      for (int c = 0; c < rect.width; ++c)
        out.at(rect.top + r, rect.left + c) = diag.at(r, c);
    return out;
  }
  if (draw < 9) {
    // small-tile wallpaper repetition
    GeneratorConfig small = gcfg;
    small.cell_size = size / 4;
    Image tile = render_glyph_cell(small, rng);
    Image out(size, size);
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c)
        out.at(r, c) = tile.at(r % tile.h, c % tile.w);
    return out;
  }
  // whole-canvas bilateral symmetry
  GeneratorConfig full = gcfg;
  full.cell_size = size;
  Image scene = render_glyph_cell(full, rng);
  Image mirrored = hflip(scene);
  for (size_t i = 0; i < scene.px.size(); ++i)
    scene.px[i] = std::min(scene.px[i], mirrored.px[i]);
  return scene;
}

}  // namespace

Corpus builtin_corpus(const std::string& name, int count, int size, uint64_t seed) {
  if (count < 1) fail(Err::EmptyCorpus, "count must be >= 1");
  Corpus corpus;
  corpus.label = name;
  corpus.canonical_size = size;
  corpus.images.reserve(count);
  Rng master(seed);
  for (int i = 0; i < count; ++i) {
    Rng rng = master.split(uint64_t(i));
    if (name == "structured") {
      corpus.images.push_back(structured_scene(size, rng));
    } else if (name == "textures") {
      static const int periods[] = {4, 8, 16};
      corpus.images.push_back(
          render_texture(size, size, periods[rng.uniform_int(3)], rng));
    } else if (name == "noise") {
      Image img(size, size);
      for (float& v : img.px) v = quantize8(float(rng.uniform()));
      corpus.images.push_back(std::move(img));
    } else {
      fail(Err::EmptyCorpus, "unknown builtin corpus: " + name);
    }
  }
  return corpus;
}

Corpus load_corpus_dir(const std::string& dir, int size) {
  Corpus corpus;
  corpus.label = dir;
  corpus.canonical_size = size;
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) fail(Err::EmptyCorpus, "not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string ext = e.path().extension().string();
    if (ext == ".png" || ext == ".pgm") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  for (const std::string& f : files)
    corpus.images.push_back(resize_nearest(read_image(f), size, size));
  if (corpus.images.empty()) fail(Err::EmptyCorpus, "no images under " + dir);
  return corpus;
}

Corpus make_corpus(const std::string& source, int count, int size, uint64_t seed) {
  if (source.rfind("builtin:", 0) == 0)
    return builtin_corpus(source.substr(8), count, size, seed);
  return load_corpus_dir(source, size);
}

}  // namespace gmi
