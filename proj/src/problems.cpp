#include "gmi/problems.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gmi/image_io.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gmi {

const char* rule_name(RuleKind r) {
  switch (r) {
    case RuleKind::constant: return "constant";
    case RuleKind::reflect_rows: return "reflect_rows";
    case RuleKind::reflect_cols: return "reflect_cols";
    case RuleKind::rotate90: return "rotate90";
    case RuleKind::texture_continuation: return "texture_continuation";
  }
  return "?";
}

std::optional<RuleKind> rule_from_name(const std::string& name) {
  for (RuleKind r : {RuleKind::constant, RuleKind::reflect_rows, RuleKind::reflect_cols,
                     RuleKind::rotate90, RuleKind::texture_continuation})
    if (name == rule_name(r)) return r;
  return std::nullopt;
}

namespace {

struct Vec2 {
  double x = 0, y = 0;
};

double seg_dist(Vec2 p, Vec2 a, Vec2 b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0;
  t = std::clamp(t, 0.0, 1.0);
  double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

double box_boundary_dist(Vec2 p, Vec2 center, double hx, double hy) {
  double qx = std::abs(p.x - center.x) - hx;
  double qy = std::abs(p.y - center.y) - hy;
  double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  double inside = std::min(std::max(qx, qy), 0.0);
  return std::abs(outside + inside);
}

// Distance from p to the drawn curve of one primitive.
struct Primitive {
  ShapeKind kind;
  Vec2 c;
  double size = 0;       // radius / half-extent
  double aspect = 1.0;   // squares and bars
  int bar_count = 2;
  bool bars_vertical = false;
  Vec2 tri[3];

  double dist(Vec2 p) const {
    switch (kind) {
      case ShapeKind::circle:
        return std::abs(std::hypot(p.x - c.x, p.y - c.y) - size);
      case ShapeKind::square:
        return box_boundary_dist(p, c, size, size * aspect);
      case ShapeKind::triangle: {
        double d = seg_dist(p, tri[0], tri[1]);
        d = std::min(d, seg_dist(p, tri[1], tri[2]));
        return std::min(d, seg_dist(p, tri[2], tri[0]));
      }
      case ShapeKind::bars: {
        double best = 1e9;
        for (int i = 0; i < bar_count; ++i) {
          double off = (i - (bar_count - 1) / 2.0) * size * 2.0 / std::max(1, bar_count);
          Vec2 a, b;
          if (bars_vertical) {
            a = {c.x + off, c.y - size * aspect};
            b = {c.x + off, c.y + size * aspect};
          } else {
            a = {c.x - size * aspect, c.y + off};
            b = {c.x + size * aspect, c.y + off};
          }
          best = std::min(best, seg_dist(p, a, b));
        }
        return best;
      }
      case ShapeKind::composite:
        return 1e9;  // expanded before rendering
    }
    return 1e9;
  }
};

Primitive random_primitive(ShapeKind kind, int cs, const GeneratorConfig& cfg, Rng& rng) {
  Primitive pr;
  pr.kind = kind;
  double cx = cs * 0.5 + rng.uniform(-0.08, 0.08) * cs;
  double cy = cs * 0.5 + rng.uniform(-0.08, 0.08) * cs;
  pr.c = {cx, cy};
  pr.size = rng.uniform(0.26, 0.40) * cs;
  switch (kind) {
    case ShapeKind::square:
      pr.aspect = rng.uniform(0.6, 1.0);
      break;
    case ShapeKind::triangle: {
      // three vertices on a jittered ring; irregular by construction
      for (int i = 0; i < 3; ++i) {
        double ang = (i + rng.uniform(-0.22, 0.22)) * 2.0 * M_PI / 3.0 +
                     rng.uniform(0, 2.0 * M_PI / 3.0);
        double rad = pr.size * rng.uniform(0.75, 1.1);
        pr.tri[i] = {cx + rad * std::cos(ang), cy + rad * std::sin(ang)};
      }
      break;
    }
    case ShapeKind::bars:
      pr.bar_count = 2 + rng.uniform_int(2);
      pr.bars_vertical = rng.uniform_int(2) == 1;
      pr.aspect = rng.uniform(0.7, 1.0);
      break;
    default:
      break;
  }
  (void)cfg;
  return pr;
}

void stamp(Image& canvas, const Primitive& pr, double half_stroke) {
  for (int r = 0; r < canvas.h; ++r)
    for (int c = 0; c < canvas.w; ++c) {
      double d = pr.dist({c + 0.5, r + 0.5});
      // dark stroke with a 1-pixel ramp to white
      double v = std::clamp(d - half_stroke + 0.5, 0.0, 1.0);
      canvas.at(r, c) = std::min(canvas.at(r, c), float(v));
    }
}

Image roll(const Image& img, int dy, int dx) {
  Image out(img.h, img.w);
  for (int r = 0; r < img.h; ++r)
    for (int c = 0; c < img.w; ++c)
      out.at(r, c) = img.at(((r - dy) % img.h + img.h) % img.h,
                            ((c - dx) % img.w + img.w) % img.w);
  return out;
}

Image scale_in_cell(const Image& img, double factor) {
  int nh = std::max(1, int(std::lround(img.h * factor)));
  int nw = std::max(1, int(std::lround(img.w * factor)));
  Image scaled = resize_nearest(img, nh, nw);
  Image out(img.h, img.w, 1.f);
  int offr = (img.h - nh) / 2, offc = (img.w - nw) / 2;
  for (int r = 0; r < nh; ++r) {
    int tr = r + offr;
    if (tr < 0 || tr >= img.h) continue;
    for (int c = 0; c < nw; ++c) {
      int tc = c + offc;
      if (tc < 0 || tc >= img.w) continue;
      out.at(tr, tc) = scaled.at(r, c);
    }
  }
  return out;
}

// >= 1% of pixels differing by >= 0.1 intensity
bool distinct_enough(const Image& a, const Image& b) {
  size_t need = std::max<size_t>(1, a.px.size() / 100);
  size_t count = 0;
  for (size_t i = 0; i < a.px.size(); ++i)
    if (std::abs(a.px[i] - b.px[i]) >= 0.1f && ++count >= need) return true;
  return false;
}

// The solver squeezes out white margins before comparing, which would fold a
// purely rescaled foil back onto the truth; candidates must stay distinct in
// that domain too.
Image squeeze(const Image& img) {
  Image content = img;
  try {
    content = crop_whitespace(img, 0.95f);
  } catch (const Error&) {
  }
  return resize_nearest(content, img.h, img.w);
}

bool separable(const Image& a, const Image& b) {
  return distinct_enough(a, b) && distinct_enough(squeeze(a), squeeze(b));
}

RuleKind sample_rule(const GeneratorConfig& cfg, Rng& rng) {
  double total = 0;
  for (auto& [r, w] : cfg.rule_weights) total += std::max(0.0, w);
  if (total <= 0) fail(Err::BadManifest, "rule weights must have positive sum");
  double pick = rng.uniform() * total;
  for (auto& [r, w] : cfg.rule_weights) {
    pick -= std::max(0.0, w);
    if (pick <= 0) return r;
  }
  return cfg.rule_weights.back().first;
}

}  // namespace

Image render_glyph_cell(const GeneratorConfig& cfg, Rng& rng) {
  Image canvas(cfg.cell_size, cfg.cell_size, 1.f);
  ShapeKind kind = cfg.shapes[rng.uniform_int(int(cfg.shapes.size()))];
  double half_stroke = cfg.stroke_width * 0.5;
  if (kind == ShapeKind::composite) {
    int parts = 2;
    for (int i = 0; i < parts; ++i) {
      ShapeKind sub = cfg.shapes[rng.uniform_int(int(cfg.shapes.size()))];
      if (sub == ShapeKind::composite) sub = ShapeKind::circle;
      Primitive pr = random_primitive(sub, cfg.cell_size, cfg, rng);
      if (i > 0) pr.size *= 0.55;
      stamp(canvas, pr, half_stroke);
    }
  } else {
    stamp(canvas, random_primitive(kind, cfg.cell_size, cfg, rng), half_stroke);
  }
  return quantize8(canvas);
}

Image render_texture(int h, int w, int period, Rng& rng) {
  enum { kStripesH, kStripesV, kStripesD, kChecker, kDots } type;
  type = decltype(type)(rng.uniform_int(5));
  int thick = 1 + rng.uniform_int(std::max(1, period / 2));
  double dark = rng.uniform(0.0, 0.25);
  Image out(h, w, 1.f);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      bool on = false;
      switch (type) {
        case kStripesH: on = r % period < thick; break;
        case kStripesV: on = c % period < thick; break;
        case kStripesD: on = (r + c) % period < thick; break;
        case kChecker: {
          int half = std::max(1, period / 2);
          on = ((r / half) + (c / half)) % 2 == 0;
          break;
        }
        case kDots: {
          // lattice-anchored discs so every cell edge carries dark pixels
          int dr = std::min(r % period, period - r % period);
          int dc = std::min(c % period, period - c % period);
          on = dr * dr + dc * dc <= (period * 0.35) * (period * 0.35);
          break;
        }
      }
      if (on) out.at(r, c) = float(dark);
    }
  return quantize8(out);
}

std::vector<Image> make_distractors(const Image& truth, const GeneratorConfig& cfg,
                                    Rng& rng) {
  auto [mn, mx] = std::minmax_element(truth.px.begin(), truth.px.end());
  if (truth.px.empty() || *mx - *mn < 0.1f)
    fail(Err::CannotSeparate, "truth image has no content to perturb");

  const int want = cfg.num_choices - 1;
  std::vector<Image> out;
  auto ok = [&](const Image& cand) {
    if (!separable(cand, truth)) return false;
    for (const Image& d : out)
      if (!separable(cand, d)) return false;
    return true;
  };
  auto push = [&](Image cand) {
    if (int(out.size()) < want && ok(cand)) out.push_back(std::move(cand));
  };

  // wrong transform, wrong scale, shifted, blank, then fresh glyphs as needed
  push(hflip(truth));
  push(vflip(truth));
  if (truth.h == truth.w) push(rot90(truth));
  push(quantize8(scale_in_cell(truth, 0.7)));
  push(quantize8(scale_in_cell(truth, 1.35)));
  push(roll(truth, truth.h / 4, truth.w / 4));
  if (cfg.blank_distractor) push(Image(truth.h, truth.w, 1.f));
  int guard = 0;
  GeneratorConfig gcfg = cfg;
  gcfg.cell_size = truth.h;
  while (int(out.size()) < want) {
    if (++guard > 200) fail(Err::CannotSeparate, "could not build distinct distractors");
    push(render_glyph_cell(gcfg, rng));
  }
  return out;
}

ProblemInstance generate_problem(const GeneratorConfig& cfg, Rng& rng) {
  const int n = cfg.grid;
  const int cs = cfg.cell_size;
  ProblemInstance p;
  p.grid = {n, n};
  p.missing = {n - 1, n - 1};
  p.num_choices = cfg.num_choices;

  for (int attempt = 0; attempt < 50; ++attempt) {
    Rng sub = rng.split(attempt + 1);
    RuleKind rule = sample_rule(cfg, sub);
    p.set_label = rule_name(rule);

    std::vector<Image> full(size_t(n) * n);
    if (rule == RuleKind::texture_continuation) {
      int period = cfg.texture_periods[sub.uniform_int(int(cfg.texture_periods.size()))];
      Image canvas = render_texture(n * cs, n * cs, period, sub);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          full[size_t(r) * n + c] = extract_region(canvas, {r * cs, c * cs, cs, cs});
    } else {
      std::vector<Image> bases(n);
      for (int i = 0; i < n; ++i) bases[i] = render_glyph_cell(cfg, sub);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const Image& base = rule == RuleKind::reflect_cols ? bases[c] : bases[r];
          Image cell = base;
          switch (rule) {
            case RuleKind::constant: cell = bases[0]; break;
            case RuleKind::reflect_rows:
              if (c % 2 == 1) cell = hflip(base);
              break;
            case RuleKind::reflect_cols:
              if (r % 2 == 1) cell = vflip(base);
              break;
            case RuleKind::rotate90:
              for (int k = 0; k < c; ++k) cell = rot90(cell);
              break;
            default: break;
          }
          full[size_t(r) * n + c] = std::move(cell);
        }
    }

    Image truth = full[size_t(n) * n - 1];
    std::vector<Image> distractors;
    try {
      Rng drng = sub.split(7);
      distractors = make_distractors(truth, cfg, drng);
    } catch (const Error& e) {
      if (e.code == Err::CannotSeparate) continue;  // degenerate render; retry
      throw;
    }

    p.cells.clear();
    for (int i = 0; i < n * n - 1; ++i) p.cells.push_back(full[i]);
    p.choices.clear();
    p.choices.push_back(truth);
    for (Image& d : distractors) p.choices.push_back(std::move(d));
    // Fisher-Yates; track where the truth lands
    int truth_pos = 0;
    Rng srng = sub.split(13);
    for (int i = int(p.choices.size()) - 1; i > 0; --i) {
      int j = srng.uniform_int(i + 1);
      std::swap(p.choices[i], p.choices[j]);
      if (truth_pos == i)
        truth_pos = j;
      else if (truth_pos == j)
        truth_pos = i;
    }
    p.truth = truth_pos;
    return p;
  }
  fail(Err::CannotSeparate, "could not generate a separable problem");
}

std::vector<ProblemInstance> generate_problems(const GeneratorConfig& cfg, int count) {
  Rng master(cfg.seed);
  std::vector<ProblemInstance> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng sub = master.split(uint64_t(i));
    ProblemInstance p = generate_problem(cfg, sub);
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%04d", i);
    p.id = buf;
    out.push_back(std::move(p));
  }
  return out;
}

const Image& cell_at(const ProblemInstance& p, int row, int col) {
  if (row < 0 || row >= p.grid.rows || col < 0 || col >= p.grid.cols)
    fail(Err::IndexOutOfRange, "cell position outside grid");
  if (row == p.missing.row && col == p.missing.col)
    fail(Err::IndexOutOfRange, "cell position is the missing cell");
  int idx = row * p.grid.cols + col;
  int skip = p.missing.row * p.grid.cols + p.missing.col;
  if (idx > skip) --idx;
  return p.cells[idx];
}

void save_problem_set(const std::vector<ProblemInstance>& problems,
                      const std::string& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = 1;
  json list = json::array();
  for (const ProblemInstance& p : problems) {
    json e;
    e["id"] = p.id;
    e["set"] = p.set_label;
    e["grid"] = {p.grid.rows, p.grid.cols};
    e["missing"] = {p.missing.row, p.missing.col};
    e["num_choices"] = p.num_choices;
    if (p.truth) e["truth"] = *p.truth;
    json cells = json::array(), choices = json::array();
    for (size_t i = 0; i < p.cells.size(); ++i) {
      std::string name = p.id + "_cell" + std::to_string(i) + ".png";
      write_png(p.cells[i], (fs::path(dir) / name).string());
      cells.push_back(name);
    }
    for (size_t i = 0; i < p.choices.size(); ++i) {
      std::string name = p.id + "_choice" + std::to_string(i) + ".png";
      write_png(p.choices[i], (fs::path(dir) / name).string());
      choices.push_back(name);
    }
    e["cells"] = cells;
    e["choices"] = choices;
    list.push_back(e);
  }
  manifest["problems"] = list;
  std::ofstream f(fs::path(dir) / "manifest.json");
  if (!f) fail(Err::IoError, "cannot write manifest in " + dir);
  f << manifest.dump(2) << "\n";
}

std::vector<ProblemInstance> load_problem_set(const std::string& dir) {
  std::ifstream f(fs::path(dir) / "manifest.json");
  if (!f) fail(Err::BadManifest, "no manifest.json in " + dir);
  json manifest;
  try {
    f >> manifest;
  } catch (const json::exception& e) {
    fail(Err::BadManifest, std::string("manifest parse error: ") + e.what());
  }

  auto load_image = [&](const std::string& name) {
    fs::path path = fs::path(dir) / name;
    if (!fs::exists(path)) fail(Err::MissingImageFile, path.string());
    return read_image(path.string());
  };

  std::vector<ProblemInstance> out;
  try {
    for (const json& e : manifest.at("problems")) {
      ProblemInstance p;
      p.id = e.at("id").get<std::string>();
      p.set_label = e.at("set").get<std::string>();
      p.grid = {e.at("grid").at(0).get<int>(), e.at("grid").at(1).get<int>()};
      if (p.grid.rows < 2 || p.grid.cols < 2)
        fail(Err::BadManifest, p.id + ": grid must be at least 2x2");
      p.missing = {p.grid.rows - 1, p.grid.cols - 1};
      if (e.contains("missing"))
        p.missing = {e.at("missing").at(0).get<int>(), e.at("missing").at(1).get<int>()};
      p.num_choices = e.at("num_choices").get<int>();
      for (const json& name : e.at("cells"))
        p.cells.push_back(load_image(name.get<std::string>()));
      for (const json& name : e.at("choices"))
        p.choices.push_back(load_image(name.get<std::string>()));
      if (int(p.choices.size()) != p.num_choices)
        fail(Err::InconsistentChoiceCount,
             p.id + ": manifest lists " + std::to_string(p.choices.size()) +
                 " choices for num_choices=" + std::to_string(p.num_choices));
      if (p.cells.size() != size_t(p.grid.rows) * p.grid.cols - 1)
        fail(Err::BadManifest, p.id + ": wrong cell count");
      for (const Image& c : p.cells)
        if (!c.same_dims(p.cells[0])) fail(Err::BadManifest, p.id + ": uneven cells");
      if (e.contains("truth")) {
        int t = e.at("truth").get<int>();
        if (t < 0 || t >= p.num_choices)
          fail(Err::BadManifest, p.id + ": truth index out of range");
        p.truth = t;
      }
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    fail(Err::BadManifest, std::string("manifest field error: ") + e.what());
  }
  return out;
}

}  // namespace gmi
