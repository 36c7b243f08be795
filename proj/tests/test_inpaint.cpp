#include <cmath>

#include "doctest.h"
#include "gmi/patch_inpaint.h"
#include "gmi/rng.h"
#include "gmi/vaegan.h"

using namespace gmi;

namespace {

Image random_image(int h, int w, Rng& rng) {
  Image img(h, w);
  for (float& v : img.px) v = quantize8(float(rng.uniform()));
  return img;
}

// vertical stripes, exactly periodic in both axes
Image stripes(int size, int period, int thick) {
  Image img(size, size, 1.f);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      if (c % period < thick) img.at(r, c) = 0.f;
  return img;
}

Composite periodic_composite(int size, int period) {
  Image canvas = stripes(size, period, period / 2);
  int cs = size / 2;
  std::vector<Image> cells;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      if (r == 1 && c == 1) continue;
      cells.push_back(extract_region(canvas, {r * cs, c * cs, cs, cs}));
    }
  return compose_matrix(cells, {2, 2}, {1, 1}, 0.5f);
}

Tensor batch_tensor(const std::vector<Image>& images) {
  Tensor t(int(images.size()), 1, images[0].h, images[0].w);
  for (size_t b = 0; b < images.size(); ++b)
    for (int r = 0; r < t.h; ++r)
      for (int c = 0; c < t.w; ++c) t.at(int(b), 0, r, c) = images[b].at(r, c);
  return t;
}

}  // namespace

TEST_CASE("deterministic encode returns identical vectors") {
  ConvVaeGan model(VaeGanArch{}, 7);
  Rng rng(1);
  Image img = random_image(32, 32, rng);
  Mask mask(32, 32, true);
  LatentFeatures a = model.encode(img, mask);
  LatentFeatures b = model.encode(img, mask);
  CHECK(a.v == b.v);
  CHECK(int(a.v.size()) == model.arch.z_dim);
}

TEST_CASE("the mask channel is live") {
  ConvVaeGan model(VaeGanArch{}, 8);
  Image img(32, 32, 0.5f);  // matches the fill, so only the mask channel differs
  Mask known(32, 32, true);
  Mask holed(32, 32, true);
  holed.at(10, 10) = 0;
  LatentFeatures a = model.encode(img, known);
  LatentFeatures b = model.encode(img, holed);
  CHECK(a.v != b.v);
}

TEST_CASE("zero-weight encoder returns its bias for any input") {
  ConvVaeGan model(VaeGanArch{}, 9);
  for (Layer& l : model.encoder.layers)
    if (l.has_params()) l.weight.fill(0.f);
  Layer& head = model.encoder.layers.back();
  for (int d = 0; d < model.arch.z_dim; ++d) head.bias.v[d] = 0.01f * float(d);

  Rng rng(3);
  Mask mask(32, 32, true);
  LatentFeatures a = model.encode(random_image(32, 32, rng), mask);
  LatentFeatures b = model.encode(random_image(32, 32, rng), mask);
  CHECK(a.v == b.v);
  for (int d = 0; d < model.arch.z_dim; ++d)
    CHECK(a.v[d] == doctest::Approx(0.01f * d).epsilon(1e-6));
}

TEST_CASE("sampling mode is reproducible from its seed") {
  ConvVaeGan model(VaeGanArch{}, 10);
  model.mode = LatentMode::sampling;
  Rng rng(4);
  Image img = random_image(32, 32, rng);
  Mask mask(32, 32, true);
  model.sample_rng = Rng(42);
  LatentFeatures a = model.encode(img, mask);
  model.sample_rng = Rng(42);
  LatentFeatures b = model.encode(img, mask);
  model.sample_rng = Rng(43);
  LatentFeatures c = model.encode(img, mask);
  CHECK(a.v == b.v);
  CHECK(a.v != c.v);
}

TEST_CASE("encode rejects tiny inputs") {
  ConvVaeGan model(VaeGanArch{}, 11);
  Image img(4, 4, 0.f);
  Mask mask(4, 4, true);
  CHECK_THROWS_AS(model.encode(img, mask), Error);
  try {
    model.encode(img, mask);
  } catch (const Error& e) {
    CHECK(e.code == Err::ShapeUnsupported);
  }
}

TEST_CASE("inpaint preserves known pixels exactly for every backend") {
  Rng rng(5);
  std::vector<Image> cells;
  for (int i = 0; i < 3; ++i) cells.push_back(random_image(32, 32, rng));
  Composite comp = compose_matrix(cells, {2, 2}, {1, 1}, 0.5f);

  ConvVaeGan vae(VaeGanArch{}, 12);
  PatchInpainter patch;
  OracleInpainter oracle(random_image(32, 32, rng));
  for (const InpainterContract* backend :
       {(const InpainterContract*)&vae, (const InpainterContract*)&patch,
        (const InpainterContract*)&oracle}) {
    InpaintResult res = inpaint(*backend, comp);
    for (int r = 0; r < comp.image.h; ++r)
      for (int c = 0; c < comp.image.w; ++c)
        if (comp.mask.at(r, c)) CHECK(res.full.at(r, c) == comp.image.at(r, c));
  }
}

TEST_CASE("oracle backend reproduces its target bit-exactly") {
  Rng rng(6);
  std::vector<Image> cells;
  for (int i = 0; i < 3; ++i) cells.push_back(random_image(16, 16, rng));
  Composite comp = compose_matrix(cells, {2, 2}, {1, 1}, 0.5f);
  Image truth = random_image(16, 16, rng);
  OracleInpainter oracle(truth);
  InpaintResult res = inpaint(oracle, comp);
  CHECK(res.prediction.px == truth.px);
}

TEST_CASE("inpaint rejects an all-unknown composite") {
  Composite comp;
  comp.image = Image(16, 16, 0.5f);
  comp.mask = Mask(16, 16, false);
  comp.grid = {1, 1};
  comp.cell_size = 16;
  comp.missing = {0, 0};
  OracleInpainter oracle(Image(16, 16, 0.f));
  CHECK_THROWS_AS(inpaint(oracle, comp), Error);
}

TEST_CASE("patch_fill") {
  PatchInpainter model(8, 1);
  SUBCASE("all-known mask returns the image unchanged") {
    Rng rng(7);
    Image img = random_image(32, 32, rng);
    Mask mask(32, 32, true);
    CHECK(patch_fill(model, img, mask).px == img.px);
  }
  SUBCASE("constant image stays constant under any mask") {
    Image img(32, 32, 0.3f);
    Mask mask(32, 32, true);
    for (int r = 10; r < 20; ++r)
      for (int c = 4; c < 30; ++c) mask.at(r, c) = 0;
    Image out = patch_fill(model, img, mask);
    for (float v : out.px) CHECK(v == 0.3f);
  }
  SUBCASE("periodic stripes continue exactly") {
    Image canvas = stripes(64, 8, 4);
    Mask mask(64, 64, true);
    for (int r = 32; r < 64; ++r)
      for (int c = 32; c < 64; ++c) mask.at(r, c) = 0;
    Image broken = canvas;
    for (int r = 32; r < 64; ++r)
      for (int c = 32; c < 64; ++c) broken.at(r, c) = 0.5f;
    Image out = patch_fill(model, broken, mask);
    CHECK(out.px == canvas.px);
  }
  SUBCASE("no full known patch errors") {
    Image img(16, 16, 0.2f);
    Mask mask(16, 16, true);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c)
        if ((r + c) % 2 == 0) mask.at(r, c) = 0;  // no 8x8 window fully known
    CHECK_THROWS_AS(patch_fill(model, img, mask), Error);
    try {
      patch_fill(model, img, mask);
    } catch (const Error& e) {
      CHECK(e.code == Err::NoSourcePatch);
    }
  }
}

TEST_CASE("patch backend solves a periodic composite pixel-exactly") {
  Composite comp = periodic_composite(64, 8);
  PatchInpainter model(8, 1);
  InpaintResult res = inpaint(model, comp);
  Image truth = extract_region(stripes(64, 8, 4), {32, 32, 32, 32});
  CHECK(res.prediction.px == truth.px);
}

TEST_CASE("kl divergence closed form") {
  Tensor mu = Tensor::flat(1, 1);
  Tensor lv = Tensor::flat(1, 1);
  CHECK(kl_divergence(mu, lv) == 0.0);
  mu.v[0] = 1.f;
  CHECK(kl_divergence(mu, lv) == doctest::Approx(0.5).epsilon(1e-9));

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor m = Tensor::flat(2, 4), l = Tensor::flat(2, 4);
    for (auto& v : m.v) v = float(rng.uniform(-3, 3));
    for (auto& v : l.v) v = float(rng.uniform(-3, 3));
    CHECK(kl_divergence(m, l) >= 0.0);
  }
}

TEST_CASE("masked_l1 is zero when reconstruction equals the original") {
  Rng rng(9);
  Image img = random_image(16, 16, rng);
  Mask mask(16, 16, true);
  for (int r = 4; r < 12; ++r)
    for (int c = 4; c < 12; ++c) mask.at(r, c) = 0;
  CHECK(masked_l1(img, img, mask) == 0.0);
  Image off = img;
  for (size_t i = 0; i < off.px.size(); ++i)
    if (!mask.known[i]) off.px[i] = quantize8(off.px[i] + 0.25f);
  CHECK(masked_l1(off, img, mask) > 0.0);
}

TEST_CASE("loss record composes as weighted total") {
  ConvVaeGan model(VaeGanArch{}, 13);
  Rng rng(10);
  std::vector<Image> batch;
  std::vector<Mask> masks;
  for (int i = 0; i < 2; ++i) {
    batch.push_back(random_image(64, 64, rng));
    Mask m(64, 64, true);
    for (int r = 16; r < 48; ++r)
      for (int c = 16; c < 48; ++c) m.at(r, c) = 0;
    masks.push_back(m);
  }
  LossWeights w{2.0, 0.5, 0.25};
  VaeGanLoss loss = vae_gan_losses(model, batch, masks, w);
  CHECK(loss.kl >= 0.0);
  CHECK(loss.total() ==
        doctest::Approx(2.0 * loss.recon + 0.5 * loss.kl + 0.25 * loss.adv_g));
  CHECK_THROWS_AS(vae_gan_losses(model, {}, {}, w), Error);
}

TEST_CASE("discriminator score") {
  ConvVaeGan model(VaeGanArch{}, 14);
  SUBCASE("zero weights give 0.5 everywhere") {
    for (Layer& l : model.discriminator.layers)
      if (l.has_params()) {
        l.weight.fill(0.f);
        l.bias.fill(0.f);
      }
    Rng rng(11);
    CHECK(discriminator_score(model, random_image(64, 64, rng)) ==
          doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("same image scores identically") {
    Rng rng(12);
    Image img = random_image(64, 64, rng);
    CHECK(discriminator_score(model, img) == discriminator_score(model, img));
    double s = discriminator_score(model, img);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
  }
}

TEST_CASE("discriminator alone separates structure from noise in 200 steps") {
  ConvVaeGan model(VaeGanArch{}, 15);
  Rng rng(13);
  const int B = 8;
  auto real_image = [&](Rng& r) { return stripes(64, 4 + 4 * r.uniform_int(2), 2); };
  auto noise_image = [&](Rng& r) { return random_image(64, 64, r); };

  Adam opt(1e-3);
  for (int step = 0; step < 200; ++step) {
    std::vector<Image> reals, noises;
    for (int b = 0; b < B; ++b) {
      reals.push_back(real_image(rng));
      noises.push_back(noise_image(rng));
    }
    model.discriminator.zero_grads();
    Tensor sr = model.discriminator.forward(batch_tensor(reals));
    Tensor gr = Tensor::flat(B, 1);
    for (int b = 0; b < B; ++b) {
      double s = std::clamp(double(sr.v[b]), 1e-7, 1 - 1e-7);
      gr.v[b] = float(-1.0 / (s * B));
    }
    model.discriminator.backward(gr);
    Tensor sf = model.discriminator.forward(batch_tensor(noises));
    Tensor gf = Tensor::flat(B, 1);
    for (int b = 0; b < B; ++b) {
      double s = std::clamp(double(sf.v[b]), 1e-7, 1 - 1e-7);
      gf.v[b] = float(1.0 / ((1.0 - s) * B));
    }
    model.discriminator.backward(gf);
    opt.step(model.discriminator.params(), model.discriminator.grads());
  }

  double mean_real = 0, mean_noise = 0;
  for (int i = 0; i < 16; ++i) {
    mean_real += discriminator_score(model, real_image(rng)) / 16;
    mean_noise += discriminator_score(model, noise_image(rng)) / 16;
  }
  CHECK(mean_real > mean_noise);
}
