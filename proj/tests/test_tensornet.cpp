#include <cmath>

#include "doctest.h"
#include "gmi/grad_check.h"
#include "gmi/kernels.h"
#include "gmi/network.h"
#include "gmi/optimizer.h"
#include "gmi/reference_kernels.h"
#include "gmi/rng.h"

using namespace gmi;

namespace {

template <class T>
TensorT<T> random_tensor(int n, int c, int h, int w, Rng& rng, double lo = -1,
                         double hi = 1) {
  TensorT<T> t(n, c, h, w);
  for (T& v : t.v) v = T(rng.uniform(lo, hi));
  return t;
}

template <class T>
double max_rel_diff(const TensorT<T>& a, const TensorT<T>& b) {
  REQUIRE(a.same_shape(b));
  double worst = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double x = a.v[i], y = b.v[i];
    double denom = std::max({std::abs(x), std::abs(y), 1e-9});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

DNetwork small_net_for(LayerKind kind, Rng& rng) {
  DNetwork net;
  switch (kind) {
    case LayerKind::conv:
      net.layers.push_back(LayerT<double>::conv2d(2, 3, 3, 2, 1));
      break;
    case LayerKind::tconv:
      net.layers.push_back(LayerT<double>::tconv2d(2, 3, 4, 2, 1));
      break;
    case LayerKind::dense:
      net.layers.push_back(LayerT<double>::dense(2 * 6 * 6, 5));
      break;
    case LayerKind::avgpool:
      net.layers.push_back(LayerT<double>::conv2d(2, 2, 3, 1, 1));
      net.layers.push_back(LayerT<double>::avgpool(2, 2));
      break;
    case LayerKind::upsample:
      net.layers.push_back(LayerT<double>::conv2d(2, 2, 3, 1, 1));
      net.layers.push_back(LayerT<double>::upsample(2));
      break;
    default:
      // activations sandwiched between parameterized layers
      net.layers.push_back(LayerT<double>::conv2d(2, 3, 3, 1, 1));
      net.layers.push_back(LayerT<double>::activation(kind, 0.2));
      net.layers.push_back(LayerT<double>::dense(3 * 6 * 6, 4));
      break;
  }
  net.init(rng);
  return net;
}

const LayerKind kAllKinds[] = {LayerKind::conv,      LayerKind::tconv,
                               LayerKind::dense,     LayerKind::relu,
                               LayerKind::leaky_relu, LayerKind::sigmoid,
                               LayerKind::tanh,      LayerKind::avgpool,
                               LayerKind::upsample};

}  // namespace

TEST_CASE("identity dense layer passes input through") {
  Network net;
  net.layers.push_back(Layer::dense(4, 4));
  for (int i = 0; i < 4; ++i) net.layers[0].weight.v[i * 4 + i] = 1.f;
  Rng rng(1);
  Tensor in = random_tensor<float>(2, 4, 1, 1, rng);
  Tensor out = net.forward(in);
  CHECK(out.v == in.v);

  Tensor ones(2, 4, 1, 1);
  ones.fill(1.f);
  Tensor gin = net.backward(ones);
  for (float v : gin.v) CHECK(v == 1.f);
}

TEST_CASE("zero-weight conv emits only its bias") {
  Network net;
  net.layers.push_back(Layer::conv2d(1, 2, 3, 1, 1));
  net.layers[0].bias.v[0] = 0.25f;
  net.layers[0].bias.v[1] = -0.5f;
  Rng rng(2);
  Tensor in = random_tensor<float>(1, 1, 5, 5, rng);
  Tensor out = net.forward(in);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      CHECK(out.at(0, 0, r, c) == 0.25f);
      CHECK(out.at(0, 1, r, c) == -0.5f);
    }
}

TEST_CASE("forward of a random 2-layer net matches the serial reference") {
  // 64-bit tensors so the comparison tolerance reflects ordering alone
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    DNetwork net;
    net.layers.push_back(LayerT<double>::conv2d(2, 4, 3, 2, 1));
    net.layers.push_back(LayerT<double>::tconv2d(4, 2, 4, 2, 1));
    net.init(rng);
    DTensor in = random_tensor<double>(2, 2, 8, 8, rng);

    DTensor got = net.infer(in);
    DTensor mid =
        ref::conv2d_forward(in, net.layers[0].weight, net.layers[0].bias, 2, 1);
    DTensor expect =
        ref::tconv2d_forward(mid, net.layers[1].weight, net.layers[1].bias, 2, 1);
    CHECK(max_rel_diff(got, expect) < 1e-6);
  }
}

TEST_CASE("dense and avgpool kernels match the serial reference") {
  Rng rng(55);
  DTensor x = random_tensor<double>(3, 7, 4, 4, rng);
  DTensor w = random_tensor<double>(5, 7 * 16, 1, 1, rng);
  w.n = 5;
  w.c = 7 * 16;
  DTensor b = random_tensor<double>(1, 5, 1, 1, rng);
  DTensor y;
  dense_forward(x, w, b, y);
  CHECK(max_rel_diff(y, ref::dense_forward(x, w, b)) < 1e-6);

  DTensor p;
  avgpool_forward(x, 2, 2, p);
  CHECK(max_rel_diff(p, ref::avgpool_forward(x, 2, 2)) < 1e-6);
  DTensor g;
  avgpool_forward(x, 0, 1, g);
  CHECK(max_rel_diff(g, ref::avgpool_forward(x, 0, 1)) < 1e-6);
}

TEST_CASE("every layer kind passes a finite-difference gradient check") {
  for (LayerKind kind : kAllKinds) {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed * 31 + uint64_t(kind));
      DNetwork net = small_net_for(kind, rng);
      DTensor in = random_tensor<double>(2, 2, 6, 6, rng);
      double err = grad_check(net, in, 1e-4);
      INFO("kind ", layer_kind_name(kind), " seed ", seed, " err ", err);
      CHECK(err < 1e-3);
    }
  }
}

TEST_CASE("conv backward matches finite differences on a 1x1x6x6 input") {
  Rng rng(77);
  DNetwork net;
  net.layers.push_back(LayerT<double>::conv2d(1, 2, 3, 1, 1));
  net.init(rng);
  DTensor in = random_tensor<double>(1, 1, 6, 6, rng);
  CHECK(grad_check(net, in, 1e-4) < 1e-3);
}

TEST_CASE("tconv backward matches finite differences") {
  Rng rng(78);
  DNetwork net;
  net.layers.push_back(LayerT<double>::tconv2d(1, 2, 4, 2, 1));
  net.init(rng);
  DTensor in = random_tensor<double>(1, 1, 6, 6, rng);
  CHECK(grad_check(net, in, 1e-4) < 1e-3);
}

TEST_CASE("conv input-gradient is the adjoint of conv") {
  Rng rng(79);
  for (int trial = 0; trial < 5; ++trial) {
    DTensor x = random_tensor<double>(1, 2, 6, 6, rng);
    DTensor w = random_tensor<double>(3, 2, 3, 3, rng);
    DTensor b = DTensor::flat(1, 3);
    DTensor y;
    conv2d_forward(x, w, b, 2, 1, y);
    DTensor u = random_tensor<double>(y.n, y.c, y.h, y.w, rng);
    // <conv(x), u> == <x, conv_input_grad(u)>
    double lhs = 0;
    for (size_t i = 0; i < y.size(); ++i) lhs += y.v[i] * u.v[i];
    DTensor gx, gw(w.n, w.c, w.h, w.w), gb = DTensor::flat(1, 3);
    conv2d_backward(x, w, u, 2, 1, gx, gw, gb);
    double rhs = 0;
    for (size_t i = 0; i < x.size(); ++i) rhs += x.v[i] * gx.v[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("forward is deterministic") {
  Rng rng(91);
  Network net;
  net.layers.push_back(Layer::conv2d(1, 4, 3, 2, 1));
  net.layers.push_back(Layer::activation(LayerKind::relu));
  net.layers.push_back(Layer::dense(4 * 4 * 4, 8));
  net.init(rng);
  Tensor in = random_tensor<float>(3, 1, 8, 8, rng);
  Tensor a = net.infer(in);
  Tensor b = net.infer(in);
  CHECK(a.v == b.v);
}

TEST_CASE("activations stay finite on wide inputs") {
  Rng rng(92);
  for (LayerKind kind : kAllKinds) {
    DNetwork net = small_net_for(kind, rng);
    DTensor in = random_tensor<double>(2, 2, 6, 6, rng, -10, 10);
    DTensor out = net.forward(in);
    CHECK(out.all_finite());
  }
}

TEST_CASE("backward without forward is rejected") {
  Network net;
  net.layers.push_back(Layer::dense(4, 4));
  Tensor g(1, 4, 1, 1);
  CHECK_THROWS_AS(net.backward(g), Error);
  try {
    net.backward(g);
  } catch (const Error& e) {
    CHECK(e.code == Err::NoCachedForward);
  }
}

TEST_CASE("non-finite input is rejected") {
  Network net;
  net.layers.push_back(Layer::dense(2, 2));
  Tensor in(1, 2, 1, 1);
  in.v[0] = std::nanf("");
  CHECK_THROWS_AS(net.forward(in), Error);
}

TEST_CASE("adam") {
  SUBCASE("zero gradients leave parameters identical") {
    Tensor p = Tensor::flat(1, 3);
    p.v = {1.f, -2.f, 0.5f};
    Tensor g = Tensor::flat(1, 3);
    Adam opt(0.1);
    std::vector<float> before = p.v;
    for (int i = 0; i < 5; ++i) opt.step({&p}, {&g});
    CHECK(p.v == before);
    CHECK(opt.step_count == 5);
  }
  SUBCASE("one step with positive gradient decreases the parameter") {
    Tensor p = Tensor::flat(1, 1);
    p.v[0] = 1.f;
    Tensor g = Tensor::flat(1, 1);
    g.v[0] = 1.f;
    Adam opt(0.1);
    opt.step({&p}, {&g});
    CHECK(p.v[0] < 1.f);
  }
  SUBCASE("100 steps minimize (p-3)^2") {
    Tensor p = Tensor::flat(1, 1);
    Tensor g = Tensor::flat(1, 1);
    Adam opt(0.1);
    for (int i = 0; i < 100; ++i) {
      g.v[0] = 2.f * (p.v[0] - 3.f);
      opt.step({&p}, {&g});
    }
    CHECK(std::abs(p.v[0] - 3.f) < 0.1f);
  }
}

TEST_CASE("grad_check harness") {
  SUBCASE("identity dense layer is exact") {
    DNetwork net;
    net.layers.push_back(LayerT<double>::dense(3, 3));
    for (int i = 0; i < 3; ++i) net.layers[0].weight.v[i * 3 + i] = 1.0;
    DTensor in = DTensor::flat(1, 3);
    in.v = {0.3, -0.7, 1.1};
    CHECK(grad_check(net, in, 1e-4) < 1e-8);
  }
  SUBCASE("random 3-layer conv/relu/dense net passes") {
    Rng rng(123);
    DNetwork net;
    net.layers.push_back(LayerT<double>::conv2d(1, 3, 3, 2, 1));
    net.layers.push_back(LayerT<double>::activation(LayerKind::relu));
    net.layers.push_back(LayerT<double>::dense(3 * 3 * 3, 4));
    net.init(rng);
    DTensor in = random_tensor<double>(1, 1, 6, 6, rng);
    CHECK(grad_check(net, in, 1e-4) < 1e-3);
  }
  SUBCASE("a corrupted backward rule is detected") {
    Rng rng(124);
    DNetwork net;
    net.layers.push_back(LayerT<double>::conv2d(1, 2, 3, 1, 1));
    net.init(rng);
    DTensor in = random_tensor<double>(1, 1, 6, 6, rng);
    net.zero_grads();
    DTensor out = net.forward(in);
    DTensor ones(out.n, out.c, out.h, out.w);
    ones.fill(1.0);
    net.backward(ones);
    std::vector<DTensor> analytic;
    for (DTensor* g : net.grads()) analytic.push_back(*g);
    analytic[0].v[0] = analytic[0].v[0] * 1.5 + 1.0;  // a wrong gradient rule
    CHECK(grad_check_against(net, in, 1e-4, analytic) > 1e-1);
  }
  SUBCASE("too many parameters are rejected") {
    DNetwork net;
    net.layers.push_back(LayerT<double>::dense(200, 60));
    DTensor in = DTensor::flat(1, 200);
    CHECK_THROWS_AS(grad_check(net, in, 1e-4), Error);
    try {
      grad_check(net, in, 1e-4);
    } catch (const Error& e) {
      CHECK(e.code == Err::TooManyParameters);
    }
  }
}
