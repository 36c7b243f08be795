#include "gmi/layers.h"

#include <cmath>

#include "gmi/kernels.h"

namespace gmi {

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv: return "conv";
    case LayerKind::tconv: return "tconv";
    case LayerKind::dense: return "dense";
    case LayerKind::relu: return "relu";
    case LayerKind::leaky_relu: return "leaky_relu";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::tanh: return "tanh";
    case LayerKind::avgpool: return "avgpool";
    case LayerKind::upsample: return "upsample";
  }
  return "?";
}

template <class T>
LayerT<T> LayerT<T>::conv2d(int in_ch, int out_ch, int kernel, int stride, int pad) {
  LayerT l;
  l.kind = LayerKind::conv;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.kernel = kernel;
  l.stride = stride;
  l.pad = pad;
  l.weight = TensorT<T>(out_ch, in_ch, kernel, kernel);
  l.bias = TensorT<T>::flat(1, out_ch);
  l.grad_w = l.weight;
  l.grad_b = l.bias;
  return l;
}

template <class T>
LayerT<T> LayerT<T>::tconv2d(int in_ch, int out_ch, int kernel, int stride, int pad) {
  LayerT l;
  l.kind = LayerKind::tconv;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.kernel = kernel;
  l.stride = stride;
  l.pad = pad;
  l.weight = TensorT<T>(in_ch, out_ch, kernel, kernel);
  l.bias = TensorT<T>::flat(1, out_ch);
  l.grad_w = l.weight;
  l.grad_b = l.bias;
  return l;
}

template <class T>
LayerT<T> LayerT<T>::dense(int in_dim, int out_dim) {
  LayerT l;
  l.kind = LayerKind::dense;
  l.in_ch = in_dim;
  l.out_ch = out_dim;
  l.weight = TensorT<T>::flat(out_dim, in_dim);
  l.bias = TensorT<T>::flat(1, out_dim);
  l.grad_w = l.weight;
  l.grad_b = l.bias;
  return l;
}

template <class T>
LayerT<T> LayerT<T>::dense_to(int in_dim, int out_c, int out_h, int out_w) {
  LayerT l = dense(in_dim, out_c * out_h * out_w);
  l.out_c = out_c;
  l.out_h = out_h;
  l.out_w = out_w;
  return l;
}

template <class T>
LayerT<T> LayerT<T>::activation(LayerKind kind, T slope) {
  LayerT l;
  l.kind = kind;
  l.slope = slope;
  return l;
}

template <class T>
LayerT<T> LayerT<T>::avgpool(int kernel, int stride) {
  LayerT l;
  l.kind = LayerKind::avgpool;
  l.kernel = kernel;
  l.stride = stride;
  return l;
}

template <class T>
LayerT<T> LayerT<T>::upsample(int factor) {
  LayerT l;
  l.kind = LayerKind::upsample;
  l.factor = factor;
  return l;
}

namespace {

template <class T, class F>
TensorT<T> elementwise(const TensorT<T>& x, F f) {
  TensorT<T> y(x.n, x.c, x.h, x.w);
  const int64_t total = int64_t(x.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < total; ++i) y.v[i] = f(x.v[i]);
  return y;
}

}  // namespace

template <class T>
TensorT<T> LayerT<T>::apply(const TensorT<T>& x) const {
  switch (kind) {
    case LayerKind::conv: {
      if (x.c != in_ch)
        fail(Err::ShapeMismatch, std::string("conv expects ") + std::to_string(in_ch) +
                                     " channels, got " + x.shape_str());
      if (x.h + 2 * pad < kernel || x.w + 2 * pad < kernel)
        fail(Err::ShapeMismatch, "conv input smaller than kernel: " + x.shape_str());
      TensorT<T> y;
      conv2d_forward(x, weight, bias, stride, pad, y);
      return y;
    }
    case LayerKind::tconv: {
      if (x.c != in_ch)
        fail(Err::ShapeMismatch, std::string("tconv expects ") + std::to_string(in_ch) +
                                     " channels, got " + x.shape_str());
      TensorT<T> y;
      tconv2d_forward(x, weight, bias, stride, pad, y);
      return y;
    }
    case LayerKind::dense: {
      if (x.dim() != in_ch)
        fail(Err::ShapeMismatch, std::string("dense expects dim ") +
                                     std::to_string(in_ch) + ", got " + x.shape_str());
      TensorT<T> y;
      dense_forward(x, weight, bias, y);
      if (out_c > 0) {
        y.c = out_c;
        y.h = out_h;
        y.w = out_w;
      }
      return y;
    }
    case LayerKind::relu:
      return elementwise(x, [](T v) { return v > T(0) ? v : T(0); });
    case LayerKind::leaky_relu: {
      const T a = slope;
      return elementwise(x, [a](T v) { return v > T(0) ? v : a * v; });
    }
    case LayerKind::sigmoid:
      return elementwise(x, [](T v) { return T(1) / (T(1) + std::exp(double(-v))); });
    case LayerKind::tanh:
      return elementwise(x, [](T v) { return T(std::tanh(double(v))); });
    case LayerKind::avgpool: {
      if (kernel != 0 && (x.h < kernel || x.w < kernel))
        fail(Err::ShapeMismatch, "avgpool window larger than input");
      TensorT<T> y;
      avgpool_forward(x, kernel, stride, y);
      return y;
    }
    case LayerKind::upsample: {
      TensorT<T> y;
      upsample_forward(x, factor, y);
      return y;
    }
  }
  fail(Err::ShapeMismatch, "unknown layer kind");
}

template <class T>
TensorT<T> LayerT<T>::forward(const TensorT<T>& x) {
  TensorT<T> y = apply(x);
  in_cache = x;
  out_cache = y;
  cached = true;
  return y;
}

template <class T>
TensorT<T> LayerT<T>::backward(const TensorT<T>& gy) {
  if (!cached) fail(Err::NoCachedForward, "backward before forward");
  if (!gy.same_shape(out_cache))
    fail(Err::ShapeMismatch,
         "gradient shape " + gy.shape_str() + " != output " + out_cache.shape_str());
  switch (kind) {
    case LayerKind::conv: {
      TensorT<T> gx;
      conv2d_backward(in_cache, weight, gy, stride, pad, gx, grad_w, grad_b);
      return gx;
    }
    case LayerKind::tconv: {
      TensorT<T> gx;
      tconv2d_backward(in_cache, weight, gy, stride, pad, gx, grad_w, grad_b);
      return gx;
    }
    case LayerKind::dense: {
      TensorT<T> gx, gyflat = gy;
      gyflat.c = gyflat.dim();
      gyflat.h = gyflat.w = 1;
      dense_backward(in_cache, weight, gyflat, gx, grad_w, grad_b);
      return gx;
    }
    case LayerKind::relu: {
      TensorT<T> gx(gy.n, gy.c, gy.h, gy.w);
      for (size_t i = 0; i < gx.size(); ++i)
        gx.v[i] = in_cache.v[i] > T(0) ? gy.v[i] : T(0);
      return gx;
    }
    case LayerKind::leaky_relu: {
      TensorT<T> gx(gy.n, gy.c, gy.h, gy.w);
      for (size_t i = 0; i < gx.size(); ++i)
        gx.v[i] = in_cache.v[i] > T(0) ? gy.v[i] : slope * gy.v[i];
      return gx;
    }
    case LayerKind::sigmoid: {
      TensorT<T> gx(gy.n, gy.c, gy.h, gy.w);
      for (size_t i = 0; i < gx.size(); ++i) {
        T s = out_cache.v[i];
        gx.v[i] = gy.v[i] * s * (T(1) - s);
      }
      return gx;
    }
    case LayerKind::tanh: {
      TensorT<T> gx(gy.n, gy.c, gy.h, gy.w);
      for (size_t i = 0; i < gx.size(); ++i) {
        T t = out_cache.v[i];
        gx.v[i] = gy.v[i] * (T(1) - t * t);
      }
      return gx;
    }
    case LayerKind::avgpool: {
      TensorT<T> gx;
      avgpool_backward(in_cache, kernel, stride, gy, gx);
      return gx;
    }
    case LayerKind::upsample: {
      TensorT<T> gx;
      upsample_backward(in_cache, factor, gy, gx);
      return gx;
    }
  }
  fail(Err::ShapeMismatch, "unknown layer kind");
}

template <class T>
void LayerT<T>::init_params(Rng& rng) {
  if (!has_params()) return;
  int fan_in = in_ch;
  if (kind == LayerKind::conv || kind == LayerKind::tconv) fan_in = in_ch * kernel * kernel;
  const double limit = std::sqrt(6.0 / double(fan_in));
  for (T& v : weight.v) v = T(rng.uniform(-limit, limit));
  bias.fill(T(0));
}

template <class T>
void LayerT<T>::zero_grads() {
  grad_w.fill(T(0));
  grad_b.fill(T(0));
}

template <class T>
std::string LayerT<T>::describe() const {
  switch (kind) {
    case LayerKind::conv:
    case LayerKind::tconv:
      return std::string(layer_kind_name(kind)) + "(" + std::to_string(in_ch) + "," +
             std::to_string(out_ch) + ",k" + std::to_string(kernel) + ",s" +
             std::to_string(stride) + ",p" + std::to_string(pad) + ")";
    case LayerKind::dense:
      if (out_c > 0)
        return "dense(" + std::to_string(in_ch) + "," + std::to_string(out_ch) + "->" +
               std::to_string(out_c) + "x" + std::to_string(out_h) + "x" +
               std::to_string(out_w) + ")";
      return "dense(" + std::to_string(in_ch) + "," + std::to_string(out_ch) + ")";
    case LayerKind::leaky_relu: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "leaky_relu(%g)", double(slope));
      return buf;
    }
    case LayerKind::avgpool:
      return "avgpool(k" + std::to_string(kernel) + ",s" + std::to_string(stride) + ")";
    case LayerKind::upsample:
      return "upsample(" + std::to_string(factor) + ")";
    default:
      return layer_kind_name(kind);
  }
}

template struct LayerT<float>;
template struct LayerT<double>;

}  // namespace gmi
