#pragma once
#include <string>

#include "gmi/rng.h"
#include "gmi/tensor.h"

namespace gmi {

enum class LayerKind {
  conv,
  tconv,
  dense,
  relu,
  leaky_relu,
  sigmoid,
  tanh,
  avgpool,
  upsample,
};

const char* layer_kind_name(LayerKind k);

// One network layer: kind tag plus whatever parameters/hyperparameters that
// kind uses. forward() caches activations for backward(); apply() is the
// cache-free const path used for inference.
template <class T>
struct LayerT {
  LayerKind kind = LayerKind::relu;

  // conv/tconv/dense
  int in_ch = 0, out_ch = 0, kernel = 0, stride = 1, pad = 0;
  // dense may emit a 4-D shape (decoder head); out_c == 0 means flat output
  int out_c = 0, out_h = 0, out_w = 0;
  T slope = T(0.2);  // leaky_relu
  int factor = 2;    // upsample
  // avgpool: kernel == 0 means global average pool

  TensorT<T> weight, bias;
  TensorT<T> grad_w, grad_b;

  TensorT<T> in_cache, out_cache;
  bool cached = false;

  static LayerT conv2d(int in_ch, int out_ch, int kernel, int stride, int pad);
  static LayerT tconv2d(int in_ch, int out_ch, int kernel, int stride, int pad);
  static LayerT dense(int in_dim, int out_dim);
  static LayerT dense_to(int in_dim, int out_c, int out_h, int out_w);
  static LayerT activation(LayerKind kind, T slope = T(0.2));
  static LayerT avgpool(int kernel, int stride);  // kernel 0 = global
  static LayerT upsample(int factor);

  TensorT<T> apply(const TensorT<T>& x) const;
  TensorT<T> forward(const TensorT<T>& x);
  // Returns the input gradient; accumulates into grad_w / grad_b.
  TensorT<T> backward(const TensorT<T>& gy);

  void init_params(Rng& rng);  // He-uniform weights, zero biases
  void zero_grads();
  bool has_params() const { return !weight.v.empty(); }
  size_t param_count() const { return weight.size() + bias.size(); }
  std::string describe() const;
};

using Layer = LayerT<float>;

}  // namespace gmi
