#pragma once
#include <vector>

#include "gmi/layers.h"

namespace gmi {

// A plain layer stack. forward() caches per-layer activations for backward();
// infer() is the const, cache-free path and is safe to call concurrently on a
// shared instance.
template <class T>
struct NetworkT {
  std::vector<LayerT<T>> layers;
  bool forward_done = false;

  TensorT<T> forward(const TensorT<T>& input);
  TensorT<T> infer(const TensorT<T>& input) const;
  // Returns the gradient w.r.t. the input; parameter gradients accumulate
  // into each layer's grad_w / grad_b.
  TensorT<T> backward(const TensorT<T>& loss_grad);

  void init(Rng& rng);
  void zero_grads();
  size_t param_count() const;
  std::vector<TensorT<T>*> params();
  std::vector<TensorT<T>*> grads();
  std::string describe() const;  // layer descriptors joined with ';'
};

using Network = NetworkT<float>;
using DNetwork = NetworkT<double>;

}  // namespace gmi
