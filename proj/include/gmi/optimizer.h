#pragma once
#include <vector>

#include "gmi/tensor.h"

namespace gmi {

// Adam with bias correction. Moment buffers are lazily sized to the first
// step's parameter list and must keep matching it afterwards.
template <class T>
struct AdamT {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step_count = 0;
  std::vector<TensorT<T>> m1, m2;

  explicit AdamT(double lr_ = 1e-3) : lr(lr_) {}

  void step(const std::vector<TensorT<T>*>& params,
            const std::vector<TensorT<T>*>& grads);
};

using Adam = AdamT<float>;

template <class T>
void adam_step(AdamT<T>& state, const std::vector<TensorT<T>*>& params,
               const std::vector<TensorT<T>*>& grads) {
  state.step(params, grads);
}

}  // namespace gmi
