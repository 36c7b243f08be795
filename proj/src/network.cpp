#include "gmi/network.h"

namespace gmi {

namespace {

template <class T>
void check_finite(const TensorT<T>& t, const LayerT<T>& layer) {
  if (!t.all_finite())
    fail(Err::NonFiniteValue, "non-finite output of " + layer.describe());
}

}  // namespace

template <class T>
TensorT<T> NetworkT<T>::forward(const TensorT<T>& input) {
  if (!input.all_finite()) fail(Err::NonFiniteValue, "non-finite network input");
  TensorT<T> x = input;
  for (LayerT<T>& l : layers) {
    x = l.forward(x);
    check_finite(x, l);
  }
  forward_done = true;
  return x;
}

template <class T>
TensorT<T> NetworkT<T>::infer(const TensorT<T>& input) const {
  if (!input.all_finite()) fail(Err::NonFiniteValue, "non-finite network input");
  TensorT<T> x = input;
  for (const LayerT<T>& l : layers) {
    x = l.apply(x);
    check_finite(x, l);
  }
  return x;
}

template <class T>
TensorT<T> NetworkT<T>::backward(const TensorT<T>& loss_grad) {
  if (!forward_done) fail(Err::NoCachedForward, "backward before forward");
  TensorT<T> g = loss_grad;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = it->backward(g);
  return g;
}

template <class T>
void NetworkT<T>::init(Rng& rng) {
  for (LayerT<T>& l : layers) l.init_params(rng);
}

template <class T>
void NetworkT<T>::zero_grads() {
  for (LayerT<T>& l : layers) l.zero_grads();
}

template <class T>
size_t NetworkT<T>::param_count() const {
  size_t n = 0;
  for (const LayerT<T>& l : layers) n += l.param_count();
  return n;
}

template <class T>
std::vector<TensorT<T>*> NetworkT<T>::params() {
  std::vector<TensorT<T>*> out;
  for (LayerT<T>& l : layers)
    if (l.has_params()) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
  return out;
}

template <class T>
std::vector<TensorT<T>*> NetworkT<T>::grads() {
  std::vector<TensorT<T>*> out;
  for (LayerT<T>& l : layers)
    if (l.has_params()) {
      out.push_back(&l.grad_w);
      out.push_back(&l.grad_b);
    }
  return out;
}

template <class T>
std::string NetworkT<T>::describe() const {
  std::string s;
  for (const LayerT<T>& l : layers) {
    if (!s.empty()) s += ';';
    s += l.describe();
  }
  return s;
}

template struct NetworkT<float>;
template struct NetworkT<double>;

}  // namespace gmi
