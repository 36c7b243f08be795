#include "gmi/optimizer.h"

#include <cmath>

namespace gmi {

template <class T>
void AdamT<T>::step(const std::vector<TensorT<T>*>& params,
                    const std::vector<TensorT<T>*>& grads) {
  if (params.size() != grads.size())
    fail(Err::ShapeMismatch, "param/grad list sizes differ");
  if (m1.empty()) {
    for (TensorT<T>* p : params) {
      m1.push_back(TensorT<T>(p->n, p->c, p->h, p->w));
      m2.push_back(TensorT<T>(p->n, p->c, p->h, p->w));
    }
  }
  if (m1.size() != params.size())
    fail(Err::ShapeMismatch, "optimizer state does not match parameter list");
  ++step_count;
  const double c1 = 1.0 - std::pow(beta1, double(step_count));
  const double c2 = 1.0 - std::pow(beta2, double(step_count));
  for (size_t i = 0; i < params.size(); ++i) {
    TensorT<T>& p = *params[i];
    const TensorT<T>& g = *grads[i];
    if (!p.same_shape(g) || !p.same_shape(m1[i]))
      fail(Err::ShapeMismatch, "param " + std::to_string(i) + " shape mismatch");
    for (size_t j = 0; j < p.size(); ++j) {
      const double gj = double(g.v[j]);
      const double a = beta1 * double(m1[i].v[j]) + (1 - beta1) * gj;
      const double b = beta2 * double(m2[i].v[j]) + (1 - beta2) * gj * gj;
      m1[i].v[j] = T(a);
      m2[i].v[j] = T(b);
      p.v[j] = T(double(p.v[j]) - lr * (a / c1) / (std::sqrt(b / c2) + eps));
    }
  }
}

template struct AdamT<float>;
template struct AdamT<double>;

}  // namespace gmi
