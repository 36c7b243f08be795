#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gmi/error.h"

namespace gmi {

// Dense 4-D value carrier (batch, channels, height, width). Flat vectors are
// represented as (n, d, 1, 1). float for training and checkpoints, double for
// the finite-difference validation path.
template <class T>
struct TensorT {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  TensorT() = default;
  TensorT(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), v(size_t(n_) * c_ * h_ * w_, T(0)) {}

  static TensorT flat(int n_, int d) { return TensorT(n_, d, 1, 1); }

  size_t size() const { return v.size(); }
  int dim() const { return c * h * w; }  // per-sample element count

  T& at(int i, int j, int y, int x) {
    return v[((size_t(i) * c + j) * h + y) * w + x];
  }
  T at(int i, int j, int y, int x) const {
    return v[((size_t(i) * c + j) * h + y) * w + x];
  }

  bool same_shape(const TensorT& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  std::string shape_str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
           std::to_string(h) + "," + std::to_string(w) + ")";
  }

  void fill(T x) { std::fill(v.begin(), v.end(), x); }

  bool all_finite() const {
    for (T x : v)
      if (!std::isfinite(double(x))) return false;
    return true;
  }
};

using Tensor = TensorT<float>;
using DTensor = TensorT<double>;

template <class T, class U>
TensorT<T> tensor_cast(const TensorT<U>& src) {
  TensorT<T> out(src.n, src.c, src.h, src.w);
  for (size_t i = 0; i < src.v.size(); ++i) out.v[i] = T(src.v[i]);
  return out;
}

}  // namespace gmi
