#include "gmi/reference_kernels.h"

namespace gmi::ref {

template <class T>
TensorT<T> conv2d_forward(const TensorT<T>& x, const TensorT<T>& w,
                          const TensorT<T>& b, int stride, int pad) {
  const int k = w.h;
  TensorT<T> y(x.n, w.n, (x.h + 2 * pad - k) / stride + 1,
               (x.w + 2 * pad - k) / stride + 1);
  for (int n = 0; n < y.n; ++n)
    for (int co = 0; co < y.c; ++co)
      for (int oh = 0; oh < y.h; ++oh)
        for (int ow = 0; ow < y.w; ++ow) {
          T acc = b.v[co];
          for (int ci = 0; ci < x.c; ++ci)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                int ih = oh * stride - pad + kh;
                int iw = ow * stride - pad + kw;
                if (ih >= 0 && ih < x.h && iw >= 0 && iw < x.w)
                  acc += x.at(n, ci, ih, iw) * w.at(co, ci, kh, kw);
              }
          y.at(n, co, oh, ow) = acc;
        }
  return y;
}

// Scatter form: every input element deposits a scaled kernel stamp.
template <class T>
TensorT<T> tconv2d_forward(const TensorT<T>& x, const TensorT<T>& w,
                           const TensorT<T>& b, int stride, int pad) {
  const int k = w.h;
  TensorT<T> y(x.n, w.c, (x.h - 1) * stride - 2 * pad + k,
               (x.w - 1) * stride - 2 * pad + k);
  for (int n = 0; n < y.n; ++n)
    for (int co = 0; co < y.c; ++co)
      for (int oh = 0; oh < y.h; ++oh)
        for (int ow = 0; ow < y.w; ++ow) y.at(n, co, oh, ow) = b.v[co];
  for (int n = 0; n < x.n; ++n)
    for (int ci = 0; ci < x.c; ++ci)
      for (int ih = 0; ih < x.h; ++ih)
        for (int iw = 0; iw < x.w; ++iw)
          for (int co = 0; co < y.c; ++co)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                int oh = ih * stride - pad + kh;
                int ow = iw * stride - pad + kw;
                if (oh >= 0 && oh < y.h && ow >= 0 && ow < y.w)
                  y.at(n, co, oh, ow) += x.at(n, ci, ih, iw) * w.at(ci, co, kh, kw);
              }
  return y;
}

template <class T>
TensorT<T> dense_forward(const TensorT<T>& x, const TensorT<T>& w,
                         const TensorT<T>& b) {
  const int d = x.dim(), m = w.n;
  TensorT<T> y = TensorT<T>::flat(x.n, m);
  for (int n = 0; n < x.n; ++n)
    for (int j = 0; j < m; ++j) {
      T acc = b.v[j];
      for (int i = 0; i < d; ++i)
        acc += x.v[size_t(n) * d + i] * w.v[size_t(j) * d + i];
      y.v[size_t(n) * m + j] = acc;
    }
  return y;
}

template <class T>
TensorT<T> avgpool_forward(const TensorT<T>& x, int kernel, int stride) {
  const int kh = kernel == 0 ? x.h : kernel;
  const int kw = kernel == 0 ? x.w : kernel;
  const int s = kernel == 0 ? 1 : stride;
  TensorT<T> y(x.n, x.c, (x.h - kh) / s + 1, (x.w - kw) / s + 1);
  for (int n = 0; n < y.n; ++n)
    for (int c = 0; c < y.c; ++c)
      for (int oh = 0; oh < y.h; ++oh)
        for (int ow = 0; ow < y.w; ++ow) {
          T acc = 0;
          for (int i = 0; i < kh; ++i)
            for (int j = 0; j < kw; ++j) acc += x.at(n, c, oh * s + i, ow * s + j);
          y.at(n, c, oh, ow) = acc / T(kh * kw);
        }
  return y;
}

template TensorT<float> conv2d_forward(const TensorT<float>&, const TensorT<float>&,
                                       const TensorT<float>&, int, int);
template TensorT<double> conv2d_forward(const TensorT<double>&, const TensorT<double>&,
                                        const TensorT<double>&, int, int);
template TensorT<float> tconv2d_forward(const TensorT<float>&, const TensorT<float>&,
                                        const TensorT<float>&, int, int);
template TensorT<double> tconv2d_forward(const TensorT<double>&, const TensorT<double>&,
                                         const TensorT<double>&, int, int);
template TensorT<float> dense_forward(const TensorT<float>&, const TensorT<float>&,
                                      const TensorT<float>&);
template TensorT<double> dense_forward(const TensorT<double>&, const TensorT<double>&,
                                       const TensorT<double>&);
template TensorT<float> avgpool_forward(const TensorT<float>&, int, int);
template TensorT<double> avgpool_forward(const TensorT<double>&, int, int);

}  // namespace gmi::ref
