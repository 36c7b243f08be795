#pragma once
#include <algorithm>

#include "gmi/tensor.h"

// OpenMP-parallel layer kernels. Parallel loops run over independent output
// slices only and accumulation inside a slice happens in a fixed serial
// order, so results are bit-identical for any thread count. Loop ranges are
// precomputed so the hot loops carry no bounds checks. A naive serial twin of
// the forward kernels lives in reference_kernels.h for tests and the
// benchmark.

namespace gmi {

namespace detail {

// Valid output range [lo,hi) so that in = out*stride - pad + k stays inside
// [0, limit).
inline void out_range(int k, int stride, int pad, int limit, int out_n, int& lo,
                      int& hi) {
  lo = std::max(0, (pad - k + stride - 1) / stride);
  hi = std::min(out_n, (limit - 1 - k + pad) / stride + 1);
}

}  // namespace detail

// y[n,co,oh,ow] = b[co] + sum_{ci,kh,kw} x[n,ci,oh*s-p+kh,ow*s-p+kw] * w[co,ci,kh,kw]
template <class T>
void conv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                    int stride, int pad, TensorT<T>& y) {
  const int k = w.h, ci_n = w.c, co_n = w.n;
  const int oh_n = (x.h + 2 * pad - k) / stride + 1;
  const int ow_n = (x.w + 2 * pad - k) / stride + 1;
  y = TensorT<T>(x.n, co_n, oh_n, ow_n);
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n) {
    for (int co = 0; co < co_n; ++co) {
      T* yslice = &y.v[((size_t(n) * co_n + co) * oh_n) * ow_n];
      std::fill(yslice, yslice + size_t(oh_n) * ow_n, b.v[co]);
      for (int ci = 0; ci < ci_n; ++ci) {
        for (int kh = 0; kh < k; ++kh) {
          int oh_lo, oh_hi;
          detail::out_range(kh, stride, pad, x.h, oh_n, oh_lo, oh_hi);
          for (int kw = 0; kw < k; ++kw) {
            int ow_lo, ow_hi;
            detail::out_range(kw, stride, pad, x.w, ow_n, ow_lo, ow_hi);
            const T wv = w.at(co, ci, kh, kw);
            const int shift = kw - pad;
            for (int oh = oh_lo; oh < oh_hi; ++oh) {
              const int ih = oh * stride - pad + kh;
              const T* xr = &x.v[((size_t(n) * ci_n + ci) * x.h + ih) * x.w];
              T* yr = yslice + size_t(oh) * ow_n;
              for (int ow = ow_lo; ow < ow_hi; ++ow) yr[ow] += wv * xr[ow * stride + shift];
            }
          }
        }
      }
    }
  }
}

// gx is overwritten; gw/gb are accumulated into (callers zero them per step).
template <class T>
void conv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& gy,
                     int stride, int pad, TensorT<T>& gx, TensorT<T>& gw,
                     TensorT<T>& gb) {
  const int k = w.h, ci_n = w.c, co_n = w.n;
  gx = TensorT<T>(x.n, x.c, x.h, x.w);
  // input gradient: scatter gy through the kernel, one (n,ci) slice per task
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n) {
    for (int ci = 0; ci < ci_n; ++ci) {
      T* gxs = &gx.v[(size_t(n) * ci_n + ci) * x.h * x.w];
      for (int co = 0; co < co_n; ++co) {
        const T* wrow = &w.v[((size_t(co) * ci_n + ci) * k) * k];
        for (int oh = 0; oh < gy.h; ++oh) {
          const int base_ih = oh * stride - pad;
          const int kh_lo = std::max(0, -base_ih);
          const int kh_hi = std::min(k, x.h - base_ih);
          const T* gyr = &gy.v[((size_t(n) * co_n + co) * gy.h + oh) * gy.w];
          for (int ow = 0; ow < gy.w; ++ow) {
            const int base_iw = ow * stride - pad;
            const int kw_lo = std::max(0, -base_iw);
            const int kw_hi = std::min(k, x.w - base_iw);
            const T g = gyr[ow];
            for (int kh = kh_lo; kh < kh_hi; ++kh) {
              T* gxr = gxs + size_t(base_ih + kh) * x.w + base_iw;
              const T* wr = wrow + size_t(kh) * k;
              for (int kw = kw_lo; kw < kw_hi; ++kw) gxr[kw] += g * wr[kw];
            }
          }
        }
      }
    }
  }
  // weight/bias gradients: one co slice per task, serial reduction inside
#pragma omp parallel for schedule(static)
  for (int co = 0; co < co_n; ++co) {
    for (int ci = 0; ci < ci_n; ++ci) {
      for (int kh = 0; kh < k; ++kh) {
        int oh_lo, oh_hi;
        detail::out_range(kh, stride, pad, x.h, gy.h, oh_lo, oh_hi);
        for (int kw = 0; kw < k; ++kw) {
          int ow_lo, ow_hi;
          detail::out_range(kw, stride, pad, x.w, gy.w, ow_lo, ow_hi);
          double acc = 0;
          const int shift = kw - pad;
          for (int n = 0; n < x.n; ++n) {
            for (int oh = oh_lo; oh < oh_hi; ++oh) {
              const int ih = oh * stride - pad + kh;
              const T* xr = &x.v[((size_t(n) * ci_n + ci) * x.h + ih) * x.w];
              const T* gyr = &gy.v[((size_t(n) * co_n + co) * gy.h + oh) * gy.w];
              for (int ow = ow_lo; ow < ow_hi; ++ow)
                acc += double(gyr[ow]) * double(xr[ow * stride + shift]);
            }
          }
          gw.at(co, ci, kh, kw) += T(acc);
        }
      }
    }
    double acc = 0;
    const T* gys = &gy.v[size_t(co) * gy.h * gy.w];
    for (int n = 0; n < gy.n; ++n) {
      const T* p = gys + size_t(n) * co_n * gy.h * gy.w;
      for (int i = 0; i < gy.h * gy.w; ++i) acc += double(p[i]);
    }
    gb.v[co] += T(acc);
  }
}

// Transposed convolution, weight layout (ci, co, kh, kw); scatter form.
template <class T>
void tconv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                     int stride, int pad, TensorT<T>& y) {
  const int k = w.h, ci_n = w.n, co_n = w.c;
  const int oh_n = (x.h - 1) * stride - 2 * pad + k;
  const int ow_n = (x.w - 1) * stride - 2 * pad + k;
  y = TensorT<T>(x.n, co_n, oh_n, ow_n);
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n) {
    for (int co = 0; co < co_n; ++co) {
      T* yslice = &y.v[((size_t(n) * co_n + co) * oh_n) * ow_n];
      std::fill(yslice, yslice + size_t(oh_n) * ow_n, b.v[co]);
      for (int ci = 0; ci < ci_n; ++ci) {
        const T* wslice = &w.v[((size_t(ci) * co_n + co) * k) * k];
        for (int ih = 0; ih < x.h; ++ih) {
          const int base_oh = ih * stride - pad;
          const int kh_lo = std::max(0, -base_oh);
          const int kh_hi = std::min(k, oh_n - base_oh);
          const T* xr = &x.v[((size_t(n) * ci_n + ci) * x.h + ih) * x.w];
          for (int iw = 0; iw < x.w; ++iw) {
            const T xv = xr[iw];
            if (xv == T(0)) continue;  // relu inputs are often sparse
            const int base_ow = iw * stride - pad;
            const int kw_lo = std::max(0, -base_ow);
            const int kw_hi = std::min(k, ow_n - base_ow);
            for (int kh = kh_lo; kh < kh_hi; ++kh) {
              T* yr = yslice + size_t(base_oh + kh) * ow_n + base_ow;
              const T* wr = wslice + size_t(kh) * k;
              for (int kw = kw_lo; kw < kw_hi; ++kw) yr[kw] += xv * wr[kw];
            }
          }
        }
      }
    }
  }
}

template <class T>
void tconv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& gy,
                      int stride, int pad, TensorT<T>& gx, TensorT<T>& gw,
                      TensorT<T>& gb) {
  const int k = w.h, ci_n = w.n, co_n = w.c;
  gx = TensorT<T>(x.n, x.c, x.h, x.w);
  // input gradient: gather, conv-forward-shaped loops
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n) {
    for (int ci = 0; ci < ci_n; ++ci) {
      T* gxs = &gx.v[(size_t(n) * ci_n + ci) * x.h * x.w];
      for (int co = 0; co < co_n; ++co) {
        for (int kh = 0; kh < k; ++kh) {
          int ih_lo, ih_hi;
          detail::out_range(kh, stride, pad, gy.h, x.h, ih_lo, ih_hi);
          for (int kw = 0; kw < k; ++kw) {
            int iw_lo, iw_hi;
            detail::out_range(kw, stride, pad, gy.w, x.w, iw_lo, iw_hi);
            const T wv = w.at(ci, co, kh, kw);
            const int shift = kw - pad;
            for (int ih = ih_lo; ih < ih_hi; ++ih) {
              const int oh = ih * stride - pad + kh;
              const T* gyr = &gy.v[((size_t(n) * co_n + co) * gy.h + oh) * gy.w];
              T* gxr = gxs + size_t(ih) * x.w;
              for (int iw = iw_lo; iw < iw_hi; ++iw)
                gxr[iw] += wv * gyr[iw * stride + shift];
            }
          }
        }
      }
    }
  }
  // weight gradient: one ci slice per task
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < ci_n; ++ci) {
    for (int co = 0; co < co_n; ++co) {
      for (int kh = 0; kh < k; ++kh) {
        int ih_lo, ih_hi;
        detail::out_range(kh, stride, pad, gy.h, x.h, ih_lo, ih_hi);
        for (int kw = 0; kw < k; ++kw) {
          int iw_lo, iw_hi;
          detail::out_range(kw, stride, pad, gy.w, x.w, iw_lo, iw_hi);
          double acc = 0;
          const int shift = kw - pad;
          for (int n = 0; n < x.n; ++n) {
            for (int ih = ih_lo; ih < ih_hi; ++ih) {
              const int oh = ih * stride - pad + kh;
              const T* xr = &x.v[((size_t(n) * ci_n + ci) * x.h + ih) * x.w];
              const T* gyr = &gy.v[((size_t(n) * co_n + co) * gy.h + oh) * gy.w];
              for (int iw = iw_lo; iw < iw_hi; ++iw)
                acc += double(xr[iw]) * double(gyr[iw * stride + shift]);
            }
          }
          gw.at(ci, co, kh, kw) += T(acc);
        }
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (int co = 0; co < co_n; ++co) {
    double acc = 0;
    for (int n = 0; n < gy.n; ++n) {
      const T* p = &gy.v[(size_t(n) * co_n + co) * gy.h * gy.w];
      for (int i = 0; i < gy.h * gy.w; ++i) acc += double(p[i]);
    }
    gb.v[co] += T(acc);
  }
}

// x viewed as (n, d); weight (m, d); y (n, m).
template <class T>
void dense_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                   TensorT<T>& y) {
  const int d = x.dim(), m = w.n;
  y = TensorT<T>::flat(x.n, m);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < x.n; ++n) {
    const T* xrow = x.v.data() + size_t(n) * d;
    for (int j = 0; j < m; ++j) {
      const T* wrow = w.v.data() + size_t(j) * d;
      double acc = double(b.v[j]);
      for (int i = 0; i < d; ++i) acc += double(xrow[i]) * double(wrow[i]);
      y.v[size_t(n) * m + j] = T(acc);
    }
  }
}

template <class T>
void dense_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& gy,
                    TensorT<T>& gx, TensorT<T>& gw, TensorT<T>& gb) {
  const int d = x.dim(), m = w.n;
  gx = TensorT<T>(x.n, x.c, x.h, x.w);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < x.n; ++n) {
    T* gxrow = gx.v.data() + size_t(n) * d;
    const T* gyrow = gy.v.data() + size_t(n) * m;
    for (int j = 0; j < m; ++j) {
      const T g = gyrow[j];
      const T* wrow = w.v.data() + size_t(j) * d;
      for (int i = 0; i < d; ++i) gxrow[i] += g * wrow[i];
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < m; ++j) {
    T* gwrow = gw.v.data() + size_t(j) * d;
    for (int n = 0; n < x.n; ++n) {
      const T g = gy.v[size_t(n) * m + j];
      const T* xrow = x.v.data() + size_t(n) * d;
      for (int i = 0; i < d; ++i) gwrow[i] += g * xrow[i];
    }
    double acc = 0;
    for (int n = 0; n < x.n; ++n) acc += double(gy.v[size_t(n) * m + j]);
    gb.v[j] += T(acc);
  }
}

// kernel == 0 means global (window = full spatial extent, output 1x1).
template <class T>
void avgpool_forward(const TensorT<T>& x, int kernel, int stride, TensorT<T>& y) {
  const int kh = kernel == 0 ? x.h : kernel;
  const int kw = kernel == 0 ? x.w : kernel;
  const int s = kernel == 0 ? 1 : stride;
  const int oh_n = (x.h - kh) / s + 1;
  const int ow_n = (x.w - kw) / s + 1;
  y = TensorT<T>(x.n, x.c, oh_n, ow_n);
  const double inv = 1.0 / (double(kh) * kw);
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n) {
    for (int c = 0; c < x.c; ++c) {
      for (int oh = 0; oh < oh_n; ++oh) {
        for (int ow = 0; ow < ow_n; ++ow) {
          double acc = 0;
          for (int i = 0; i < kh; ++i) {
            const T* xr = &x.v[((size_t(n) * x.c + c) * x.h + oh * s + i) * x.w + ow * s];
            for (int j = 0; j < kw; ++j) acc += double(xr[j]);
          }
          y.at(n, c, oh, ow) = T(acc * inv);
        }
      }
    }
  }
}

template <class T>
void avgpool_backward(const TensorT<T>& x, int kernel, int stride,
                      const TensorT<T>& gy, TensorT<T>& gx) {
  const int kh = kernel == 0 ? x.h : kernel;
  const int kw = kernel == 0 ? x.w : kernel;
  const int s = kernel == 0 ? 1 : stride;
  gx = TensorT<T>(x.n, x.c, x.h, x.w);
  const T inv = T(1.0 / (double(kh) * kw));
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n) {
    for (int c = 0; c < x.c; ++c) {
      for (int oh = 0; oh < gy.h; ++oh)
        for (int ow = 0; ow < gy.w; ++ow) {
          const T g = gy.at(n, c, oh, ow) * inv;
          for (int i = 0; i < kh; ++i) {
            T* gxr = &gx.v[((size_t(n) * x.c + c) * x.h + oh * s + i) * x.w + ow * s];
            for (int j = 0; j < kw; ++j) gxr[j] += g;
          }
        }
    }
  }
}

template <class T>
void upsample_forward(const TensorT<T>& x, int factor, TensorT<T>& y) {
  y = TensorT<T>(x.n, x.c, x.h * factor, x.w * factor);
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c)
      for (int oh = 0; oh < y.h; ++oh)
        for (int ow = 0; ow < y.w; ++ow)
          y.at(n, c, oh, ow) = x.at(n, c, oh / factor, ow / factor);
}

template <class T>
void upsample_backward(const TensorT<T>& x, int factor, const TensorT<T>& gy,
                       TensorT<T>& gx) {
  gx = TensorT<T>(x.n, x.c, x.h, x.w);
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c)
      for (int ih = 0; ih < x.h; ++ih)
        for (int iw = 0; iw < x.w; ++iw) {
          double acc = 0;
          for (int i = 0; i < factor; ++i)
            for (int j = 0; j < factor; ++j)
              acc += double(gy.at(n, c, ih * factor + i, iw * factor + j));
          gx.at(n, c, ih, iw) = T(acc);
        }
}

}  // namespace gmi
