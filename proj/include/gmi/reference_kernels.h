#pragma once
#include "gmi/tensor.h"

// Serial textbook implementations of the forward kernels, kept as an
// independent check on the OpenMP versions. Tests compare the two paths and
// the benchmark tool times them; nothing in the production pipeline calls
// these. tconv is written scatter-style on purpose so it shares no loop
// structure with the gather-style production kernel.

namespace gmi::ref {

template <class T>
TensorT<T> conv2d_forward(const TensorT<T>& x, const TensorT<T>& w,
                          const TensorT<T>& b, int stride, int pad);

template <class T>
TensorT<T> tconv2d_forward(const TensorT<T>& x, const TensorT<T>& w,
                           const TensorT<T>& b, int stride, int pad);

template <class T>
TensorT<T> dense_forward(const TensorT<T>& x, const TensorT<T>& w,
                         const TensorT<T>& b);

template <class T>
TensorT<T> avgpool_forward(const TensorT<T>& x, int kernel, int stride);

}  // namespace gmi::ref
