// Times the OpenMP kernels against the serial reference implementations.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "gmi/kernels.h"
#include "gmi/reference_kernels.h"
#include "gmi/rng.h"

using namespace gmi;

namespace {

Tensor random_tensor(int n, int c, int h, int w, Rng& rng) {
  Tensor t(n, c, h, w);
  for (float& v : t.v) v = float(rng.uniform(-1, 1));
  return t;
}

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const char* name, double omp_ms, double ref_ms, double max_diff) {
  std::printf("%-28s omp %8.3f ms   serial %8.3f ms   speedup %5.2fx   maxdiff %.2e\n",
              name, omp_ms, ref_ms, ref_ms / omp_ms, max_diff);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(double(a.v[i]) - double(b.v[i])));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 10;
  std::printf("threads: %d   reps: %d\n", omp_get_max_threads(), reps);
  Rng rng(7);

  {
    Tensor x = random_tensor(16, 16, 32, 32, rng);
    Tensor w = random_tensor(32, 16, 3, 3, rng);
    Tensor b = Tensor::flat(1, 32);
    Tensor y;
    double omp_ms = time_ms([&] { conv2d_forward(x, w, b, 2, 1, y); }, reps);
    Tensor yr;
    double ref_ms = time_ms([&] { yr = ref::conv2d_forward(x, w, b, 2, 1); }, reps);
    report("conv2d 16x16x32x32 k3s2", omp_ms, ref_ms, max_abs_diff(y, yr));
  }
  {
    Tensor x = random_tensor(16, 64, 8, 8, rng);
    Tensor w = random_tensor(64, 32, 4, 4, rng);
    Tensor b = Tensor::flat(1, 32);
    Tensor y;
    double omp_ms = time_ms([&] { tconv2d_forward(x, w, b, 2, 1, y); }, reps);
    Tensor yr;
    double ref_ms = time_ms([&] { yr = ref::tconv2d_forward(x, w, b, 2, 1); }, reps);
    report("tconv2d 16x64x8x8 k4s2", omp_ms, ref_ms, max_abs_diff(y, yr));
  }
  {
    Tensor x = random_tensor(64, 1024, 1, 1, rng);
    Tensor w = random_tensor(512, 1024, 1, 1, rng);
    w.c = 1024;
    w.n = 512;
    w.h = w.w = 1;
    Tensor b = Tensor::flat(1, 512);
    Tensor y;
    double omp_ms = time_ms([&] { dense_forward(x, w, b, y); }, reps);
    Tensor yr;
    double ref_ms = time_ms([&] { yr = ref::dense_forward(x, w, b); }, reps);
    report("dense 64x1024 -> 512", omp_ms, ref_ms, max_abs_diff(y, yr));
  }
  {
    Tensor x = random_tensor(16, 8, 64, 64, rng);
    Tensor y;
    double omp_ms = time_ms([&] { avgpool_forward(x, 0, 1, y); }, reps);
    Tensor yr;
    double ref_ms = time_ms([&] { yr = ref::avgpool_forward(x, 0, 1); }, reps);
    report("global avgpool 16x8x64x64", omp_ms, ref_ms, max_abs_diff(y, yr));
  }
  {
    // backward pass timing (no serial twin; finite differences check it in tests)
    Tensor x = random_tensor(16, 16, 32, 32, rng);
    Tensor w = random_tensor(32, 16, 3, 3, rng);
    Tensor b = Tensor::flat(1, 32);
    Tensor y;
    conv2d_forward(x, w, b, 2, 1, y);
    Tensor gy = random_tensor(y.n, y.c, y.h, y.w, rng);
    Tensor gx, gw(w.n, w.c, w.h, w.w), gb = Tensor::flat(1, 32);
    double omp_ms =
        time_ms([&] { conv2d_backward(x, w, gy, 2, 1, gx, gw, gb); }, reps);
    std::printf("%-28s omp %8.3f ms\n", "conv2d backward", omp_ms);
  }
  return 0;
}
