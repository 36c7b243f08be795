#include "gmi/grad_check.h"

#include <cmath>

namespace gmi {

namespace {

double loss_sum(const DNetwork& net, const DTensor& input) {
  DTensor out = net.infer(input);
  double s = 0;
  for (double v : out.v) s += v;
  return s;
}

}  // namespace

double grad_check_against(DNetwork& net, const DTensor& input, double eps,
                          const std::vector<DTensor>& analytic) {
  std::vector<DTensor*> params = net.params();
  if (params.size() != analytic.size())
    fail(Err::ShapeMismatch, "analytic gradient list does not match parameters");
  double worst = 0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    DTensor& p = *params[pi];
    for (size_t j = 0; j < p.size(); ++j) {
      const double orig = p.v[j];
      p.v[j] = orig + eps;
      const double lp = loss_sum(net, input);
      p.v[j] = orig - eps;
      const double lm = loss_sum(net, input);
      p.v[j] = orig;
      const double numeric = (lp - lm) / (2 * eps);
      const double a = analytic[pi].v[j];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), eps});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

double grad_check(DNetwork& net, const DTensor& input, double eps) {
  if (net.param_count() > 10000)
    fail(Err::TooManyParameters,
         "finite differences limited to 1e4 parameters, net has " +
             std::to_string(net.param_count()));
  net.zero_grads();
  DTensor out = net.forward(input);
  DTensor ones(out.n, out.c, out.h, out.w);
  ones.fill(1.0);
  net.backward(ones);
  std::vector<DTensor> analytic;
  for (DTensor* g : net.grads()) analytic.push_back(*g);
  return grad_check_against(net, input, eps, analytic);
}

}  // namespace gmi
