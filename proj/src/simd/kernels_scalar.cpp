#include <cmath>

#include "kleinian/simd/kernels.hpp"

namespace kleinian::simd {

namespace {

void lorentz_apply(const double* L, ConstBlock in, Block out, std::size_t n, int dim) {
  if (dim == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x0 = in.c[0][i], x1 = in.c[1][i], x2 = in.c[2][i];
      out.c[0][i] = L[0] * x0 + L[1] * x1 + L[2] * x2;
      out.c[1][i] = L[4] * x0 + L[5] * x1 + L[6] * x2;
      out.c[2][i] = L[8] * x0 + L[9] * x1 + L[10] * x2;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = in.c[0][i], x1 = in.c[1][i], x2 = in.c[2][i], x3 = in.c[3][i];
    for (int r = 0; r < 4; ++r) out.c[r][i] = L[4 * r] * x0 + L[4 * r + 1] * x1 + L[4 * r + 2] * x2 + L[4 * r + 3] * x3;
  }
}

void pow_neg(const double* x, double shift, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -s * std::log(x[i] + shift);
    out[i] = a < -708.0 ? 0.0 : std::exp(a);
  }
}

void neg_minkowski(const double* z, ConstBlock in, double* out, std::size_t n, int dim) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = z[0] * in.c[0][i] - z[1] * in.c[1][i] - z[2] * in.c[2][i];
    if (dim == 2) v -= z[3] * in.c[3][i];
    out[i] = v;
  }
}

void vlog(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

void vexp(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] < -708.0 ? 0.0 : std::exp(x[i]);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable t{lorentz_apply, pow_neg, neg_minkowski, vlog, vexp};
  return t;
}

}  // namespace kleinian::simd
