// Compiled with -mavx2 -mfma; only reached after a cpuid check.

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "kleinian/simd/kernels.hpp"

namespace kleinian::simd {

namespace {

// fdlibm e_log.c / e_exp.c coefficients
constexpr double Lg1 = 6.666666666666735130e-01;
constexpr double Lg2 = 3.999999999940941908e-01;
constexpr double Lg3 = 2.857142874366239149e-01;
constexpr double Lg4 = 2.222219843214978396e-01;
constexpr double Lg5 = 1.818357216161805012e-01;
constexpr double Lg6 = 1.531383769920937332e-01;
constexpr double Lg7 = 1.479819860511658591e-01;
constexpr double ln2_hi = 6.93147180369123816490e-01;
constexpr double ln2_lo = 1.90821492927058770002e-10;
constexpr double inv_ln2 = 1.44269504088896338700e+00;
constexpr double P1 = 1.66666666666666019037e-01;
constexpr double P2 = -2.77777777770155933842e-03;
constexpr double P3 = 6.61375632143793436117e-05;
constexpr double P4 = -1.65339022054652515390e-06;
constexpr double P5 = 4.13813679705723846039e-08;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// natural log for positive normal inputs
inline __m256d log4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // biased exponent -> double via the 2^52 trick
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  const __m256i two52 = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, two52)), set1(4503599627370496.0 + 1023.0));
  const __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, set1(1.0)));

  const __m256d f = _mm256_sub_pd(m, set1(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(set1(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  __m256d t1 = _mm256_fmadd_pd(w, set1(Lg6), set1(Lg4));
  t1 = _mm256_fmadd_pd(w, t1, set1(Lg2));
  t1 = _mm256_mul_pd(w, t1);
  __m256d t2 = _mm256_fmadd_pd(w, set1(Lg7), set1(Lg5));
  t2 = _mm256_fmadd_pd(w, t2, set1(Lg3));
  t2 = _mm256_fmadd_pd(w, t2, set1(Lg1));
  t2 = _mm256_mul_pd(z, t2);
  const __m256d R = _mm256_add_pd(t1, t2);
  const __m256d hfsq = _mm256_mul_pd(set1(0.5), _mm256_mul_pd(f, f));
  // k*ln2_hi - ((hfsq - (s*(hfsq+R) + k*ln2_lo)) - f)
  const __m256d inner = _mm256_fmadd_pd(e, set1(ln2_lo), _mm256_mul_pd(s, _mm256_add_pd(hfsq, R)));
  const __m256d corr = _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f);
  return _mm256_fmsub_pd(e, set1(ln2_hi), corr);
}

// exp with results flushed to 0 below -708
inline __m256d exp4(__m256d x) {
  const __m256d under = _mm256_cmp_pd(x, set1(-708.0), _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, set1(-708.0)), set1(709.0));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, set1(inv_ln2)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_fnmadd_pd(k, set1(ln2_hi), x);
  const __m256d lo = _mm256_mul_pd(k, set1(ln2_lo));
  const __m256d r = _mm256_sub_pd(hi, lo);
  const __m256d t = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(t, set1(P5), set1(P4));
  p = _mm256_fmadd_pd(t, p, set1(P3));
  p = _mm256_fmadd_pd(t, p, set1(P2));
  p = _mm256_fmadd_pd(t, p, set1(P1));
  const __m256d c = _mm256_fnmadd_pd(t, p, r);
  // 1 - ((lo - r*c/(2-c)) - hi)
  const __m256d q = _mm256_div_pd(_mm256_mul_pd(r, c), _mm256_sub_pd(set1(2.0), c));
  const __m256d y = _mm256_sub_pd(set1(1.0), _mm256_sub_pd(_mm256_sub_pd(lo, q), hi));
  const __m128i ki = _mm256_cvtpd_epi32(k);
  __m256i kb = _mm256_cvtepi32_epi64(ki);
  kb = _mm256_slli_epi64(_mm256_add_epi64(kb, _mm256_set1_epi64x(1023)), 52);
  const __m256d out = _mm256_mul_pd(y, _mm256_castsi256_pd(kb));
  return _mm256_andnot_pd(under, out);
}

void lorentz_apply(const double* L, ConstBlock in, Block out, std::size_t n, int dim) {
  std::size_t i = 0;
  if (dim == 1) {
    const __m256d l00 = set1(L[0]), l01 = set1(L[1]), l02 = set1(L[2]);
    const __m256d l10 = set1(L[4]), l11 = set1(L[5]), l12 = set1(L[6]);
    const __m256d l20 = set1(L[8]), l21 = set1(L[9]), l22 = set1(L[10]);
    for (; i + 4 <= n; i += 4) {
      const __m256d x0 = _mm256_loadu_pd(in.c[0] + i), x1 = _mm256_loadu_pd(in.c[1] + i), x2 = _mm256_loadu_pd(in.c[2] + i);
      _mm256_storeu_pd(out.c[0] + i, _mm256_fmadd_pd(l02, x2, _mm256_fmadd_pd(l01, x1, _mm256_mul_pd(l00, x0))));
      _mm256_storeu_pd(out.c[1] + i, _mm256_fmadd_pd(l12, x2, _mm256_fmadd_pd(l11, x1, _mm256_mul_pd(l10, x0))));
      _mm256_storeu_pd(out.c[2] + i, _mm256_fmadd_pd(l22, x2, _mm256_fmadd_pd(l21, x1, _mm256_mul_pd(l20, x0))));
    }
    for (; i < n; ++i) {
      const double x0 = in.c[0][i], x1 = in.c[1][i], x2 = in.c[2][i];
      out.c[0][i] = std::fma(L[2], x2, std::fma(L[1], x1, L[0] * x0));
      out.c[1][i] = std::fma(L[6], x2, std::fma(L[5], x1, L[4] * x0));
      out.c[2][i] = std::fma(L[10], x2, std::fma(L[9], x1, L[8] * x0));
    }
    return;
  }
  __m256d l[16];
  for (int k = 0; k < 16; ++k) l[k] = set1(L[k]);
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(in.c[0] + i), x1 = _mm256_loadu_pd(in.c[1] + i);
    const __m256d x2 = _mm256_loadu_pd(in.c[2] + i), x3 = _mm256_loadu_pd(in.c[3] + i);
    for (int r = 0; r < 4; ++r) {
      __m256d acc = _mm256_mul_pd(l[4 * r], x0);
      acc = _mm256_fmadd_pd(l[4 * r + 1], x1, acc);
      acc = _mm256_fmadd_pd(l[4 * r + 2], x2, acc);
      acc = _mm256_fmadd_pd(l[4 * r + 3], x3, acc);
      _mm256_storeu_pd(out.c[r] + i, acc);
    }
  }
  for (; i < n; ++i) {
    const double x0 = in.c[0][i], x1 = in.c[1][i], x2 = in.c[2][i], x3 = in.c[3][i];
    for (int r = 0; r < 4; ++r)
      out.c[r][i] = std::fma(L[4 * r + 3], x3, std::fma(L[4 * r + 2], x2, std::fma(L[4 * r + 1], x1, L[4 * r] * x0)));
  }
}

void pow_neg(const double* x, double shift, double s, double* out, std::size_t n) {
  const __m256d sh = set1(shift), ms = set1(-s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(x + i), sh);
    _mm256_storeu_pd(out + i, exp4(_mm256_mul_pd(ms, log4(v))));
  }
  if (i < n) {
    double tmp[4] = {1.0, 1.0, 1.0, 1.0}, res[4];
    for (std::size_t k = 0; i + k < n; ++k) tmp[k] = x[i + k] + shift;
    _mm256_storeu_pd(res, exp4(_mm256_mul_pd(ms, log4(_mm256_loadu_pd(tmp)))));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = res[k];
  }
}

void neg_minkowski(const double* z, ConstBlock in, double* out, std::size_t n, int dim) {
  const __m256d z0 = set1(z[0]), z1 = set1(z[1]), z2 = set1(z[2]), z3 = set1(z[3]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(z0, _mm256_loadu_pd(in.c[0] + i));
    acc = _mm256_fnmadd_pd(z1, _mm256_loadu_pd(in.c[1] + i), acc);
    acc = _mm256_fnmadd_pd(z2, _mm256_loadu_pd(in.c[2] + i), acc);
    if (dim == 2) acc = _mm256_fnmadd_pd(z3, _mm256_loadu_pd(in.c[3] + i), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double v = std::fma(-z[2], in.c[2][i], std::fma(-z[1], in.c[1][i], z[0] * in.c[0][i]));
    if (dim == 2) v = std::fma(-z[3], in.c[3][i], v);
    out[i] = v;
  }
}

template <__m256d (*F)(__m256d)>
void map4(const double* x, double* out, std::size_t n, double pad) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, F(_mm256_loadu_pd(x + i)));
  if (i < n) {
    double tmp[4] = {pad, pad, pad, pad}, res[4];
    for (std::size_t k = 0; i + k < n; ++k) tmp[k] = x[i + k];
    _mm256_storeu_pd(res, F(_mm256_loadu_pd(tmp)));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = res[k];
  }
}

void vlog(const double* x, double* out, std::size_t n) { map4<log4>(x, out, n, 1.0); }
void vexp(const double* x, double* out, std::size_t n) { map4<exp4>(x, out, n, 0.0); }

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable t{lorentz_apply, pow_neg, neg_minkowski, vlog, vexp};
  return &t;
}

}  // namespace kleinian::simd
