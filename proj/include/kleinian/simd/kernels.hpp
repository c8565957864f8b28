#pragma once

// Batched inner loops of the orbit walker.  Each kernel has a scalar reference
// and an AVX2/FMA variant; the variant is picked once at startup from cpuid and
// can be pinned with KLEINIAN_SIMD=scalar.

#include <cstddef>

namespace kleinian::simd {

enum class Isa { Scalar, Avx2 };
const char* to_string(Isa isa);

// Structure of arrays for Minkowski vectors.  Index 3 is unused when dim = 1.
struct Block {
  double* c[4];
};
struct ConstBlock {
  const double* c[4];
};

struct KernelTable {
  // out = L * in, L row-major 4x4; dim 1 only touches components 0..2.
  void (*lorentz_apply)(const double* L, ConstBlock in, Block out, std::size_t n, int dim);
  // out[i] = (x[i] + shift)^(-s) = exp(-s log(x[i] + shift)); 0 on underflow.
  void (*pow_neg)(const double* x, double shift, double s, double* out, std::size_t n);
  // out[i] = -<z, Y_i> (Minkowski), i.e. cosh of the distance on the hyperboloid.
  void (*neg_minkowski)(const double* z, ConstBlock in, double* out, std::size_t n, int dim);
  void (*log)(const double* x, double* out, std::size_t n);
  void (*exp)(const double* x, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the binary was built without the AVX2 translation unit
const KernelTable* avx2_kernels();

bool cpu_has_avx2();
Isa active_isa();
const KernelTable& kernels();
// Overrides the automatic choice (tests, benchmarks).  Falls back to scalar if unsupported.
void set_isa(Isa isa);

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if ((sum >= 0 ? sum : -sum) >= (x >= 0 ? x : -x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  void add(const CompensatedSum& o) {
    add(o.sum);
    add(o.comp);
  }
  double value() const { return sum + comp; }
};

}  // namespace kleinian::simd
