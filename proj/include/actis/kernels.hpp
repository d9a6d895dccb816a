#pragma once

#include <cstddef>
#include <string>

// Inner-loop arithmetic kernels. Every operation has a scalar reference
// implementation and, on x86-64 with AVX2+FMA, a vectorized variant. The
// active table is chosen once at startup (cpuid probe, overridable with the
// ACTIS_KERNELS env var) and the variants are equivalence-tested against the
// scalar reference in the test suite.
//
// All matrices are dense row-major doubles. Reduction order is fixed within
// each backend, so a run is bit-reproducible for a given backend choice.

namespace actis::kern {

struct Ops {
  // sum_i a[i]*b[i]
  double (*dot)(std::size_t n, const double* a, const double* b);

  // y = W x + bias, W is rows x cols
  void (*matvec_bias)(std::size_t rows, std::size_t cols, const double* w,
                      const double* bias, const double* x, double* y);

  // out = W^T v, v has length rows, out has length cols
  void (*matvec_t)(std::size_t rows, std::size_t cols, const double* w,
                   const double* v, double* out);

  // W += alpha * u v^T (rank-1 accumulate)
  void (*ger)(std::size_t rows, std::size_t cols, double alpha,
              const double* u, const double* v, double* w);

  // y += a * x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);

  // x *= a
  void (*scale)(std::size_t n, double a, double* x);

  // y[i] = x[i] > 0 ? x[i] : slope*x[i]   (slope in [0,1])
  void (*leaky_relu)(std::size_t n, double slope, const double* x, double* y);

  // gin[i] = gout[i] * (pre[i] > 0 ? 1 : slope)
  void (*leaky_relu_bwd)(std::size_t n, double slope, const double* pre,
                         const double* gout, double* gin);

  // out[i] = |a[i] - b[i]|
  void (*abs_diff)(std::size_t n, const double* a, const double* b, double* out);

  // Fused moment + parameter update for one Rectified Adam step.
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
  //   rectified: p -= step * (m*inv_bc1) / (sqrt(v*inv_bc2) + eps)
  //   otherwise: p -= step * (m*inv_bc1)
  // inv_bc1/inv_bc2 are the precomputed bias corrections 1/(1-b^t) and step
  // already folds the learning rate and the rectification factor.
  void (*radam_update)(std::size_t n, double* p, const double* g, double* m,
                       double* v, double b1, double b2, double inv_bc1,
                       double inv_bc2, double step, double eps, int rectified);
};

enum class Backend { Scalar, Avx2 };

// Table for a specific backend, or nullptr if unavailable on this machine.
const Ops* backend_table(Backend b);

bool backend_available(Backend b);

// Active table. First call resolves ACTIS_KERNELS (auto|scalar|avx2);
// unknown values fall back to auto.
const Ops& ops();

Backend active_backend();
std::string backend_name(Backend b);

// Force the active table (test hook; throws if unavailable).
void force_backend(Backend b);

}  // namespace actis::kern
