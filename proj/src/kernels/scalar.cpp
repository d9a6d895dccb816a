#include <cmath>
#include <cstddef>

#include "actis/kernels.hpp"

// Reference kernels. Deliberately plain loops: these define the semantics the
// vectorized variants are tested against.

namespace actis::kern {
namespace {

double dot_scalar(std::size_t n, const double* a, const double* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_bias_scalar(std::size_t rows, std::size_t cols, const double* w,
                        const double* bias, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = bias ? bias[r] : 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_t_scalar(std::size_t rows, std::size_t cols, const double* w,
                     const double* v, double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const double vr = v[r];
    for (std::size_t c = 0; c < cols; ++c) out[c] += vr * row[c];
  }
}

void ger_scalar(std::size_t rows, std::size_t cols, double alpha,
                const double* u, const double* v, double* w) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = w + r * cols;
    const double au = alpha * u[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += au * v[c];
  }
}

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void leaky_relu_scalar(std::size_t n, double slope, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_bwd_scalar(std::size_t n, double slope, const double* pre,
                           const double* gout, double* gin) {
  for (std::size_t i = 0; i < n; ++i)
    gin[i] = gout[i] * (pre[i] > 0.0 ? 1.0 : slope);
}

void abs_diff_scalar(std::size_t n, const double* a, const double* b,
                     double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i] - b[i]);
}

void radam_update_scalar(std::size_t n, double* p, const double* g, double* m,
                         double* v, double b1, double b2, double inv_bc1,
                         double inv_bc2, double step, double eps,
                         int rectified) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + (1.0 - b1) * gi;
    v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
    const double mhat = m[i] * inv_bc1;
    if (rectified) {
      p[i] -= step * mhat / (std::sqrt(v[i] * inv_bc2) + eps);
    } else {
      p[i] -= step * mhat;
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      dot_scalar,       matvec_bias_scalar,    matvec_t_scalar,
      ger_scalar,       axpy_scalar,           scale_scalar,
      leaky_relu_scalar, leaky_relu_bwd_scalar, abs_diff_scalar,
      radam_update_scalar,
  };
  return table;
}

}  // namespace actis::kern
