#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "actis/kernels.hpp"

// AVX2+FMA variants, 4 doubles per vector. Lane combination order is fixed,
// so results are reproducible; they may differ from the scalar reference in
// the last bits because partial sums associate differently.

namespace actis::kern {
namespace {

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

double dot_avx2(std::size_t n, const double* a, const double* b) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum4(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_bias_avx2(std::size_t rows, std::size_t cols, const double* w,
                      const double* bias, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = (bias ? bias[r] : 0.0) + dot_avx2(cols, w + r * cols, x);
  }
}

void matvec_t_avx2(std::size_t rows, std::size_t cols, const double* w,
                   const double* v, double* out) {
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) _mm256_storeu_pd(out + c, _mm256_setzero_pd());
  for (; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const __m256d vr = _mm256_set1_pd(v[r]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d o = _mm256_loadu_pd(out + j);
      o = _mm256_fmadd_pd(vr, _mm256_loadu_pd(row + j), o);
      _mm256_storeu_pd(out + j, o);
    }
    for (; j < cols; ++j) out[j] += v[r] * row[j];
  }
}

void ger_avx2(std::size_t rows, std::size_t cols, double alpha, const double* u,
              const double* v, double* w) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = w + r * cols;
    const double au = alpha * u[r];
    const __m256d vau = _mm256_set1_pd(au);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d o = _mm256_loadu_pd(row + c);
      o = _mm256_fmadd_pd(vau, _mm256_loadu_pd(v + c), o);
      _mm256_storeu_pd(row + c, o);
    }
    for (; c < cols; ++c) row[c] += au * v[c];
  }
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d o = _mm256_loadu_pd(y + i);
    o = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), o);
    _mm256_storeu_pd(y + i, o);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(std::size_t n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void leaky_relu_avx2(std::size_t n, double slope, const double* x, double* y) {
  // max(x, slope*x) equals the branchy form for slope in [0,1]
  const __m256d vs = _mm256_set1_pd(slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_max_pd(vx, _mm256_mul_pd(vs, vx)));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_bwd_avx2(std::size_t n, double slope, const double* pre,
                         const double* gout, double* gin) {
  const __m256d vs = _mm256_set1_pd(slope);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    const __m256d f = _mm256_blendv_pd(vs, one, mask);
    _mm256_storeu_pd(gin + i, _mm256_mul_pd(f, _mm256_loadu_pd(gout + i)));
  }
  for (; i < n; ++i) gin[i] = gout[i] * (pre[i] > 0.0 ? 1.0 : slope);
}

void abs_diff_avx2(std::size_t n, const double* a, const double* b,
                   double* out) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_andnot_pd(signmask, d));
  }
  for (; i < n; ++i) out[i] = std::fabs(a[i] - b[i]);
}

void radam_update_avx2(std::size_t n, double* p, const double* g, double* m,
                       double* v, double b1, double b2, double inv_bc1,
                       double inv_bc2, double step, double eps, int rectified) {
  const __m256d vb1 = _mm256_set1_pd(b1);
  const __m256d vb2 = _mm256_set1_pd(b2);
  const __m256d vc1 = _mm256_set1_pd(1.0 - b1);
  const __m256d vc2 = _mm256_set1_pd(1.0 - b2);
  const __m256d vbc1 = _mm256_set1_pd(inv_bc1);
  const __m256d vbc2 = _mm256_set1_pd(inv_bc2);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_fmadd_pd(vb1, mi, _mm256_mul_pd(vc1, gi));
    vi = _mm256_fmadd_pd(vb2, vi, _mm256_mul_pd(vc2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_mul_pd(mi, vbc1);
    __m256d delta;
    if (rectified) {
      const __m256d denom =
          _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vbc2)), veps);
      delta = _mm256_div_pd(_mm256_mul_pd(vstep, mhat), denom);
    } else {
      delta = _mm256_mul_pd(vstep, mhat);
    }
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), delta));
  }
  for (; i < n; ++i) {
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

const Ops& avx2_ops() {
  static const Ops table = {
      dot_avx2,       matvec_bias_avx2,    matvec_t_avx2,
      ger_avx2,       axpy_avx2,           scale_avx2,
      leaky_relu_avx2, leaky_relu_bwd_avx2, abs_diff_avx2,
      radam_update_avx2,
  };
  return table;
}

}  // namespace actis::kern
