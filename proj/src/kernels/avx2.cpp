// Compiled with -mavx2 -mfma. Nothing in this file may run before dispatch has
// confirmed CPU support.

#include <immintrin.h>

#include <cstddef>
#include <vector>

#include "tables.hpp"

namespace ratgraph::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, xi, _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, xi, _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void rank2_update(double* w, double f, const double* e, double g,
                  const double* d, std::size_t n) {
  const __m256d vf = _mm256_set1_pd(f);
  const __m256d vg = _mm256_set1_pd(g);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d upd =
        _mm256_fmadd_pd(vf, _mm256_loadu_pd(e + i), _mm256_mul_pd(vg, _mm256_loadu_pd(d + i)));
    _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(w + i), upd));
  }
  for (; i < n; ++i) w[i] -= f * e[i] + g * d[i];
}

void horner(const double* coeffs, std::size_t ncoeffs, const double* t,
            double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d vt = _mm256_loadu_pd(t + j);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = ncoeffs; k-- > 0;)
      acc = _mm256_fmadd_pd(acc, vt, _mm256_set1_pd(coeffs[k]));
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = ncoeffs; k-- > 0;) acc = acc * t[j] + coeffs[k];
    out[j] = acc;
  }
}

void power_sums(const double* w, const double* t, std::size_t n, double* sums,
                std::size_t nsums) {
  // Lane accumulators live in plain doubles, four per power.
  std::vector<double> acc(4 * nsums, 0.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d vt = _mm256_loadu_pd(t + j);
    __m256d p = _mm256_loadu_pd(w + j);
    for (std::size_t k = 0; k < nsums; ++k) {
      double* a = acc.data() + 4 * k;
      _mm256_storeu_pd(a, _mm256_add_pd(_mm256_loadu_pd(a), p));
      p = _mm256_mul_pd(p, vt);
    }
  }
  for (std::size_t k = 0; k < nsums; ++k) sums[k] = hsum(_mm256_loadu_pd(acc.data() + 4 * k));
  for (; j < n; ++j) {
    double p = w[j];
    for (std::size_t k = 0; k < nsums; ++k) {
      sums[k] += p;
      p *= t[j];
    }
  }
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::kAvx2,  dot,    axpy,       rotate,
                                 rank2_update, horner, power_sums, squared_distance};
  return table;
}

}  // namespace ratgraph::kernels::detail
