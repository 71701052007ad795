// Compiled with -mavx2 -mfma; only reached when the CPU reports AVX2.
#include <immintrin.h>

#include "terracini/kernels.hpp"

namespace terracini::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void poly_eval(const double* coefs, const int* exps, std::size_t nterms,
               std::size_t nvars, const double* pts, std::size_t npts,
               double* out) {
  std::size_t j = 0;
  for (; j + 4 <= npts; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t t = 0; t < nterms; ++t) {
      const int* e = exps + t * nvars;
      __m256d m = _mm256_set1_pd(coefs[t]);
      for (std::size_t i = 0; i < nvars; ++i) {
        if (e[i] == 0) continue;
        const __m256d x = _mm256_loadu_pd(pts + i * npts + j);
        for (int k = 0; k < e[i]; ++k) m = _mm256_mul_pd(m, x);
      }
      acc = _mm256_add_pd(acc, m);
    }
    _mm256_storeu_pd(out + j, acc);
  }
  if (j < npts) {
    // Tail points go through the scalar path on a compacted copy.
    const std::size_t rest = npts - j;
    double buf[4 * 64];
    double tail_out[4];
    if (nvars <= 64) {
      for (std::size_t i = 0; i < nvars; ++i)
        for (std::size_t q = 0; q < rest; ++q)
          buf[i * rest + q] = pts[i * npts + j + q];
      scalar::poly_eval(coefs, exps, nterms, nvars, buf, rest, tail_out);
      for (std::size_t q = 0; q < rest; ++q) out[j + q] = tail_out[q];
    } else {
      for (std::size_t q = 0; q < rest; ++q) {
        double s = 0.0;
        for (std::size_t t = 0; t < nterms; ++t) {
          double m = coefs[t];
          for (std::size_t i = 0; i < nvars; ++i)
            for (int k = 0; k < exps[t * nvars + i]; ++k)
              m *= pts[i * npts + j + q];
          s += m;
        }
        out[j + q] = s;
      }
    }
  }
}

}  // namespace terracini::kernels::avx2
