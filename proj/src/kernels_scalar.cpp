#include "terracini/kernels.hpp"

namespace terracini::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void poly_eval(const double* coefs, const int* exps, std::size_t nterms,
               std::size_t nvars, const double* pts, std::size_t npts,
               double* out) {
  for (std::size_t j = 0; j < npts; ++j) out[j] = 0.0;
  for (std::size_t t = 0; t < nterms; ++t) {
    const int* e = exps + t * nvars;
    for (std::size_t j = 0; j < npts; ++j) {
      double m = coefs[t];
      for (std::size_t i = 0; i < nvars; ++i) {
        const double x = pts[i * npts + j];
        for (int k = 0; k < e[i]; ++k) m *= x;
      }
      out[j] += m;
    }
  }
}

}  // namespace terracini::kernels::scalar
