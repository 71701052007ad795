#pragma once

#include <cstddef>

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The variant is picked once at runtime from the CPU feature flags.
namespace terracini::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);
// Overrides runtime dispatch; used by the equivalence tests.
void force_isa(Isa isa);
void reset_isa();
bool isa_available(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);

// Evaluates a sparse polynomial at many points.
//   coefs[t], exps[t * nvars + i]: term t is coefs[t] * prod_i x_i^exps[...]
//   pts[i * npts + j]: coordinate i of point j (structure of arrays)
//   out[j]: value at point j
void poly_eval(const double* coefs, const int* exps, std::size_t nterms,
               std::size_t nvars, const double* pts, std::size_t npts,
               double* out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
void poly_eval(const double* coefs, const int* exps, std::size_t nterms,
               std::size_t nvars, const double* pts, std::size_t npts,
               double* out);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n);
void poly_eval(const double* coefs, const int* exps, std::size_t nterms,
               std::size_t nvars, const double* pts, std::size_t npts,
               double* out);
}  // namespace avx2

}  // namespace terracini::kernels
