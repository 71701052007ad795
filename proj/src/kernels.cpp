#include <atomic>

#include "terracini/kernels.hpp"

namespace terracini::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_available(Isa isa) {
  return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2());
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
  current().store(isa_available(isa) ? isa : Isa::scalar);
}

void reset_isa() { current().store(detect()); }

double dot(const double* a, const double* b, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

double weighted_dot(const double* w, const double* a, const double* b,
                    std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::weighted_dot(w, a, b, n)
                                   : scalar::weighted_dot(w, a, b, n);
}

void poly_eval(const double* coefs, const int* exps, std::size_t nterms,
               std::size_t nvars, const double* pts, std::size_t npts,
               double* out) {
  if (active_isa() == Isa::avx2)
    avx2::poly_eval(coefs, exps, nterms, nvars, pts, npts, out);
  else
    scalar::poly_eval(coefs, exps, nterms, nvars, pts, npts, out);
}

}  // namespace terracini::kernels
