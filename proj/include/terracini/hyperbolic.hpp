#pragma once

#include <cstdint>
#include <vector>

#include "terracini/linalg.hpp"
#include "terracini/poly.hpp"

namespace terracini {

struct HyperbolicSpectrum {
  std::vector<double> eigenvalues;  // descending
  int rank = 0;
  int mult = 0;
  double imag_residual = 0.0;  // largest imaginary part that was truncated
  double tau_eig = 0.0;
  double min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
  double max_abs() const;
};

// Coefficients of t -> p(x + t dir), lowest power first, fitted from
// Chebyshev-node samples.
std::vector<double> restrict_univariate(const SparsePoly& p, const Vec& x,
                                        const Vec& dir);

struct SpectrumOptions {
  // Trailing coefficients of the scaled univariate polynomial below this
  // relative size are treated as exact zero roots. Zero disables.
  double zero_deflation = 1e-13;
};

// Roots of t -> p(t e - x).
HyperbolicSpectrum hyperbolic_eigenvalues(const SparsePoly& p, const Vec& e,
                                          const Vec& x,
                                          const SpectrumOptions& opt = {});

struct HyperbolicityCheck {
  bool hyperbolic = true;
  double worst_residual = 0.0;
};
HyperbolicityCheck check_hyperbolic(const SparsePoly& p, const Vec& e,
                                    int num_samples, std::uint64_t seed);

// All coefficients of p(x + t e) nonnegative, within tol relative to the
// largest coefficient of the scaled restriction.
bool descartes_membership(const SparsePoly& p, const Vec& e, const Vec& x,
                          double tol = 1e-9);
bool eigenvalue_membership(const SparsePoly& p, const Vec& e, const Vec& x);

struct Localization {
  SparsePoly poly;
  int mult = 0;
};
Localization localize(const SparsePoly& p, const Vec& x);

Subspace lineality_space(const SparsePoly& q, const Vec& e);

SparsePoly derivative_relaxation(const SparsePoly& p, const Vec& e,
                                 const Vec& etilde);

bool verify_mult3(const SparsePoly& p, const Vec& e, const Vec& etilde,
                  const Vec& x);

struct TangentDerivativeReport {
  int mult = 0;
  bool symbolic_equal = false;
  double coefficient_gap = 0.0;
  int directions = 0;
  int membership_agreements = 0;
  bool lineality_checked = false;
  bool lineality_equal = true;
  double lineality_distance = 0.0;
  bool passed = false;
};
TangentDerivativeReport verify_tangent_derivative(const SparsePoly& p,
                                                  const Vec& e,
                                                  const Vec& etilde,
                                                  const Vec& x, int num_dirs,
                                                  std::uint64_t seed);

struct EigenCurveSample {
  Vec y;
  double h = 0.0;
  std::vector<double> derivatives;   // descending
  std::vector<double> loc_spectrum;  // descending
  double max_discrepancy = 0.0;
};
// h <= 0 picks 1e-5 times the spectral scale of x.
EigenCurveSample eigencurve_derivatives(const SparsePoly& p, const Vec& e,
                                        const Vec& x, const Vec& y,
                                        double h = 0.0);

// Point on the boundary of the hyperbolicity cone reached from the interior
// point x by moving along -e: x shifted by its smallest eigenvalue, then
// corrected until that eigenvalue is below 1e-10 of the spectral scale.
Vec boundary_point(const SparsePoly& p, const Vec& e, const Vec& x);

}  // namespace terracini
