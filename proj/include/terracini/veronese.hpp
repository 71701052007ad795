#pragma once

#include <cstdint>
#include <vector>

#include "terracini/cones.hpp"
#include "terracini/linalg.hpp"
#include "terracini/poly.hpp"

// Moment (Veronese) cone tools. Coordinates of degree-2d forms and of
// moment vectors both follow graded_lex_exponents; q(z) = <q, phi(z)>.
namespace terracini {

// Multinomial weights (2d)! / prod(alpha_i!) in graded-lex order.
Vec bombieri_weights(int n, int two_d);
double bombieri_inner(const Vec& u, const Vec& v, int n, int two_d);

struct KwCertificate {
  SparsePoly form;   // degree 2d form vanishing exactly at the given points
  Vec coefficients;  // graded-lex coefficients of form
};
// prod_i (|z|^2 |z_i|^2 - <z, z_i>^2) * |z|^(2(d - k)) for k <= d points.
// Throws numerical-failure if the sampled sign checks do not hold.
KwCertificate kw_certificate_veronese(const std::vector<Vec>& points, int d);

struct GrowthCertificate {
  double mu = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
  double delta = 0.0;
  int num_samples = 0;
  double min_ratio_observed = 0.0;
  double analytic_bound = 0.0;  // growth only
  bool vacuous = false;         // polyhedral: isolated extreme rays
};

GrowthCertificate estimate_growth_constant(const std::vector<Vec>& points, int d,
                                           int n, int num_samples,
                                           double epsilon, std::uint64_t seed);
// Vacuous certificates for polyhedral cones: mu = +inf and nu = 0.
GrowthCertificate polyhedral_growth_certificate();
GrowthCertificate polyhedral_regularity_certificate();

// nu = max over sampled unit z with |phi(z) - phi(z0)|_B <= delta of
// ell(phi(z)) / |phi(z) - phi(z0)|_B^2.
GrowthCertificate estimate_regularity(const Vec& z0, const Vec& ell, int n,
                                      int two_d, int num_samples, double delta,
                                      std::uint64_t seed);

// Forms of degree 2d whose value and gradient vanish at every point.
Subspace double_vanishing_space(const std::vector<Vec>& points, int n, int two_d);
int double_vanishing_dimension(const std::vector<Vec>& points, int n, int two_d);
// span{m(z)^T Q m(z) : Q symmetric, Q m(z_i) = 0}: the span of sums of
// squares vanishing at the points, m the degree-d monomial vector.
Subspace sos_vanishing_span(const std::vector<Vec>& points, int n, int two_d);

// The seven points of R^4 used for the C_{4,4} obstruction.
std::vector<Vec> blekherman_s();

}  // namespace terracini
