#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "terracini/linalg.hpp"

namespace terracini {

using Exponent = std::vector<int>;
using TermMap = std::map<Exponent, mpq_class>;

// Sparse multivariate polynomial with exact rational coefficients. Values
// are immutable; a floating-point copy of the terms is kept for evaluation.
class SparsePoly {
 public:
  SparsePoly() : SparsePoly(0) {}
  explicit SparsePoly(int num_vars);
  SparsePoly(int num_vars, TermMap terms);

  static SparsePoly constant(int num_vars, const mpq_class& c);
  static SparsePoly variable(int num_vars, int index);
  static SparsePoly monomial(int num_vars, const Exponent& e, const mpq_class& c);
  // sum_i v_i x_i with the doubles taken exactly.
  static SparsePoly linear_form(const Vec& v);

  int num_vars() const { return num_vars_; }
  int degree() const { return degree_; }  // -1 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  bool is_homogeneous() const;
  std::size_t num_terms() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }
  mpq_class coefficient(const Exponent& e) const;

  double eval(const Vec& x) const;
  // Points are the columns of pts (num_vars x npts).
  Vec eval_batch(const Mat& pts) const;
  mpq_class eval_exact(const std::vector<mpq_class>& x) const;

  SparsePoly operator+(const SparsePoly& o) const;
  SparsePoly operator-(const SparsePoly& o) const;
  SparsePoly operator*(const SparsePoly& o) const;
  SparsePoly scaled(const mpq_class& c) const;
  SparsePoly pow(int k) const;

  SparsePoly derivative(int var) const;
  SparsePoly directional_derivative(const Vec& v) const;
  // q(y) = p(x + y), expanded exactly.
  SparsePoly shift(const Vec& x) const;
  SparsePoly homogeneous_part(int k) const;
  // Substitutes x_i -> sum_j m(i, j) y_j (m is num_vars x new_vars).
  SparsePoly substitute_linear(const Mat& m) const;
  // Drops terms with |coef| <= rel * max |coef|.
  SparsePoly pruned(double rel) const;

  double max_abs_coef() const;
  std::string to_string() const;

  bool operator==(const SparsePoly& o) const {
    return num_vars_ == o.num_vars_ && terms_ == o.terms_;
  }

 private:
  void finalize();

  int num_vars_ = 0;
  int degree_ = -1;
  TermMap terms_;
  std::vector<double> fcoefs_;
  std::vector<int> fexps_;
};

// Parses "2 x1^2 x3 - x2 x3^2" style text. Variables are x1..xn (1-based).
// num_vars = 0 infers the count from the largest index.
SparsePoly parse_poly(const std::string& text, int num_vars = 0);

// Quadratic form matrix: q(x) = x^T A x for a homogeneous quadratic.
Mat quadratic_form_matrix(const SparsePoly& q);
// Coefficient vector of a homogeneous linear form.
Vec linear_form_vector(const SparsePoly& q);

mpq_class exact(double v);
long double factorial(int n);

}  // namespace terracini
