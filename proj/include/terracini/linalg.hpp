#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace terracini {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kRankTol = 1e-8;

// Linear subspace stored as an orthonormal basis (ambient_dim x dim).
class Subspace {
 public:
  explicit Subspace(int ambient_dim = 0, double tol = kRankTol);

  // Span of the columns; singular values below tol * sigma_max count as zero.
  static Subspace span(const Mat& columns, double tol = kRankTol);
  static Subspace span(const std::vector<Vec>& vectors, int ambient_dim,
                       double tol = kRankTol);
  static Subspace whole(int ambient_dim, double tol = kRankTol);
  // Trusted constructor for an already orthonormal basis.
  static Subspace from_orthonormal(Mat basis, double tol = kRankTol);

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }
  double tol() const { return tol_; }

  Subspace complement() const;
  Vec project(const Vec& v) const;
  // Norm of the component of v orthogonal to the subspace.
  double residual(const Vec& v) const;
  bool contains(const Vec& v, double tol = 1e-8) const;

 private:
  int ambient_;
  Mat basis_;
  double tol_;
};

Subspace orthonormal_basis(const std::vector<Vec>& vectors,
                           std::optional<int> ambient_dim = std::nullopt,
                           double tol = kRankTol);
Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace subspace_intersection(const Subspace& a, const Subspace& b);

struct EqualityResult {
  bool equal = false;
  std::optional<Vec> certificate;  // unit vector in the larger side
  double distance = 0.0;           // largest principal-angle sine
};

EqualityResult subspace_equal(const Subspace& a, const Subspace& b,
                              std::optional<double> tol = std::nullopt);
double grassmann_distance(const Subspace& a, const Subspace& b);

// {x : A x = 0} and the row space of A.
Subspace null_space(const Mat& a, double tol = kRankTol);
Subspace row_space(const Mat& a, double tol = kRankTol);
int numerical_rank(const Mat& a, double tol = kRankTol);

// Symmetric matrices in svec coordinates: upper triangle row by row,
// off-diagonal entries scaled by sqrt(2) so dot products are trace products.
int sym_dim(int d);
int sym_side(int n);  // inverse of sym_dim; throws if n is not triangular
Vec svec(const Mat& x);
Mat smat(const Vec& v);
Mat smat(const Vec& v, int d);

struct SymVec {
  int d = 0;
  Vec coords;

  SymVec() = default;
  SymVec(int side, Vec c);
  static SymVec from_matrix(const Mat& x);
  Mat to_matrix() const { return smat(coords, d); }
  double dot(const SymVec& o) const { return coords.dot(o.coords); }
};

// Symmetric eigen-decomposition helpers.
Mat kernel_basis(const Mat& sym, double rel_tol = kRankTol);
Mat range_basis(const Mat& sym, double rel_tol = kRankTol);

}  // namespace terracini
