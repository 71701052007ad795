#include "terracini/linalg.hpp"

#include <cmath>

#include "terracini/errors.hpp"

namespace terracini {

namespace {

// Eigen 3.4.0's divide-and-conquer SVD can return wrong singular values when
// many are repeated (tangent-space sums hit this); Jacobi is reliable.
using Svd = Eigen::JacobiSVD<Mat, Eigen::ColPivHouseholderQRPreconditioner>;

void check_ambient(const Subspace& a, const Subspace& b) {
  require(a.ambient_dim() == b.ambient_dim(),
          "subspace ambient dimensions differ: " +
              std::to_string(a.ambient_dim()) + " vs " +
              std::to_string(b.ambient_dim()));
}

// Largest singular value and its right singular vector.
double top_singular(const Mat& m, Vec* right) {
  if (m.cols() == 0 || m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinV);
  if (right) *right = svd.matrixV().col(0);
  return svd.singularValues()(0);
}

}  // namespace

Subspace::Subspace(int ambient_dim, double tol)
    : ambient_(ambient_dim), basis_(ambient_dim, 0), tol_(tol) {
  require(ambient_dim >= 0, "negative ambient dimension");
}

Subspace Subspace::from_orthonormal(Mat basis, double tol) {
  Subspace s(static_cast<int>(basis.rows()), tol);
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::whole(int ambient_dim, double tol) {
  return from_orthonormal(Mat::Identity(ambient_dim, ambient_dim), tol);
}

Subspace Subspace::span(const Mat& columns, double tol) {
  const int n = static_cast<int>(columns.rows());
  if (columns.cols() == 0 || n == 0) return Subspace(n, tol);
  Svd svd(columns, Eigen::ComputeThinU);
  const Vec& sv = svd.singularValues();
  const double smax = sv(0);
  if (!(smax > 0.0)) return Subspace(n, tol);
  int r = 0;
  while (r < sv.size() && sv(r) > tol * smax) ++r;
  return from_orthonormal(svd.matrixU().leftCols(r), tol);
}

Subspace Subspace::span(const std::vector<Vec>& vectors, int ambient_dim,
                        double tol) {
  Mat m(ambient_dim, static_cast<int>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    require(vectors[j].size() == ambient_dim,
            "vector dimension does not match ambient dimension");
    m.col(static_cast<int>(j)) = vectors[j];
  }
  return span(m, tol);
}

Subspace Subspace::complement() const {
  if (dim() == 0) return whole(ambient_, tol_);
  if (dim() == ambient_) return Subspace(ambient_, tol_);
  Eigen::HouseholderQR<Mat> qr(basis_);
  Mat q = qr.householderQ() * Mat::Identity(ambient_, ambient_);
  return from_orthonormal(q.rightCols(ambient_ - dim()), tol_);
}

Vec Subspace::project(const Vec& v) const {
  require(v.size() == ambient_, "projection of vector with wrong dimension");
  if (dim() == 0) return Vec::Zero(ambient_);
  return basis_ * (basis_.transpose() * v);
}

double Subspace::residual(const Vec& v) const { return (v - project(v)).norm(); }

bool Subspace::contains(const Vec& v, double tol) const {
  return residual(v) <= tol * std::max(1.0, v.norm());
}

Subspace orthonormal_basis(const std::vector<Vec>& vectors,
                           std::optional<int> ambient_dim, double tol) {
  if (vectors.empty()) {
    require(ambient_dim.has_value(),
            "empty vector list needs an explicit ambient dimension");
    return Subspace(*ambient_dim, tol);
  }
  const int n = ambient_dim.value_or(static_cast<int>(vectors.front().size()));
  return Subspace::span(vectors, n, tol);
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  Mat m(a.ambient_dim(), a.dim() + b.dim());
  m << a.basis(), b.basis();
  return Subspace::span(m, std::max(a.tol(), b.tol()));
}

Subspace subspace_intersection(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  return subspace_sum(a.complement(), b.complement()).complement();
}

namespace {

// Largest residual of a's basis against b, with the maximizing unit vector.
double one_sided(const Subspace& a, const Subspace& b, Vec* witness) {
  if (a.dim() == 0) return 0.0;
  Mat r = a.basis();
  if (b.dim() > 0) r -= b.basis() * (b.basis().transpose() * a.basis());
  Vec w;
  double s = top_singular(r, &w);
  if (witness) *witness = a.basis() * w;
  return s;
}

}  // namespace

double grassmann_distance(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  return std::max(one_sided(a, b, nullptr), one_sided(b, a, nullptr));
}

EqualityResult subspace_equal(const Subspace& a, const Subspace& b,
                              std::optional<double> tol) {
  check_ambient(a, b);
  const double t = tol.value_or(std::max(a.tol(), b.tol()));
  EqualityResult out;
  Vec wa, wb;
  const double da = one_sided(a, b, &wa);
  const double db = one_sided(b, a, &wb);
  out.distance = std::max(da, db);
  out.equal = out.distance <= t;
  if (!out.equal) {
    Vec w = da >= db ? wa : wb;
    out.certificate = w / w.norm();
  }
  return out;
}

Subspace null_space(const Mat& a, double tol) {
  const int n = static_cast<int>(a.cols());
  if (a.rows() == 0) return Subspace::whole(n, tol);
  Svd svd(a, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  int r = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    while (r < sv.size() && sv(r) > tol * sv(0)) ++r;
  return Subspace::from_orthonormal(svd.matrixV().rightCols(n - r), tol);
}

Subspace row_space(const Mat& a, double tol) {
  return Subspace::span(Mat(a.transpose()), tol);
}

int numerical_rank(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Svd svd(a);
  const Vec& sv = svd.singularValues();
  if (!(sv(0) > 0.0)) return 0;
  int r = 0;
  while (r < sv.size() && sv(r) > tol * sv(0)) ++r;
  return r;
}

int sym_dim(int d) { return d * (d + 1) / 2; }

int sym_side(int n) {
  int d = static_cast<int>(std::lround((std::sqrt(8.0 * n + 1.0) - 1.0) / 2.0));
  require(sym_dim(d) == n, "length " + std::to_string(n) +
                               " is not a triangular number");
  return d;
}

Vec svec(const Mat& x) {
  require(x.rows() == x.cols(), "svec of a non-square matrix");
  const int d = static_cast<int>(x.rows());
  Vec v(sym_dim(d));
  int k = 0;
  for (int i = 0; i < d; ++i) {
    v(k++) = x(i, i);
    for (int j = i + 1; j < d; ++j)
      v(k++) = std::sqrt(2.0) * 0.5 * (x(i, j) + x(j, i));
  }
  return v;
}

Mat smat(const Vec& v, int d) {
  require(v.size() == sym_dim(d), "svec length does not match side");
  Mat x(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) {
    x(i, i) = v(k++);
    for (int j = i + 1; j < d; ++j) {
      x(i, j) = x(j, i) = v(k++) / std::sqrt(2.0);
    }
  }
  return x;
}

Mat smat(const Vec& v) { return smat(v, sym_side(static_cast<int>(v.size()))); }

SymVec::SymVec(int side, Vec c) : d(side), coords(std::move(c)) {
  require(coords.size() == sym_dim(d), "SymVec length does not match side");
}

SymVec SymVec::from_matrix(const Mat& x) {
  return SymVec(static_cast<int>(x.rows()), svec(x));
}

namespace {

Mat split_basis(const Mat& sym, double rel_tol, bool want_kernel) {
  const int d = static_cast<int>(sym.rows());
  if (d == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sym + sym.transpose()));
  const Vec& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < d; ++i) {
    bool zero = !(scale > 0.0) || std::abs(ev(i)) <= rel_tol * scale;
    if (zero == want_kernel) keep.push_back(i);
  }
  Mat out(d, static_cast<int>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    out.col(static_cast<int>(j)) = es.eigenvectors().col(keep[j]);
  return out;
}

}  // namespace

Mat kernel_basis(const Mat& sym, double rel_tol) {
  return split_basis(sym, rel_tol, true);
}

Mat range_basis(const Mat& sym, double rel_tol) {
  return split_basis(sym, rel_tol, false);
}

}  // namespace terracini
