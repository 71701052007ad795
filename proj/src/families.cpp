#include "terracini/families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "terracini/errors.hpp"

namespace terracini::families {

namespace {

int entry_index(int i, int j, int d) {
  if (i > j) std::swap(i, j);
  // Row-by-row upper triangle.
  return i * d - i * (i - 1) / 2 + (j - i);
}

}  // namespace

SparsePoly product(int n) {
  require(n >= 1, "product polynomial needs at least one variable");
  return SparsePoly::monomial(n, Exponent(n, 1), 1);
}

SparsePoly elementary_symmetric(int n, int k) {
  require(k >= 0 && k <= n, "elementary symmetric degree out of range");
  TermMap t;
  std::vector<int> mask(n, 0);
  std::fill(mask.end() - k, mask.end(), 1);
  do {
    t[Exponent(mask.begin(), mask.end())] = 1;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return SparsePoly(n, std::move(t));
}

SparsePoly sym_det(int d) {
  require(d >= 1, "determinant side must be positive");
  const int n = sym_dim(d);
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  TermMap t;
  do {
    int inversions = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) inversions += perm[i] > perm[j];
    Exponent e(n, 0);
    for (int i = 0; i < d; ++i) e[entry_index(i, perm[i], d)] += 1;
    t[e] += (inversions % 2 ? -1 : 1);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return SparsePoly(n, std::move(t));
}

SparsePoly hankel_det(int m) {
  require(m >= 1, "Hankel side must be positive");
  const int n = 2 * m - 1;
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  TermMap t;
  do {
    int inversions = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) inversions += perm[i] > perm[j];
    Exponent e(n, 0);
    for (int i = 0; i < m; ++i) e[i + perm[i]] += 1;
    t[e] += (inversions % 2 ? -1 : 1);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return SparsePoly(n, std::move(t));
}

Vec ones(int n) { return Vec::Ones(n); }

Vec identity_entries(int d) { return entries_from_matrix(Mat::Identity(d, d)); }

Vec hankel_direction(int m) {
  Vec h = Vec::Zero(2 * m - 1);
  for (int k = 0; k < 2 * m - 1; k += 2) h(k) = 1.0 / (k + 1);
  return h;
}

Vec entries_from_matrix(const Mat& x) {
  const int d = static_cast<int>(x.rows());
  Vec v(sym_dim(d));
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) v(k++) = 0.5 * (x(i, j) + x(j, i));
  return v;
}

Mat matrix_from_entries(const Vec& v, int d) {
  require(v.size() == sym_dim(d), "entry vector length does not match side");
  Mat x(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      x(i, j) = x(j, i) = v(k++);
    }
  return x;
}

Vec entries_to_svec(const Vec& v, int d) {
  return svec(matrix_from_entries(v, d));
}

Vec svec_to_entries(const Vec& v, int d) {
  return entries_from_matrix(smat(v, d));
}

Subspace entries_subspace_to_svec(const Subspace& s, int d) {
  Mat b(sym_dim(d), s.dim());
  for (int j = 0; j < s.dim(); ++j) b.col(j) = entries_to_svec(s.basis().col(j), d);
  return Subspace::span(b, s.tol());
}

Mat hankel_matrix(const Vec& h) {
  require(h.size() % 2 == 1, "Hankel vector must have odd length");
  const int m = static_cast<int>(h.size() + 1) / 2;
  Mat x(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = h(i + j);
  return x;
}

}  // namespace terracini::families
