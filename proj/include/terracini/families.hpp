#pragma once

#include "terracini/linalg.hpp"
#include "terracini/poly.hpp"

// Standard hyperbolic polynomials with their hyperbolicity directions.
namespace terracini::families {

SparsePoly product(int n);                     // x1 x2 ... xn
SparsePoly elementary_symmetric(int n, int k);
// Determinant of the symmetric d x d matrix whose upper-triangle entries
// (row by row, same order as svec) are the variables.
SparsePoly sym_det(int d);
// Determinant of the m x m Hankel matrix H_ij = h_{i+j}, variables h_0..h_{2m-2}.
SparsePoly hankel_det(int m);

Vec ones(int n);
Vec identity_entries(int d);  // identity matrix in entry coordinates
// A direction with a positive definite Hankel matrix (moments of a uniform
// measure on [-1, 1]).
Vec hankel_direction(int m);

// Entry coordinates <-> svec coordinates for symmetric matrices.
Vec entries_from_matrix(const Mat& x);
Mat matrix_from_entries(const Vec& v, int d);
Vec entries_to_svec(const Vec& v, int d);
Vec svec_to_entries(const Vec& v, int d);
// Maps a subspace given in entry coordinates to svec coordinates.
Subspace entries_subspace_to_svec(const Subspace& s, int d);

Mat hankel_matrix(const Vec& h);

}  // namespace terracini::families
