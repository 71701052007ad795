#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "terracini/linalg.hpp"
#include "terracini/poly.hpp"
#include "terracini/solver.hpp"

namespace terracini {

enum class ConeKind { polyhedral, psd, linear_image, hyperbolicity, veronese };
const char* to_string(ConeKind k);

// Closed pointed cone in one of five representations. Immutable after
// construction; the factory functions validate their inputs.
struct ConeModel {
  ConeKind kind = ConeKind::polyhedral;

  Mat generators;        // polyhedral: columns
  bool orthant = false;  // polyhedral with the identity as generators
  int side = 0;          // psd: matrix side
  std::shared_ptr<const ConeModel> base;  // linear image
  Mat map;                                // linear image
  SparsePoly poly;  // hyperbolicity
  Vec e;
  int n = 0;  // veronese: variables and degree
  int two_d = 0;

  int ambient_dim() const;

  static ConeModel polyhedral(Mat generators);  // throws if not pointed
  static ConeModel orthant_cone(int d);
  static ConeModel psd(int d);
  static ConeModel linear_image(const ConeModel& base, Mat map);
  // Spot-checks hyperbolicity on num_checks random directions.
  static ConeModel hyperbolicity(SparsePoly p, Vec e, int num_checks = 20);
  static ConeModel veronese(int n, int two_d);
};

// Cone over the square with vertices (+-1, +-1), generators in cyclic order
// (1,1,1), (1,-1,1), (-1,-1,1), (-1,1,1).
ConeModel square_cone();
// Deterministic random pointed cone: generators (1, g) with g Gaussian.
ConeModel random_polyhedral_cone(int ambient, int num_generators,
                                 std::uint64_t seed);

// True iff some linear functional is positive on every generator.
bool is_pointed(const Mat& generators);

struct FaceDescriptor {
  enum class Kind { polyhedral, psd } kind = Kind::polyhedral;
  std::vector<int> indices;  // polyhedral: generators in the face
  Mat z;                     // psd: orthonormal kernel basis, face {X : XZ = 0}
};

// Normal cone at x. Polyhedral: {l : G_i^T l <= 0 (inequality rows),
// G_j^T l = 0 (equality rows)}. Psd: {-Z M Z^T : M psd}. Linear image:
// {lambda : B^T lambda in base normal cone}, described by base + map.
struct NormalCone {
  FaceDescriptor face;
  Mat inequalities;
  Mat equalities;
  Mat map;  // linear image only
  bool orthant = false;
  NegatedFace negated_face() const;  // orthant or psd faces
  Subspace span() const;             // polyhedral and psd
};

// For linear images, x may be given in image coordinates; normal_cone and
// the tangent space of a linear image take a point of the base cone instead
// (any preimage gives the same normal cone).
bool membership(const ConeModel& c, const Vec& x, double tol = 1e-9);
NormalCone normal_cone(const ConeModel& c, const Vec& x);
FaceDescriptor minimal_face(const ConeModel& c, const Vec& x);
bool is_extreme_ray(const ConeModel& c, const Vec& x);

// Height of the face lattice (length of the longest chain of faces).
int face_height(const ConeModel& c);

struct FaceChainReport {
  std::vector<int> indices;  // zero-based
  int chain_length = 0;
  int height = 0;
};
FaceChainReport chain_reduce(const ConeModel& c, const std::vector<Vec>& points);

// True iff y lies in the minimal face of x.
bool in_minimal_face(const ConeModel& c, const Vec& x, const Vec& y);

// Veronese helpers shared by cones, tangent and the moment-cone tools.
std::vector<std::vector<int>> graded_lex_exponents(int n, int degree);
Vec veronese_phi(int n, int two_d, const Vec& z);
// Recovers z with phi(z) = x, if x is a point of the Veronese variety.
bool veronese_preimage(int n, int two_d, const Vec& x, Vec* z);

}  // namespace terracini
