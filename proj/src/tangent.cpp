#include "terracini/tangent.hpp"

#include <algorithm>
#include <cmath>

#include "terracini/errors.hpp"
#include "terracini/families.hpp"
#include "terracini/hyperbolic.hpp"
#include "terracini/veronese.hpp"

namespace terracini {

const char* to_string(VerdictMode m) {
  switch (m) {
    case VerdictMode::primal: return "primal";
    case VerdictMode::dual: return "dual";
    case VerdictMode::dual_sos_certified: return "dual-sos-certified";
    case VerdictMode::dual_inconclusive: return "dual-inconclusive";
  }
  return "unknown";
}

namespace {

// Unchecked polyhedral model over the images of the base generators.
ConeModel image_polyhedral(const ConeModel& c) {
  ConeModel p;
  p.kind = ConeKind::polyhedral;
  p.generators = c.map * c.base->generators;
  return p;
}

Subspace polyhedral_tangent(const ConeModel& c, const Vec& x) {
  FaceDescriptor f = minimal_face(c, x);
  std::vector<Vec> cols;
  for (int j : f.indices) cols.push_back(c.generators.col(j));
  return Subspace::span(cols, c.ambient_dim());
}

// span{Z M Z^T} in svec coordinates.
Subspace psd_face_span(const Mat& z) {
  NegatedFace nf;
  nf.kind = NegatedFace::Kind::psd;
  nf.dim = static_cast<int>(z.rows());
  nf.z = z;
  return nf.span();
}

Subspace psd_tangent(int d, const Vec& x) {
  Mat z = kernel_basis(smat(x, d), 1e-8);
  if (z.cols() == 0) return Subspace::whole(sym_dim(d));
  return psd_face_span(z).complement();
}

Subspace hyperbolic_tangent(const SparsePoly& p, const Vec& e, const Vec& x) {
  Localization loc = localize(p, x);
  if (loc.mult == 0) return Subspace::whole(p.num_vars());
  return lineality_space(loc.poly, e);
}

TerraciniVerdict compare(const Subspace& small, const Subspace& big,
                         VerdictMode mode, bool lhs_is_big) {
  TerraciniVerdict v;
  v.mode = mode;
  v.dim_lhs = lhs_is_big ? big.dim() : small.dim();
  v.dim_rhs = lhs_is_big ? small.dim() : big.dim();
  EqualityResult eq = subspace_equal(small, big);
  v.passed = eq.equal;
  v.distance = eq.distance;
  if (!v.passed && big.dim() > 0) {
    Mat resid = big.basis() - small.basis() * (small.basis().transpose() * big.basis());
    Eigen::JacobiSVD<Mat> svd(resid, Eigen::ComputeThinV);
    Vec cert = big.basis() * svd.matrixV().col(0);
    cert.normalize();
    v.certificate = cert;
    v.certificate_residual = small.residual(cert);
  }
  return v;
}

void require_surjective(const Mat& b) {
  if (numerical_rank(b) != b.rows())
    fail(ErrorKind::domain, "linear map is not surjective");
}

// {lambda : B^T lambda in span(face)}.
Subspace preimage_of_span(const Mat& b, const Subspace& face_span) {
  Subspace comp = face_span.complement();
  if (comp.dim() == 0) return Subspace::whole(static_cast<int>(b.rows()));
  return null_space(Mat(comp.basis().transpose() * b.transpose()));
}

TerraciniVerdict dual_from_face(const Mat& b, const NegatedFace& omega) {
  require_surjective(b);
  Subspace lhs = span_of_normal_preimage(b, omega);
  Subspace rhs = preimage_of_span(b, omega.span());
  return compare(lhs, rhs, VerdictMode::dual, false);
}

NegatedFace orthant_face_avoiding(int dim, const std::vector<bool>& used) {
  NegatedFace nf;
  nf.kind = NegatedFace::Kind::orthant;
  nf.dim = dim;
  for (int i = 0; i < dim; ++i)
    if (!used[i]) nf.support.push_back(i);
  return nf;
}

}  // namespace

Subspace convex_tangent_space(const ConeModel& c, const Vec& x) {
  switch (c.kind) {
    case ConeKind::polyhedral:
      return polyhedral_tangent(c, x);
    case ConeKind::psd:
      if (!membership(c, x, 1e-7)) fail(ErrorKind::domain, "point is not in the cone");
      return psd_tangent(c.side, x);
    case ConeKind::hyperbolicity:
      if (!eigenvalue_membership(c.poly, c.e, x))
        fail(ErrorKind::domain, "point is not in the cone");
      return hyperbolic_tangent(c.poly, c.e, x);
    case ConeKind::linear_image: {
      require(x.size() == c.base->ambient_dim(),
              "linear-image points are given in base coordinates");
      if (c.base->kind == ConeKind::polyhedral)
        return polyhedral_tangent(image_polyhedral(c), c.map * x);
      require_surjective(c.map);
      NegatedFace nf;
      nf.kind = NegatedFace::Kind::psd;
      nf.dim = c.base->side;
      nf.z = kernel_basis(smat(x, nf.dim), 1e-8);
      return span_of_normal_preimage(c.map, nf).complement();
    }
    case ConeKind::veronese: {
      if (c.n != 2)
        fail(ErrorKind::unsupported,
             "tangent spaces of moment cones are computed for n = 2 only; use "
             "the dual checker");
      // Binary moment vectors are exactly the psd Hankel vectors.
      const int m = c.two_d / 2 + 1;
      return hyperbolic_tangent(families::hankel_det(m),
                                families::hankel_direction(m), x);
    }
  }
  return Subspace();
}

TerraciniVerdict is_k_terracini_primal(const ConeModel& c,
                                       const std::vector<Vec>& rays,
                                       bool check_extreme) {
  require(!rays.empty(), "need at least one ray");
  const bool can_check =
      c.kind == ConeKind::polyhedral || c.kind == ConeKind::psd ||
      c.kind == ConeKind::veronese ||
      (c.kind == ConeKind::linear_image && c.base->kind == ConeKind::polyhedral);
  Vec sum = Vec::Zero(rays[0].size());
  std::vector<Subspace> parts;
  for (const Vec& r : rays) {
    if (check_extreme && can_check) {
      const bool extreme = c.kind == ConeKind::linear_image
                               ? is_extreme_ray(image_polyhedral(c), c.map * r)
                               : is_extreme_ray(c, r);
      if (!extreme) fail(ErrorKind::domain, "input is not an extreme-ray generator");
    }
    sum += r;
    parts.push_back(convex_tangent_space(c, r));
  }
  Subspace rhs = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) rhs = subspace_sum(rhs, parts[i]);
  Subspace lhs = convex_tangent_space(c, sum);
  return compare(rhs, lhs, VerdictMode::primal, true);
}

TerraciniVerdict veronese_dual_check(int n, int two_d,
                                     const std::vector<Vec>& points) {
  Subspace rhs = double_vanishing_space(points, n, two_d);
  Subspace lhs = sos_vanishing_span(points, n, two_d);
  TerraciniVerdict v = compare(lhs, rhs, VerdictMode::dual, false);
  if (n >= 3)
    v.mode = v.passed ? VerdictMode::dual_sos_certified : VerdictMode::dual_inconclusive;
  return v;
}

TerraciniVerdict is_k_terracini_dual(const ConeModel& c,
                                     const std::vector<Vec>& rays) {
  require(!rays.empty(), "need at least one ray");
  switch (c.kind) {
    case ConeKind::veronese: {
      std::vector<Vec> zs;
      for (const Vec& r : rays) {
        Vec z;
        if (!veronese_preimage(c.n, c.two_d, r, &z))
          fail(ErrorKind::domain, "ray is not a moment vector phi(z)");
        zs.push_back(z);
      }
      return veronese_dual_check(c.n, c.two_d, zs);
    }
    case ConeKind::polyhedral: {
      const int g = static_cast<int>(c.generators.cols());
      std::vector<bool> used(g, false);
      for (const Vec& r : rays)
        for (int j : minimal_face(c, r).indices) used[j] = true;
      return dual_from_face(c.generators, orthant_face_avoiding(g, used));
    }
    case ConeKind::linear_image: {
      const ConeModel& base = *c.base;
      if (base.kind == ConeKind::psd) {
        Vec sum = Vec::Zero(base.ambient_dim());
        for (const Vec& r : rays) sum += r;
        NegatedFace nf;
        nf.kind = NegatedFace::Kind::psd;
        nf.dim = base.side;
        nf.z = kernel_basis(smat(sum, base.side), 1e-8);
        return dual_from_face(c.map, nf);
      }
      if (!base.orthant)
        fail(ErrorKind::unsupported,
             "dual checks need an orthant or psd base; rewrite the cone as the "
             "image of an orthant under map * generators");
      const int d = base.ambient_dim();
      std::vector<bool> used(d, false);
      for (const Vec& r : rays) {
        const double top = r.cwiseAbs().maxCoeff();
        for (int i = 0; i < d; ++i)
          if (r(i) > 1e-9 * top) used[i] = true;
      }
      return dual_from_face(c.map, orthant_face_avoiding(d, used));
    }
    default:
      fail(ErrorKind::unsupported,
           std::string("no dual checker for ") + to_string(c.kind));
  }
}

Vec sample_extreme_ray(const ConeModel& c, Rng& rng) {
  switch (c.kind) {
    case ConeKind::polyhedral: {
      const int j = rng.uniform_int(0, static_cast<int>(c.generators.cols()) - 1);
      return c.generators.col(j);
    }
    case ConeKind::psd: {
      Vec v = rng.sphere(c.side);
      return svec(v * v.transpose());
    }
    case ConeKind::veronese:
      return veronese_phi(c.n, c.two_d, rng.sphere(c.n));
    case ConeKind::linear_image:
      return sample_extreme_ray(*c.base, rng);
    case ConeKind::hyperbolicity:
      fail(ErrorKind::unsupported,
           "extreme rays of general hyperbolicity cones are not sampled");
  }
  return Vec();
}

UpgradeReport terracini_upgrade_check(const ConeModel& c, int k_max, int samples,
                                      std::uint64_t seed) {
  require(k_max >= 1 && samples >= 1, "k_max and samples must be positive");
  UpgradeReport rep;
  rep.k_max = k_max;
  rep.height = face_height(c);
  Rng rng(seed);
  const bool dual_only = c.kind == ConeKind::veronese && c.n >= 3;
  for (int k = 1; k <= k_max; ++k) {
    int passes = 0;
    for (int s = 0; s < samples; ++s) {
      std::vector<Vec> rays;
      for (int i = 0; i < k; ++i) rays.push_back(sample_extreme_ray(c, rng));
      TerraciniVerdict v = dual_only ? is_k_terracini_dual(c, rays)
                                     : is_k_terracini_primal(c, rays, false);
      passes += v.passed;
    }
    rep.trials.push_back(samples);
    rep.passes.push_back(passes);
    rep.all_pass = rep.all_pass && passes == samples;
  }
  if (!dual_only) {
    auto random_point = [&]() {
      const int m = rng.uniform_int(1, k_max);
      Vec x = sample_extreme_ray(c, rng);
      for (int i = 1; i < m; ++i) x += sample_extreme_ray(c, rng);
      return x;
    };
    for (int s = 0; s < samples; ++s) {
      Vec x = random_point(), y = random_point();
      Subspace joined = subspace_sum(convex_tangent_space(c, x),
                                     convex_tangent_space(c, y));
      ++rep.join_pairs;
      rep.join_matches += subspace_equal(joined, convex_tangent_space(c, x + y)).equal;
    }
  }
  if (c.kind == ConeKind::polyhedral || c.kind == ConeKind::psd) {
    for (int s = 0; s < samples; ++s) {
      std::vector<Vec> pts;
      for (int i = 0; i < k_max + 2; ++i) pts.push_back(sample_extreme_ray(c, rng));
      FaceChainReport fc = chain_reduce(c, pts);
      ++rep.chain_samples;
      rep.max_chain = std::max(rep.max_chain, fc.chain_length);
      rep.chain_bound_holds =
          rep.chain_bound_holds && fc.chain_length <= rep.height - 1;
    }
  }
  return rep;
}

DerivTerraciniReport deriv_terracini_experiment(
    const SparsePoly& p, const Vec& e, const std::vector<Vec>& dirs, int k,
    int trials, std::uint64_t seed, const std::function<Vec(Rng&)>& base_ray) {
  require(k >= 1 && trials >= 0, "k must be positive");
  DerivTerraciniReport rep;
  rep.ell = static_cast<int>(dirs.size());
  rep.k = k;
  if (lineality_space(p, e).dim() != 0)
    fail(ErrorKind::domain, "the base hyperbolicity cone is not pointed");
  SparsePoly q = p;
  for (const Vec& d : dirs) q = derivative_relaxation(q, e, d);
  ConeModel cone = ConeModel::hyperbolicity(q, e, 0);

  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Vec> rays;
    for (int i = 0; i < k; ++i) {
      if (base_ray && rng.uniform() < 0.5) {
        rays.push_back(base_ray(rng));
        ++rep.base_rays_used;
        continue;
      }
      Vec b;
      int tries = 0;
      for (;; ++tries) {
        if (tries >= 100)
          fail(ErrorKind::numerical, "no multiplicity-one boundary point found");
        Vec g = rng.normal_vector(q.num_vars());
        Vec x = g + (1.0 - hyperbolic_eigenvalues(q, e, g).min()) * e;
        b = boundary_point(q, e, x);
        if (hyperbolic_eigenvalues(q, e, b).mult == 1) break;
      }
      rays.push_back(b);
      ++rep.boundary_rays_used;
    }
    ++rep.trials;
    try {
      TerraciniVerdict v = is_k_terracini_primal(cone, rays, false);
      if (v.passed) {
        ++rep.passes;
      } else {
        ++rep.certificate_failures;
        if (rep.failures.size() < 5)
          rep.failures.push_back("trial " + std::to_string(t) + ": dim_lhs " +
                                 std::to_string(v.dim_lhs) + " vs dim_rhs " +
                                 std::to_string(v.dim_rhs));
      }
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::numerical) throw;
      if (rep.failures.size() < 5)
        rep.failures.push_back("trial " + std::to_string(t) + ": " + err.what());
    }
  }
  return rep;
}

}  // namespace terracini
