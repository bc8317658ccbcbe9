#pragma once

#include "g2flow/stable_forms.hpp"

namespace g2flow {

/// g = R e7 ⋉_A h with h = span(e1..e6) abelian and [e7, v] = Av.
struct AlmostAbelianAlgebra {
  Mat A = Mat::Zero(6, 6);

  AlmostAbelianAlgebra() = default;
  explicit AlmostAbelianAlgebra(Mat a);
  bool nilpotent(double tol = 1e-10) const;
  /// ad_{e7} as an endomorphism of R^7.
  Mat ad_e7() const;
  /// Bracket of two vectors of R^7.
  Vec bracket(const Vec& x, const Vec& y) const;
};

/// a = part0 + part1 ∧ η with part0, part1 living on h.
struct InvariantFormDecomposition {
  KForm part0;  // degree k, no e7
  KForm part1;  // degree k-1
};

InvariantFormDecomposition decompose(const KForm& a7);
KForm reassemble(const InvariantFormDecomposition& d);

KForm differential(const AlmostAbelianAlgebra& alg, const KForm& a);
/// Matrix of d : Λ^k → Λ^{k+1} on R^7.
Mat differential_matrix(const AlmostAbelianAlgebra& alg, int k);
/// Formal adjoint of d under the metric g.
KForm codifferential(const AlmostAbelianAlgebra& alg, const Mat& g, const KForm& a);
/// (-1)^{n(k+1)+1} ⋆d⋆; agrees with codifferential when tr A = 0.
KForm codifferential_star(const AlmostAbelianAlgebra& alg, const Mat& g, const KForm& a);
KForm laplacian(const AlmostAbelianAlgebra& alg, const Mat& g, const KForm& a);

double coclosed_residual(const AlmostAbelianAlgebra& alg, const KForm& omega0);
bool coclosed_check(const AlmostAbelianAlgebra& alg, const KForm& omega0, double tol = 1e-10);

/// ω = e7⌟φ, ψ = -e7⌟φ̂ restricted to h; requires e7 ⊥ h and |e7| = 1.
SU3Structure su3_reduce(const KForm& phi, const KForm& phiHat);

struct AdaptedAlgebra {
  AlmostAbelianAlgebra alg;
  Mat basis;  // columns: new basis in old coordinates
  KForm phi;  // φ expressed in the new basis
};
/// Replaces e7 by the unit normal to h and rescales A accordingly.
AdaptedAlgebra adapt_frame(const AlmostAbelianAlgebra& alg, const KForm& phi);

/// h-adjoint h⁻¹Aᵀh.
Mat h_adjoint(const Mat& A, const Mat& h);
/// ‖⋆ϑ(A)⋆a + (-1)^{k(6-k)}(ϑ(B)a + tr(A)a)‖; for 3-forms and tr A = 0 this is ‖⋆ϑ(A)⋆a - ϑ(B)a‖.
double adjoint_identity_check(const Mat& A, const Mat& h, const KForm& a);

}  // namespace g2flow
