#pragma once

#include "g2flow/multilinear.hpp"

namespace g2flow {

/// Standard model forms in the adapted coframe.
KForm phi_std();      // e127+e347+e567+e135-e146-e236-e245
KForm phihat_std();   // ⋆φ_std
KForm omega_std();    // e12+e34+e56
KForm psi_std();      // -e246+e136+e145+e235
KForm psi_re_std();   // Re of (e1+ie2)∧(e3+ie4)∧(e5+ie6)

struct G2Structure {
  KForm phi;
  Mat metric;
  KForm vol;
  KForm phiHat;
  int orientation = 1;    // sign of the ninth root relative to e^{1..7}
  double normSquared = 0; // ‖φ‖² in its own metric, 7 for a genuine G2 form
};

/// b_φ(x,y) as the e^{1..7}-coefficient of (1/6)(x⌟φ)∧(y⌟φ)∧φ.
Mat b_form(const KForm& phi);
G2Structure g2_from_phi(const KForm& phi);
/// Recovers the structure from a 4-form of the type ⋆_φφ, orientation e^{1..7}.
G2Structure g2_from_4form(const KForm& phiHat);

/// K with ((x⌟ψ)∧ψ)∧α = α(Kx)·e^{1..6}.
Mat k_operator(const KForm& psi);
double lambda_of(const KForm& psi);
Mat complex_structure(const KForm& psi);

struct SU3Structure {
  KForm omega;
  KForm psi;
  Mat J;
  Mat h;
  double lambda = 0;
  KForm psiRe;  // -J*ψ
  bool normalized = false;
  /// 3ψ∧J*ψ / 2ω³; equals 1 exactly when normalized.
  double normalizationRatio = 0;
};

SU3Structure su3_assemble(const KForm& omega, const KForm& psi);
SU3Structure su3_standard();
/// Matrix Ω with Ω(i,k) = ω(e_i, e_k).
Mat omega_matrix(const KForm& omega);
/// Hodge star of h with orientation ω³/6.
KForm hodge6(const SU3Structure& s, const KForm& a);

struct G2Pair {
  KForm phi;
  KForm phiHat;
};
G2Pair g2_from_su3(const SU3Structure& s);

}  // namespace g2flow
