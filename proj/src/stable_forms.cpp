#include "g2flow/stable_forms.hpp"

#include <cmath>

namespace g2flow {

KForm phi_std() { return KForm::parse(7, "e127+e347+e567+e135-e146-e236-e245"); }
KForm phihat_std() { return KForm::parse(7, "e1234+e3456+e1256-e2467+e1367+e1457+e2357"); }
KForm omega_std() { return KForm::parse(6, "e12+e34+e56"); }
KForm psi_std() { return KForm::parse(6, "-e246+e136+e145+e235"); }
KForm psi_re_std() { return KForm::parse(6, "e135-e146-e236-e245"); }

Mat b_form(const KForm& phi) {
  if (phi.dim() != 7 || phi.degree() != 3) throw Error(ErrorCode::DegreeError, "b_form expects a 3-form on R^7");
  std::vector<KForm> c;
  for (int i = 1; i <= 7; ++i) c.push_back(contract_basis(i, phi));
  Mat B(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) B(i, j) = B(j, i) = wedge(wedge(c[i], c[j]), phi).top() / 6.0;
  return B;
}

G2Structure g2_from_phi(const KForm& phi) {
  Mat B = b_form(phi);
  double det = B.determinant();
  double scale = std::pow(std::max(B.cwiseAbs().maxCoeff(), 1e-300), 7);
  if (!(std::fabs(det) > 1e-12 * scale)) throw Error(ErrorCode::NotStable, "b_phi is degenerate");
  double v = std::copysign(std::pow(std::fabs(det), 1.0 / 9.0), det);
  G2Structure s;
  s.phi = phi;
  s.metric = B / v;
  Eigen::SelfAdjointEigenSolver<Mat> es(s.metric);
  if (es.eigenvalues().minCoeff() <= 1e-9 * es.eigenvalues().maxCoeff())
    throw Error(ErrorCode::NotPositive, "g_phi is not positive definite");
  s.orientation = v > 0 ? 1 : -1;
  s.vol = KForm(7, 7, Vec::Constant(1, v));
  s.phiHat = hodge_star(s.metric, s.vol, phi);
  s.normSquared = form_inner_product(s.metric, phi, phi);
  return s;
}

G2Structure g2_from_4form(const KForm& phiHat) {
  if (phiHat.dim() != 7 || phiHat.degree() != 4) throw Error(ErrorCode::DegreeError, "expected a 4-form on R^7");
  Mat I = Mat::Identity(7, 7);
  // ⋆ in the coordinate metric turns P*⋆φ_std into a 3-form whose metric is inverse-proportional to g
  G2Structure dual = g2_from_phi(hodge_star(I, volume_form(I), phiHat));
  Mat g = dual.metric.inverse();
  g = 0.5 * (g + g.transpose());
  g *= std::pow(form_inner_product(g, phiHat, phiHat) / 7.0, 0.25);
  G2Structure s = g2_from_phi(hodge_star(g, volume_form(g), phiHat));
  double err = (s.phiHat - phiHat).max_abs();
  if (err > 1e-9 * std::max(1.0, phiHat.max_abs())) throw Error(ErrorCode::NotStable, "4-form is not of G2 type");
  return s;
}

Mat k_operator(const KForm& psi) {
  if (psi.dim() != 6 || psi.degree() != 3) throw Error(ErrorCode::DegreeError, "k_operator expects a 3-form on R^6");
  Mat K(6, 6);
  for (int i = 1; i <= 6; ++i) {
    KForm f = wedge(contract_basis(i, psi), psi);
    for (int j = 1; j <= 6; ++j) K(j - 1, i - 1) = wedge(f, KForm::monomial(6, {j})).top();
  }
  return K;
}

double lambda_of(const KForm& psi) {
  Mat K = k_operator(psi);
  return (K * K).trace() / 6.0;
}

Mat complex_structure(const KForm& psi) {
  Mat K = k_operator(psi);
  double lambda = (K * K).trace() / 6.0;
  double scale = std::pow(std::max(psi.max_abs(), 1e-300), 4);
  if (!(lambda < -1e-14 * scale)) throw Error(ErrorCode::NotNegative, "lambda(psi) is not negative");
  return K / std::sqrt(-lambda);
}

Mat omega_matrix(const KForm& omega) {
  Mat W = Mat::Zero(omega.dim(), omega.dim());
  for (auto [m, c] : omega.terms()) {
    auto idx = mask_indices(m);
    W(idx[0] - 1, idx[1] - 1) = c;
    W(idx[1] - 1, idx[0] - 1) = -c;
  }
  return W;
}

SU3Structure su3_assemble(const KForm& omega, const KForm& psi) {
  if (omega.dim() != 6 || omega.degree() != 2 || psi.dim() != 6 || psi.degree() != 3)
    throw Error(ErrorCode::DegreeError, "su3_assemble expects (2-form, 3-form) on R^6");
  double om3 = wedge(wedge(omega, omega), omega).top();
  if (!(std::fabs(om3) > 1e-12 * std::pow(std::max(omega.max_abs(), 1e-300), 3)))
    throw Error(ErrorCode::DegenerateOmega, "omega^3 vanishes");
  if (wedge(psi, omega).max_abs() > 1e-10 * std::max(1.0, psi.max_abs() * omega.max_abs()))
    throw Error(ErrorCode::NotCompatible, "psi ∧ omega does not vanish");
  SU3Structure s;
  s.omega = omega;
  s.psi = psi;
  s.J = complex_structure(psi);
  s.lambda = lambda_of(psi);
  s.h = omega_matrix(omega) * s.J;
  double asym = (s.h - s.h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, s.h.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotCompatible, "J does not preserve omega");
  s.h = 0.5 * (s.h + s.h.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s.h);
  if (es.eigenvalues().minCoeff() <= 1e-9 * std::fabs(es.eigenvalues().maxCoeff()))
    throw Error(ErrorCode::NotPositive, "h = omega(., J.) is not positive definite");
  KForm jpsi = pullback(s.J, psi);
  s.psiRe = -jpsi;
  double q = wedge(psi, jpsi).top();
  s.normalizationRatio = 3.0 * q / (2.0 * om3);
  s.normalized = std::fabs(s.normalizationRatio - 1.0) <= 1e-10;
  return s;
}

SU3Structure su3_standard() { return su3_assemble(omega_std(), psi_std()); }

KForm hodge6(const SU3Structure& s, const KForm& a) {
  KForm vol = wedge(wedge(s.omega, s.omega), s.omega) * (1.0 / 6.0);
  return hodge_star(s.h, vol, a);
}

G2Pair g2_from_su3(const SU3Structure& s) {
  if (!s.normalized) throw Error(ErrorCode::NotNormalized, "2ω³ = 3ψ∧J*ψ fails");
  KForm e7 = eta7();
  KForm om = lift7(s.omega);
  G2Pair out;
  out.phi = wedge(om, e7) + lift7(s.psiRe);
  out.phiHat = 0.5 * wedge(om, om) + wedge(lift7(s.psi), e7);
  return out;
}

}  // namespace g2flow
