#include "g2flow/almost_abelian.hpp"

#include <cmath>

namespace g2flow {

AlmostAbelianAlgebra::AlmostAbelianAlgebra(Mat a) : A(std::move(a)) {
  if (A.rows() != 6 || A.cols() != 6) throw Error(ErrorCode::DimensionMismatch, "A must be 6x6");
  if (!A.allFinite()) throw Error(ErrorCode::Parse, "A has non-finite entries");
}

bool AlmostAbelianAlgebra::nilpotent(double tol) const {
  Mat P = Mat::Identity(6, 6);
  for (int i = 0; i < 6; ++i) P = P * A;
  return P.cwiseAbs().maxCoeff() <= tol * std::max(1.0, std::pow(A.cwiseAbs().maxCoeff(), 6));
}

Mat AlmostAbelianAlgebra::ad_e7() const {
  Mat D = Mat::Zero(7, 7);
  D.topLeftCorner(6, 6) = A;
  return D;
}

Vec AlmostAbelianAlgebra::bracket(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(7);
  out.head(6) = x[6] * (A * y.head(6)) - y[6] * (A * x.head(6));
  return out;
}

InvariantFormDecomposition decompose(const KForm& a7) {
  if (a7.dim() != 7) throw Error(ErrorCode::DimensionMismatch, "decompose expects a form on R^7");
  int k = a7.degree();
  InvariantFormDecomposition d{k <= 6 ? KForm(6, k) : KForm(6, 6), k >= 1 ? KForm(6, k - 1) : KForm(6, 0)};
  for (auto [m, c] : a7.terms()) {
    if (m & 0x40) {
      // e^{I7} = e^I ∧ e7 with I sorted, so no sign
      d.part1.set(m & 0x3f, c);
    } else {
      d.part0.set(m, c);
    }
  }
  return d;
}

KForm reassemble(const InvariantFormDecomposition& d) {
  int k = d.part1.degree() + 1;
  KForm out = wedge(lift7(d.part1), eta7());
  if (k <= 6) out += lift7(d.part0);
  return out;
}

KForm differential(const AlmostAbelianAlgebra& alg, const KForm& a) {
  if (a.dim() != 7) throw Error(ErrorCode::DimensionMismatch, "differential acts on forms on R^7");
  if (a.degree() == 7) throw Error(ErrorCode::DegreeError, "no forms of degree 8");
  KForm a0 = restrict6(a);
  return wedge(eta7(), lift7(theta_action(alg.A, a0)));
}

Mat differential_matrix(const AlmostAbelianAlgebra& alg, int k) {
  int N = binomial(7, k);
  Mat D(binomial(7, k + 1), N);
  for (int r = 0; r < N; ++r) {
    KForm e(7, k);
    e.coeffs()[r] = 1.0;
    D.col(r) = differential(alg, e).coeffs();
  }
  return D;
}

KForm codifferential(const AlmostAbelianAlgebra& alg, const Mat& g, const KForm& a) {
  int k = a.degree();
  if (a.dim() != 7) throw Error(ErrorCode::DimensionMismatch, "codifferential acts on forms on R^7");
  if (k < 1) throw Error(ErrorCode::DegreeError, "codifferential of a 0-form");
  Mat D = differential_matrix(alg, k - 1);
  Vec rhs = D.transpose() * (gram(g, k) * a.coeffs());
  return KForm(7, k - 1, gram(g, k - 1).ldlt().solve(rhs));
}

KForm codifferential_star(const AlmostAbelianAlgebra& alg, const Mat& g, const KForm& a) {
  int k = a.degree();
  if (k < 1) throw Error(ErrorCode::DegreeError, "codifferential of a 0-form");
  KForm vol = volume_form(g);
  KForm r = hodge_star(g, vol, differential(alg, hodge_star(g, vol, a)));
  return ((7 * (k + 1) + 1) % 2 ? -1.0 : 1.0) * r;
}

KForm laplacian(const AlmostAbelianAlgebra& alg, const Mat& g, const KForm& a) {
  int k = a.degree();
  KForm out(7, k);
  if (k >= 1) out += differential(alg, codifferential(alg, g, a));
  if (k <= 6) out += codifferential(alg, g, differential(alg, a));
  return out;
}

double coclosed_residual(const AlmostAbelianAlgebra& alg, const KForm& omega0) {
  return theta_action(alg.A, omega0).max_abs();
}

bool coclosed_check(const AlmostAbelianAlgebra& alg, const KForm& omega0, double tol) {
  if (omega0.dim() != 6 || omega0.degree() != 2) throw Error(ErrorCode::DegreeError, "omega0 must be a 2-form on R^6");
  double om3 = wedge(wedge(omega0, omega0), omega0).top();
  if (!(std::fabs(om3) > 1e-12 * std::pow(std::max(omega0.max_abs(), 1e-300), 3)))
    throw Error(ErrorCode::DegenerateOmega, "omega0 is degenerate");
  return coclosed_residual(alg, omega0) <= tol * std::max(1.0, alg.A.cwiseAbs().maxCoeff() * omega0.max_abs());
}

SU3Structure su3_reduce(const KForm& phi, const KForm& phiHat) {
  G2Structure g2 = g2_from_phi(phi);
  double off = g2.metric.block(6, 0, 1, 6).cwiseAbs().maxCoeff();
  if (off > 1e-10 || std::fabs(g2.metric(6, 6) - 1.0) > 1e-10)
    throw Error(ErrorCode::FrameNotAdapted, "e7 is not a unit normal to h");
  KForm omega = restrict6(contract_basis(7, phi));
  KForm psi = -restrict6(contract_basis(7, phiHat));
  return su3_assemble(omega, psi);
}

AdaptedAlgebra adapt_frame(const AlmostAbelianAlgebra& alg, const KForm& phi) {
  Mat g = g2_from_phi(phi).metric;
  Mat ghh = g.topLeftCorner(6, 6);
  Vec gh7 = g.block(0, 6, 6, 1);
  Vec u = ghh.ldlt().solve(gh7);
  double n = std::sqrt(g(6, 6) - gh7.dot(u));
  AdaptedAlgebra out;
  out.basis = Mat::Identity(7, 7);
  out.basis.block(0, 6, 6, 1) = -u / n;
  out.basis(6, 6) = 1.0 / n;
  out.alg = AlmostAbelianAlgebra(alg.A / n);
  out.phi = pullback(out.basis, phi);
  return out;
}

Mat h_adjoint(const Mat& A, const Mat& h) { return h.ldlt().solve(A.transpose() * h); }

double adjoint_identity_check(const Mat& A, const Mat& h, const KForm& a) {
  int n = a.dim();
  int k = a.degree();
  KForm vol = volume_form(h);
  Mat B = h_adjoint(A, h);
  KForm lhs = hodge_star(h, vol, theta_action(A, hodge_star(h, vol, a)));
  double s = (k * (n - k)) % 2 ? -1.0 : 1.0;
  KForm r = lhs + s * (theta_action(B, a) + A.trace() * a);
  return r.max_abs();
}

}  // namespace g2flow
