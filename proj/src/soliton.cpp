#include "g2flow/soliton.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace g2flow {

Mat sigma_model(const std::array<double, 3>& s, double theta) {
  double a = std::cos(theta), b = std::sin(theta);
  double q[3] = {s[1] * s[2], s[0] * s[2], s[0] * s[1]};
  Mat M = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    M(2 * i, 2 * i) = -2.0 * q[i] + 4.0 * a * a * q[i];
    M(2 * i, 2 * i + 1) = M(2 * i + 1, 2 * i) = -4.0 * a * b * q[i];
    M(2 * i + 1, 2 * i + 1) = 2.0 * q[i] - 4.0 * a * a * q[i];
  }
  return M;
}

SigmaLambda sigma_lambda(const NormalFormData& nf, double l) {
  SigmaLambda out{Mat::Zero(7, 7), Mat::Zero(7, 7)};
  out.Sigma.topLeftCorner(6, 6) = nf.frame * sigma_model(nf.s, nf.theta) * nf.frame.inverse();
  out.Sigma(6, 6) = -(nf.s[0] * nf.s[0] + nf.s[1] * nf.s[1] + nf.s[2] * nf.s[2]);
  out.Lambda(6, 6) = -l * l;
  return out;
}

namespace {

Mat pad7(const Mat& M) {
  Mat P = Mat::Zero(7, 7);
  P.topLeftCorner(6, 6) = M;
  return P;
}

}  // namespace

Mat x_operator(double eps, const SigmaLambda& sl, const Mat& S, const Mat& L) {
  return -(eps * eps) * (sl.Sigma + sl.Lambda - pad7(bracket(S, L)));
}

XOperatorResult x_operator(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p) {
  XOperatorResult r;
  ReducedState st = make_state(0.0, p, omega0);
  r.eps = st.eps;
  SU3Structure su3 = su3_assemble(omega0, st.eps * p);
  r.split = symmetric_skew_split(alg.A, su3.h);
  r.nf = adapted_frame_for_S(alg.A, su3);
  r.sl = sigma_lambda(r.nf, r.nf.l);
  r.X = x_operator(r.eps, r.sl, r.split.S, r.split.L);
  KForm lhs = wedge(lift7(reduced_rhs(alg, omega0, p)), eta7());
  KForm rhs = theta_action(r.X, lift_to_4form(p, omega0));
  r.identityResidual = (lhs - rhs).max_abs();
  double scale = std::max(1.0, r.eps * r.eps * alg.A.squaredNorm() * p.max_abs());
  if (r.identityResidual > 1e-9 * scale) throw Error(ErrorCode::IdentityViolation, "ϑ(X)φ̂ identity fails");
  return r;
}

const char* soliton_class_name(SolitonClass c) {
  switch (c) {
    case SolitonClass::Expanding: return "expanding";
    case SolitonClass::Steady: return "steady";
    case SolitonClass::Shrinking: return "shrinking";
    case SolitonClass::NotSoliton: return "notSoliton";
  }
  return "unknown";
}

double h_norm(const Mat& X, const Mat& h) {
  double v = (h.ldlt().solve(X.transpose() * h) * X).trace();
  return std::sqrt(std::max(0.0, v));
}

double derivation_check(const Mat& D, const AlmostAbelianAlgebra& alg) {
  if (D.rows() != 7 || D.cols() != 7) throw Error(ErrorCode::DimensionMismatch, "D must be 7x7");
  double sum = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) {
      Vec x = Vec::Unit(7, i), y = Vec::Unit(7, j);
      Vec r = D * alg.bracket(x, y) - alg.bracket(D * x, y) - alg.bracket(x, D * y);
      sum += r.squaredNorm();
    }
  return std::sqrt(sum);
}

std::pair<double, double> self_similar_interval(double c) {
  double inf = std::numeric_limits<double>::infinity();
  if (c > 0) return {-inf, 1.0 / (2.0 * c)};
  if (c < 0) return {1.0 / (2.0 * c), inf};
  return {-inf, inf};
}

KForm self_similar(double c, const Mat& D, const KForm& phiHat0, double t) {
  auto [lo, hi] = self_similar_interval(c);
  if (!(t > lo && t < hi)) throw Error(ErrorCode::OutOfDomain, "t outside the existence interval");
  double ct = 1.0, f = t;
  if (c != 0) {
    double x = 1.0 - 2.0 * c * t;
    ct = x * x;
    f = -std::log(x) / (2.0 * c);
  }
  Mat P = (-f * D).exp();
  return ct * pullback(P, phiHat0);
}

SolitonReport soliton_residual(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, double tol) {
  SolitonReport r;
  const Mat& A = alg.A;
  const Mat& h = su3.h;
  double anorm = h_norm(A, h);
  r.tolerance = tol > 0 ? tol : 1e-9 * std::max(1.0, anorm * anorm);
  if (anorm == 0.0) {
    r.zeroBracket = true;
    r.normal = true;
    r.cls = SolitonClass::Steady;
    r.eigenform = true;
    r.existenceInterval = self_similar_interval(0.0);
    return r;
  }
  double eps = epsilon_of(su3.psi, su3.omega);
  SymSkew sl = symmetric_skew_split(A, h);
  r.normal = normality_residual(A, h) <= 1e-9 * std::max(1.0, anorm * anorm);
  NormalFormData nf = r.normal ? adapted_frame(A, su3) : adapted_frame_for_S(A, su3);
  SigmaLambda sig = sigma_lambda(nf, nf.l);
  Mat Sigma = sig.Sigma.topLeftCorner(6, 6);

  Mat N = -Sigma + bracket(sl.S, sl.L);
  Mat M = bracket(N, A);
  auto hdot = [&](const Mat& X, const Mat& Y) { return (h.ldlt().solve(X.transpose() * h) * Y).trace(); };
  r.delta = hdot(M, A) / hdot(A, A);
  r.residual = h_norm(M - r.delta * A, h);
  double a1 = h_norm(bracket(N, sl.L) - r.delta * sl.S, h);
  double a2 = h_norm(bracket(N, sl.S) - r.delta * sl.L, h);
  r.splitResidual = std::sqrt(a1 * a1 + a2 * a2);

  r.lSquared = nf.l * nf.l;
  r.sSquared = nf.s[0] * nf.s[0] + nf.s[1] * nf.s[1] + nf.s[2] * nf.s[2];
  r.c = r.lSquared + r.sSquared - r.delta;
  r.sigmaS = sigma_s_coefficient(nf.s, nf.theta);
  r.sigmaLCommutator = h_norm(bracket(Sigma, sl.L), h);
  r.X0 = x_operator(eps, sig, sl.S, sl.L);
  r.D = r.X0 - r.c * Mat::Identity(7, 7);
  r.derivationResidual = derivation_check(r.D, alg);

  bool accepted = r.residual < r.tolerance && r.derivationResidual < r.tolerance;
  if (!accepted) {
    r.cls = SolitonClass::NotSoliton;
    return r;
  }
  if (r.c > r.tolerance) {
    r.cls = SolitonClass::Shrinking;
  } else if (r.c < -r.tolerance) {
    r.cls = SolitonClass::Expanding;
  } else {
    r.cls = SolitonClass::Steady;
  }
  r.eigenform = r.D.norm() < r.tolerance;
  r.existenceInterval = self_similar_interval(r.cls == SolitonClass::Steady ? 0.0 : r.c);
  return r;
}

double soliton_3form_check(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, const SolitonReport& r) {
  KForm phiHat = lift_to_4form(su3.psi, su3.omega);
  Mat g = state_metric(make_state(0.0, su3.psi, su3.omega));
  KForm res = -laplacian(alg, g, phiHat) + 4.0 * r.c * phiHat - theta_action(r.D, phiHat);
  return res.max_abs();
}

}  // namespace g2flow
