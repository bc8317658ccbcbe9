#include "g2flow/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "g2flow/almost_abelian.hpp"

namespace g2flow {

SymSkew symmetric_skew_split(const Mat& A, const Mat& h) {
  require_positive_definite(h);
  Mat Ad = h_adjoint(A, h);
  return {0.5 * (A + Ad), 0.5 * (A - Ad)};
}

AnticommutationResiduals anticommutation_check(const Mat& S, const Mat& L, const Mat& J) {
  return {(S * J + J * S).norm(), (L * J - J * L).norm()};
}

Mat normal_form_S(const std::array<double, 3>& s, double theta) {
  Mat S = Mat::Zero(6, 6);
  double a = std::cos(theta), b = std::sin(theta);
  for (int i = 0; i < 3; ++i) {
    S(2 * i, 2 * i) = a * s[i];
    S(2 * i + 1, 2 * i) = b * s[i];
    S(2 * i, 2 * i + 1) = b * s[i];
    S(2 * i + 1, 2 * i + 1) = -a * s[i];
  }
  return S;
}

Mat J0() {
  Mat J = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    J(2 * i + 1, 2 * i) = 1.0;
    J(2 * i, 2 * i + 1) = -1.0;
  }
  return J;
}

Mat rotation_Q(double alpha) {
  return std::cos(alpha) * Mat::Identity(6, 6) + std::sin(alpha) * J0();
}

double sigma_s_coefficient(const std::array<double, 3>& s, double theta) {
  double a = std::cos(theta), b = std::sin(theta);
  return 4.0 * b * (1.0 - 4.0 * a * a) * s[0] * s[1] * s[2];
}

double NormalFormResiduals::max() const { return std::max({orthonormality, omega, psi, S, L, LJ}); }

double normality_residual(const Mat& A, const Mat& h) {
  Mat Ad = h_adjoint(A, h);
  return (A * Ad - Ad * A).norm();
}

namespace {

double hdot(const Mat& h, const Vec& x, const Vec& y) { return x.dot(h * y); }

// Appends J-complex orthonormal lines (v, Jv) from the candidate columns.
void complex_gram_schmidt(const Mat& cand, const Mat& h, const Mat& J, std::vector<Vec>& lines, int want) {
  std::vector<Vec> chosen;
  for (int c = 0; c < cand.cols() && static_cast<int>(chosen.size()) < want; ++c) {
    Vec v = cand.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& e : chosen) {
        Vec je = J * e;
        v -= hdot(h, e, v) * e + hdot(h, je, v) * je;
      }
    double n = std::sqrt(hdot(h, v, v));
    if (n < 1e-6) continue;
    chosen.push_back(v / n);
  }
  for (auto& e : chosen) lines.push_back(e);
}

NormalFormData build(const Mat& A, const SU3Structure& su3, bool normal) {
  const Mat& h = su3.h;
  const Mat& J = su3.J;
  SymSkew sl = symmetric_skew_split(A, h);
  // relative to A, so that an S made of rounding noise counts as zero
  double groupTol = 1e-8 * std::max(A.norm(), 1e-300);

  Mat hS = h * sl.S;
  hS = 0.5 * (hS + hS.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(hS, h);
  Vec ev = ges.eigenvalues();
  Mat V = ges.eigenvectors();

  // eigenvalues come ascending; walk from the top for positive groups
  std::vector<Vec> lines;
  std::vector<double> lineS;
  NormalFormData out;
  int i = 5;
  while (i >= 0 && ev[i] > groupTol) {
    int j = i;
    while (j - 1 >= 0 && std::fabs(ev[j - 1] - ev[i]) <= groupTol) --j;
    double mean = ev.segment(j, i - j + 1).mean();
    for (int c = i; c >= j; --c) {
      Vec e = V.col(c);
      e /= std::sqrt(hdot(h, e, e));
      lines.push_back(e);
      lineS.push_back(mean);
    }
    out.groupSizes.push_back(i - j + 1);
    i = j - 1;
  }
  int positiveLines = static_cast<int>(lines.size());
  // kernel of S
  std::vector<int> zeroIdx;
  for (int c = 0; c < 6; ++c)
    if (std::fabs(ev[c]) <= groupTol) zeroIdx.push_back(c);
  int zeroDim = static_cast<int>(zeroIdx.size());
  if (2 * positiveLines + zeroDim != 6 || zeroDim % 2)
    throw Error(ErrorCode::NotInSp, "spectrum of S is not symmetric under J");
  if (zeroDim > 0) {
    Mat K(6, zeroDim);
    for (int c = 0; c < zeroDim; ++c) K.col(c) = V.col(zeroIdx[c]);
    Mat cand = K;
    if (normal) {
      Mat M = K.transpose() * h * (J * sl.L) * K;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
      cand = K * es.eigenvectors();
    }
    std::size_t before = lines.size();
    complex_gram_schmidt(cand, h, J, lines, zeroDim / 2);
    if (static_cast<int>(lines.size() - before) != zeroDim / 2)
      throw Error(ErrorCode::NotInSp, "kernel of S is not J-invariant");
    for (int c = 0; c < zeroDim / 2; ++c) lineS.push_back(0.0);
    out.groupSizes.push_back(zeroDim / 2);
  }

  Mat F(6, 6);
  for (int r = 0; r < 3; ++r) {
    F.col(2 * r) = lines[r];
    F.col(2 * r + 1) = J * lines[r];
    out.s[r] = lineS[r];
  }

  KForm psiF = pullback(F, su3.psi);
  std::complex<double> zeta(psiF.coeffs().dot(psi_std().coeffs()) / 4.0,
                            psiF.coeffs().dot(psi_re_std().coeffs()) / 4.0);
  out.zetaModulus = std::abs(zeta);
  out.cubeRootArg = -std::arg(zeta) / 3.0;
  F = F * rotation_Q(out.cubeRootArg);
  out.frame = F;

  Mat Finv = F.inverse();
  out.Smodel = Finv * sl.S * F;
  out.Lmodel = Finv * sl.L * F;
  out.theta = 0.0;
  if (out.s[0] > groupTol) {
    double th = std::atan2(out.Smodel(1, 0), out.Smodel(0, 0));
    out.theta = th < 0 ? th + 2.0 * std::numbers::pi : th;
  }
  out.l = -0.5 * (J * sl.L).trace();
  if (positiveLines == 0) {
    std::array<double, 3> lj{};
    for (int r = 0; r < 3; ++r) lj[r] = out.Lmodel(2 * r + 1, 2 * r);
    out.lPerLine = lj;
  }
  int start = 0;
  for (int g : out.groupSizes) {
    Mat blk(g, g);
    for (int a = 0; a < g; ++a)
      for (int b = 0; b < g; ++b) blk(a, b) = out.Lmodel(2 * (start + a), 2 * (start + b));
    out.Lblocks.push_back(blk);
    start += g;
  }

  NormalFormResiduals& r = out.residuals;
  r.orthonormality = (F.transpose() * h * F - Mat::Identity(6, 6)).norm();
  r.omega = (pullback(F, su3.omega) - omega_std()).norm();
  r.psi = (pullback(F, su3.psi) - out.zetaModulus * psi_std()).norm();
  r.S = (out.Smodel - normal_form_S(out.s, out.theta)).norm();
  r.LJ = (out.Lmodel * J0() - J0() * out.Lmodel).norm();
  if (normal) {
    // L keeps each eigenvalue group; zero out the within-group blocks and measure what is left
    Mat rest = out.Lmodel;
    int st = 0;
    for (int g : out.groupSizes) {
      rest.block(2 * st, 2 * st, 2 * g, 2 * g).setZero();
      st += g;
    }
    r.L = rest.norm() + (out.Lmodel * out.Smodel - out.Smodel * out.Lmodel).norm();
  }
  double scale = std::max(1.0, A.norm());
  if (r.max() > 1e-8 * scale)
    throw Error(ErrorCode::IdentityViolation,
                "normal form verification failed (orthonormality " + std::to_string(r.orthonormality) + ", omega " +
                    std::to_string(r.omega) + ", psi " + std::to_string(r.psi) + ", S " + std::to_string(r.S) + ", L " +
                    std::to_string(r.L) + ", LJ " + std::to_string(r.LJ) + ")");
  return out;
}

}  // namespace

NormalFormData adapted_frame(const Mat& A, const SU3Structure& su3) {
  double scale = std::max(1.0, A.norm());
  if (theta_action(A, su3.omega).norm() > 1e-9 * scale) throw Error(ErrorCode::NotInSp, "A does not preserve omega");
  if (normality_residual(A, su3.h) > 1e-9 * scale * scale) throw Error(ErrorCode::NotNormal, "A is not h-normal");
  return build(A, su3, true);
}

NormalFormData adapted_frame_for_S(const Mat& A, const SU3Structure& su3) {
  double scale = std::max(1.0, A.norm());
  if (theta_action(A, su3.omega).norm() > 1e-9 * scale) throw Error(ErrorCode::NotInSp, "A does not preserve omega");
  return build(A, su3, false);
}

}  // namespace g2flow
