#include "g2flow/coflow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace g2flow {

namespace {

double omega_cubed(const KForm& omega0) { return wedge(wedge(omega0, omega0), omega0).top(); }

}  // namespace

double epsilon_of(const KForm& p, const KForm& omega0) {
  if (wedge(p, omega0).max_abs() > 1e-9 * std::max(1.0, p.max_abs() * omega0.max_abs()))
    throw Error(ErrorCode::NotCompatible, "p ∧ omega0 does not vanish");
  Mat J = complex_structure(p);
  double q = wedge(p, pullback(J, p)).top();
  double ratio = 4.0 * omega_cubed(omega0) / (6.0 * q);
  if (!(ratio > 0)) throw Error(ErrorCode::NotPositive, "p ∧ J*p has the wrong sign");
  return std::sqrt(ratio);
}

ReducedState make_state(double t, const KForm& p, const KForm& omega0) {
  SU3Structure su3 = su3_assemble(omega0, p);
  ReducedState s;
  s.t = t;
  s.p = p;
  s.J = su3.J;
  s.h = su3.h;
  s.lambda = su3.lambda;
  double q = -wedge(p, su3.psiRe).top();
  double ratio = 4.0 * omega_cubed(omega0) / (6.0 * q);
  if (!(ratio > 0)) throw Error(ErrorCode::NotPositive, "p ∧ J*p has the wrong sign");
  s.eps = std::sqrt(ratio);
  return s;
}

Mat state_metric(const ReducedState& s) {
  Mat g = Mat::Zero(7, 7);
  g.topLeftCorner(6, 6) = s.h;
  g(6, 6) = 1.0 / (s.eps * s.eps);
  return g;
}

KForm reduced_rhs_fixed(const Mat& A, const Mat& B, const KForm& omega0, const KForm& p) {
  double eps = epsilon_of(p, omega0);
  return (-eps * eps) * theta_action(A, theta_action(B, p));
}

KForm reduced_rhs(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p) {
  ReducedState s = make_state(0.0, p, omega0);
  Mat B = h_adjoint(alg.A, s.h);
  return (-s.eps * s.eps) * theta_action(alg.A, theta_action(B, p));
}

KForm lift_to_4form(const KForm& p, const KForm& omega0) {
  KForm om = lift7(omega0);
  return 0.5 * wedge(om, om) + wedge(lift7(p), eta7());
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::BlowUp: return "blowup";
    case Outcome::ToleranceFailure: return "toleranceFailure";
  }
  return "unknown";
}

namespace {

// Dormand–Prince 5(4) coefficients
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const AlmostAbelianAlgebra& alg;
  const KForm& omega0;
  AdjointMode mode;
  Mat B0;
  double tol;

  Vec f(const Vec& y) const {
    KForm p(6, 3, y);
    if (mode == AdjointMode::Frozen) return reduced_rhs_fixed(alg.A, B0, omega0, p).coeffs();
    return reduced_rhs(alg, omega0, p).coeffs();
  }

  // One trial step; returns false if a stage leaves the stable cone.
  bool step(const Vec& y, const Vec& k1, double h, Vec& ynew, Vec& k7, double& err) const {
    try {
      Vec k2 = f(y + h * a21 * k1);
      Vec k3 = f(y + h * (a31 * k1 + a32 * k2));
      Vec k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      Vec k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      Vec k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = f(ynew);
      Vec e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      Vec sc = (tol * (Vec::Ones(y.size()) + y.cwiseAbs().cwiseMax(ynew.cwiseAbs())));
      err = std::sqrt((e.cwiseQuotient(sc)).squaredNorm() / static_cast<double>(y.size()));
      return std::isfinite(err) && ynew.allFinite();
    } catch (const Error&) {
      return false;
    }
  }
};

StateDiagnostics diagnose(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p) {
  KForm phiHat = lift_to_4form(p, omega0);
  StateDiagnostics d;
  d.dphiNorm = differential(alg, phiHat).max_abs();
  KForm om = omega0;
  d.part4Drift = (decompose(phiHat).part0 - 0.5 * wedge(om, om)).max_abs();
  return d;
}

}  // namespace

Trajectory integrate(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p0, double t0, double t1,
                     const IntegrateOptions& opt) {
  if (!coclosed_check(alg, omega0)) throw Error(ErrorCode::NotInSp, "A does not preserve omega0");
  if (!(opt.tol > 0)) throw Error(ErrorCode::OutOfDomain, "tolerance must be positive");
  double epsMax = opt.epsMax > 0 ? opt.epsMax : 1.0 / opt.tol;
  Trajectory tr;
  ReducedState s0 = make_state(t0, p0, omega0);
  Stepper st{alg, omega0, opt.mode, h_adjoint(alg.A, s0.h), opt.tol};
  tr.states.push_back(s0);
  tr.diagnostics.push_back(diagnose(alg, omega0, p0));
  if (t1 == t0) return tr;

  double dir = t1 > t0 ? 1.0 : -1.0;
  double span = std::fabs(t1 - t0);
  double t = t0;
  Vec y = p0.coeffs();
  Vec k1 = st.f(y);
  double h = std::min(span, 1e-3 * std::max(1.0, span));
  double rate = 0.0;  // d ln ε / d|t| from the last accepted step
  double lastRejected = 0.0;
  double eps = s0.eps;

  auto projected_distance = [&] { return rate > 0 ? 1.0 / (2.0 * rate) : std::numeric_limits<double>::infinity(); };

  auto bracket = [&](double failedStep) {
    // smallest failing single step from the last accepted state, by bisection
    auto fails = [&](double hh) {
      Vec yn, k7;
      double err;
      if (!st.step(y, k1, dir * hh, yn, k7, err) || err > 1.0) return true;
      try {
        return make_state(t + dir * hh, KForm(6, 3, yn), omega0).eps > epsMax;
      } catch (const Error&) {
        return true;
      }
    };
    double dist = projected_distance();
    double H = std::max(failedStep, std::isfinite(dist) ? 4.0 * dist : failedStep);
    if (!(H > 0)) H = std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t));
    for (int i = 0; i < 30 && !fails(H); ++i) H *= 2.0;
    double lo = 0.0, hi = H;
    for (int i = 0; i < 60; ++i) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (fails(mid) ? hi : lo) = mid;
    }
    // the step controller can fail slightly before the singularity; widen by the projected distance
    double width = std::max(hi, std::isfinite(dist) ? 2.0 * dist : hi);
    double a = t, b = t + dir * width;
    tr.blowup = std::make_pair(std::min(a, b), std::max(a, b));
  };

  while (dir * (t1 - t) > 0) {
    if (tr.accepted + tr.rejected >= opt.maxSteps) {
      tr.outcome = Outcome::ToleranceFailure;
      tr.message = "step budget exhausted";
      return tr;
    }
    double hmax = 1e-2 * projected_distance();
    h = std::min({h, hmax, std::fabs(t1 - t)});
    double hmin = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t));
    if (h < hmin) {
      if (rate > 0) {
        tr.outcome = Outcome::BlowUp;
        tr.message = "step size underflow with growing eps";
        bracket(std::max(lastRejected, hmin));
      } else {
        tr.outcome = Outcome::ToleranceFailure;
        tr.message = "step size underflow";
      }
      return tr;
    }
    Vec ynew, k7;
    double err = 0;
    bool ok = st.step(y, k1, dir * h, ynew, k7, err);
    ReducedState ns;
    if (ok && err <= 1.0) {
      try {
        ns = make_state(t + dir * h, KForm(6, 3, ynew), omega0);
        require_positive_definite(ns.h);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok || err > 1.0) {
      ++tr.rejected;
      lastRejected = h;
      h *= ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
      continue;
    }
    ++tr.accepted;
    double tn = (h == std::fabs(t1 - t)) ? t1 : t + dir * h;
    ns.t = tn;
    rate = (std::log(ns.eps) - std::log(eps)) / h;
    t = tn;
    y = ynew;
    k1 = k7;
    eps = ns.eps;
    tr.states.push_back(ns);
    tr.diagnostics.push_back(diagnose(alg, omega0, ns.p));
    if (eps > epsMax) {
      tr.outcome = Outcome::BlowUp;
      tr.message = "eps exceeded its bound";
      bracket(h);
      return tr;
    }
    double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return tr;
}

Trajectory integrate(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, double t0, double t1,
                     const IntegrateOptions& opt) {
  return integrate(alg, su3.omega, su3.psi, t0, t1, opt);
}

KForm diagonal_psi(const std::array<double, 4>& b) {
  KForm p(6, 3);
  p.set(mask_from_indices({2, 4, 6}), -b[0]);
  p.set(mask_from_indices({1, 3, 6}), b[1]);
  p.set(mask_from_indices({1, 4, 5}), b[2]);
  p.set(mask_from_indices({2, 3, 5}), b[3]);
  return p;
}

std::array<double, 4> diagonal_coefficients(const KForm& p) {
  return {-p.coeff(mask_from_indices({2, 4, 6})), p.coeff(mask_from_indices({1, 3, 6})),
          p.coeff(mask_from_indices({1, 4, 5})), p.coeff(mask_from_indices({2, 3, 5}))};
}

SymmetricClosedForm closed_form_symmetric(double s1, double s2, double s3) {
  SymmetricClosedForm c;
  c.sigma = {(s1 + s2 + s3) * (s1 + s2 + s3), (s1 + s2 - s3) * (s1 + s2 - s3), (s1 - s2 + s3) * (s1 - s2 + s3),
             (-s1 + s2 + s3) * (-s1 + s2 + s3)};
  c.delta = s1 * s1 + s2 * s2 + s3 * s3;
  return c;
}

double SymmetricClosedForm::blowupTime() const {
  return delta > 0 ? 1.0 / (2.0 * delta) : std::numeric_limits<double>::infinity();
}

double SymmetricClosedForm::F(double t) const {
  if (!(t < blowupTime())) throw Error(ErrorCode::OutOfDomain, "t beyond the existence interval");
  if (delta == 0) return t;
  return -std::log1p(-2.0 * delta * t) / (2.0 * delta);
}

std::array<double, 4> SymmetricClosedForm::b(double t) const {
  double f = F(t);
  return {std::exp(-sigma[0] * f), std::exp(-sigma[1] * f), std::exp(-sigma[2] * f), std::exp(-sigma[3] * f)};
}

ReducedState SymmetricClosedForm::state(double t) const { return make_state(t, diagonal_psi(b(t)), omega_std()); }

ReducedState closed_form_symmetric(double s1, double s2, double s3, double t) {
  return closed_form_symmetric(s1, s2, s3).state(t);
}

ReducedState closed_form_skew(double l, double t) {
  double x = 1.0 - 2.0 * l * l * t;
  if (!(x > 0)) throw Error(ErrorCode::OutOfDomain, "t beyond the existence interval");
  return make_state(t, std::sqrt(x) * psi_std(), omega_std());
}

double ansatz_defect(const KForm& p) {
  double d = 0;
  for (auto [m, c] : p.terms()) {
    bool in = std::popcount(static_cast<unsigned>(m & 0x03)) == 1 && std::popcount(static_cast<unsigned>(m & 0x0c)) == 1 &&
              std::popcount(static_cast<unsigned>(m & 0x30)) == 1;
    if (!in) d = std::max(d, std::fabs(c));
  }
  return d;
}

}  // namespace g2flow
