#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "g2flow/coflow.hpp"

namespace g2flow {

namespace {

// After u = e^{-x}: √(P1 P2³) dx = -u √((3 - u⁸)(1 + u⁸)³) du.
double integrand_u(double u) {
  double u8 = std::pow(u, 8);
  double a = 3.0 - u8;
  if (a <= 0) return 0.0;
  double b = 1.0 + u8;
  return u * std::sqrt(a * b * b * b);
}

double integral_u(double lo, double hi) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  double r;
  if (hi > 1.0 + 1e-12 && std::pow(hi, 8) > 2.9) {
    // square-root endpoint at u⁸ = 3
    boost::math::quadrature::tanh_sinh<double> ts;
    r = ts.integrate(integrand_u, lo, hi, 1e-14);
  } else {
    r = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand_u, lo, hi, 15, 1e-14);
  }
  return sign * r;
}

}  // namespace

double symblock_F_tau() { return -std::log(3.0) / 8.0; }

double symblock_time_of(double F) {
  if (!(F >= symblock_F_tau())) throw Error(ErrorCode::OutOfDomain, "F below the singular value");
  double lo = std::isinf(F) ? 0.0 : std::exp(-F);
  if (F == symblock_F_tau()) lo = std::pow(3.0, 0.125);
  return integral_u(lo, 1.0) / 4.0;
}

double symblock_T_plus() {
  static const double v = integral_u(0.0, 1.0) / 4.0;
  return v;
}

double symblock_t_tau() {
  static const double v = -integral_u(1.0, std::pow(3.0, 0.125)) / 4.0;
  return v;
}

Mat symblock_A() {
  Mat A = Mat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) A(2 * i, 2 * i + 1) = A(2 * i + 1, 2 * i) = 1.0;
  return A;
}

Mat symblock_ode_matrix() {
  Mat M(4, 4);
  M << 3, -2, -2, -2,
      -2, 3, 2, 2,
      -2, 2, 3, 2,
      -2, 2, 2, 3;
  return M;
}

SymBlockSolution closed_form_symblock(double t) {
  double tt = symblock_t_tau(), tp = symblock_T_plus();
  if (!(t > tt && t < tp)) throw Error(ErrorCode::OutOfDomain, "t outside the maximal interval");
  SymBlockSolution r;
  if (t == 0.0) {
    r.F = 0.0;
  } else {
    auto g = [t](double F) { return symblock_time_of(F) - t; };
    double a, b;
    if (t > 0) {
      a = 0.0;
      b = 1.0;
      while (g(b) < 0) b *= 2.0;
    } else {
      a = symblock_F_tau();
      b = 0.0;
    }
    std::uintmax_t iters = 200;
    auto res = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(52), iters);
    r.F = 0.5 * (res.first + res.second);
  }
  double e1 = std::exp(-r.F), e9 = std::exp(-9.0 * r.F);
  double b1 = (3.0 * e1 - e9) / 2.0, b2 = (e1 + e9) / 2.0;
  r.b = {b1, b2, b2, b2};
  r.state = make_state(t, diagonal_psi(r.b), omega_std());
  return r;
}

}  // namespace g2flow
