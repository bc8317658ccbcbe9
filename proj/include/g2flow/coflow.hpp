#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "g2flow/almost_abelian.hpp"

namespace g2flow {

struct ReducedState {
  double t = 0;
  KForm p;       // negative, ω0-compatible 3-form on h
  double eps = 1;
  Mat h;         // ω0(·, J_p ·)
  Mat J;
  double lambda = 0;
};

/// ε with 6 p∧J_p*p = 4 ε⁻² ω0³.
double epsilon_of(const KForm& p, const KForm& omega0);
ReducedState make_state(double t, const KForm& p, const KForm& omega0);
/// Metric h ⊕ ε⁻² on R^7 induced by φ̂ = ½ω0² + p∧η.
Mat state_metric(const ReducedState& s);

/// -ε²ϑ(A)ϑ(B)p with B the h_p-adjoint of A.
KForm reduced_rhs(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p);
/// Same with a fixed B.
KForm reduced_rhs_fixed(const Mat& A, const Mat& B, const KForm& omega0, const KForm& p);

/// ½ω0² + p∧η on R^7.
KForm lift_to_4form(const KForm& p, const KForm& omega0);

enum class AdjointMode {
  Coflow,  // B_t recomputed from h_t
  Frozen,  // B fixed at its t0 value
};

enum class Outcome { Completed, BlowUp, ToleranceFailure };
const char* outcome_name(Outcome o);

struct IntegrateOptions {
  double tol = 1e-9;
  double epsMax = 0;  // 0 means 1/tol
  long maxSteps = 400000;
  AdjointMode mode = AdjointMode::Coflow;
};

struct StateDiagnostics {
  double dphiNorm = 0;    // ‖dφ̂_t‖
  double part4Drift = 0;  // ‖φ̂_t^(4) - ω0²/2‖
};

struct Trajectory {
  std::vector<ReducedState> states;
  std::vector<StateDiagnostics> diagnostics;
  Outcome outcome = Outcome::Completed;
  std::optional<std::pair<double, double>> blowup;  // bracket [lo, hi]
  long accepted = 0;
  long rejected = 0;
  std::string message;
};

/// Dormand–Prince 5(4) on the reduced equation from (ω0, p0) over [t0, t1] (t1 < t0 integrates backward).
Trajectory integrate(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p0, double t0, double t1,
                     const IntegrateOptions& opt = {});
Trajectory integrate(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, double t0, double t1,
                     const IntegrateOptions& opt = {});

/// Symmetric A in normal form with θ = 0: b_i = exp(-σ_i F), F = -ln(1-2δt)/(2δ).
struct SymmetricClosedForm {
  std::array<double, 4> sigma{};
  double delta = 0;
  double blowupTime() const;  // 1/(2δ), +inf for δ = 0
  double F(double t) const;
  std::array<double, 4> b(double t) const;
  ReducedState state(double t) const;
};
SymmetricClosedForm closed_form_symmetric(double s1, double s2, double s3);
ReducedState closed_form_symmetric(double s1, double s2, double s3, double t);
/// -b1 e246 + b2 e136 + b3 e145 + b4 e235.
KForm diagonal_psi(const std::array<double, 4>& b);
std::array<double, 4> diagonal_coefficients(const KForm& p);

/// Skew A with complex trace l: p_t = √(1-2l²t) ψ0, ε_t = 1/√(1-2l²t).
ReducedState closed_form_skew(double l, double t);

/// A = blocks [[0,1],[1,0]]: b1 = P1(F)/2, b2 = b3 = b4 = P2(F)/2 with P1 = 3e^{-x} - e^{-9x}, P2 = e^{-x} + e^{-9x}.
/// F solves 4t = ∫_0^F √(P1 P2³) dx; this is the solution of χ' = -ε(χ)²ϑ(A)²χ.
struct SymBlockSolution {
  double F = 0;
  std::array<double, 4> b{};
  ReducedState state;
};
SymBlockSolution closed_form_symblock(double t);
double symblock_time_of(double F);
double symblock_T_plus();   // t as F → ∞
double symblock_t_tau();    // t at F_τ = -ln(3)/8
double symblock_F_tau();
Mat symblock_A();
/// M with ḃ = -ε² M b on the (b1..b4) coordinates.
Mat symblock_ode_matrix();

/// Span of the eight monomials e^{abc}, a∈{1,2}, b∈{3,4}, c∈{5,6}.
double ansatz_defect(const KForm& p);

}  // namespace g2flow
