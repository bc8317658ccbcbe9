#pragma once

#include <optional>
#include <utility>

#include "g2flow/coflow.hpp"
#include "g2flow/normal_form.hpp"

namespace g2flow {

struct SigmaLambda {
  Mat Sigma;   // 7x7
  Mat Lambda;  // 7x7
};

/// Σ restricted to h in the adapted frame: 2x2 blocks built from s_j s_k, a = cosθ, b = sinθ.
Mat sigma_model(const std::array<double, 3>& s, double theta);
/// Σ(0), Λ(0) in the input frame of nf, with l the complex trace of L.
SigmaLambda sigma_lambda(const NormalFormData& nf, double l);

/// X = -ε²(Σ + Λ - [S,L]) with S, L padded to R^7.
Mat x_operator(double eps, const SigmaLambda& sl, const Mat& S, const Mat& L);

struct XOperatorResult {
  Mat X;
  SigmaLambda sl;
  SymSkew split;
  NormalFormData nf;
  double eps = 1;
  double identityResidual = 0;  // ‖-ε²(ϑ(A)ϑ(B)p)∧η - ϑ(X)φ̂‖
};
/// Builds X for the state (ω0, p) and verifies its defining identity; throws IdentityViolation.
XOperatorResult x_operator(const AlmostAbelianAlgebra& alg, const KForm& omega0, const KForm& p);

enum class SolitonClass { Expanding, Steady, Shrinking, NotSoliton };
const char* soliton_class_name(SolitonClass c);

struct SolitonReport {
  double delta = 0;             // least-squares δ*
  double c = 0;                 // l² + s² - δ*
  Mat D = Mat::Zero(7, 7);      // X0 - c Id
  Mat X0 = Mat::Zero(7, 7);
  double residual = 0;          // ‖[-Σ(0) + [S,L], A] - δ*A‖ (h-Frobenius)
  double splitResidual = 0;     // same quantity from the split pair
  double derivationResidual = 0;
  double tolerance = 0;
  double lSquared = 0;
  double sSquared = 0;
  double sigmaS = 0;            // [Σ,S] = sigmaS J0, equal to 4b(1-4a²)s1s2s3
  double sigmaLCommutator = 0;  // ‖[Σ(0), L(0)]‖
  bool normal = false;
  bool zeroBracket = false;
  bool eigenform = false;
  SolitonClass cls = SolitonClass::NotSoliton;
  std::optional<std::pair<double, double>> existenceInterval;  // may contain ±inf
};

SolitonReport soliton_residual(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, double tol = 0);
/// sqrt(Σ_{i<j} ‖D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]‖²).
double derivation_check(const Mat& D, const AlmostAbelianAlgebra& alg);

/// Existence interval of c(t) = (1-2ct)².
std::pair<double, double> self_similar_interval(double c);
/// c(t) exp(f(t)ϑ(D)) φ̂0 = c(t) (e^{-f(t)D})* φ̂0.
KForm self_similar(double c, const Mat& D, const KForm& phiHat0, double t);
/// ‖-Δφ̂0 + 4cφ̂0 - ϑ(D)φ̂0‖.
double soliton_3form_check(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, const SolitonReport& r);

/// h-Frobenius norm sqrt(tr(X†X)).
double h_norm(const Mat& X, const Mat& h);

}  // namespace g2flow
