#pragma once

#include <array>
#include <optional>
#include <vector>

#include "g2flow/stable_forms.hpp"

namespace g2flow {

struct SymSkew {
  Mat S;
  Mat L;
};

/// S = (A + A†)/2, L = (A - A†)/2 with † the h-adjoint.
SymSkew symmetric_skew_split(const Mat& A, const Mat& h);

struct AnticommutationResiduals {
  double SJ = 0;  // ‖SJ + JS‖
  double LJ = 0;  // ‖LJ - JL‖
};
AnticommutationResiduals anticommutation_check(const Mat& S, const Mat& L, const Mat& J);

/// Block matrix with 2x2 blocks s_i[[cosθ, sinθ],[sinθ, -cosθ]].
Mat normal_form_S(const std::array<double, 3>& s, double theta);
/// Blocks [[0,-1],[1,0]]; the standard complex structure (J e1 = e2).
Mat J0();
/// exp(αJ0).
Mat rotation_Q(double alpha);
/// 4 sinθ (1 - 4cos²θ) s1 s2 s3.
double sigma_s_coefficient(const std::array<double, 3>& s, double theta);

struct NormalFormResiduals {
  double orthonormality = 0;   // ‖FᵀhF - I‖
  double omega = 0;            // ‖F*ω - ω0‖
  double psi = 0;              // ‖F*ψ - |ζ|ψ0‖
  double S = 0;                // ‖F⁻¹SF - S(s,θ)‖
  double L = 0;                // ‖F⁻¹LF - block part‖ (0 when not normal-checked)
  double LJ = 0;               // ‖[F⁻¹LF, J0]‖
  double max() const;
};

struct NormalFormData {
  Mat frame;                          // columns e1, Je1, e2, Je2, e3, Je3 in input coordinates
  std::array<double, 3> s{};          // s1 >= s2 >= s3 >= 0
  double theta = 0;                   // in [0, 2π)
  std::vector<Mat> Lblocks;           // L restricted to each eigenvalue group (e-lines only)
  std::vector<int> groupSizes;        // number of lines per group, positive groups first
  double l = 0;                       // -½ tr(JL)
  std::optional<std::array<double, 3>> lPerLine;  // when S = 0: L e_j = l_j J e_j
  double zetaModulus = 1;             // |ζ| with F*ψ = Im(ζΨ0) before rotation
  double cubeRootArg = 0;             // α with Q = exp(αJ), principal branch
  Mat Smodel;                         // F⁻¹SF
  Mat Lmodel;                         // F⁻¹LF
  NormalFormResiduals residuals;
};

/// Adapted frame for a normal A ∈ sp(ω0); throws NotNormal / NotInSp.
NormalFormData adapted_frame(const Mat& A, const SU3Structure& su3);
/// Frame built from S alone; used for non-normal A where only S needs normal form.
NormalFormData adapted_frame_for_S(const Mat& A, const SU3Structure& su3);

double normality_residual(const Mat& A, const Mat& h);

}  // namespace g2flow
