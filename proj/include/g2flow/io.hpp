#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "g2flow/coflow.hpp"
#include "g2flow/normal_form.hpp"
#include "g2flow/soliton.hpp"

namespace g2flow {

using Json = nlohmann::ordered_json;

/// {"dim": n, "degree": k, "127": c, ...}; only non-zero coefficients are written.
Json kform_to_json(const KForm& a);
KForm kform_from_json(const Json& j);

Json matrix_to_json(const Mat& M);
Mat matrix_from_json(const Json& j, int rows, int cols);

struct AlgebraInput {
  AlmostAbelianAlgebra alg;
  KForm phi;               // in the working (adapted) frame
  bool phiGiven = false;
  Mat basis = Mat::Identity(7, 7);  // working frame in file coordinates
  bool rotated = false;    // adapt_frame changed e7
};

/// {"A": 6x6 rows, "phi": KForm (optional, default φ_std), "basis": 7x7 (optional)}.
AlgebraInput parse_algebra(const Json& j);
AlgebraInput load_algebra(const std::string& path);
Json load_json(const std::string& path);

Json normal_form_to_json(const NormalFormData& nf);
Json soliton_report_to_json(const SolitonReport& r);
Json blowup_footer(const Trajectory& tr);

/// Columns t, eps, p coefficients (lexicographic), dphiNorm, part4Drift.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
std::string format_double(double v);

}  // namespace g2flow
