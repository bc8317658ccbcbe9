#include "g2flow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "g2flow/stable_forms.hpp"

namespace g2flow {

Json kform_to_json(const KForm& a) {
  Json j;
  j["dim"] = a.dim();
  j["degree"] = a.degree();
  for (auto [m, c] : a.terms()) j[a.degree() == 0 ? std::string("0") : mask_string(m)] = c;
  return j;
}

KForm kform_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("degree"))
    throw Error(ErrorCode::Parse, "form object needs dim and degree");
  int n = j.at("dim").get<int>();
  int k = j.at("degree").get<int>();
  if (n < 1 || n > kMaxDim || k < 0 || k > n) throw Error(ErrorCode::Parse, "bad dim/degree");
  KForm out(n, k);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "dim" || it.key() == "degree") continue;
    if (!it.value().is_number()) throw Error(ErrorCode::Parse, "coefficient of " + it.key() + " is not a number");
    if (k == 0) {
      if (it.key() != "0") throw Error(ErrorCode::Parse, "0-forms use the key \"0\"");
      out.coeffs()[0] += it.value().get<double>();
      continue;
    }
    auto [m, s] = mask_parse(it.key(), n);
    if (static_cast<int>(it.key().size()) != k) throw Error(ErrorCode::Parse, "index " + it.key() + " has wrong length");
    out.add(m, s * it.value().get<double>());
  }
  return out;
}

Json matrix_to_json(const Mat& M) {
  Json j = Json::array();
  for (int r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    j.push_back(row);
  }
  return j;
}

Mat matrix_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) throw Error(ErrorCode::Parse, "matrix has wrong row count");
  Mat M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) throw Error(ErrorCode::Parse, "matrix has wrong column count");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw Error(ErrorCode::Parse, "matrix entry is not a number");
      M(r, c) = row[c].get<double>();
    }
  }
  return M;
}

AlgebraInput parse_algebra(const Json& j) {
  if (!j.is_object() || !j.contains("A")) throw Error(ErrorCode::Parse, "algebra file needs an \"A\" matrix");
  AlgebraInput in;
  in.alg = AlmostAbelianAlgebra(matrix_from_json(j.at("A"), 6, 6));
  if (j.contains("phi")) {
    in.phi = kform_from_json(j.at("phi"));
    if (in.phi.dim() != 7 || in.phi.degree() != 3) throw Error(ErrorCode::Parse, "phi must be a 3-form on R^7");
    in.phiGiven = true;
  } else {
    in.phi = phi_std();
  }
  if (j.contains("basis")) {
    Mat P = matrix_from_json(j.at("basis"), 7, 7);
    if (P.block(6, 0, 1, 6).cwiseAbs().maxCoeff() != 0.0)
      throw Error(ErrorCode::Parse, "basis: the first six vectors must span h");
    Mat Ph = P.topLeftCorner(6, 6);
    if (std::fabs(P.determinant()) < 1e-12) throw Error(ErrorCode::Parse, "basis is singular");
    in.alg = AlmostAbelianAlgebra(P(6, 6) * Ph.inverse() * in.alg.A * Ph);
    in.phi = pullback(P, in.phi);
    in.basis = P;
  }
  AdaptedAlgebra ad = adapt_frame(in.alg, in.phi);
  if ((ad.basis - Mat::Identity(7, 7)).cwiseAbs().maxCoeff() > 1e-14) {
    in.alg = ad.alg;
    in.phi = ad.phi;
    in.basis = in.basis * ad.basis;
    in.rotated = true;
  }
  return in;
}

Json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Parse, "cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

AlgebraInput load_algebra(const std::string& path) {
  try {
    return parse_algebra(load_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

Json normal_form_to_json(const NormalFormData& nf) {
  Json j;
  j["s"] = {nf.s[0], nf.s[1], nf.s[2]};
  j["theta"] = nf.theta;
  j["l"] = nf.l;
  if (nf.lPerLine) {
    j["lPerLine"] = {(*nf.lPerLine)[0], (*nf.lPerLine)[1], (*nf.lPerLine)[2]};
  } else {
    j["lPerLine"] = nullptr;
  }
  j["cubeRootBranch"] = "principal";
  j["cubeRootArg"] = nf.cubeRootArg;
  j["zetaModulus"] = nf.zetaModulus;
  j["sigmaS"] = sigma_s_coefficient(nf.s, nf.theta);
  j["frame"] = matrix_to_json(nf.frame);
  Json blocks = Json::array();
  for (const Mat& b : nf.Lblocks) blocks.push_back(matrix_to_json(b));
  j["Lblocks"] = blocks;
  j["residuals"] = {{"orthonormality", nf.residuals.orthonormality}, {"omega", nf.residuals.omega},
                    {"psi", nf.residuals.psi},                       {"S", nf.residuals.S},
                    {"L", nf.residuals.L},                           {"LJ", nf.residuals.LJ}};
  return j;
}

namespace {

Json endpoint(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json soliton_report_to_json(const SolitonReport& r) {
  Json j;
  j["delta"] = r.delta;
  j["c"] = r.c;
  j["class"] = soliton_class_name(r.cls);
  j["residual"] = r.residual;
  j["D"] = matrix_to_json(r.D);
  j["eigenform"] = r.eigenform;
  if (r.existenceInterval) {
    j["existenceInterval"] = {endpoint(r.existenceInterval->first), endpoint(r.existenceInterval->second)};
  } else {
    j["existenceInterval"] = nullptr;
  }
  j["tolerance"] = r.tolerance;
  j["derivationResidual"] = r.derivationResidual;
  j["splitResidual"] = r.splitResidual;
  j["lSquared"] = r.lSquared;
  j["sSquared"] = r.sSquared;
  j["deltaFromC"] = r.lSquared + r.sSquared - r.c;
  j["sigmaS"] = r.sigmaS;
  j["sigmaLCommutator"] = r.sigmaLCommutator;
  j["normal"] = r.normal;
  j["zeroBracket"] = r.zeroBracket;
  j["X0"] = matrix_to_json(r.X0);
  return j;
}

Json blowup_footer(const Trajectory& tr) {
  Json j;
  j["outcome"] = outcome_name(tr.outcome);
  if (tr.blowup) {
    j["blowupInterval"] = {tr.blowup->first, tr.blowup->second};
  } else {
    j["blowupInterval"] = nullptr;
  }
  j["acceptedSteps"] = tr.accepted;
  j["rejectedSteps"] = tr.rejected;
  j["tEnd"] = tr.states.empty() ? 0.0 : tr.states.back().t;
  j["message"] = tr.message;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,eps";
  for (Mask m : basis_masks(6, 3)) os << ",p" << mask_string(m);
  os << ",dphiNorm,part4Drift\n";
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const ReducedState& s = tr.states[i];
    os << format_double(s.t) << ',' << format_double(s.eps);
    for (int r = 0; r < s.p.size(); ++r) os << ',' << format_double(s.p.coeffs()[r]);
    os << ',' << format_double(tr.diagnostics[i].dphiNorm) << ',' << format_double(tr.diagnostics[i].part4Drift) << '\n';
  }
}

}  // namespace g2flow
