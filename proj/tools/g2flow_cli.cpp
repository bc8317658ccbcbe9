// g2flow: validation, reduction, coflow integration and soliton analysis for
// almost-abelian G2 structures.
//
// Exit codes: 0 ok, 2 parse, 3 validation, 4 blow-up, 5 tolerance failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "g2flow/io.hpp"
#include "g2flow/soliton.hpp"

using namespace g2flow;

namespace {

enum Exit { kOk = 0, kParse = 2, kValidation = 3, kBlowUp = 4, kTolerance = 5 };

struct RunConfig {
  std::string input;
  std::string output;
  double t0 = 0;
  double t1 = 0.1;
  double tol = 1e-9;
  std::string format;
  bool backward = false;
  std::string sweep;
  // exact
  std::string family = "symmetric";
  std::vector<double> s{0.5, 0.5, 0.5};
  double l = 1.5;
  int steps = 100;
};

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void validate_range(const RunConfig& c) {
  if (!(c.t0 < c.t1)) throw Failure(kValidation, "t0 must be smaller than t1");
  if (!(c.tol > 1e-14 && c.tol < 1e-2)) throw Failure(kValidation, "tol must lie in (1e-14, 1e-2)");
}

/// Writes to --output when given, else to stdout.
void emit(const RunConfig& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw Failure(kValidation, "cannot write " + c.output);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Loaded {
  AlgebraInput in;
  SU3Structure su3;
};

Loaded load(const RunConfig& c) {
  Loaded out{load_algebra(c.input), {}};
  G2Structure g2 = g2_from_phi(out.in.phi);
  out.su3 = su3_reduce(out.in.phi, g2.phiHat);
  return out;
}

int exit_for(Outcome o) {
  switch (o) {
    case Outcome::Completed: return kOk;
    case Outcome::BlowUp: return kBlowUp;
    case Outcome::ToleranceFailure: return kTolerance;
  }
  return kTolerance;
}

int cmd_check(const RunConfig& c) {
  AlgebraInput in = load_algebra(c.input);
  G2Structure g2 = g2_from_phi(in.phi);
  Json j;
  j["stable"] = true;
  Eigen::SelfAdjointEigenSolver<Mat> es(g2.metric);
  bool positive = g2.orientation == 1 && es.eigenvalues().minCoeff() > 0;
  j["positive"] = positive;
  j["normSquared"] = g2.normSquared;
  bool norm7 = std::fabs(g2.normSquared - 7.0) < 1e-10;
  SU3Structure su = su3_reduce(in.phi, g2.phiHat);
  double cores = coclosed_residual(in.alg, su.omega);
  bool coclosed = coclosed_check(in.alg, su.omega);
  j["coclosed"] = coclosed;
  j["coclosedResidual"] = cores;
  j["metricEigenvalues"] = std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + 7);
  j["metricIsIdentity"] = (g2.metric - Mat::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12;
  j["frameRotated"] = in.rotated;
  bool pass = positive && norm7 && coclosed;
  j["pass"] = pass;
  emit(c, dump(j));
  return pass ? kOk : kValidation;
}

int cmd_reduce(const RunConfig& c) {
  Loaded ld = load(c);
  Json j;
  j["A"] = matrix_to_json(ld.in.alg.A);
  j["basis"] = matrix_to_json(ld.in.basis);
  j["rotated"] = ld.in.rotated;
  j["omega"] = kform_to_json(ld.su3.omega);
  j["psi"] = kform_to_json(ld.su3.psi);
  j["psiRe"] = kform_to_json(ld.su3.psiRe);
  j["J"] = matrix_to_json(ld.su3.J);
  j["h"] = matrix_to_json(ld.su3.h);
  j["lambda"] = ld.su3.lambda;
  j["coclosed"] = coclosed_check(ld.in.alg, ld.su3.omega);
  emit(c, dump(j));
  return kOk;
}

int cmd_normal_form(const RunConfig& c) {
  Loaded ld = load(c);
  double nr = normality_residual(ld.in.alg.A, ld.su3.h);
  bool normal = nr < 1e-10 * std::max(1.0, ld.in.alg.A.norm());
  NormalFormData nf = normal ? adapted_frame(ld.in.alg.A, ld.su3) : adapted_frame_for_S(ld.in.alg.A, ld.su3);
  Json j;
  j["normal"] = normal;
  j["normalityResidual"] = nr;
  j.update(normal_form_to_json(nf));
  emit(c, dump(j));
  return kOk;
}

int write_flow(const AlmostAbelianAlgebra& alg, const SU3Structure& su3, const RunConfig& c, const std::string& csvPath,
               Json& footer) {
  IntegrateOptions opt;
  opt.tol = c.tol;
  Trajectory tr = c.backward ? integrate(alg, su3, c.t1, c.t0, opt) : integrate(alg, su3, c.t0, c.t1, opt);
  footer = blowup_footer(tr);
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  if (csvPath.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(csvPath);
    if (!f) throw Failure(kValidation, "cannot write " + csvPath);
    f << csv.str();
    std::ofstream ff(csvPath + ".footer.json");
    ff << dump(footer);
  }
  return exit_for(tr.outcome);
}

int cmd_flow(const RunConfig& c) {
  validate_range(c);
  Loaded ld = load(c);
  if (!c.sweep.empty()) {
    Json grid = load_json(c.sweep);
    if (!grid.contains("runs") || !grid["runs"].is_array()) throw Error(ErrorCode::Parse, "sweep file needs a runs array");
    std::string prefix = c.output.empty() ? "sweep" : c.output;
    std::vector<std::future<std::pair<int, Json>>> jobs;
    for (std::size_t i = 0; i < grid["runs"].size(); ++i) {
      const Json& run = grid["runs"][i];
      RunConfig rc = c;
      rc.t0 = run.value("t0", c.t0);
      rc.t1 = run.value("t1", c.t1);
      rc.tol = run.value("tol", c.tol);
      validate_range(rc);
      AlmostAbelianAlgebra alg = run.contains("A") ? AlmostAbelianAlgebra(matrix_from_json(run["A"], 6, 6))
                                                   : AlmostAbelianAlgebra(run.value("scale", 1.0) * ld.in.alg.A);
      std::string path = prefix + "_" + std::to_string(i) + ".csv";
      jobs.push_back(std::async(std::launch::async, [alg, rc, path, su3 = ld.su3] {
        Json footer;
        int code = write_flow(alg, su3, rc, path, footer);
        footer["csv"] = path;
        return std::make_pair(code, footer);
      }));
    }
    int worst = kOk;
    Json summary;
    summary["runs"] = Json::array();
    for (auto& job : jobs) {
      auto [code, footer] = job.get();
      worst = std::max(worst, code);
      summary["runs"].push_back(footer);
    }
    summary["trajectories"] = jobs.size();
    std::cout << dump(summary) << "swept " << jobs.size() << " trajectories\n";
    return worst;
  }
  Json footer;
  int code = write_flow(ld.in.alg, ld.su3, c, c.output, footer);
  (c.output.empty() ? std::cerr : std::cout) << dump(footer);
  return code;
}

int cmd_exact(const RunConfig& c) {
  if (!(c.t0 < c.t1)) throw Failure(kValidation, "t0 must be smaller than t1");
  if (c.steps < 1) throw Failure(kValidation, "steps must be positive");
  Mat A;
  std::function<ReducedState(double)> at;
  if (c.family == "symmetric") {
    if (c.s.size() != 3) throw Failure(kParse, "--s takes three values");
    std::array<double, 3> s{c.s[0], c.s[1], c.s[2]};
    A = normal_form_S(s, 0.0);
    at = [s](double t) { return closed_form_symmetric(s[0], s[1], s[2], t); };
  } else if (c.family == "skew") {
    A = (c.l / 3.0) * J0();
    at = [l = c.l](double t) { return closed_form_skew(l, t); };
  } else if (c.family == "symblock") {
    A = symblock_A();
    at = [](double t) { return closed_form_symblock(t).state; };
  } else {
    throw Failure(kParse, "unknown family " + c.family);
  }
  AlmostAbelianAlgebra alg(A);
  KForm omega = omega_std();
  Trajectory tr;
  for (int i = 0; i <= c.steps; ++i) {
    ReducedState s = at(c.t0 + (c.t1 - c.t0) * i / c.steps);
    StateDiagnostics d;
    KForm lifted = lift_to_4form(s.p, omega);
    d.dphiNorm = differential(alg, lifted).norm();
    d.part4Drift = (decompose(lifted).part0 - 0.5 * wedge(omega, omega)).norm();
    tr.states.push_back(s);
    tr.diagnostics.push_back(d);
  }
  if (c.format == "json") {
    Json j = Json::array();
    for (const ReducedState& s : tr.states) j.push_back({{"t", s.t}, {"eps", s.eps}, {"p", kform_to_json(s.p)}});
    emit(c, dump(j));
  } else {
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    emit(c, os.str());
  }
  return kOk;
}

SolitonReport soliton_for(const Loaded& ld, double tol) { return soliton_residual(ld.in.alg, ld.su3, tol); }

/// Sample times inside the existence interval, clipped to [t0, t1].
std::vector<double> selfsim_times(const SolitonReport& r, double t0, double t1, int steps) {
  double lo = r.existenceInterval->first, hi = r.existenceInterval->second;
  if (!(t0 > lo && t1 < hi)) throw Error(ErrorCode::OutOfDomain, "t-range leaves the existence interval");
  std::vector<double> ts;
  for (int i = 0; i <= steps; ++i) ts.push_back(t0 + (t1 - t0) * i / steps);
  return ts;
}

int cmd_soliton(const RunConfig& c) {
  Loaded ld = load(c);
  SolitonReport r = soliton_for(ld, 0);
  Json j = soliton_report_to_json(r);
  if (r.cls != SolitonClass::NotSoliton) {
    // Half of each finite endpoint keeps the samples well inside the interval.
    double lo = std::max(-1.0, 0.5 * r.existenceInterval->first);
    double hi = std::min(0.15, 0.5 * r.existenceInterval->second);
    Json traj = Json::array();
    for (double t : selfsim_times(r, lo, hi, 4))
      traj.push_back({{"t", t}, {"phiHat", kform_to_json(self_similar(r.c, r.D, lift_to_4form(ld.su3.psi, ld.su3.omega), t))}});
    j["selfSimilar"] = traj;
  }
  emit(c, dump(j));
  return kOk;
}

int cmd_selfsim(const RunConfig& c) {
  Loaded ld = load(c);
  SolitonReport r = soliton_for(ld, 0);
  if (r.cls == SolitonClass::NotSoliton) throw Failure(kValidation, "input is not a soliton");
  KForm phi0 = lift_to_4form(ld.su3.psi, ld.su3.omega);
  const double h = 1e-5;
  std::ostringstream os;
  Json rows = Json::array();
  if (c.format != "json") {
    os << "t,eps";
    for (Mask m : basis_masks(7, 4)) os << ",q" << mask_string(m);
    os << ",flowResidual\n";
  }
  for (double t : selfsim_times(r, c.t0, c.t1, c.steps)) {
    KForm q = self_similar(r.c, r.D, phi0, t);
    G2Structure g = g2_from_4form(q);
    double eps = 1.0 / std::sqrt(g.metric(6, 6));
    KForm dq = (1.0 / (2 * h)) * (self_similar(r.c, r.D, phi0, t + h) - self_similar(r.c, r.D, phi0, t - h));
    double res = (dq + laplacian(ld.in.alg, g.metric, q)).max_abs();
    if (c.format == "json") {
      rows.push_back({{"t", t}, {"eps", eps}, {"phiHat", kform_to_json(q)}, {"flowResidual", res}});
      continue;
    }
    os << format_double(t) << ',' << format_double(eps);
    for (int i = 0; i < q.size(); ++i) os << ',' << format_double(q.coeffs()[i]);
    os << ',' << format_double(res) << '\n';
  }
  emit(c, c.format == "json" ? dump(rows) : os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacian coflow on almost-abelian G2 structures"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_io = [&c](CLI::App* sub) {
    sub->add_option("--input", c.input, "algebra file {A, phi?, basis?}")->required();
    sub->add_option("--output", c.output, "output path (default stdout)");
  };
  auto add_range = [&c](CLI::App* sub) {
    sub->add_option("--t0", c.t0, "start time");
    sub->add_option("--t1", c.t1, "end time");
  };

  CLI::App* check = app.add_subcommand("check", "validate an algebra and its G2 form");
  add_io(check);
  CLI::App* reduce = app.add_subcommand("reduce", "SU(3) data on h");
  add_io(reduce);
  CLI::App* nf = app.add_subcommand("normal-form", "adapted frame of A");
  add_io(nf);
  CLI::App* flow = app.add_subcommand("flow", "integrate the reduced coflow");
  add_io(flow);
  add_range(flow);
  flow->add_option("--tol", c.tol, "integrator tolerance");
  flow->add_option("--format", c.format, "csv")->check(CLI::IsMember({"csv"}));
  flow->add_option("--sweep", c.sweep, "parameter grid file {runs: [{scale|A, t0, t1, tol}]}");
  flow->add_flag("--backward", c.backward, "start at t1 and integrate down to t0");
  CLI::App* exact = app.add_subcommand("exact", "closed-form solutions");
  exact->add_option("--output", c.output, "output path (default stdout)");
  exact->add_option("--family", c.family, "symmetric, skew or symblock")
      ->check(CLI::IsMember({"symmetric", "skew", "symblock"}));
  exact->add_option("--s", c.s, "s1,s2,s3 for the symmetric family")->delimiter(',');
  exact->add_option("--l", c.l, "complex trace for the skew family");
  exact->add_option("--steps", c.steps, "number of intervals");
  exact->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  add_range(exact);
  CLI::App* sol = app.add_subcommand("soliton", "soliton report");
  add_io(sol);
  CLI::App* selfsim = app.add_subcommand("selfsim", "self-similar solution of a soliton");
  add_io(selfsim);
  add_range(selfsim);
  selfsim->add_option("--steps", c.steps, "number of intervals");
  selfsim->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*check) return cmd_check(c);
    if (*reduce) return cmd_reduce(c);
    if (*nf) return cmd_normal_form(c);
    if (*flow) return cmd_flow(c);
    if (*exact) return cmd_exact(c);
    if (*sol) return cmd_soliton(c);
    if (*selfsim) return cmd_selfsim(c);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Parse ? kParse : kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: Parse: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}
