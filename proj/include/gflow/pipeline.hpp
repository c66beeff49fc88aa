#ifndef GFLOW_PIPELINE_HPP
#define GFLOW_PIPELINE_HPP

// End-to-end evidence run on a non-round shrinker: shoot it, perturb inward
// along the lowest eigenfunction, run rescaled flow to the first singularity,
// blow up there and compare entropies. Also the entropy table.

#include <cmath>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/flow.hpp"
#include "gflow/io.hpp"
#include "gflow/properties.hpp"
#include "gflow/shapes.hpp"
#include "gflow/shrinkers.hpp"
#include "gflow/stability.hpp"

namespace gflow {

/// Which shrinker the pipeline starts from.
struct ShrinkerId {
  enum class Kind { torus, abresch_langer, sphere, circle } kind{Kind::torus};
  int p{0}, q{0};

  std::string str() const {
    switch (kind) {
      case Kind::torus: return "torus";
      case Kind::abresch_langer: return "al(" + std::to_string(p) + "," + std::to_string(q) + ")";
      case Kind::sphere: return "sphere";
      case Kind::circle: return "circle";
    }
    return "?";
  }
};

/// Accepts torus, sphere, circle, al(p,q) and al:p:q.
inline ShrinkerId parse_shrinker(const std::string& s) {
  if (s == "torus") return {ShrinkerId::Kind::torus};
  if (s == "sphere") return {ShrinkerId::Kind::sphere};
  if (s == "circle") return {ShrinkerId::Kind::circle};
  std::smatch m;
  static const std::regex al(R"(al[(:]\s*(\d+)\s*[,:]\s*(\d+)\s*\)?)");
  if (std::regex_match(s, m, al)) return {ShrinkerId::Kind::abresch_langer, std::stoi(m[1]), std::stoi(m[2])};
  throw InvalidInput("unknown shrinker '" + s + "' (expected torus, sphere, circle or al(p,q))");
}

struct PipelineParams {
  ShootingOptions shooting{};
  PerturbOptions perturb{};
  EigenOptions eigen{};
  FlowParams flow{[] {
    FlowParams p;
    p.t_max = 20.0;
    p.snapshot_every = 0.05;
    return p;
  }()};
  std::size_t scale_count{10};
  double scale_ratio{0.5};
  double chain_tolerance{1e-3};  // slack on the non-strict chain inequalities
  double min_gap{0.01};
  std::size_t sphere_resolution{512};
};

struct PipelineReport {
  std::string shrinker;
  int n{0};
  double min_gap{0.01};
  std::string failed_stage;  // empty when every stage ran
  std::string error;
  int error_property{0};     // property number for perturbation failures
  bool nonconvergence{false};

  double shrinker_residual{NAN};
  std::size_t vertices{0};
  double lambda_sigma{NAN};
  double mu{NAN};
  double s{NAN};
  double lambda_gamma{NAN};
  double min_phi_gamma{NAN};
  double tau_rescaled{NAN};   // singular time of the rescaled flow
  double tau_mcf{NAN};        // the same in MCF time, -e^{-tau}
  double blowup_bound{NAN};   // T_c from min phi and max |x| of Gamma
  std::vector<double> singular_point;
  int line_factors{0};
  double tangent_radius{NAN};
  double lambda_tangent{NAN};
  double lambda_round{NAN};   // entropy of S^n
  double gap{NAN};
  bool chain_round_tangent{false};
  bool chain_tangent_gamma{false};
  bool chain_gamma_sigma{false};
  std::optional<CheckReport> roundness;
  std::optional<CheckReport> ratio;
  std::optional<CheckReport> monotonicity;

  bool completed() const { return failed_stage.empty(); }
  bool chain_holds() const { return chain_round_tangent && chain_tangent_gamma && chain_gamma_sigma; }
  bool passed() const {
    return completed() && chain_holds() && gap > min_gap && tau_rescaled <= blowup_bound && roundness &&
           roundness->passed;
  }
};

namespace detail {

inline Surface pipeline_shrinker(const ShrinkerId& id, const PipelineParams& p, PipelineReport& rep) {
  switch (id.kind) {
    case ShrinkerId::Kind::torus: {
      auto r = angenent_torus(p.shooting);
      rep.shrinker_residual = r.residual;
      return r.surface;
    }
    case ShrinkerId::Kind::abresch_langer: {
      auto r = abresch_langer(id.p, id.q, p.shooting);
      rep.shrinker_residual = r.residual;
      return r.surface;
    }
    case ShrinkerId::Kind::sphere: {
      Surface s = make_sphere_profile(2.0, p.sphere_resolution);
      rep.shrinker_residual = shrinker_residual(s);
      return s;
    }
    case ShrinkerId::Kind::circle: {
      Surface s = make_circle(std::numbers::sqrt2, p.sphere_resolution);
      rep.shrinker_residual = shrinker_residual(s);
      return s;
    }
  }
  throw InvalidInput("unknown shrinker");
}

}  // namespace detail

/// Runs every stage; a failing stage is recorded by name with its error and
/// the report holds everything computed before it.
inline PipelineReport run_pipeline(const ShrinkerId& id, const PipelineParams& params = {}) {
  PipelineReport rep;
  rep.shrinker = id.str();
  rep.min_gap = params.min_gap;
  std::string stage;
  try {
    stage = "shoot";
    const Surface sigma = detail::pipeline_shrinker(id, params, rep);
    rep.n = dimension(sigma);
    rep.vertices = vertices_of(sigma).size();
    rep.lambda_round = lambda_sphere(rep.n);

    stage = "entropy";
    rep.lambda_sigma = entropy_sup(sigma).value;
    rep.gap = rep.lambda_sigma - rep.lambda_round;

    stage = "eigenpair";
    const auto ep = lowest_eigenpair(sigma, params.eigen);
    rep.mu = ep.mu;

    stage = "perturb";
    const auto pr = perturb_inward(sigma, ep, params.perturb);
    rep.s = pr.s;
    rep.lambda_gamma = pr.entropy_gamma;
    rep.min_phi_gamma = pr.min_phi;
    rep.chain_gamma_sigma = pr.entropy_gamma < pr.entropy_sigma;

    stage = "flow";
    FlowParams fp = params.flow;
    fp.until_singularity = true;
    const auto tr = run_flow(pr.gamma, FlowKind::rescaled, fp);
    if (tr.stop == StopReason::t_max)
      throw NonConvergence("rescaled flow reached t_max = " + fmt12(fp.t_max) + " without a singularity");
    rep.monotonicity = check_monotonicity_suite(tr);
    rep.ratio = check_ratio_bound(tr);

    stage = "blowup_bound";
    const double C1 = 0.5 * max_radius(vertices_of(pr.gamma));
    rep.blowup_bound = blowup_time_bound(pr.min_phi, C1, rep.n);

    stage = "correspondence";
    const auto mcf = rescaled_to_mcf(tr);
    const auto ev_r = detect_singularity(tr);
    const auto ev = detect_singularity(mcf);
    if (!ev || !ev_r) throw NonConvergence("no singularity detected");
    rep.tau_rescaled = ev_r->tau;
    rep.tau_mcf = ev->tau;
    rep.singular_point = ev->y;

    stage = "tangent";
    const double h0 = std::sqrt(ev->tau - mcf.snapshots.front().t);
    const auto ts = tangent_rescalings(mcf, *ev, geometric_scales(h0, params.scale_count, params.scale_ratio));
    rep.line_factors = ts.line_factors;

    stage = "roundness";
    CurvatureBound cb{std::sqrt(tr.snapshots.front().diag.max_B2), C1};
    rep.roundness = check_tangent_roundness(ts, rep.n, cb);
    const TangentEntry* last = nullptr;
    for (const auto& e : ts.entries)
      if (!e.under_resolved && e.surface) last = &e;
    if (!last) throw NonConvergence("no resolved tangent rescaling");
    rep.tangent_radius = fit_sphere(*last->surface).radius;
    // A line factor leaves F unchanged, so the cross-section carries the entropy.
    rep.lambda_tangent = entropy_sup(*last->surface).value;
    rep.chain_round_tangent = rep.lambda_round <= rep.lambda_tangent + params.chain_tolerance;
    rep.chain_tangent_gamma = rep.lambda_tangent <= rep.lambda_gamma + params.chain_tolerance;
  } catch (const PropertyFailure& e) {
    rep.failed_stage = stage;
    rep.error = e.what();
    rep.error_property = e.property();
  } catch (const NonConvergence& e) {
    rep.failed_stage = stage;
    rep.error = e.what();
    rep.nonconvergence = true;
  } catch (const InvalidInput& e) {
    rep.failed_stage = stage;
    rep.error = e.what();
  }
  return rep;
}

inline void write_pipeline_report(std::ostream& os, const PipelineReport& r) {
  auto num = [&](const char* k, double v) {
    if (!std::isnan(v)) os << k << ": " << fmt12(v) << "\n";
  };
  os << "shrinker: " << r.shrinker << "\n";
  if (r.n) os << "dimension: " << r.n << "\n";
  if (r.vertices) os << "vertices: " << r.vertices << "\n";
  num("shrinker_residual", r.shrinker_residual);
  num("entropy_sigma", r.lambda_sigma);
  num("entropy_round", r.lambda_round);
  num("gap", r.gap);
  num("mu", r.mu);
  num("s", r.s);
  num("entropy_gamma", r.lambda_gamma);
  num("min_phi_gamma", r.min_phi_gamma);
  num("tau_rescaled", r.tau_rescaled);
  num("blowup_bound", r.blowup_bound);
  num("tau_mcf", r.tau_mcf);
  if (!r.singular_point.empty()) {
    os << "singular_point:";
    for (double v : r.singular_point) os << " " << fmt12(v);
    os << "\n";
  }
  if (r.roundness) os << "tangent_line_factors: " << r.line_factors << "\n";
  num("tangent_radius", r.tangent_radius);
  num("entropy_tangent", r.lambda_tangent);
  if (!std::isnan(r.lambda_tangent)) {
    os << "chain_round_le_tangent: " << (r.chain_round_tangent ? "holds" : "fails") << "\n"
       << "chain_tangent_le_gamma: " << (r.chain_tangent_gamma ? "holds" : "fails") << "\n";
  }
  if (!std::isnan(r.lambda_gamma)) os << "chain_gamma_lt_sigma: " << (r.chain_gamma_sigma ? "holds" : "fails") << "\n";
  if (r.monotonicity) write_report(os, *r.monotonicity);
  if (r.ratio) write_report(os, *r.ratio);
  if (r.roundness) write_report(os, *r.roundness);
  if (!r.completed()) {
    os << "failed_stage: " << r.failed_stage << "\n";
    if (r.error_property) os << "failed_property: " << r.error_property << "\n";
    os << "error: " << r.error << "\n";
  }
  os << "status: " << (r.passed() ? "PASSED" : "FAILED") << "\n";
}

// ---------------------------------------------------------------------------
// Entropy table

/// CSV of closed-form sphere, cylinder and hyperplane entropies and the
/// Simons cones (closed form and quadrature). The first cone below
/// lambda(S^1) is flagged.
inline std::string make_table(int max_n, int max_k) {
  if (max_n < 1 || max_k < 1) throw InvalidInput("make_table: max_n and max_k must be >= 1");
  std::ostringstream os;
  os << "object,n_or_k,entropy,method,error_estimate,note\n";
  for (int n = 1; n <= max_n; ++n) os << "hyperplane R^" << n << "," << n << "," << fmt12(1.0) << ",closed-form,0,\n";
  for (int n = 1; n <= max_n; ++n) os << "sphere S^" << n << "," << n << "," << fmt12(lambda_sphere(n)) << ",closed-form,0,\n";
  for (int n = 2; n <= max_n; ++n)
    for (int k = 1; k < n; ++k)
      os << "cylinder S^" << k << "xR^" << (n - k) << "," << n << "," << fmt12(lambda_cylinder(k, n - k))
         << ",closed-form,0,\n";
  const double l1 = lambda_sphere(1);
  bool flagged = false;
  for (int k = 1; k <= max_k; ++k) {
    const double v = simons_cone_entropy(k);
    std::string note;
    if (!flagged && v < l1) {
      note = "< lambda(S^1xR^" + std::to_string(2 * k) + ")";
      flagged = true;
    }
    os << "simons_cone k=" << k << "," << k << "," << fmt12(v) << ",closed-form,0," << note << "\n";
    const double q = simons_cone_entropy_quadrature(k, 400);
    const double q2 = simons_cone_entropy_quadrature(k, 800);
    // floored at the output resolution so rounding noise cannot leak into the table
    const double err = std::max(std::abs(q2 - q), 1e-12);
    os << "simons_cone k=" << k << "," << k << "," << fmt12(q) << ",quadrature," << fmt12(err) << ","
       << note << "\n";
  }
  return os.str();
}

}  // namespace gflow

#endif  // GFLOW_PIPELINE_HPP
