// gflow: entropy tables, flows, shrinker construction, perturbation,
// property checks and the end-to-end pipeline from the command line.
//
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 non-convergence.
// Nothing is random; every command is a pure function of its flags.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gflow/entropy.hpp"
#include "gflow/errors.hpp"
#include "gflow/flow.hpp"
#include "gflow/io.hpp"
#include "gflow/pipeline.hpp"
#include "gflow/properties.hpp"
#include "gflow/shapes.hpp"
#include "gflow/shrinkers.hpp"
#include "gflow/stability.hpp"

namespace fs = std::filesystem;
using namespace gflow;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kUsage = 2, kNonConvergence = 3;

struct FlowFlags {
  double dt{1e-3};
  std::string scheme{"semi-implicit"};
  bool until_singularity{true};
  double t_max{10.0};
  double snapshots_every{0.0};
  bool no_redistribute{false};
  std::string kind{"rescaled"};

  void add(CLI::App* app) {
    app->add_option("--dt", dt, "Nominal time step")->capture_default_str();
    app->add_option("--scheme", scheme, "explicit or semi-implicit")
        ->check(CLI::IsMember({"explicit", "semi-implicit"}))
        ->capture_default_str();
    app->add_option("--until-singularity", until_singularity, "Stop at under-resolution (true/false)")
        ->capture_default_str();
    app->add_option("--t-max", t_max, "Final time")->capture_default_str();
    app->add_option("--snapshots-every", snapshots_every, "Snapshot interval (0: every step)")->capture_default_str();
    app->add_flag("--no-redistribute", no_redistribute, "Pure normal motion");
    app->add_option("--kind", kind, "rescaled or mcf")->check(CLI::IsMember({"rescaled", "mcf"}))->capture_default_str();
  }

  FlowParams params() const {
    FlowParams p;
    p.dt = dt;
    p.scheme = scheme == "explicit" ? Scheme::explicit_euler : Scheme::semi_implicit;
    p.until_singularity = until_singularity;
    p.t_max = t_max;
    p.snapshot_every = snapshots_every;
    p.redistribute = !no_redistribute;
    return p;
  }
  FlowKind flow_kind() const { return kind == "mcf" ? FlowKind::mcf : FlowKind::rescaled; }
};

void print_entropy(const EntropyResult& r) {
  std::cout << "entropy: " << fmt12(r.value) << "\n";
  std::cout << "argmax_x0:";
  for (double v : r.argmax.x0) std::cout << " " << fmt12(v);
  std::cout << "\nargmax_t0: " << fmt12(r.argmax.t0) << "\n"
            << "status: " << to_string(r.status) << "\n"
            << "starts: " << r.starts << "\n"
            << "axis_restricted: " << (r.axis_restricted ? "yes" : "no") << "\n";
}

int cmd_table(int max_n, int max_k, const std::string& out) {
  const std::string csv = make_table(max_n, max_k);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(out);
    if (!os) throw InvalidInput("cannot write " + out);
    os << csv;
  }
  return kOk;
}

int cmd_entropy(const std::string& input) {
  const auto doc = load_surface(input);
  if (const auto* a = std::get_if<AnalyticShape>(&doc.geometry)) {
    std::cout << "shape: " << describe(*a) << "\nentropy: " << fmt12(entropy_exact(*a)) << "\nmethod: closed-form\n";
    return kOk;
  }
  print_entropy(entropy_sup(doc.surface()));
  return kOk;
}

int cmd_flow(const std::string& input, const FlowFlags& ff, const std::string& trace_dir) {
  const auto doc = load_surface(input);
  const FlowParams p = ff.params();
  const auto tr = run_flow(doc.surface(), ff.flow_kind(), p);
  if (trace_dir.empty()) write_trace_csv(std::cout, tr);
  else save_trace(trace_dir, tr, p.resolution_guard);
  std::cerr << "steps: " << tr.steps << ", snapshots: " << tr.size() << ", stop: " << to_string(tr.stop)
            << ", t_end: " << fmt12(tr.snapshots.back().t) << "\n";
  if (tr.stop != StopReason::t_max && tr.size() >= 10) {
    if (const auto ev = detect_singularity(tr)) {
      std::cerr << "singular_time: " << fmt12(ev->tau) << " (fit r^2 " << fmt12(ev->fit_r2) << ")\n";
    }
  }
  return kOk;
}

int cmd_shoot(const std::string& which, std::size_t resolution, const std::string& out) {
  const auto id = parse_shrinker(which);
  ShootingOptions so;
  so.resolution = resolution;
  ShootingResult r = [&] {
    if (id.kind == ShrinkerId::Kind::torus) return angenent_torus(so);
    if (id.kind == ShrinkerId::Kind::abresch_langer) return abresch_langer(id.p, id.q, so);
    throw InvalidInput("shoot constructs torus or al(p,q)");
  }();
  SurfaceDocument doc{r.surface, id.str(), "shooting", {}};
  if (id.kind == ShrinkerId::Kind::torus) doc.meta.emplace_back("r0", fmt12(r.parameter));
  else {
    doc.meta.emplace_back("p", std::to_string(id.p));
    doc.meta.emplace_back("q", std::to_string(id.q));
    doc.meta.emplace_back("initial_distance", fmt12(r.parameter));
  }
  doc.meta.emplace_back("residual", fmt12(r.residual));
  if (out.empty()) write_surface(std::cout, doc);
  else save_surface(out, doc);
  std::cerr << "residual: " << fmt12(r.residual) << ", parameter: " << fmt12(r.parameter)
            << ", F(0,1): " << fmt12(f_at_origin(r.surface)) << "\n";
  return kOk;
}

int cmd_perturb(const std::string& input, const std::string& out, double start_factor, bool allow_round) {
  const auto doc = load_surface(input);
  const Surface& sigma = doc.surface();
  const auto ep = lowest_eigenpair(sigma);
  std::cout << "mu: " << fmt12(ep.mu) << "\n"
            << "eigen_residual: " << fmt12(ep.residual) << "\n"
            << "symmetric_restriction: " << (ep.symmetric_restriction ? "yes" : "no") << "\n";
  PerturbOptions po;
  po.start_factor = start_factor;
  po.allow_round = allow_round;
  try {
    const auto pr = perturb_inward(sigma, ep, po);
    std::cout << "s: " << fmt12(pr.s) << "\n"
              << "halvings: " << pr.halvings << "\n"
              << "property_1_entropy: " << fmt12(pr.entropy_gamma) << " < " << fmt12(pr.entropy_sigma) << "\n"
              << "property_2_containment: " << to_string(pr.contained) << "\n"
              << "property_3_min_phi: " << fmt12(pr.min_phi) << "\n";
    SurfaceDocument g{pr.gamma, doc.name.empty() ? "gamma" : doc.name + "-perturbed", "perturb_inward", {}};
    g.meta.emplace_back("s", fmt12(pr.s));
    g.meta.emplace_back("mu", fmt12(pr.mu));
    if (!out.empty()) save_surface(out, g);
  } catch (const PropertyFailure& e) {
    std::cout << "failed_property: " << e.property() << "\nerror: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kOk;
}

struct VerifyFlags {
  std::string suite{"all"};
  std::string input;
  std::vector<std::size_t> ladder{128, 256, 512};
  double ladder_t_max{0.05};
  FlowFlags flow;
};

// Traces for the checks when the input is a surface rather than a saved trace.
FlowTrace simons_trace(const Surface& s, std::size_t n, double t_max) {
  Surface r = resample_uniform(s, n);
  FlowParams p;
  p.scheme = Scheme::explicit_euler;
  p.redistribute = false;
  const double h = quantities(r).quality.max_edge;
  p.dt = 0.1 * h * h;
  p.t_max = t_max;
  p.until_singularity = false;
  return run_flow(r, FlowKind::rescaled, p);
}

int cmd_verify(const VerifyFlags& vf) {
  const bool all = vf.suite == "all";
  std::vector<CheckReport> reports;
  std::optional<FlowTrace> trace;
  std::optional<Surface> surface;
  if (fs::is_directory(vf.input)) trace = load_trace(vf.input);
  else surface = load_surface(vf.input).surface();

  auto rescaled_trace = [&]() -> const FlowTrace& {
    if (!trace) trace = run_flow(*surface, FlowKind::rescaled, vf.flow.params());
    return *trace;
  };

  if (all || vf.suite == "simons") {
    if (surface) {
      std::vector<FlowTrace> ladder;
      for (std::size_t n : vf.ladder) ladder.push_back(simons_trace(*surface, n, vf.ladder_t_max));
      reports.push_back(check_simons_identities(ladder));
    } else {
      reports.push_back(check_simons_identities(*trace));
    }
  }
  if (all || vf.suite == "monotone") reports.push_back(check_monotonicity_suite(rescaled_trace()));
  if (all || vf.suite == "ratio") reports.push_back(check_ratio_bound(rescaled_trace()));
  if (all || vf.suite == "tangent") {
    const FlowTrace& tr = rescaled_trace();
    const auto mcf = tr.kind == FlowKind::mcf ? tr : rescaled_to_mcf(tr);
    const auto ev = detect_singularity(mcf);
    if (!ev) throw NonConvergence("tangent suite: the flow reached t_max without a singularity");
    const double h0 = std::sqrt(ev->tau - mcf.snapshots.front().t);
    const auto ts = tangent_rescalings(mcf, *ev, geometric_scales(h0, 10));
    reports.push_back(check_tangent_roundness(ts, dimension(mcf.snapshots.front().surface)));
  }
  bool ok = true;
  for (const auto& r : reports) {
    write_report(std::cout, r);
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_pipeline(const std::string& which, const std::string& out) {
  const auto rep = run_pipeline(parse_shrinker(which));
  std::ostringstream os;
  write_pipeline_report(os, rep);
  std::cout << os.str();
  if (!out.empty()) {
    std::ofstream f(out);
    f << os.str();
  }
  if (rep.passed()) return kOk;
  return rep.nonconvergence ? kNonConvergence : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian entropy, mean curvature flow and self-shrinker experiments"};
  app.set_config("--config", "", "key = value file setting any flag; command-line flags take precedence");
  app.require_subcommand(1);

  int max_n = 8, max_k = 12;
  std::string out;
  auto* table = app.add_subcommand("table", "Closed-form and quadrature entropy table (CSV)");
  table->add_option("--max-n", max_n, "Largest sphere dimension")->capture_default_str();
  table->add_option("--max-k", max_k, "Largest Simons cone index")->capture_default_str();
  table->add_option("-o,--output", out, "Write to file instead of stdout");

  std::string input;
  auto* entropy = app.add_subcommand("entropy", "Entropy of a surface file");
  entropy->add_option("-i,--input", input, "Surface file")->required();

  FlowFlags ff;
  std::string trace_dir;
  auto* flow = app.add_subcommand("flow", "Run MCF or rescaled MCF; trace CSV on stdout or a trace directory");
  flow->add_option("-i,--input", input, "Surface file")->required();
  flow->add_option("--trace", trace_dir, "Directory for trace.csv, trace.meta and numbered snapshots");
  ff.add(flow);

  std::string which = "torus";
  std::size_t resolution = 512;
  auto* shoot = app.add_subcommand("shoot", "Construct a shrinker by shooting");
  shoot->add_option("--shrinker", which, "torus or al(p,q)")->capture_default_str();
  shoot->add_option("--resolution", resolution, "Output vertex count")->capture_default_str();
  shoot->add_option("-o,--output", out, "Surface file (default stdout)");

  double start_factor = PerturbOptions{}.start_factor;
  bool allow_round = false;
  auto* perturb = app.add_subcommand("perturb", "Inward perturbation of a shrinker along its lowest eigenfunction");
  perturb->add_option("-i,--input", input, "Shrinker surface file")->required();
  perturb->add_option("-o,--output", out, "Perturbed surface file");
  perturb->add_option("--start-factor", start_factor, "Initial |s| in units of min edge / max u")
      ->capture_default_str();
  perturb->add_flag("--allow-round", allow_round, "Perturb even when mu is not above 1 (testing only)");

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "Property checks on a trace directory or a surface file");
  verify->add_option("--suite", vf.suite, "simons, monotone, ratio, tangent or all")
      ->check(CLI::IsMember({"simons", "monotone", "ratio", "tangent", "all"}))
      ->capture_default_str();
  verify->add_option("-i,--input", vf.input, "Trace directory or surface file")->required();
  verify->add_option("--ladder", vf.ladder, "Vertex counts of the refinement ladder")->capture_default_str();
  verify->add_option("--ladder-t-max", vf.ladder_t_max, "Duration of the ladder runs")->capture_default_str();
  vf.flow.add(verify);

  auto* pipeline = app.add_subcommand("pipeline", "Shrinker -> perturbation -> flow -> tangent flow -> entropy chain");
  pipeline->add_option("--shrinker", which, "torus, al(p,q), sphere or circle")->capture_default_str();
  pipeline->add_option("-o,--output", out, "Also write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*table) return cmd_table(max_n, max_k, out);
    if (*entropy) return cmd_entropy(input);
    if (*flow) return cmd_flow(input, ff, trace_dir);
    if (*shoot) return cmd_shoot(which, resolution, out);
    if (*perturb) return cmd_perturb(input, out, start_factor, allow_round);
    if (*verify) return cmd_verify(vf);
    if (*pipeline) return cmd_pipeline(which, out);
  } catch (const PropertyFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
