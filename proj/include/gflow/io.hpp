#ifndef GFLOW_IO_HPP
#define GFLOW_IO_HPP

// Text formats: surface files (docs/surface_format.md), flow trace CSV and
// trace directories, and the structured-text rendering of check reports.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gflow/errors.hpp"
#include "gflow/flow.hpp"
#include "gflow/geometry.hpp"
#include "gflow/properties.hpp"
#include "gflow/shrinkers.hpp"

namespace gflow {

/// Fixed 12-significant-digit rendering used for all reported numbers.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

// Shortest representation that reads back to the same double.
inline std::string exact(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw InvalidInput("cannot parse " + what + ": '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s, const std::string& what) {
  long v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw InvalidInput("cannot parse " + what + ": '" + s + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Surface files

struct SurfaceDocument {
  std::variant<Surface, AnalyticShape> geometry;
  std::string name;
  std::string provenance;
  std::vector<std::pair<std::string, std::string>> meta;

  const Surface& surface() const {
    if (const auto* s = std::get_if<Surface>(&geometry)) return *s;
    throw InvalidInput("surface file holds an analytic shape, a discretized surface is required");
  }
  bool is_analytic() const { return std::holds_alternative<AnalyticShape>(geometry); }
};

inline void write_surface(std::ostream& os, const SurfaceDocument& doc) {
  os << "gflow-surface 1\n";
  if (const auto* a = std::get_if<AnalyticShape>(&doc.geometry)) {
    os << "kind analytic\n";
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, SphereShape>)
            os << "shape sphere n=" << s.n << " radius=" << detail::exact(s.radius) << " shrinker=" << s.shrinker
               << "\n";
          else if constexpr (std::is_same_v<T, CylinderShape>)
            os << "shape cylinder k=" << s.k << " m=" << s.m << " radius=" << detail::exact(s.radius)
               << " shrinker=" << s.shrinker << "\n";
          else if constexpr (std::is_same_v<T, SimonsConeShape>)
            os << "shape simons_cone k=" << s.k << "\n";
          else
            os << "shape hyperplane n=" << s.n << "\n";
        },
        *a);
  } else {
    const Surface& s = std::get<Surface>(doc.geometry);
    if (const auto* c = std::get_if<DiscreteCurve>(&s))
      os << "kind curve\ntopology " << (c->embedding() == Embedding::simple ? "simple" : "immersed") << "\n";
    else
      os << "kind revolution\ntopology " << (std::get<ProfileSurface>(s).closed() ? "closed" : "axis") << "\n";
  }
  if (!doc.name.empty()) os << "name " << doc.name << "\n";
  if (!doc.provenance.empty()) os << "provenance " << doc.provenance << "\n";
  for (const auto& [k, v] : doc.meta) os << "meta " << k << " " << v << "\n";
  if (const auto* s = std::get_if<Surface>(&doc.geometry)) {
    const auto& v = vertices_of(*s);
    os << "vertices " << v.size() << "\n";
    for (const auto& p : v) os << detail::exact(p.x) << " " << detail::exact(p.y) << "\n";
  }
  os << "end\n";
}

inline SurfaceDocument read_surface(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      line = detail::trim(line);
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) { throw InvalidInput("surface file line " + std::to_string(lineno) + ": " + msg); };
  if (!next() || line != "gflow-surface 1") fail("expected header 'gflow-surface 1'");
  std::string kind, topology, shape, name, provenance;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Vec2> pts;
  bool have_vertices = false, ended = false;
  while (next()) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::string rest;
    std::getline(ls, rest);
    rest = detail::trim(rest);
    if (key == "kind") kind = rest;
    else if (key == "topology") topology = rest;
    else if (key == "name") name = rest;
    else if (key == "provenance") provenance = rest;
    else if (key == "shape") shape = rest;
    else if (key == "meta") {
      const auto sp = rest.find(' ');
      meta.emplace_back(rest.substr(0, sp), sp == std::string::npos ? "" : detail::trim(rest.substr(sp)));
    } else if (key == "vertices") {
      const long n = detail::parse_long(rest, "vertex count");
      if (n < 0) fail("negative vertex count");
      pts.reserve(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) {
        if (!next()) fail("file ends inside the vertex list");
        std::istringstream vs(line);
        std::string a, b, extra;
        if (!(vs >> a >> b) || (vs >> extra)) fail("expected two coordinates");
        pts.push_back({detail::parse_double(a, "coordinate"), detail::parse_double(b, "coordinate")});
      }
      have_vertices = true;
    } else if (key == "end") {
      ended = true;
      break;
    } else {
      fail("unknown field '" + key + "'");
    }
  }
  if (!ended) fail("missing 'end'");
  auto doc_of = [&](std::variant<Surface, AnalyticShape> g) {
    return SurfaceDocument{std::move(g), std::move(name), std::move(provenance), std::move(meta)};
  };
  if (kind == "curve") {
    if (!have_vertices) fail("curve without vertices");
    Embedding e = topology == "immersed" ? Embedding::immersed : Embedding::simple;
    if (topology != "simple" && topology != "immersed") fail("curve topology must be simple or immersed");
    return doc_of(Surface(DiscreteCurve(std::move(pts), e)));
  } else if (kind == "revolution") {
    if (!have_vertices) fail("revolution surface without vertices");
    if (topology != "closed" && topology != "axis") fail("revolution topology must be closed or axis");
    return doc_of(Surface(
        ProfileSurface(std::move(pts), topology == "closed" ? ProfileTopology::closed : ProfileTopology::axis)));
  } else if (kind == "analytic") {
    std::istringstream ss(shape);
    std::string type;
    ss >> type;
    std::map<std::string, std::string> kv;
    for (std::string tok; ss >> tok;) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) fail("shape parameter without '='");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto geti = [&](const char* k) {
      if (!kv.count(k)) fail(std::string("shape parameter '") + k + "' missing");
      return static_cast<int>(detail::parse_long(kv[k], k));
    };
    auto getd = [&](const char* k) {
      if (!kv.count(k)) fail(std::string("shape parameter '") + k + "' missing");
      return detail::parse_double(kv[k], k);
    };
    AnalyticShape a;
    if (type == "sphere") a = SphereShape{geti("n"), getd("radius"), kv.count("shrinker") && kv["shrinker"] == "1"};
    else if (type == "cylinder") a = CylinderShape{geti("k"), geti("m"), getd("radius"), !kv.count("shrinker") || kv["shrinker"] == "1"};
    else if (type == "simons_cone") a = SimonsConeShape{geti("k")};
    else if (type == "hyperplane") a = HyperplaneShape{geti("n")};
    else fail("unknown analytic shape '" + type + "'");
    validate(a);
    return doc_of(a);
  }
  fail("kind must be curve, revolution or analytic");
  return doc_of(AnalyticShape{});
}

inline void save_surface(const std::filesystem::path& path, const SurfaceDocument& doc) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path.string());
  write_surface(os, doc);
}

inline SurfaceDocument load_surface(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path.string());
  return read_surface(is);
}

// ---------------------------------------------------------------------------
// Traces

inline void write_trace_csv(std::ostream& os, const FlowTrace& tr) {
  os << "t,F01,entropy_lb,min_phi,max_A,max_B2,n_vertices,mesh_quality\n";
  for (const auto& s : tr.snapshots) {
    const auto& d = s.diag;
    os << fmt12(s.t) << "," << fmt12(d.F01) << "," << (std::isnan(d.entropy_lb) ? "" : fmt12(d.entropy_lb)) << ","
       << fmt12(d.min_phi) << "," << fmt12(d.max_A) << "," << (std::isnan(d.max_B2) ? "" : fmt12(d.max_B2)) << ","
       << d.n_vertices << "," << fmt12(d.edge_ratio) << "\n";
  }
}

/// Trace directory: trace.csv, trace.meta (key = value) and numbered
/// snapshot surface files snapshots/000000.surf, ...
inline void save_trace(const std::filesystem::path& dir, const FlowTrace& tr, double resolution_guard = 0.5) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "snapshots");
  {
    std::ofstream os(dir / "trace.csv");
    if (!os) throw InvalidInput("cannot write " + (dir / "trace.csv").string());
    write_trace_csv(os, tr);
  }
  {
    std::ofstream os(dir / "trace.meta");
    os << "kind = " << to_string(tr.kind) << "\n"
       << "scheme = " << to_string(tr.scheme) << "\n"
       << "redistributed = " << (tr.redistributed ? 1 : 0) << "\n"
       << "dt = " << detail::exact(tr.dt) << "\n"
       << "stop = " << to_string(tr.stop) << "\n"
       << "truncated = " << (tr.truncated ? 1 : 0) << "\n"
       << "steps = " << tr.steps << "\n"
       << "remeshes = " << tr.remeshes << "\n"
       << "resolution_guard = " << detail::exact(resolution_guard) << "\n"
       << "snapshots = " << tr.size() << "\n";
    for (std::size_t k = 0; k < tr.size(); ++k) os << "time." << k << " = " << detail::exact(tr.snapshots[k].t) << "\n";
  }
  for (std::size_t k = 0; k < tr.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.surf", k);
    save_surface(dir / "snapshots" / name, {tr.snapshots[k].surface, "", "", {}});
  }
}

inline std::map<std::string, std::string> read_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("expected 'key = value': " + line);
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

/// Reads a trace directory; diagnostics are recomputed from the snapshots.
inline FlowTrace load_trace(const std::filesystem::path& dir) {
  std::ifstream is(dir / "trace.meta");
  if (!is) throw InvalidInput("cannot open " + (dir / "trace.meta").string());
  auto kv = read_key_values(is);
  auto get = [&](const std::string& k) {
    if (!kv.count(k)) throw InvalidInput("trace.meta: missing '" + k + "'");
    return kv[k];
  };
  FlowTrace tr;
  tr.kind = get("kind") == "mcf" ? FlowKind::mcf : FlowKind::rescaled;
  tr.scheme = get("scheme") == "explicit" ? Scheme::explicit_euler : Scheme::semi_implicit;
  tr.redistributed = get("redistributed") == "1";
  tr.dt = detail::parse_double(get("dt"), "dt");
  const std::string stop = get("stop");
  for (auto r : {StopReason::t_max, StopReason::curvature_cap, StopReason::dt_collapse, StopReason::under_resolved,
                 StopReason::degenerate})
    if (stop == to_string(r)) tr.stop = r;
  tr.truncated = get("truncated") == "1";
  tr.steps = static_cast<std::size_t>(detail::parse_long(get("steps"), "steps"));
  tr.remeshes = static_cast<std::size_t>(detail::parse_long(get("remeshes"), "remeshes"));
  const double guard = detail::parse_double(get("resolution_guard"), "resolution_guard");
  const long n = detail::parse_long(get("snapshots"), "snapshots");
  for (long k = 0; k < n; ++k) {
    const double t = detail::parse_double(get("time." + std::to_string(k)), "time");
    char name[32];
    std::snprintf(name, sizeof name, "%06ld.surf", k);
    Surface s = load_surface(dir / "snapshots" / name).surface();
    Diagnostics d = diagnose(s, t, tr.kind, false, guard);
    tr.snapshots.push_back({t, std::move(s), d});
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Reports

inline void write_report(std::ostream& os, const CheckReport& r, int depth = 0) {
  const std::string ind(static_cast<std::size_t>(2 * depth), ' ');
  os << ind << "check: " << r.name << "\n"
     << ind << "  result: " << (r.passed ? "pass" : "fail") << (r.applicable ? "" : " (vacuous or aggregate)") << "\n"
     << ind << "  margin: " << fmt12(r.margin) << "\n"
     << ind << "  tolerance: " << fmt12(r.tolerance) << "\n"
     << ind << "  h: " << fmt12(r.h) << "\n"
     << ind << "  dt: " << fmt12(r.dt) << "\n";
  if (!std::isnan(r.worst_time)) os << ind << "  worst_time: " << fmt12(r.worst_time) << "\n";
  if (r.worst_vertex >= 0) os << ind << "  worst_vertex: " << r.worst_vertex << "\n";
  for (const auto& n : r.notes) os << ind << "  note: " << n << "\n";
  for (const auto& s : r.sub) write_report(os, s, depth + 1);
}

}  // namespace gflow

#endif  // GFLOW_IO_HPP
