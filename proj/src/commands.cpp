#include "ukhlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "ukhlab/error.hpp"
#include "ukhlab/sobolev.hpp"
#include "ukhlab/ufh.hpp"

namespace ukh {

namespace {

using io::Json;

// Typed access to request fields plus bookkeeping of input files.
class Request {
 public:
  Request(const Json& j, Json& report) : j_(j), report_(report) {
    if (!j_.is_object()) fail(ErrorCode::InvalidInput, "request: expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

  std::string file(const std::string& key) const {
    const auto p = string(key);
    auto text = io::read_file(p);
    report_["inputs"].push_back({{"field", key}, {"path", p}, {"digest", io::hex64(io::fnv1a64(text))}});
    return text;
  }

  std::string string(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::InvalidInput, "request: /" + key + ": missing field");
    if (!j_[key].is_string()) fail(ErrorCode::InvalidInput, "request: /" + key + ": expected a string");
    return j_[key].get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) const { return has(key) ? string(key) : def; }

  double number(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::InvalidInput, "request: /" + key + ": missing field");
    if (!j_[key].is_number()) fail(ErrorCode::InvalidInput, "request: /" + key + ": expected a number");
    return j_[key].get<double>();
  }
  double number(const std::string& key, double def) const { return has(key) ? number(key) : def; }

  std::int64_t integer(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::InvalidInput, "request: /" + key + ": missing field");
    if (!j_[key].is_number_integer()) fail(ErrorCode::InvalidInput, "request: /" + key + ": expected an integer");
    return j_[key].get<std::int64_t>();
  }
  std::int64_t integer(const std::string& key, std::int64_t def) const { return has(key) ? integer(key) : def; }

  bool flag(const std::string& key) const {
    if (!has(key)) return false;
    if (!j_[key].is_boolean()) fail(ErrorCode::InvalidInput, "request: /" + key + ": expected a boolean");
    return j_[key].get<bool>();
  }

  std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> def) const {
    if (!has(key)) return def;
    if (!j_[key].is_array()) fail(ErrorCode::InvalidInput, "request: /" + key + ": expected an array");
    std::vector<std::int64_t> out;
    for (const auto& v : j_[key]) {
      if (!v.is_number_integer()) fail(ErrorCode::InvalidInput, "request: /" + key + ": expected integers");
      out.push_back(v.get<std::int64_t>());
    }
    return out;
  }

  bool csv() const { return string("format", "json") == "csv"; }

 private:
  const Json& j_;
  Json& report_;
};

struct Context {
  Request req;
  Json& out;
  Json& report;
  void warn(const std::string& w) { report["warnings"].push_back(w); }
  void csv(const std::string& text) { report["csv"] = text; }
};

GraphPresentation load_graph(const Context& c, const std::string& key = "input") {
  const auto path = c.req.string(key);
  return io::graph_from_json(io::parse_json(c.req.file(key), path), path);
}

Matrix load_matrix(const Context& c, const std::string& key = "input") {
  const auto path = c.req.string(key);
  return io::matrix_from_csv(c.req.file(key), path);
}

SymMatrix load_symmetric(const Context& c, const std::string& key = "input") {
  const auto path = c.req.string(key);
  const Matrix m = load_matrix(c, key);
  try {
    return SymMatrix(m, c.req.number("symmetry_tol", defaults::kSymmetryTol));
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

Json edge_json(const Edge& e) { return Json::array({e.source, e.target}); }

Json cycle_json(const Cycle& cyc) {
  Json edges = Json::array();
  for (const auto& e : cyc.edges) edges.push_back(edge_json(e));
  return {{"vertices", cyc.vertices}, {"edges", edges}, {"edge_ids", cyc.edge_ids}};
}

Json ends_json(const EndsResult& e) {
  return {{"ends", to_string(e.ends)}, {"exact", e.exact}, {"radius", e.radius},
          {"shell_components", e.shell_components}};
}

Json flow_json(const FlowCertificate& f) {
  return {{"feasible", f.feasible}, {"max_flow", f.max_flow}, {"interior", f.interior}, {"capacity", f.capacity}};
}

Json window_index_json(const WindowIndexResult& r) {
  Json per = Json::array();
  std::vector<std::int64_t> sizes;
  for (const auto& w : r.windows) {
    sizes.push_back(w.window);
    per.push_back({{"window", w.window}, {"kernel", w.kernel}, {"cokernel", w.cokernel}, {"index", w.index()},
                   {"smallest_kept_singular_value", std::isfinite(w.smallest_kept) ? Json(w.smallest_kept) : Json()}});
  }
  Json j{{"windows", sizes}, {"per_window", per}, {"band", r.band}};
  j["stabilized_index"] = r.stabilized_index ? Json(*r.stabilized_index) : Json("unstable");
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json spectrum_values(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string complex_csv(const CMatrix& m) {
  const auto [re, im] = io::complex_to_csv(m);
  return re + "\n" + im;
}

NormalizingFunction make_chi(const Context& c, double gap) {
  const auto name = c.req.string("chi", "smooth-sign");
  if (name == "smooth-sign") return NormalizingFunction::smooth_sign(gap);
  if (name == "chebyshev-sign") return NormalizingFunction::chebyshev_sign(static_cast<int>(c.req.integer("degree", 16)), gap);
  if (name == "arctan") return NormalizingFunction::scaled_arctan();
  fail(ErrorCode::InvalidInput, "request: /chi: unknown normalizing function '" + name +
                                    "' (smooth-sign, chebyshev-sign, arctan)");
}

IndexOptions index_options(const Context& c, std::vector<std::int64_t> default_windows) {
  IndexOptions o;
  o.windows = c.req.integers("windows", std::move(default_windows));
  o.kernel_tol = c.req.number("tol", defaults::kKernelSingularTol);
  o.stabilization = static_cast<int>(c.req.integer("stabilization", defaults::kStabilizationWindows));
  return o;
}

std::vector<std::int64_t> default_windows() {
  return {defaults::kIndexWindows.begin(), defaults::kIndexWindows.end()};
}

ApsModel aps_model(const Context& c, SymMatrix a) {
  ApsModel m(std::move(a));
  m.horizon = c.req.number("horizon", defaults::kApsHorizon);
  m.step = c.req.number("step", defaults::kApsStep);
  m.divergence = c.req.number("divergence", defaults::kApsDivergence);
  m.stabilization = c.req.number("stabilization", defaults::kApsStabilization);
  m.max_doublings = static_cast<int>(c.req.integer("max_doublings", defaults::kApsMaxDoublings));
  if (c.req.has("tol")) m.zero_tol = c.req.number("tol");
  return m;
}

Json state_json(const SpinorGridState& s) {
  Json up = Json::array(), um = Json::array();
  for (std::int64_t j = 0; j < s.size(); ++j) {
    up.push_back({s.up[j].real(), s.up[j].imag()});
    um.push_back({s.um[j].real(), s.um[j].imag()});
  }
  return {{"x0", s.x0}, {"h", s.h}, {"up", up}, {"um", um}};
}

Json support_json(const std::optional<std::pair<std::int64_t, std::int64_t>>& s) {
  if (!s) return nullptr;
  return Json::array({s->first, s->second});
}

BoundaryCondition boundary(const Context& c) {
  const auto b = c.req.string("boundary", "free");
  if (b == "free") return BoundaryCondition::free_line();
  if (b == "chirality") return BoundaryCondition::chirality(static_cast<int>(c.req.integer("sign", 1)));
  if (b == "periodic") return BoundaryCondition::periodic_shift();
  fail(ErrorCode::InvalidInput, "request: /boundary: expected free, chirality or periodic");
}

SpinorGridState load_state(const Context& c) {
  const auto path = c.req.string("input");
  return io::state_from_csv(c.req.file("input"), c.req.number("x0", 0.0), c.req.number("h"), path);
}

Json report_json(const PropagationReport& r) {
  return {{"initial_support", Json::array({r.initial_support.first, r.initial_support.second})},
          {"evolved_support", support_json(r.evolved_support)},
          {"t", r.t},
          {"speed", r.speed},
          {"speed_bound", r.speed_bound},
          {"measured_growth", r.measured_growth},
          {"contained", r.contained},
          {"violation", r.violation}};
}

Matrix random_gapped(std::mt19937_64& rng, int n, double gap) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> mag(gap, gap + 3);
  std::bernoulli_distribution sign;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  const Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = sign(rng) ? mag(rng) : -mag(rng);
  const Matrix a = q * d.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

// ---- graph ----

void graph_homology(Context& c) {
  const auto g = load_graph(c);
  if (g.kind() != PresentationKind::Finite) {
    fail(ErrorCode::Unsupported, "homology is computed for finite graphs; use graph classify for infinite ones");
  }
  const auto h = homology_finite(g.finite_graph());
  c.out = {{"h0", h.h0_rank},
           {"h1", h.h1_rank},
           {"torsion", h.torsion},
           {"boundary_rank", h.boundary_rank},
           {"vertices", g.finite_graph().vertex_count},
           {"edges", g.finite_graph().edges.size()}};
}

void graph_classify(Context& c) {
  const auto g = load_graph(c);
  ClassifyOptions o;
  o.flow_capacity = c.req.integer("flow_capacity", o.flow_capacity);
  o.flow_radius_min = c.req.integer("radius_min", o.flow_radius_min);
  o.flow_radius_max = c.req.integer("radius_max", o.flow_radius_max);
  o.folner_epsilon = c.req.number("folner_epsilon", o.folner_epsilon);
  o.ends_radius = c.req.integer("ends_radius", o.ends_radius);
  const auto r = classify_k(g, o);
  c.out = {{"kind", to_string(g.kind())},
           {"k0_zero", to_string(r.k0_zero)},
           {"k1_zero", to_string(r.k1_zero)},
           {"evidence", r.evidence}};
  if (r.forest) c.out["forest"] = *r.forest;
  if (r.ends) c.out["ends"] = ends_json(*r.ends);
  if (r.circuit) c.out["circuit"] = cycle_json(*r.circuit);
  if (r.line_cycle) {
    Json cells = Json::array();
    for (const auto& s : r.line_cycle->cell) cells.push_back(io::sequence_to_json(s));
    c.out["line_cycle"] = {{"head", r.line_cycle->head}, {"attach", r.line_cycle->attach}, {"cell", cells}};
  }
  if (!r.flows.empty()) {
    Json flows = Json::array();
    for (std::size_t i = 0; i < r.flows.size(); ++i) {
      auto f = flow_json(r.flows[i]);
      f["radius"] = r.flow_radii[i];
      flows.push_back(f);
    }
    c.out["flows"] = flows;
  }
  if (r.folner) {
    c.out["folner"] = {{"radius", r.folner->radius},
                       {"boundary", r.folner->boundary},
                       {"volume", r.folner->volume},
                       {"ratio", r.folner->ratio}};
  }
  if (r.k0_zero == Verdict::Unknown || r.k1_zero == Verdict::Unknown) c.warn("classification left a verdict unknown");
}

void graph_ends(Context& c) {
  const auto g = load_graph(c);
  c.out = ends_json(count_ends(g, c.req.integer("radius", defaults::kEndsRadius)));
}

void graph_forest(Context& c) {
  const auto g = load_graph(c);
  const auto r = is_forest(g);
  c.out = {{"is_forest", r.is_forest}, {"cycle_rank", r.cycle_rank}};
  c.out["cycle"] = r.cycle ? cycle_json(*r.cycle) : Json();
}

// ---- sequences and flows ----

void seq_in_s(Context& c) {
  const auto path = c.req.string("input");
  const auto seq = io::sequence_from_json(io::parse_json(c.req.file("input"), path), path);
  const auto side_name = c.req.string("side", "both");
  Side side = Side::Both;
  if (side_name == "left") {
    side = Side::Left;
  } else if (side_name == "right") {
    side = Side::Right;
  } else if (side_name != "both") {
    fail(ErrorCode::InvalidInput, "request: /side: expected left, right or both");
  }
  const auto r = in_s(seq, side);
  c.out = {{"in_s", r.in_s}, {"side", to_string(side)}, {"shift_kernel", shift_kernel_check(seq)}};
  if (r.in_s) {
    c.out["bound"] = r.bound;
  } else {
    c.out["unbounded_side"] = to_string(*r.unbounded_side);
    c.out["drift"] = r.drift.to_string();
    const auto candidate = c.req.integer("witness_candidate", 1000);
    const auto w = witness_exceeding(seq, *r.unbounded_side, candidate);
    c.out["witness"] = {{"candidate", candidate}, {"index", w.index}, {"partial_sum", w.value}};
  }
}

void seq_class(Context& c) {
  const auto g = load_graph(c, "graph");
  const auto path = c.req.string("input");
  const auto seq = io::sequence_from_json(io::parse_json(c.req.file("input"), path), path);
  const auto inv = k0_class_invariant(g, seq);
  c.out = {{"right_density", inv.right_density.to_string()}};
  c.out["left_density"] = inv.left_density ? Json(inv.left_density->to_string()) : Json();
}

void flow_find(Context& c) {
  const auto g = load_graph(c);
  const auto base = c.req.integer("base", g.default_base());
  const auto radius = c.req.integer("radius", 4);
  const auto cap = c.req.integer("capacity", defaults::kFlowCapacity);
  const auto w = window(g, base, radius);
  const auto f = divergence_one_flow(w, cap);
  c.out = flow_json(f);
  c.out["radius"] = radius;
  c.out["base"] = base;
  c.out["window_vertices"] = w.graph.vertex_count;
  if (f.feasible) {
    Json chain = Json::array();
    for (std::size_t e = 0; e < f.chain.size(); ++e) {
      if (f.chain[e] == 0) continue;
      const auto& edge = w.graph.edges[e];
      chain.push_back({{"edge", Json::array({w.parent_ids[edge.source], w.parent_ids[edge.target]})},
                       {"value", f.chain[e]}});
    }
    const auto d = boundary1(w.graph, f.chain);
    bool verified = true;
    for (std::int64_t v = 0; v < w.graph.vertex_count; ++v) {
      if (!w.is_boundary(v)) verified = verified && d[v] == 1;
    }
    c.out["chain"] = chain;
    c.out["verified"] = verified;
  }
}

// ---- spectral toolkit ----

void spec_eigen(Context& c) {
  const auto a = load_symmetric(c);
  const auto s = eigensolve(a, c.req.number("tol", defaults::kEigenResidualTol));
  c.out = {{"values", spectrum_values(s.values)},
           {"residual", s.residual},
           {"orthogonality", s.orthogonality},
           {"norm", s.norm}};
  if (c.req.csv()) c.csv(io::matrix_to_csv(s.vectors));
}

void spec_eta(Context& c) {
  const auto s = eigensolve(load_symmetric(c));
  std::optional<double> tol;
  if (c.req.has("tol")) tol = c.req.number("tol");
  const double sval = c.req.number("s", 0.0);
  c.out = {{"eta", eta(s, sval, tol)}, {"s", sval}};
  c.out["zero_tol"] = tol ? *tol : defaults::kRelativeZeroTol * s.norm;
}

void spec_bounded(Context& c) {
  const Matrix z = bounded_transform(load_matrix(c));
  c.out = {{"norm", operator_norm(z)}, {"matrix", io::matrix_to_json(z)}};
  if (c.req.csv()) c.csv(io::matrix_to_csv(z));
}

void spec_cayley(Context& c) {
  CMatrix u;
  if (c.req.has("imag")) {
    const auto path = c.req.string("input");
    const auto re = c.req.file("input");
    const auto im = c.req.file("imag");
    u = cayley_hermitian(io::complex_from_csv(re, im, path));
  } else {
    u = cayley(load_symmetric(c));
  }
  const auto n = u.rows();
  c.out = {{"unitarity_residual", (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff()},
           {"matrix", io::complex_to_json(u)}};
  if (c.req.csv()) c.csv(complex_csv(u));
}

void spec_cheb(Context& c) {
  const Matrix m = load_matrix(c);
  const auto band = c.req.integer("band", observed_band(m));
  const BandedMatrix b(m, band);
  const auto name = c.req.string("function", "smooth-sign");
  std::function<double(double)> f;
  if (name == "smooth-sign") {
    const auto chi = NormalizingFunction::smooth_sign(c.req.number("gap"));
    f = [chi](double x) { return chi(x); };
  } else if (name == "arctan") {
    f = [](double x) { return std::atan(x); };
  } else if (name == "exp") {
    f = [](double x) { return std::exp(x); };
  } else if (name == "tanh") {
    f = [](double x) { return std::tanh(x); };
  } else {
    fail(ErrorCode::InvalidInput, "request: /function: expected smooth-sign, arctan, exp or tanh");
  }
  const int degree = static_cast<int>(c.req.integer("degree", 16));
  double lo = -1, hi = 1;
  const bool symmetric = (m - m.transpose()).cwiseAbs().maxCoeff() <= defaults::kSymmetryTol * std::max(1.0, m.cwiseAbs().maxCoeff());
  std::optional<Spectrum> spec;
  if (symmetric) {
    spec = eigensolve(SymMatrix(m));
    if (spec->norm > 0) lo = -spec->norm, hi = spec->norm;
  } else {
    const double norm = operator_norm(m);
    if (norm > 0) lo = -norm, hi = norm;
  }
  lo = c.req.number("lo", lo);
  hi = c.req.number("hi", hi);
  const auto r = chebyshev_banded(b, f, degree, lo, hi, static_cast<int>(c.req.integer("samples", defaults::kChebyshevErrorSamples)));
  c.out = {{"degree", degree},
           {"input_band", band},
           {"band", observed_band(r.matrix.matrix())},
           {"band_bound", static_cast<std::int64_t>(degree) * band},
           {"interval", Json::array({lo, hi})},
           {"coefficients", r.coefficients},
           {"sup_error_bound", r.sup_error_bound},
           {"matrix", io::matrix_to_json(r.matrix.matrix())}};
  if (spec && spec->values.minCoeff() >= lo && spec->values.maxCoeff() <= hi) {
    const Matrix exact = apply_function(*spec, f).matrix();
    const double err = operator_norm(Matrix(r.matrix.matrix() - exact));
    c.out["error_vs_exact"] = err;
    if (err > r.sup_error_bound) c.warn("error against the exact calculus exceeds the reported bound");
  }
  if (c.req.csv()) c.csv(io::matrix_to_csv(r.matrix.matrix()));
}

// ---- waves ----

void wave_evolve(Context& c) {
  const auto s = load_state(c);
  const double t = c.req.number("t");
  const auto e = evolve(s, t, boundary(c));
  c.out = {{"t", t},
           {"boundary", to_string(boundary(c).kind)},
           {"norm_before", s.norm()},
           {"norm_after", e.norm()},
           {"norm_drift", std::abs(e.norm() - s.norm())},
           {"support_before", support_json(s.support())},
           {"support_after", support_json(e.support())},
           {"state", state_json(e)}};
  if (c.req.csv()) c.csv(io::state_to_csv(e));
}

void wave_report(Context& c) {
  const double speed = c.req.number("speed", 1.0);
  if (c.req.flag("sweep")) {
    const auto sites = c.req.integer("sites", 1024);
    const auto lo = c.req.integer("min_exp", 3), hi = c.req.integer("max_exp", 8);
    if (sites < 2 || lo < 1 || hi < lo || (std::int64_t{1} << std::min<std::int64_t>(hi, 62)) > sites) {
      fail(ErrorCode::InvalidInput, "request: sweep needs 1 <= min_exp <= max_exp and 2^max_exp <= sites");
    }
    const double h = 1.0 / static_cast<double>(sites);
    Json rows = Json::array();
    bool all_violate = true;
    for (auto e = lo; e <= hi; ++e) {
      const double delta = std::ldexp(1.0, -static_cast<int>(e));
      SpinorGridState p;
      p.h = h;
      p.up.assign(sites, Complex(0, 0));
      p.um.assign(sites, Complex(0, 0));
      const auto m = static_cast<std::int64_t>(std::llround(delta / h));
      for (std::int64_t j = 0; j <= m; ++j) p.up[j] = 1;
      const auto ev = evolve(p, delta, BoundaryCondition::periodic_shift());
      const auto r = propagation_report(p, ev, delta, speed);
      const bool far = r.measured_growth >= 1 - 2 * delta;
      all_violate = all_violate && !r.contained && far;
      auto row = report_json(r);
      row["delta"] = delta;
      row["reaches_far_end"] = far;
      rows.push_back(row);
    }
    c.out = {{"sweep", rows}, {"sites", sites}, {"all_violate", all_violate}};
    return;
  }
  const auto s = load_state(c);
  const double t = c.req.number("t");
  const auto e = evolve(s, t, boundary(c));
  c.out = report_json(propagation_report(s, e, t, speed));
  c.out["boundary"] = to_string(boundary(c).kind);
  c.out["norm_drift"] = std::abs(e.norm() - s.norm());
}

void wave_bandlimited(Context& c) {
  const auto path = c.req.string("input");
  const auto b = io::bandlimited_from_json(io::parse_json(c.req.file("input"), path), path);
  const auto r = bandlimited_calculus(b.sites, b.h, b.r, b.dt, b.samples, b.speed);
  c.out = {{"band", r.band}, {"certified_band", r.certified_band}, {"within_certificate", r.within_certificate}};
  if (c.req.flag("emit_matrix")) c.out["matrix"] = io::complex_to_json(r.matrix);
  if (c.req.csv()) c.csv(complex_csv(r.matrix));
}

// ---- Sobolev ----

void sobolev_reflect(Context& c) {
  const auto k = c.req.integer("k");
  if (k < 0 || k > 1000) fail(ErrorCode::InvalidInput, "request: /k: order out of range");
  const auto rc = reflection_coefficients(static_cast<int>(k));
  Json coeffs = Json::array();
  for (const auto& a : rc.coefficients) coeffs.push_back(a.to_string());
  c.out = {{"k", k}, {"coefficients", coeffs}};
  if (c.req.has("input")) {
    const Matrix m = load_matrix(c);
    if (m.cols() != 1) fail(ErrorCode::InvalidInput, c.req.string("input") + ": expected one column of samples");
    std::vector<double> samples(m.data(), m.data() + m.rows());
    const auto ext = extend_reflect(samples, static_cast<int>(k), c.req.integer("depth", 0));
    c.out["first_index"] = ext.first_index;
    c.out["values"] = ext.values;
    if (c.req.csv()) {
      std::string text;
      for (std::size_t i = 0; i < ext.values.size(); ++i) {
        text += std::to_string(ext.first_index + static_cast<std::int64_t>(i)) + ',' + io::format_double(ext.values[i]) + '\n';
      }
      c.csv(text);
    }
  }
}

void sobolev_torus(Context& c) {
  TorusEmbeddingSpec s;
  if (c.req.has("input")) {
    const auto path = c.req.string("input");
    const auto j = io::parse_json(c.req.file("input"), path);
    auto num = [&](const char* key, double def) {
      if (!j.contains(key)) return def;
      if (!j[key].is_number()) fail(ErrorCode::InvalidInput, path + ": /" + key + ": expected a number");
      return j[key].get<double>();
    };
    s.n = static_cast<int>(num("n", s.n));
    s.r = num("r", s.r);
    s.m = static_cast<std::int64_t>(num("m", static_cast<double>(s.m)));
    s.t = num("t", s.t);
    s.p = num("p", s.p);
    s.cutoff = static_cast<std::int64_t>(num("cutoff", static_cast<double>(s.cutoff)));
  }
  s.n = static_cast<int>(c.req.integer("n", s.n));
  s.r = c.req.number("r", s.r);
  s.m = c.req.integer("m", s.m);
  s.t = c.req.number("t", s.t);
  s.p = c.req.number("p", s.p);
  s.cutoff = c.req.integer("cutoff", s.cutoff);
  const auto r = torus_schatten_norm(s, c.req.number("max_points", defaults::kTorusMaxPoints));
  c.out = {{"divergent", r.divergent}, {"cutoff", r.cutoff}};
  c.out["spec"] = {{"n", s.n}, {"r", s.r}, {"m", s.m}, {"t", s.t}, {"p", s.p}};
  if (r.divergent) {
    c.out["reason"] = r.reason;
    c.out["value"] = nullptr;
    c.out["tail_bound"] = nullptr;
  } else {
    c.out["value"] = r.value;
    c.out["tail_bound"] = r.tail_bound;
    c.out["partial_sum"] = r.partial_sum;
    c.out["tail_sum"] = r.tail_sum;
  }
}

void sobolev_classify(Context& c) {
  const auto n = c.req.integer("n");
  const double t = c.req.number("t"), p = c.req.number("p");
  c.out = {{"n", n}, {"t", t}, {"p", p}, {"converges", convergence_classify(static_cast<int>(n), t, p)}};
}

// ---- index ----

void index_compressed(Context& c) {
  if (c.req.has("random")) {
    const auto count = c.req.integer("random");
    if (count < 1 || count > 10000) fail(ErrorCode::InvalidInput, "request: /random: expected 1..10000");
    std::mt19937_64 rng(static_cast<std::uint64_t>(c.req.integer("seed", 1)));
    const auto opts = index_options(c, {64, 96, 128});
    Json rows = Json::array();
    bool all = true;
    for (std::int64_t i = 0; i < count; ++i) {
      const auto fx = random_shift_polynomial(rng, static_cast<int>(c.req.integer("max_band", 3)));
      const auto w = winding_number(fx.op.symbol_samples(512));
      const auto r = compressed_index(fx.op, opts);
      const bool agree = r.stabilized_index && *r.stabilized_index == -w;
      all = all && agree;
      rows.push_back({{"operator", io::laurent_to_json(fx.op)},
                      {"winding", w},
                      {"result", window_index_json(r)},
                      {"agrees_with_minus_winding", agree}});
    }
    c.out = {{"fixtures", rows}, {"all_agree", all}};
    if (!all) c.warn("some random fixtures disagree with minus the winding number");
    return;
  }
  const auto path = c.req.string("input");
  const auto op = io::laurent_from_json(io::parse_json(c.req.file("input"), path), path);
  const auto r = compressed_index(op, index_options(c, default_windows()));
  c.out = window_index_json(r);
  try {
    c.out["winding"] = winding_number(op.symbol_samples(static_cast<int>(std::max<std::int64_t>(256, 16 * op.band()))));
  } catch (const Error& e) {
    c.warn(std::string("winding number unavailable: ") + e.what());
  }
  if (!r.stabilized_index) c.warn(r.note);
}

void index_pm(Context& c) {
  const auto path = c.req.string("input");
  const auto d = io::hermitian_from_json(io::parse_json(c.req.file("input"), path), path);
  const auto r = pm_index(d, index_options(c, default_windows()));
  c.out = window_index_json(r.index);
  c.out["ring_size"] = r.ring_size;
  c.out["cayley_band"] = r.cayley_band;
  c.out["truncation"] = r.truncation;
  if (!r.index.note.empty()) c.warn(r.index.note);
}

void index_flow(Context& c) {
  const auto path = c.req.string("input");
  const auto p = io::path_from_json(io::parse_json(c.req.file("input"), path), path);
  std::optional<double> tol;
  if (c.req.has("tol")) tol = c.req.number("tol");
  const auto r = spectral_flow(p, tol);
  Json crossings = Json::array();
  for (const auto& x : r.crossings) crossings.push_back({{"sample", x.sample}, {"delta", x.delta}});
  c.out = {{"flow", r.flow}, {"crossings", crossings}, {"skipped", r.skipped}, {"resolution_ok", r.resolution_ok}};
  if (!r.resolution_ok) c.warn("consecutive samples differ by more than a quarter of the spectral gap");
}

Json aps_json(const ApsResult& r) {
  return {{"quadrature_count", r.quadrature_count},
          {"eigenvalue_count", r.eigenvalue_count},
          {"agree", r.agree},
          {"eigenvalues", r.eigenvalues},
          {"integrals", r.integrals},
          {"decaying", r.decaying}};
}

void index_aps(Context& c) { c.out = aps_json(aps_positive_count(aps_model(c, load_symmetric(c)))); }

void index_rho(Context& c) {
  const auto a = load_symmetric(c);
  const double gap = c.req.number("gap");
  const auto chi = make_chi(c, gap);
  const auto r = rho_projection(a, gap, chi);
  c.out = {{"chi", chi.name()},
           {"gap", gap},
           {"trace", r.trace},
           {"idempotency", r.idempotency},
           {"projection", io::matrix_to_json(r.p)}};
  if (c.req.csv()) c.csv(io::matrix_to_csv(r.p));
}

Json consistency_json(const RhoApsReport& r) {
  return {{"trace", r.trace},
          {"aps_count", r.aps_count},
          {"eigenvalue_count", r.eigenvalue_count},
          {"max_angle_sine", r.max_angle_sine},
          {"trace_matches", r.trace_matches},
          {"subspaces_match", r.subspaces_match},
          {"consistent", r.consistent()}};
}

void index_consistency(Context& c) {
  const double angle_tol = c.req.number("angle_tol", defaults::kAngleTol);
  if (c.req.has("random")) {
    const auto count = c.req.integer("random");
    if (count < 1 || count > 10000) fail(ErrorCode::InvalidInput, "request: /random: expected 1..10000");
    std::mt19937_64 rng(static_cast<std::uint64_t>(c.req.integer("seed", 1)));
    const double gap = c.req.number("gap", 0.2);
    const auto chi = make_chi(c, gap);
    Json rows = Json::array();
    bool all = true;
    for (std::int64_t i = 0; i < count; ++i) {
      const int n = std::uniform_int_distribution<int>(1, static_cast<int>(c.req.integer("max_order", 8)))(rng);
      const auto rep = rho_aps_consistency(aps_model(c, SymMatrix(random_gapped(rng, n, 1.25 * gap))), chi, angle_tol);
      all = all && rep.consistent();
      auto row = consistency_json(rep);
      row["order"] = n;
      rows.push_back(row);
    }
    c.out = {{"chi", chi.name()}, {"gap", gap}, {"fixtures", rows}, {"all_consistent", all}};
    if (!all) c.warn("some random fixtures are inconsistent");
    return;
  }
  const auto a = load_symmetric(c);
  double gap = 0;
  if (c.req.has("gap")) {
    gap = c.req.number("gap");
  } else {
    const auto s = eigensolve(a);
    gap = 0.5 * s.values.cwiseAbs().minCoeff();
    if (!(gap > 0)) fail(ErrorCode::InvalidInput, c.req.string("input") + ": matrix is singular");
  }
  const auto chi = make_chi(c, gap);
  c.out = consistency_json(rho_aps_consistency(aps_model(c, a), chi, angle_tol));
  c.out["chi"] = chi.name();
  c.out["gap"] = gap;
}

const std::map<std::string, std::function<void(Context&)>>& table() {
  static const std::map<std::string, std::function<void(Context&)>> t{
      {"graph homology", graph_homology},
      {"graph classify", graph_classify},
      {"graph ends", graph_ends},
      {"graph forest", graph_forest},
      {"seq in-s", seq_in_s},
      {"seq class", seq_class},
      {"flow find", flow_find},
      {"spec eigen", spec_eigen},
      {"spec eta", spec_eta},
      {"spec bounded-transform", spec_bounded},
      {"spec cayley", spec_cayley},
      {"spec cheb", spec_cheb},
      {"wave evolve", wave_evolve},
      {"wave report", wave_report},
      {"wave bandlimited", wave_bandlimited},
      {"sobolev reflect", sobolev_reflect},
      {"sobolev torus-schatten", sobolev_torus},
      {"sobolev classify", sobolev_classify},
      {"index compressed", index_compressed},
      {"index pm", index_pm},
      {"index flow", index_flow},
      {"index aps", index_aps},
      {"index rho", index_rho},
      {"index consistency", index_consistency},
  };
  return t;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [name, f] : table()) out.push_back(name);
  return out;
}

Json run_command(const std::string& command, const Json& request) {
  const auto it = table().find(command);
  if (it == table().end()) fail(ErrorCode::InvalidInput, "unknown command '" + command + "'");
  Json report{{"command", command}, {"inputs", Json::array()}, {"outputs", Json::object()}, {"warnings", Json::array()}};
  Json outputs;
  Context ctx{Request(request, report), outputs, report};
  const auto format = ctx.req.string("format", "json");
  if (format != "json" && format != "csv") fail(ErrorCode::InvalidInput, "request: /format: expected json or csv");
  it->second(ctx);
  report["outputs"] = std::move(outputs);
  if (format == "csv" && !report.contains("csv")) {
    fail(ErrorCode::InvalidInput, "command '" + command + "' has no CSV output");
  }
  return report;
}

}  // namespace ukh
