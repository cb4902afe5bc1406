#include "ukhlab/ufh.hpp"

#include <algorithm>
#include <cstdlib>

#include "ukhlab/defaults.hpp"
#include "ukhlab/error.hpp"
#include "ukhlab/maxflow.hpp"

namespace ukh {

namespace {

std::int64_t checked_sub_mul(std::int64_t a, std::int64_t q, std::int64_t b) {
  std::int64_t prod = 0, out = 0;
  if (__builtin_mul_overflow(q, b, &prod) || __builtin_sub_overflow(a, prod, &out))
    fail(ErrorCode::NumericalFailure, "integer overflow in Smith normal form");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    fail(ErrorCode::NumericalFailure, "integer overflow in Smith normal form");
  return out;
}

}  // namespace

DenseChain boundary1(const FiniteGraph& graph, const DenseChain& chain1) {
  require(chain1.size() == graph.edges.size(), "1-chain length does not match the edge count");
  DenseChain out(static_cast<std::size_t>(graph.vertex_count), 0);
  for (std::size_t i = 0; i < chain1.size(); ++i) {
    const auto& e = graph.edges[i];
    out[e.target] += chain1[i];
    out[e.source] -= chain1[i];
  }
  return out;
}

std::map<VertexId, std::int64_t> boundary1(
    const std::vector<std::pair<Edge, std::int64_t>>& chain1) {
  std::map<VertexId, std::int64_t> out;
  for (const auto& [e, c] : chain1) {
    out[e.target] += c;
    out[e.source] -= c;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

PeriodicChain0 boundary1(const GraphPresentation& presentation, const PeriodicChain1& chain1) {
  const auto& p = presentation.periodic();
  const bool ray = presentation.kind() == PresentationKind::RayPeriodic;
  const auto edges = cell_edges(p);
  require(chain1.cell.size() == edges.size(), "1-chain needs one sequence per cell edge");
  if (ray) {
    require(chain1.head.size() == p.head.edges.size(), "1-chain needs one value per head edge");
    require(chain1.attach.size() == p.attach.size(), "1-chain needs one value per attach edge");
  }
  PeriodicChain0 out;
  out.cell.resize(static_cast<std::size_t>(p.cell.vertex_count));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    auto a = ray ? chain1.cell[i].restricted_from(std::max<std::int64_t>(0, -e.shift))
                 : chain1.cell[i];
    out.cell[e.target_local] = out.cell[e.target_local] + a.shifted(e.shift);
    out.cell[e.source_local] = out.cell[e.source_local] - a;
  }
  if (ray) {
    out.head.assign(static_cast<std::size_t>(p.head.vertex_count), 0);
    for (std::size_t i = 0; i < p.head.edges.size(); ++i) {
      out.head[p.head.edges[i].target] += chain1.head[i];
      out.head[p.head.edges[i].source] -= chain1.head[i];
    }
    for (std::size_t i = 0; i < p.attach.size(); ++i) {
      const auto& a = p.attach[i];
      const auto c = chain1.attach[i];
      const auto sign = a.into_head ? 1 : -1;
      out.head[a.head_vertex] += sign * c;
      out.cell[a.local] =
          out.cell[a.local] - EventuallyPeriodicSequence::delta(a.cell, sign * c);
    }
  }
  return out;
}

bool is_zero(const PeriodicChain0& chain) {
  return std::all_of(chain.head.begin(), chain.head.end(), [](auto x) { return x == 0; }) &&
         std::all_of(chain.cell.begin(), chain.cell.end(), [](const auto& s) { return s.is_zero(); });
}

std::int64_t sup_abs(const PeriodicChain1& chain) {
  std::int64_t m = 0;
  for (auto x : chain.head) m = std::max(m, std::abs(x));
  for (auto x : chain.attach) m = std::max(m, std::abs(x));
  for (const auto& s : chain.cell) m = std::max(m, s.sup_abs());
  return m;
}

std::vector<std::int64_t> smith_diagonal(std::vector<std::vector<std::int64_t>> m) {
  const auto rows = m.size();
  const auto cols = rows == 0 ? 0 : m[0].size();
  std::vector<std::int64_t> diag;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero entry of the remaining block becomes the pivot.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i) {
        for (std::size_t j = t; j < cols; ++j) {
          if (m[i][j] != 0 && (pi == rows || std::abs(m[i][j]) < std::abs(m[pi][pj]))) {
            pi = i;
            pj = j;
          }
        }
      }
      if (pi == rows) return diag;
      std::swap(m[t], m[pi]);
      for (auto& row : m) std::swap(row[t], row[pj]);
      const auto p = m[t][t];
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m[i][t] == 0) continue;
        const auto q = m[i][t] / p;
        for (std::size_t j = t; j < cols; ++j) m[i][j] = checked_sub_mul(m[i][j], q, m[t][j]);
        clean = clean && m[i][t] == 0;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[t][j] == 0) continue;
        const auto q = m[t][j] / p;
        for (std::size_t i = t; i < rows; ++i) m[i][j] = checked_sub_mul(m[i][j], q, m[i][t]);
        clean = clean && m[t][j] == 0;
      }
      if (!clean) continue;
      // Pivot must divide the rest of the block.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i) {
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (m[i][j] % p != 0) {
            for (std::size_t k = t; k < cols; ++k) m[t][k] = checked_add(m[t][k], m[i][k]);
            divides = false;
            break;
          }
        }
      }
      if (divides) break;
    }
    diag.push_back(std::abs(m[t][t]));
  }
  return diag;
}

Homology homology_finite(const FiniteGraph& graph) {
  const auto v = static_cast<std::size_t>(graph.vertex_count);
  const auto e = graph.edges.size();
  std::vector<std::vector<std::int64_t>> d(v, std::vector<std::int64_t>(e, 0));
  for (std::size_t i = 0; i < e; ++i) {
    d[graph.edges[i].target][i] += 1;
    d[graph.edges[i].source][i] -= 1;
  }
  const auto diag = smith_diagonal(std::move(d));
  Homology h;
  h.boundary_rank = static_cast<std::int64_t>(diag.size());
  h.h0_rank = graph.vertex_count - h.boundary_rank;
  h.h1_rank = static_cast<std::int64_t>(e) - h.boundary_rank;
  for (auto x : diag) {
    if (x > 1) h.torsion.push_back(x);
  }
  return h;
}

K0LineClassInvariant k0_class_invariant(const GraphPresentation& presentation,
                                        const EventuallyPeriodicSequence& chain0) {
  const auto kind = presentation.kind();
  require(kind == PresentationKind::LinePeriodic || kind == PresentationKind::RayPeriodic,
          "class invariants need a line or ray presentation");
  if (presentation.cell_size() != 1)
    fail(ErrorCode::Unsupported, "class invariants need one vertex per cell");
  require(is_connected(presentation), "presentation is disconnected");
  auto density = [](const std::vector<std::int64_t>& period) {
    if (period.empty()) return Rational{};
    std::int64_t s = 0;
    for (auto x : period) s += x;
    return Rational::make(s, static_cast<std::int64_t>(period.size()));
  };
  K0LineClassInvariant out;
  out.right_density = density(chain0.right_period);
  if (kind == PresentationKind::LinePeriodic) out.left_density = density(chain0.left_period);
  return out;
}

FlowCertificate divergence_one_flow(const Window& window, std::int64_t capacity) {
  require(capacity >= 1, "flow capacity must be at least 1");
  const auto n = static_cast<std::size_t>(window.graph.vertex_count);
  FlowCertificate out;
  out.capacity = capacity;
  out.interior = window.interior_count();
  require(out.interior > 0, "window has an empty interior");
  const auto source = n;
  const auto sink = n + 1;
  MaxFlow flow(n + 2);
  const auto unlimited = out.interior + 1;
  for (std::size_t v = 0; v < n; ++v) {
    if (window.is_boundary(static_cast<std::int64_t>(v))) {
      flow.add_arc(v, sink, unlimited);
    } else {
      flow.add_arc(source, v, 1);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> arcs(window.graph.edges.size(), {0, 0});
  std::vector<bool> loop(window.graph.edges.size(), false);
  for (std::size_t i = 0; i < window.graph.edges.size(); ++i) {
    const auto& e = window.graph.edges[i];
    if (e.source == e.target) {
      loop[i] = true;
      continue;
    }
    arcs[i] = {flow.add_arc(e.source, e.target, capacity), flow.add_arc(e.target, e.source, capacity)};
  }
  out.max_flow = flow.run(source, sink);
  out.feasible = out.max_flow == out.interior;
  out.chain.assign(window.graph.edges.size(), 0);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (loop[i]) continue;
    // Flow leaves interior vertices; the chain runs the other way so that
    // its boundary is +1 there.
    out.chain[i] = flow.flow(arcs[i].second) - flow.flow(arcs[i].first);
  }
  return out;
}

TailChain tail_chain(const Window& window, const DenseChain& chain1, std::int64_t start) {
  const auto& g = window.graph;
  require(chain1.size() == g.edges.size(), "1-chain length does not match the window");
  require(start >= 0 && start < g.vertex_count, "start vertex is not in the window");
  TailChain out;
  out.terminal = start;
  out.chain.assign(g.edges.size(), 0);
  // Incoming edges after orienting every edge along its coefficient.
  std::vector<std::vector<std::size_t>> incoming(static_cast<std::size_t>(g.vertex_count));
  std::vector<std::int64_t> budget(g.edges.size(), 0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.source == e.target || chain1[i] == 0) continue;
    budget[i] = std::abs(chain1[i]);
    incoming[chain1[i] > 0 ? e.target : e.source].push_back(i);
  }
  auto x = start;
  while (!window.is_boundary(x)) {
    std::size_t chosen = g.edges.size();
    for (auto i : incoming[x]) {
      if (budget[i] > 0) {
        chosen = i;
        break;
      }
    }
    if (chosen == g.edges.size()) {
      fail(ErrorCode::Contradiction, "tail construction stuck at interior vertex " +
                                         std::to_string(window.parent_ids[x]) +
                                         "; the chain does not have boundary 1 there");
    }
    --budget[chosen];
    const auto sign = chain1[chosen] > 0 ? 1 : -1;
    out.edges.push_back(chosen);
    out.signs.push_back(sign);
    out.chain[chosen] += sign;
    const auto& e = g.edges[chosen];
    x = sign > 0 ? e.source : e.target;
  }
  out.terminal = x;
  return out;
}

DenseChain circuit_cycle(const FiniteGraph& graph, const std::vector<VertexId>& circuit) {
  require(!circuit.empty(), "circuit is empty");
  std::vector<VertexId> sorted = circuit;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "circuit repeats a vertex");
  for (auto v : circuit) require(v >= 0 && v < graph.vertex_count, "circuit vertex out of range");
  DenseChain chain(graph.edges.size(), 0);
  std::vector<bool> used(graph.edges.size(), false);
  int first_sign = 0;
  const auto k = circuit.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto a = circuit[i];
    const auto b = circuit[(i + 1) % k];
    std::size_t chosen = graph.edges.size();
    for (std::size_t j = 0; j < graph.edges.size(); ++j) {
      const auto& e = graph.edges[j];
      if (used[j]) continue;
      if ((e.source == a && e.target == b) || (e.source == b && e.target == a)) {
        chosen = j;
        break;
      }
    }
    require(chosen != graph.edges.size(), "no unused edge joins circuit vertices " +
                                              std::to_string(a) + " and " + std::to_string(b));
    used[chosen] = true;
    int sign = graph.edges[chosen].source == a ? 1 : -1;
    if (i == 0) first_sign = sign;
    chain[chosen] = sign * first_sign;
  }
  return chain;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

ClassifyOptions::ClassifyOptions()
    : flow_capacity(defaults::kFlowCapacity),
      flow_radius_min(defaults::kFlowRadiusMin),
      flow_radius_max(defaults::kFlowRadiusMax),
      folner_epsilon(defaults::kFolnerEpsilon),
      ends_radius(defaults::kEndsRadius) {}

std::optional<FolnerWitness> folner_search(const GraphPresentation& presentation,
                                           double epsilon) {
  require(epsilon > 0, "Folner epsilon must be positive");
  constexpr std::size_t kVolumeCap = 100000;
  for (std::int64_t r = 1; r <= defaults::kFolnerMaxRadius; r *= 2) {
    const auto w = window(presentation, presentation.default_base(), r);
    FolnerWitness f;
    f.radius = r;
    f.boundary = static_cast<std::int64_t>(w.boundary.size());
    f.volume = w.graph.vertex_count;
    f.ratio = static_cast<double>(f.boundary) / static_cast<double>(f.volume);
    if (f.ratio < epsilon) return f;
    if (w.parent_ids.size() > kVolumeCap) break;
  }
  return std::nullopt;
}

namespace {

// Constant chain along the core line of a two-ended periodic tree.
PeriodicChain1 core_line_chain(const GraphPresentation& presentation) {
  const auto& p = presentation.periodic();
  const auto edges = cell_edges(p);
  FiniteGraph quotient{p.cell.vertex_count, {}};
  for (const auto& e : edges) quotient.edges.push_back({e.source_local, e.target_local});
  const auto cyc = find_cycle(quotient);
  if (!cyc) fail(ErrorCode::Contradiction, "two-ended periodic tree has an acyclic quotient");
  PeriodicChain1 chain;
  chain.head.assign(p.head.edges.size(), 0);
  chain.attach.assign(p.attach.size(), 0);
  chain.cell.resize(edges.size());
  for (std::size_t i = 0; i < cyc->edge_ids.size(); ++i) {
    const auto id = cyc->edge_ids[i];
    const auto sign = quotient.edges[id].source == cyc->vertices[i] ? 1 : -1;
    chain.cell[id] = EventuallyPeriodicSequence::constant(sign);
  }
  return chain;
}

}  // namespace

ClassifyReport classify_k(const GraphPresentation& presentation, const ClassifyOptions& options) {
  require(is_connected(presentation), "classification needs a connected presentation");
  ClassifyReport r;
  const auto kind = presentation.kind();

  if (kind != PresentationKind::WindowGenerated) {
    auto forest = is_forest(presentation);
    r.forest = forest.is_forest;
    if (!forest.is_forest) {
      r.circuit = forest.cycle;
      r.k1_zero = Verdict::No;
      r.evidence.push_back("cycle of length " + std::to_string(forest.cycle->vertices.size()) +
                           " gives a nonzero 1-cycle");
    } else {
      r.ends = count_ends(presentation);
      if (r.ends->ends == EndCount::Zero || r.ends->ends == EndCount::One) {
        r.k1_zero = Verdict::Yes;
        r.evidence.push_back(std::string("tree with ") + to_string(r.ends->ends) + " end(s)");
      } else {
        auto chain = core_line_chain(presentation);
        if (!is_zero(boundary1(presentation, chain)))
          fail(ErrorCode::Contradiction, "core line chain is not a cycle");
        r.line_cycle = std::move(chain);
        r.k1_zero = Verdict::No;
        r.evidence.push_back("two-ended tree: constant chain along the core line is a cycle");
      }
    }
  } else {
    const auto w = window(presentation, presentation.default_base(), options.ends_radius);
    if (auto cyc = find_cycle(w.graph)) {
      for (auto& v : cyc->vertices) v = w.parent_ids[v];
      for (auto& e : cyc->edges) e = {w.parent_ids[e.source], w.parent_ids[e.target]};
      cyc->edge_ids.clear();
      r.circuit = std::move(cyc);
      r.forest = false;
      r.k1_zero = Verdict::No;
      r.evidence.push_back("window of radius " + std::to_string(options.ends_radius) +
                           " contains a cycle");
    } else {
      r.ends = count_ends(presentation, options.ends_radius);
      if (r.ends->ends == EndCount::Two || r.ends->ends == EndCount::Many) {
        r.k1_zero = Verdict::No;
        r.evidence.push_back(std::string("acyclic window with ") + to_string(r.ends->ends) +
                             " ends");
      } else {
        r.evidence.push_back("acyclic window with at most one end; K1 undecided");
      }
    }
  }

  r.folner = folner_search(presentation, options.folner_epsilon);
  if (r.folner) {
    r.k0_zero = Verdict::No;
    r.evidence.push_back("Folner window of radius " + std::to_string(r.folner->radius) +
                         " with boundary/volume " + std::to_string(r.folner->boundary) + "/" +
                         std::to_string(r.folner->volume));
    return r;
  }
  bool all_feasible = true;
  for (auto radius = options.flow_radius_min; radius <= options.flow_radius_max; ++radius) {
    const auto w = window(presentation, presentation.default_base(), radius);
    r.flow_radii.push_back(radius);
    r.flows.push_back(divergence_one_flow(w, options.flow_capacity));
    all_feasible = all_feasible && r.flows.back().feasible;
  }
  if (all_feasible) {
    r.k0_zero = Verdict::Yes;
    r.evidence.push_back("divergence-one flows with capacity " +
                         std::to_string(options.flow_capacity) + " on radii " +
                         std::to_string(options.flow_radius_min) + ".." +
                         std::to_string(options.flow_radius_max));
  } else {
    r.evidence.push_back("no Folner window found and some flow is infeasible; K0 undecided");
  }
  return r;
}

}  // namespace ukh
