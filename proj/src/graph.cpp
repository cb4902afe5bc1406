#include "ukhlab/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ukhlab/defaults.hpp"
#include "ukhlab/error.hpp"

namespace ukh {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

void validate_finite(const FiniteGraph& g, const std::string& what) {
  require(g.vertex_count >= 0, what + ": negative vertex count");
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.source < 0 || e.source >= g.vertex_count || e.target < 0 ||
        e.target >= g.vertex_count) {
      fail(ErrorCode::InvalidInput, what + ": edge " + std::to_string(i) +
                                        " has an endpoint out of range");
    }
  }
}

constexpr std::int64_t kLatticeOffset = std::int64_t{1} << 31;

VertexId lattice_id(std::int64_t x, std::int64_t y) {
  require(x > -kLatticeOffset && x < kLatticeOffset && y > -kLatticeOffset &&
              y < kLatticeOffset,
          "square lattice coordinate out of range");
  return x * (std::int64_t{1} << 32) + y;
}

std::pair<std::int64_t, std::int64_t> lattice_coords(VertexId id) {
  auto y = static_cast<std::int64_t>(static_cast<std::int32_t>(id & 0xffffffff));
  auto x = (id - y) / (std::int64_t{1} << 32);
  return {x, y};
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

// Spanning forest of the quotient graph of a periodic presentation, with
// shift potentials and fundamental cycles.
struct Quotient {
  std::vector<CrossEdge> edges;
  std::int64_t vertex_count = 0;
  std::vector<std::int64_t> component;
  std::int64_t component_count = 0;
  std::vector<std::int64_t> potential;
  std::vector<std::int64_t> parent_edge;   // -1 at roots
  std::vector<bool> parent_forward;        // parent edge points parent -> vertex
  std::vector<std::int64_t> parent;
  std::vector<std::int64_t> root_of_component;
  struct Fundamental {
    std::size_t edge;
    std::int64_t voltage;
    std::int64_t component;
  };
  std::vector<Fundamental> cycles;
};

Quotient analyse_quotient(const PeriodicPresentation& p) {
  Quotient q;
  q.edges = cell_edges(p);
  q.vertex_count = p.cell.vertex_count;
  const auto n = static_cast<std::size_t>(q.vertex_count);
  q.component.assign(n, -1);
  q.potential.assign(n, 0);
  q.parent_edge.assign(n, -1);
  q.parent_forward.assign(n, false);
  q.parent.assign(n, -1);

  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t i = 0; i < q.edges.size(); ++i) {
    incident[q.edges[i].source_local].push_back(i);
    if (q.edges[i].target_local != q.edges[i].source_local)
      incident[q.edges[i].target_local].push_back(i);
  }
  std::vector<bool> tree_edge(q.edges.size(), false);
  for (std::size_t r = 0; r < n; ++r) {
    if (q.component[r] != -1) continue;
    const auto c = q.component_count++;
    q.root_of_component.push_back(static_cast<std::int64_t>(r));
    q.component[r] = c;
    std::deque<std::size_t> queue{r};
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (auto ei : incident[x]) {
        const auto& e = q.edges[ei];
        std::size_t y;
        bool forward;
        if (static_cast<std::size_t>(e.source_local) == x) {
          y = static_cast<std::size_t>(e.target_local);
          forward = true;
        } else {
          y = static_cast<std::size_t>(e.source_local);
          forward = false;
        }
        if (q.component[y] != -1) continue;
        q.component[y] = c;
        q.parent[y] = static_cast<std::int64_t>(x);
        q.parent_edge[y] = static_cast<std::int64_t>(ei);
        q.parent_forward[y] = forward;
        q.potential[y] = q.potential[x] + (forward ? e.shift : -e.shift);
        tree_edge[ei] = true;
        queue.push_back(y);
      }
    }
  }
  for (std::size_t i = 0; i < q.edges.size(); ++i) {
    if (tree_edge[i]) continue;
    const auto& e = q.edges[i];
    q.cycles.push_back({i, q.potential[e.source_local] + e.shift - q.potential[e.target_local],
                        q.component[e.source_local]});
  }
  return q;
}

// Walk step: quotient edge traversed forward (+1) or backward (-1).
struct Step {
  std::size_t edge;
  int dir;
};

std::vector<Step> path_to_root(const Quotient& q, std::int64_t x) {
  std::vector<Step> steps;
  while (q.parent[x] != -1) {
    // Forward parent edge points parent -> x, so going up is backward.
    steps.push_back({static_cast<std::size_t>(q.parent_edge[x]), q.parent_forward[x] ? -1 : 1});
    x = q.parent[x];
  }
  return steps;
}

std::vector<Step> reversed(std::vector<Step> w) {
  std::reverse(w.begin(), w.end());
  for (auto& s : w) s.dir = -s.dir;
  return w;
}

// Closed walk root -> source, the edge, target -> root.
std::vector<Step> fundamental_walk(const Quotient& q, std::size_t edge) {
  const auto& e = q.edges[edge];
  auto walk = reversed(path_to_root(q, e.source_local));
  walk.push_back({edge, 1});
  auto back = path_to_root(q, e.target_local);
  walk.insert(walk.end(), back.begin(), back.end());
  return walk;
}

std::vector<Step> power(const std::vector<Step>& w, std::int64_t n) {
  std::vector<Step> out;
  const auto base = n >= 0 ? w : reversed(w);
  for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

std::vector<Step> reduce(const std::vector<Step>& w) {
  std::vector<Step> out;
  for (const auto& s : w) {
    if (!out.empty() && out.back().edge == s.edge && out.back().dir == -s.dir) {
      out.pop_back();
    } else {
      out.push_back(s);
    }
  }
  return out;
}

// Lifts a zero-voltage closed walk at the component root to the line cover
// and extracts a circuit from the traced subgraph. Vertex ids are (cell,
// local) pairs encoded as cell * k + local.
Cycle lift_cycle(const Quotient& q, std::int64_t root, const std::vector<Step>& walk) {
  const auto k = q.vertex_count;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> local;
  std::vector<std::pair<std::int64_t, std::int64_t>> coords;
  auto id_of = [&](std::int64_t cell, std::int64_t v) {
    auto [it, inserted] = local.try_emplace({cell, v}, static_cast<std::int64_t>(coords.size()));
    if (inserted) coords.push_back({cell, v});
    return it->second;
  };
  std::map<std::pair<std::size_t, std::int64_t>, bool> seen_edges;
  FiniteGraph traced;
  std::int64_t cell = 0;
  std::int64_t at = root;
  id_of(cell, at);
  for (const auto& s : walk) {
    const auto& e = q.edges[s.edge];
    std::int64_t source_cell;
    if (s.dir > 0) {
      if (at != e.source_local) fail(ErrorCode::Contradiction, "walk is not contiguous");
      source_cell = cell;
      cell += e.shift;
      at = e.target_local;
    } else {
      if (at != e.target_local) fail(ErrorCode::Contradiction, "walk is not contiguous");
      source_cell = cell - e.shift;
      cell = source_cell;
      at = e.source_local;
    }
    if (seen_edges.emplace(std::make_pair(s.edge, source_cell), true).second) {
      traced.edges.push_back({id_of(source_cell, e.source_local),
                              id_of(source_cell + e.shift, e.target_local)});
    }
  }
  if (cell != 0 || at != root) fail(ErrorCode::Contradiction, "lifted walk is not closed");
  traced.vertex_count = static_cast<std::int64_t>(coords.size());
  auto cyc = find_cycle(traced);
  if (!cyc) fail(ErrorCode::Contradiction, "reduced zero-voltage walk traced a forest");
  Cycle out;
  for (auto v : cyc->vertices) out.vertices.push_back(coords[v].first * k + coords[v].second);
  for (auto e : cyc->edges) {
    out.edges.push_back({coords[e.source].first * k + coords[e.source].second,
                         coords[e.target].first * k + coords[e.target].second});
  }
  return out;
}

// Returns a cover cycle for the first component whose voltage map is not
// injective on its cycle space, or nullopt if the cover is a forest.
std::optional<Cycle> quotient_cycle(const Quotient& q) {
  std::map<std::int64_t, std::vector<Quotient::Fundamental>> by_component;
  for (const auto& f : q.cycles) by_component[f.component].push_back(f);
  for (const auto& [c, cycles] : by_component) {
    const auto root = q.root_of_component[c];
    for (const auto& f : cycles) {
      if (f.voltage == 0) return lift_cycle(q, root, reduce(fundamental_walk(q, f.edge)));
    }
    if (cycles.size() >= 2) {
      const auto a = cycles[0].voltage;
      const auto b = cycles[1].voltage;
      const auto g = gcd64(a, b);
      auto w = power(fundamental_walk(q, cycles[0].edge), b / g);
      auto w2 = power(fundamental_walk(q, cycles[1].edge), -a / g);
      w.insert(w.end(), w2.begin(), w2.end());
      return lift_cycle(q, root, reduce(w));
    }
  }
  return std::nullopt;
}

std::int64_t shift_span(const PeriodicPresentation& p) {
  std::int64_t span = p.cell.vertex_count + 1;
  for (const auto& e : p.cross_edges) span += e.shift < 0 ? -e.shift : e.shift;
  return span;
}

std::int64_t max_attach_cell(const PeriodicPresentation& p) {
  std::int64_t a = 0;
  for (const auto& e : p.attach) a = std::max(a, e.cell);
  return a;
}

// Cells [0, A + 2L + 1] of a ray contain every simple path between
// attachment points once the tail is a forest: paths in the line cover stay
// within L cells of the core line between their endpoints.
std::int64_t ray_check_depth(const PeriodicPresentation& p) {
  return max_attach_cell(p) + 2 * shift_span(p) + 1;
}

}  // namespace

std::vector<CrossEdge> cell_edges(const PeriodicPresentation& p) {
  std::vector<CrossEdge> out;
  out.reserve(p.cell.edges.size() + p.cross_edges.size());
  for (const auto& e : p.cell.edges) out.push_back({e.source, e.target, 0});
  out.insert(out.end(), p.cross_edges.begin(), p.cross_edges.end());
  return out;
}

const char* to_string(PresentationKind kind) noexcept {
  switch (kind) {
    case PresentationKind::Finite: return "finite";
    case PresentationKind::RayPeriodic: return "ray_periodic";
    case PresentationKind::LinePeriodic: return "line_periodic";
    case PresentationKind::WindowGenerated: return "window_generated";
  }
  return "unknown";
}

const char* to_string(EndCount ends) noexcept {
  switch (ends) {
    case EndCount::Zero: return "0";
    case EndCount::One: return "1";
    case EndCount::Two: return "2";
    case EndCount::Many: return "many";
  }
  return "unknown";
}

GraphPresentation GraphPresentation::finite(std::int64_t vertex_count, std::vector<Edge> edges) {
  require(vertex_count >= 1, "finite graph needs at least one vertex");
  GraphPresentation g;
  g.kind_ = PresentationKind::Finite;
  g.finite_ = {vertex_count, std::move(edges)};
  validate_finite(g.finite_, "finite graph");
  std::vector<std::int64_t> degree(static_cast<std::size_t>(vertex_count), 0);
  g.incidence_.resize(static_cast<std::size_t>(vertex_count));
  for (std::size_t i = 0; i < g.finite_.edges.size(); ++i) {
    const auto& e = g.finite_.edges[i];
    ++degree[e.source];
    ++degree[e.target];
    g.incidence_[e.source].push_back(i);
    if (e.target != e.source) g.incidence_[e.target].push_back(i);
  }
  g.degree_bound_ = *std::max_element(degree.begin(), degree.end());
  return g;
}

GraphPresentation build_finite_graph(std::int64_t vertex_count, std::vector<Edge> edges) {
  return GraphPresentation::finite(vertex_count, std::move(edges));
}

GraphPresentation GraphPresentation::line_periodic(FiniteGraph cell,
                                                   std::vector<CrossEdge> cross_edges) {
  return ray_periodic({}, {}, std::move(cell), std::move(cross_edges)).as_line();
}

GraphPresentation GraphPresentation::ray_periodic(FiniteGraph head, std::vector<AttachEdge> attach,
                                                  FiniteGraph cell,
                                                  std::vector<CrossEdge> cross_edges) {
  require(cell.vertex_count >= 1, "periodic cell needs at least one vertex");
  validate_finite(cell, "cell");
  validate_finite(head, "head");
  for (std::size_t i = 0; i < cross_edges.size(); ++i) {
    const auto& e = cross_edges[i];
    if (e.source_local < 0 || e.source_local >= cell.vertex_count || e.target_local < 0 ||
        e.target_local >= cell.vertex_count) {
      fail(ErrorCode::InvalidInput,
           "cross edge " + std::to_string(i) + " has an endpoint out of range");
    }
    require(e.shift > -(std::int64_t{1} << 20) && e.shift < (std::int64_t{1} << 20),
            "cross edge " + std::to_string(i) + " has an unbounded shift");
  }
  for (std::size_t i = 0; i < attach.size(); ++i) {
    const auto& a = attach[i];
    if (a.head_vertex < 0 || a.head_vertex >= head.vertex_count || a.cell < 0 || a.local < 0 ||
        a.local >= cell.vertex_count) {
      fail(ErrorCode::InvalidInput, "attach edge " + std::to_string(i) + " is out of range");
    }
  }
  GraphPresentation g;
  g.kind_ = PresentationKind::RayPeriodic;
  g.periodic_ = {std::move(head), std::move(attach), std::move(cell), std::move(cross_edges)};

  const auto& p = g.periodic_;
  std::vector<std::int64_t> cell_degree(static_cast<std::size_t>(p.cell.vertex_count), 0);
  for (const auto& e : cell_edges(p)) {
    ++cell_degree[e.source_local];
    ++cell_degree[e.target_local];
  }
  std::vector<std::int64_t> head_degree(static_cast<std::size_t>(p.head.vertex_count), 0);
  for (const auto& e : p.head.edges) {
    ++head_degree[e.source];
    ++head_degree[e.target];
  }
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> attach_degree;
  for (const auto& a : p.attach) {
    ++head_degree[a.head_vertex];
    ++attach_degree[{a.cell, a.local}];
  }
  std::int64_t bound = 0;
  for (auto d : cell_degree) bound = std::max(bound, d);
  for (auto d : head_degree) bound = std::max(bound, d);
  for (const auto& [key, d] : attach_degree) bound = std::max(bound, cell_degree[key.second] + d);
  g.degree_bound_ = bound;
  return g;
}

GraphPresentation GraphPresentation::generated(std::string rule_name, EdgeRule rule,
                                               std::int64_t degree_bound, VertexId root) {
  require(static_cast<bool>(rule), "generated presentation needs an edge rule");
  require(degree_bound >= 1, "declared degree bound must be positive");
  GraphPresentation g;
  g.kind_ = PresentationKind::WindowGenerated;
  g.generated_ = {std::move(rule_name), std::move(rule), degree_bound, root, 0};
  g.degree_bound_ = degree_bound;
  return g;
}

GraphPresentation GraphPresentation::regular_tree(std::int64_t d) {
  require(d >= 2, "regular tree degree must be at least 2");
  auto first_child = [d](VertexId v) -> VertexId {
    if (v == 0) return 1;
    const auto limit = (std::int64_t{1} << 62) / d;
    if (v > limit) fail(ErrorCode::Unsupported, "tree vertex id overflow");
    return d + 1 + (v - 1) * (d - 1);
  };
  auto parent = [d](VertexId w) -> VertexId {
    if (w <= d) return 0;
    return (w - d - 1) / (d - 1) + 1;
  };
  EdgeRule rule = [d, first_child, parent](VertexId v) {
    require(v >= 0, "tree vertex ids are nonnegative");
    std::vector<Edge> out;
    if (v != 0) out.push_back({parent(v), v});
    const auto first = first_child(v);
    const auto count = v == 0 ? d : d - 1;
    for (std::int64_t i = 0; i < count; ++i) out.push_back({v, first + i});
    return out;
  };
  auto g = generated("regular_tree", std::move(rule), d, 0);
  g.generated_.rule_parameter = d;
  return g;
}

GraphPresentation GraphPresentation::square_lattice() {
  EdgeRule rule = [](VertexId v) {
    auto [x, y] = lattice_coords(v);
    return std::vector<Edge>{{v, lattice_id(x + 1, y)},
                             {v, lattice_id(x, y + 1)},
                             {lattice_id(x - 1, y), v},
                             {lattice_id(x, y - 1), v}};
  };
  return generated("square_lattice", std::move(rule), 4, 0);
}

GraphPresentation GraphPresentation::integer_path() {
  return line_periodic({1, {}}, {{0, 0, 1}});
}

GraphPresentation GraphPresentation::natural_ray() {
  return ray_periodic({}, {}, {1, {}}, {{0, 0, 1}});
}

GraphPresentation GraphPresentation::integer_ladder() {
  return line_periodic({2, {{0, 1}}}, {{0, 0, 1}, {1, 1, 1}});
}

GraphPresentation GraphPresentation::as_line() && {
  kind_ = PresentationKind::LinePeriodic;
  return std::move(*this);
}

const FiniteGraph& GraphPresentation::finite_graph() const {
  if (kind_ != PresentationKind::Finite) fail(ErrorCode::InvalidInput, "presentation is not finite");
  return finite_;
}

const PeriodicPresentation& GraphPresentation::periodic() const {
  if (kind_ != PresentationKind::LinePeriodic && kind_ != PresentationKind::RayPeriodic)
    fail(ErrorCode::InvalidInput, "presentation is not periodic");
  return periodic_;
}

const GeneratedPresentation& GraphPresentation::generated() const {
  if (kind_ != PresentationKind::WindowGenerated)
    fail(ErrorCode::InvalidInput, "presentation is not window-generated");
  return generated_;
}

std::int64_t GraphPresentation::degree_bound() const { return degree_bound_; }

VertexId GraphPresentation::default_base() const {
  switch (kind_) {
    case PresentationKind::Finite: return 0;
    case PresentationKind::LinePeriodic: return 0;
    case PresentationKind::RayPeriodic: return periodic_.head.vertex_count;
    case PresentationKind::WindowGenerated: return generated_.root;
  }
  return 0;
}

std::int64_t GraphPresentation::cell_size() const { return periodic().cell.vertex_count; }

VertexId GraphPresentation::cell_vertex(std::int64_t cell, std::int64_t local) const {
  const auto& p = periodic();
  require(local >= 0 && local < p.cell.vertex_count, "cell-local index out of range");
  if (kind_ == PresentationKind::RayPeriodic) {
    require(cell >= 0, "ray cells are nonnegative");
    return p.head.vertex_count + cell * p.cell.vertex_count + local;
  }
  return cell * p.cell.vertex_count + local;
}

std::optional<std::pair<std::int64_t, std::int64_t>> GraphPresentation::cell_coordinates(
    VertexId v) const {
  const auto& p = periodic();
  const auto k = p.cell.vertex_count;
  if (kind_ == PresentationKind::RayPeriodic) {
    if (v < p.head.vertex_count) return std::nullopt;
    v -= p.head.vertex_count;
  }
  auto cell = v >= 0 ? v / k : -((-v + k - 1) / k);
  return std::make_pair(cell, v - cell * k);
}

bool GraphPresentation::contains(VertexId v) const {
  switch (kind_) {
    case PresentationKind::Finite: return v >= 0 && v < finite_.vertex_count;
    case PresentationKind::LinePeriodic: return true;
    case PresentationKind::RayPeriodic: return v >= 0;
    case PresentationKind::WindowGenerated:
      if (generated_.rule_name == "regular_tree") return v >= 0;
      return true;
  }
  return false;
}

std::vector<Edge> GraphPresentation::incident_edges(VertexId v) const {
  require(contains(v), "vertex " + std::to_string(v) + " is not in the presentation");
  std::vector<Edge> out;
  switch (kind_) {
    case PresentationKind::Finite:
      for (auto i : incidence_[v]) out.push_back(finite_.edges[i]);
      break;
    case PresentationKind::WindowGenerated:
      out = generated_.rule(v);
      for (const auto& e : out) {
        if (e.source != v && e.target != v) {
          fail(ErrorCode::InvalidInput, "edge rule '" + generated_.rule_name +
                                            "' returned an edge not incident to vertex " +
                                            std::to_string(v));
        }
      }
      break;
    case PresentationKind::LinePeriodic:
    case PresentationKind::RayPeriodic: {
      const auto& p = periodic_;
      const bool ray = kind_ == PresentationKind::RayPeriodic;
      const auto coords = cell_coordinates(v);
      if (!coords) {
        // Head vertex of a ray.
        for (const auto& e : p.head.edges) {
          if (e.source == v || e.target == v) out.push_back(e);
        }
        for (const auto& a : p.attach) {
          if (a.head_vertex != v) continue;
          const auto w = cell_vertex(a.cell, a.local);
          out.push_back(a.into_head ? Edge{w, v} : Edge{v, w});
        }
        break;
      }
      const auto [cell, local] = *coords;
      auto valid = [&](std::int64_t c) { return !ray || c >= 0; };
      for (const auto& e : cell_edges(p)) {
        if (e.source_local == local && valid(cell + e.shift)) {
          out.push_back({v, cell_vertex(cell + e.shift, e.target_local)});
        }
        const bool same_edge = e.source_local == e.target_local && e.shift == 0;
        if (e.target_local == local && !same_edge && valid(cell - e.shift)) {
          out.push_back({cell_vertex(cell - e.shift, e.source_local), v});
        }
      }
      if (ray) {
        for (const auto& a : p.attach) {
          if (a.cell != cell || a.local != local) continue;
          out.push_back(a.into_head ? Edge{v, a.head_vertex} : Edge{a.head_vertex, v});
        }
      }
      break;
    }
  }
  return out;
}

std::int64_t Window::interior_count() const {
  return static_cast<std::int64_t>(distance.size() - boundary.size());
}

std::optional<std::int64_t> Window::local_of(VertexId parent) const {
  for (std::size_t i = 0; i < parent_ids.size(); ++i) {
    if (parent_ids[i] == parent) return static_cast<std::int64_t>(i);
  }
  return std::nullopt;
}

Window window(const GraphPresentation& presentation, VertexId base, std::int64_t radius) {
  require(radius >= 0, "window radius must be nonnegative");
  require(presentation.contains(base), "window base is not a vertex of the presentation");
  const bool generated = presentation.kind() == PresentationKind::WindowGenerated;

  Window w;
  w.radius = radius;
  w.base = base;
  std::unordered_map<VertexId, std::int64_t> local;
  std::vector<std::vector<Edge>> incident;
  auto visit = [&](VertexId v, std::int64_t d) {
    local.emplace(v, static_cast<std::int64_t>(w.parent_ids.size()));
    w.parent_ids.push_back(v);
    w.distance.push_back(d);
    incident.push_back(presentation.incident_edges(v));
    if (generated) {
      std::int64_t degree = 0;
      for (const auto& e : incident.back()) degree += (e.source == v) + (e.target == v);
      if (degree > presentation.degree_bound()) {
        fail(ErrorCode::DegreeViolation,
             "vertex " + std::to_string(v) + " has degree " + std::to_string(degree) +
                 " above the declared bound " + std::to_string(presentation.degree_bound()));
      }
    }
  };
  visit(base, 0);
  for (std::size_t head = 0; head < w.parent_ids.size(); ++head) {
    const auto v = w.parent_ids[head];
    const auto d = w.distance[head];
    if (d == radius) continue;
    // `incident` may reallocate while visiting, copy the list first.
    const auto edges = incident[head];
    for (const auto& e : edges) {
      const auto other = e.source == v ? e.target : e.source;
      if (!local.count(other)) visit(other, d + 1);
    }
  }

  std::map<std::pair<VertexId, VertexId>, std::int64_t> listed_low, listed_high;
  for (std::size_t i = 0; i < w.parent_ids.size(); ++i) {
    const auto v = w.parent_ids[i];
    for (const auto& e : incident[i]) {
      if (e.source == v && e.target == v) {
        w.graph.edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i)});
        continue;
      }
      const auto other = e.source == v ? e.target : e.source;
      auto it = local.find(other);
      if (it == local.end()) continue;
      if (v < other) {
        w.graph.edges.push_back({local[e.source], local[e.target]});
        if (generated) ++listed_low[{e.source, e.target}];
      } else if (generated) {
        ++listed_high[{e.source, e.target}];
      }
    }
  }
  if (generated && listed_low != listed_high) {
    fail(ErrorCode::InvalidInput, "edge rule '" + presentation.generated().rule_name +
                                      "' lists edges inconsistently between endpoints");
  }
  w.graph.vertex_count = static_cast<std::int64_t>(w.parent_ids.size());
  for (std::size_t i = 0; i < w.distance.size(); ++i) {
    if (w.distance[i] == radius) w.boundary.push_back(static_cast<std::int64_t>(i));
  }
  return w;
}

Components components(const FiniteGraph& graph) {
  const auto n = static_cast<std::size_t>(graph.vertex_count);
  UnionFind uf(n);
  for (const auto& e : graph.edges) uf.unite(e.source, e.target);
  Components out;
  out.labels.assign(n, -1);
  std::vector<std::int64_t> label_of_root(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    auto r = uf.find(v);
    if (label_of_root[r] == -1) label_of_root[r] = out.count++;
    out.labels[v] = label_of_root[r];
  }
  return out;
}

std::optional<Cycle> find_cycle(const FiniteGraph& graph) {
  const auto n = static_cast<std::size_t>(graph.vertex_count);
  UnionFind uf(n);
  std::vector<std::vector<std::pair<VertexId, std::size_t>>> forest(n);
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const auto& e = graph.edges[i];
    if (e.source == e.target) return Cycle{{e.source}, {e}, {i}};
    if (uf.unite(e.source, e.target)) {
      forest[e.source].push_back({e.target, i});
      forest[e.target].push_back({e.source, i});
      continue;
    }
    // Path target -> source in the forest closes the cycle.
    std::vector<std::int64_t> prev(n, -1);
    std::vector<std::size_t> prev_edge(n, 0);
    std::vector<bool> seen(n, false);
    std::deque<VertexId> queue{e.target};
    seen[e.target] = true;
    while (!queue.empty() && !seen[e.source]) {
      auto x = queue.front();
      queue.pop_front();
      for (auto [y, ei] : forest[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        prev[y] = x;
        prev_edge[y] = ei;
        queue.push_back(y);
      }
    }
    std::vector<VertexId> path{e.source};
    std::vector<std::size_t> path_edges;
    for (VertexId x = e.source; x != e.target; x = prev[x]) {
      path_edges.push_back(prev_edge[x]);
      path.push_back(prev[x]);
    }
    // path runs source -> ... -> target; the circuit is source, target, ...
    Cycle c;
    c.vertices.push_back(e.source);
    c.edges.push_back(e);
    c.edge_ids.push_back(i);
    for (std::size_t j = path.size() - 1; j >= 1; --j) {
      c.vertices.push_back(path[j]);
      c.edge_ids.push_back(path_edges[j - 1]);
      c.edges.push_back(graph.edges[path_edges[j - 1]]);
    }
    return c;
  }
  return std::nullopt;
}

FiniteGraph truncation(const GraphPresentation& presentation, std::int64_t first_cell,
                       std::int64_t last_cell, std::vector<VertexId>* ids) {
  const auto& p = presentation.periodic();
  const bool ray = presentation.kind() == PresentationKind::RayPeriodic;
  if (ray) first_cell = 0;
  require(first_cell <= last_cell, "empty truncation");
  const auto k = p.cell.vertex_count;
  const auto h = ray ? p.head.vertex_count : 0;
  FiniteGraph g;
  g.vertex_count = h + (last_cell - first_cell + 1) * k;
  auto local = [&](std::int64_t cell, std::int64_t v) { return h + (cell - first_cell) * k + v; };
  if (ray) g.edges = p.head.edges;
  for (std::int64_t c = first_cell; c <= last_cell; ++c) {
    for (const auto& e : cell_edges(p)) {
      const auto t = c + e.shift;
      if (t < first_cell || t > last_cell) continue;
      g.edges.push_back({local(c, e.source_local), local(t, e.target_local)});
    }
  }
  if (ray) {
    for (const auto& a : p.attach) {
      if (a.cell > last_cell) continue;
      const auto w = local(a.cell, a.local);
      g.edges.push_back(a.into_head ? Edge{w, a.head_vertex} : Edge{a.head_vertex, w});
    }
  }
  if (ids) {
    ids->clear();
    for (std::int64_t v = 0; v < h; ++v) ids->push_back(v);
    for (std::int64_t c = first_cell; c <= last_cell; ++c) {
      for (std::int64_t v = 0; v < k; ++v) ids->push_back(presentation.cell_vertex(c, v));
    }
  }
  return g;
}

ForestResult is_forest(const GraphPresentation& presentation) {
  ForestResult out;
  switch (presentation.kind()) {
    case PresentationKind::Finite: {
      const auto& g = presentation.finite_graph();
      out.cycle_rank = static_cast<std::int64_t>(g.edges.size()) - g.vertex_count +
                       components(g).count;
      out.cycle = find_cycle(g);
      out.is_forest = !out.cycle.has_value();
      return out;
    }
    case PresentationKind::LinePeriodic:
    case PresentationKind::RayPeriodic: {
      const auto& p = presentation.periodic();
      const auto q = analyse_quotient(p);
      out.cycle_rank = static_cast<std::int64_t>(q.cycles.size());
      auto cyc = quotient_cycle(q);
      const bool ray = presentation.kind() == PresentationKind::RayPeriodic;
      if (cyc) {
        const auto k = p.cell.vertex_count;
        auto cell_of = [k](VertexId v) { return v >= 0 ? v / k : -((-v + k - 1) / k); };
        std::int64_t min_cell = 0;
        if (ray) {
          min_cell = cell_of(cyc->vertices.front());
          for (auto v : cyc->vertices) min_cell = std::min(min_cell, cell_of(v));
        }
        auto map = [&](VertexId v) {
          const auto c = cell_of(v);
          return presentation.cell_vertex(c - min_cell, v - c * k);
        };
        for (auto& v : cyc->vertices) v = map(v);
        for (auto& e : cyc->edges) e = {map(e.source), map(e.target)};
        out.cycle = std::move(cyc);
        return out;
      }
      if (ray) {
        std::vector<VertexId> ids;
        const auto g = truncation(presentation, 0, ray_check_depth(p), &ids);
        if (auto c = find_cycle(g)) {
          Cycle mapped;
          for (auto v : c->vertices) mapped.vertices.push_back(ids[v]);
          for (auto e : c->edges) mapped.edges.push_back({ids[e.source], ids[e.target]});
          out.cycle = std::move(mapped);
          return out;
        }
      }
      out.is_forest = true;
      return out;
    }
    case PresentationKind::WindowGenerated:
      fail(ErrorCode::Unsupported,
           "forest decision is unavailable for window-generated presentations; use windows");
  }
  return out;
}

bool is_connected(const GraphPresentation& presentation) {
  switch (presentation.kind()) {
    case PresentationKind::Finite:
      return components(presentation.finite_graph()).count == 1;
    case PresentationKind::WindowGenerated:
      return true;
    case PresentationKind::LinePeriodic:
    case PresentationKind::RayPeriodic: {
      const auto& p = presentation.periodic();
      const auto q = analyse_quotient(p);
      if (q.component_count != 1) return false;
      std::int64_t g = 0;
      for (const auto& f : q.cycles) g = gcd64(g, f.voltage);
      if (g != 1) return false;
      if (presentation.kind() == PresentationKind::LinePeriodic) return true;
      const auto depth = ray_check_depth(p);
      std::vector<VertexId> ids;
      const auto trunc = truncation(presentation, 0, depth, &ids);
      const auto comps = components(trunc);
      const auto near = p.head.vertex_count + (max_attach_cell(p) + shift_span(p) + 1) *
                                                  p.cell.vertex_count;
      const auto label = comps.labels[0];
      for (std::int64_t v = 0; v < near && v < trunc.vertex_count; ++v) {
        if (comps.labels[v] != label) return false;
      }
      for (std::int64_t v = trunc.vertex_count - p.cell.vertex_count; v < trunc.vertex_count; ++v) {
        if (comps.labels[v] == label) return true;
      }
      return false;
    }
  }
  return false;
}

EndsResult count_ends(const GraphPresentation& presentation, std::int64_t radius) {
  if (!is_connected(presentation))
    fail(ErrorCode::InvalidInput, "ends are counted per component; input is disconnected");
  EndsResult out;
  switch (presentation.kind()) {
    case PresentationKind::Finite: out.ends = EndCount::Zero; return out;
    case PresentationKind::RayPeriodic: out.ends = EndCount::One; return out;
    case PresentationKind::LinePeriodic: out.ends = EndCount::Two; return out;
    case PresentationKind::WindowGenerated: break;
  }
  require(radius >= 2, "end counting needs a radius of at least 2");
  out.exact = false;
  out.radius = radius;
  const auto w = window(presentation, presentation.default_base(), radius);
  const auto n = static_cast<std::size_t>(w.graph.vertex_count);
  for (std::int64_t r = 1; r < radius; ++r) {
    UnionFind uf(n);
    for (const auto& e : w.graph.edges) {
      if (w.distance[e.source] > r && w.distance[e.target] > r) uf.unite(e.source, e.target);
    }
    std::vector<bool> reaches(n, false);
    for (auto b : w.boundary) reaches[uf.find(b)] = true;
    out.shell_components.push_back(std::count(reaches.begin(), reaches.end(), true));
  }
  const auto half = static_cast<std::size_t>((radius + 1) / 2 - 1);
  const auto stable = *std::min_element(out.shell_components.begin() + static_cast<std::ptrdiff_t>(half),
                                        out.shell_components.end());
  out.ends = stable >= 3 ? EndCount::Many : static_cast<EndCount>(stable);
  return out;
}

}  // namespace ukh
