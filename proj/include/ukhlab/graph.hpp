#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ukh {

using VertexId = std::int64_t;

// Directed edge. Orientation is user data; homology is covariant in it.
struct Edge {
  VertexId source = 0;
  VertexId target = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed multigraph on vertices 0..vertex_count-1; self-loops allowed.
struct FiniteGraph {
  std::int64_t vertex_count = 0;
  std::vector<Edge> edges;
};

// Edge of a periodic presentation: from (cell c, source_local) to
// (cell c + shift, target_local), for every admissible cell c.
struct CrossEdge {
  std::int64_t source_local = 0;
  std::int64_t target_local = 0;
  std::int64_t shift = 0;
};

// Edge between a head vertex of a ray presentation and a vertex in one of
// its cells. Oriented head -> cell unless `into_head`.
struct AttachEdge {
  std::int64_t head_vertex = 0;
  std::int64_t cell = 0;
  std::int64_t local = 0;
  bool into_head = false;
};

struct PeriodicPresentation {
  FiniteGraph head;                   // ray presentations only
  std::vector<AttachEdge> attach;     // ray presentations only
  FiniteGraph cell;                   // edges inside one cell (shift 0)
  std::vector<CrossEdge> cross_edges;
};

// Internal edges (shift 0) followed by the cross edges.
std::vector<CrossEdge> cell_edges(const PeriodicPresentation& presentation);

// Pure function returning every edge incident to a vertex. Self-loops are
// listed once.
using EdgeRule = std::function<std::vector<Edge>(VertexId)>;

struct GeneratedPresentation {
  std::string rule_name;
  EdgeRule rule;
  std::int64_t degree_bound = 0;
  VertexId root = 0;
  std::int64_t rule_parameter = 0;   // e.g. the degree of a regular tree
};

enum class PresentationKind { Finite, RayPeriodic, LinePeriodic, WindowGenerated };

const char* to_string(PresentationKind kind) noexcept;

class GraphPresentation {
 public:
  // Validates endpoints; duplicate edges and self-loops are accepted.
  static GraphPresentation finite(std::int64_t vertex_count, std::vector<Edge> edges);
  static GraphPresentation line_periodic(FiniteGraph cell, std::vector<CrossEdge> cross_edges);
  static GraphPresentation ray_periodic(FiniteGraph head, std::vector<AttachEdge> attach,
                                        FiniteGraph cell, std::vector<CrossEdge> cross_edges);
  static GraphPresentation generated(std::string rule_name, EdgeRule rule,
                                     std::int64_t degree_bound, VertexId root);
  static GraphPresentation regular_tree(std::int64_t degree);
  static GraphPresentation square_lattice();

  // Common fixtures.
  static GraphPresentation integer_path();   // Z, edges n -> n+1
  static GraphPresentation natural_ray();    // N_0, edges n -> n+1
  static GraphPresentation integer_ladder(); // Z x {0,1}, rungs and rails

  PresentationKind kind() const noexcept { return kind_; }
  const FiniteGraph& finite_graph() const;
  const PeriodicPresentation& periodic() const;
  const GeneratedPresentation& generated() const;

  // Upper bound on vertex degree (self-loops count twice).
  std::int64_t degree_bound() const;
  VertexId default_base() const;
  bool contains(VertexId v) const;
  // Every edge incident to v, each listed once.
  std::vector<Edge> incident_edges(VertexId v) const;

  // Periodic vertex numbering. Line: cell * k + local. Ray: head vertices
  // first, then head_count + cell * k + local for cell >= 0.
  std::int64_t cell_size() const;
  VertexId cell_vertex(std::int64_t cell, std::int64_t local) const;
  std::optional<std::pair<std::int64_t, std::int64_t>> cell_coordinates(VertexId v) const;

 private:
  GraphPresentation() = default;
  GraphPresentation as_line() &&;

  PresentationKind kind_ = PresentationKind::Finite;
  FiniteGraph finite_;
  std::vector<std::vector<std::size_t>> incidence_;
  PeriodicPresentation periodic_;
  GeneratedPresentation generated_;
  std::int64_t degree_bound_ = 0;
};

// Convenience wrapper used by tests and the CLI.
GraphPresentation build_finite_graph(std::int64_t vertex_count, std::vector<Edge> edges);

// Ball of given radius under the path metric. `graph` is the induced
// subgraph on the ball, renumbered 0..n-1 in BFS order.
struct Window {
  FiniteGraph graph;
  std::vector<VertexId> parent_ids;
  std::vector<std::int64_t> distance;
  std::vector<std::int64_t> boundary;   // local ids at distance == radius
  std::int64_t radius = 0;
  VertexId base = 0;

  bool is_boundary(std::int64_t local) const { return distance[local] == radius; }
  std::int64_t interior_count() const;
  std::optional<std::int64_t> local_of(VertexId parent) const;
};

Window window(const GraphPresentation& presentation, VertexId base, std::int64_t radius);

struct Components {
  std::int64_t count = 0;
  std::vector<std::int64_t> labels;
};

// Connected components of the underlying undirected graph.
Components components(const FiniteGraph& graph);

// A circuit: vertices v_0..v_{k-1}, edge i joins v_i and v_{i+1 mod k}.
struct Cycle {
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_ids;   // filled for finite graphs
};

std::optional<Cycle> find_cycle(const FiniteGraph& graph);

struct ForestResult {
  bool is_forest = false;
  std::optional<Cycle> cycle;        // present when !is_forest
  std::int64_t cycle_rank = 0;       // finite graphs and quotients
};

ForestResult is_forest(const GraphPresentation& presentation);

enum class EndCount { Zero = 0, One = 1, Two = 2, Many = 3 };
const char* to_string(EndCount ends) noexcept;

struct EndsResult {
  EndCount ends = EndCount::Zero;
  bool exact = true;
  std::int64_t radius = 0;
  // For generated presentations: number of components of B(R) \ B(r) that
  // reach the sphere of radius R, for r = 1..R-1.
  std::vector<std::int64_t> shell_components;
};

EndsResult count_ends(const GraphPresentation& presentation,
                      std::int64_t radius = 6);

// Exact for finite and periodic presentations; generated presentations
// report connectivity of the default window only.
bool is_connected(const GraphPresentation& presentation);

// Finite graph made of the head and cells 0..last_cell of a ray, or cells
// first_cell..last_cell of a line presentation. `ids` receives the parent
// vertex id of each local vertex.
FiniteGraph truncation(const GraphPresentation& presentation, std::int64_t first_cell,
                       std::int64_t last_cell, std::vector<VertexId>* ids = nullptr);

}  // namespace ukh
