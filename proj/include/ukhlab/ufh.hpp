#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ukhlab/graph.hpp"
#include "ukhlab/sequence.hpp"

namespace ukh {

// Chains on a finite graph: one coefficient per vertex / per edge.
using DenseChain = std::vector<std::int64_t>;

// (d c)_v = sum over edges into v minus sum over edges out of v.
DenseChain boundary1(const FiniteGraph& graph, const DenseChain& chain1);

// Finitely supported 1-chain given by explicit edges; works on any
// presentation, including window-generated ones.
std::map<VertexId, std::int64_t> boundary1(const std::vector<std::pair<Edge, std::int64_t>>& chain1);

// Chains on a periodic presentation. `cell` holds one sequence per cell
// vertex (0-chains) or per cell edge (1-chains), indexed by the cell of the
// vertex / of the edge's source. Cell edges are the internal edges followed
// by the cross edges. Ray presentations also carry head coefficients.
struct PeriodicChain0 {
  std::vector<std::int64_t> head;
  std::vector<EventuallyPeriodicSequence> cell;
};

struct PeriodicChain1 {
  std::vector<std::int64_t> head;      // head edges
  std::vector<std::int64_t> attach;    // attach edges
  std::vector<EventuallyPeriodicSequence> cell;
};

PeriodicChain0 boundary1(const GraphPresentation& presentation, const PeriodicChain1& chain1);
bool is_zero(const PeriodicChain0& chain);
std::int64_t sup_abs(const PeriodicChain1& chain);

struct Homology {
  std::int64_t h0_rank = 0;
  std::int64_t h1_rank = 0;
  std::int64_t boundary_rank = 0;
  std::vector<std::int64_t> torsion;
};

// Integer Smith normal form of the boundary matrix.
Homology homology_finite(const FiniteGraph& graph);
// Diagonal of the Smith normal form (nonzero entries only).
std::vector<std::int64_t> smith_diagonal(std::vector<std::vector<std::int64_t>> matrix);

struct K0LineClassInvariant {
  std::optional<Rational> left_density;   // absent on a ray
  Rational right_density;
  friend bool operator==(const K0LineClassInvariant&, const K0LineClassInvariant&) = default;
};

// Requires a connected line or ray presentation with one vertex per cell.
K0LineClassInvariant k0_class_invariant(const GraphPresentation& presentation,
                                        const EventuallyPeriodicSequence& chain0);

struct FlowCertificate {
  bool feasible = false;
  std::int64_t max_flow = 0;
  std::int64_t interior = 0;
  std::int64_t capacity = 0;
  DenseChain chain;   // per window edge; d(chain) = 1 on interior when feasible
};

FlowCertificate divergence_one_flow(const Window& window, std::int64_t capacity);

struct TailChain {
  std::vector<std::size_t> edges;     // window edge ids in walk order
  std::vector<std::int64_t> signs;    // +1 when the edge points toward v
  std::int64_t terminal = 0;          // local id of the boundary vertex reached
  DenseChain chain;                   // sum of signs * edges
};

// Greedy backward walk along edges carrying positive coefficients.
TailChain tail_chain(const Window& window, const DenseChain& chain1, std::int64_t start);

// Chain with +-1 on the edges of a circuit (lowest unused edge id per step),
// the first edge carrying +1.
DenseChain circuit_cycle(const FiniteGraph& graph, const std::vector<VertexId>& circuit);

enum class Verdict { Yes, No, Unknown };
const char* to_string(Verdict v) noexcept;

struct FolnerWitness {
  std::int64_t radius = 0;
  std::int64_t boundary = 0;
  std::int64_t volume = 0;
  double ratio = 0;
};

struct ClassifyOptions {
  std::int64_t flow_capacity;
  std::int64_t flow_radius_min;
  std::int64_t flow_radius_max;
  double folner_epsilon;
  std::int64_t ends_radius;
  ClassifyOptions();
};

struct ClassifyReport {
  Verdict k0_zero = Verdict::Unknown;
  Verdict k1_zero = Verdict::Unknown;
  std::vector<std::string> evidence;
  std::optional<bool> forest;
  std::optional<EndsResult> ends;
  std::optional<Cycle> circuit;                 // K1 witness from a cycle
  std::optional<PeriodicChain1> line_cycle;     // K1 witness on a two-ended tree
  std::vector<FlowCertificate> flows;           // one per radius tried
  std::vector<std::int64_t> flow_radii;
  std::optional<FolnerWitness> folner;
};

std::optional<FolnerWitness> folner_search(const GraphPresentation& presentation, double epsilon);

ClassifyReport classify_k(const GraphPresentation& presentation,
                          const ClassifyOptions& options = {});

}  // namespace ukh
