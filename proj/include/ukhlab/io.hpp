#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ukhlab/graph.hpp"
#include "ukhlab/index.hpp"
#include "ukhlab/sequence.hpp"
#include "ukhlab/specops.hpp"
#include "ukhlab/wave.hpp"

// File formats. Every loader reports failures as InvalidInput with the
// source name and a JSON pointer (or CSV line) naming the offending field.
namespace ukh::io {

using Json = nlohmann::json;

std::string read_file(const std::string& path);
// FNV-1a, 64 bit.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

Json parse_json(const std::string& text, const std::string& source);

// Graphs:
//   {"kind":"finite","vertices":N,"edges":[[s,t],...]}
//   {"kind":"line_periodic","cell":{"vertices":k,"edges":[[s,t],...]},
//    "cross_edges":[[u,v,shift],...]}
//   {"kind":"ray_periodic","head":{"vertices":h,"edges":[...]},
//    "attach":[[head_vertex,cell,local] or [..., "in"]],"cell":{...},"cross_edges":[...]}
//   {"kind":"window_generated","rule":"regular_tree","degree":d}
//   {"kind":"window_generated","rule":"square_lattice"}
GraphPresentation graph_from_json(const Json& j, const std::string& source);
Json graph_to_json(const GraphPresentation& g);

// {"core":[...],"core_start":k,"left_period":[...],"right_period":[...]}
EventuallyPeriodicSequence sequence_from_json(const Json& j, const std::string& source);
Json sequence_to_json(const EventuallyPeriodicSequence& s);

// One row per line, comma separated, '.' decimal point; blank lines and
// lines starting with '#' are skipped.
Matrix matrix_from_csv(const std::string& text, const std::string& source);
std::string matrix_to_csv(const Matrix& m);
CMatrix complex_from_csv(const std::string& re, const std::string& im, const std::string& source);
std::pair<std::string, std::string> complex_to_csv(const CMatrix& m);

// Columns: index, re u+, im u+, re u-, im u-; optional header line. Indices
// must run 0..N-1.
SpinorGridState state_from_csv(const std::string& text, double x0, double h, const std::string& source);
std::string state_to_csv(const SpinorGridState& s);

// {"rank":r,"band":b,"diagonals":{"k":entry,...}} where an entry is a
// number, a [re, im] pair, or (rank > 1) an r x r array of those;
// {"direct_sum":[op, op, ...]}.
LaurentOperator laurent_from_json(const Json& j, const std::string& source);
Json laurent_to_json(const LaurentOperator& op);

// A banded Laurent operator as above (checked self-adjoint), or
// {"kind":"momentum","copies":c}; "direct_sum" lists either form.
HermitianLineOperator hermitian_from_json(const Json& j, const std::string& source);

// {"samples":[matrix, ...]} with each matrix an array of rows.
std::vector<SymMatrix> path_from_json(const Json& j, const std::string& source);

struct BandlimitedRequest {
  std::int64_t sites = 0;
  double h = 0;
  double r = 0;
  double dt = 0;
  double speed = 1;
  std::vector<BandlimitedSample> samples;
};

// {"sites":N,"h":h,"R":R,"dt":dt,"speed":c,"samples":[[t, re] or [t, re, im],...]}
BandlimitedRequest bandlimited_from_json(const Json& j, const std::string& source);

Json matrix_to_json(const Matrix& m);
Json complex_to_json(const CMatrix& m);   // {"re":[[...]],"im":[[...]]}
std::string format_double(double v);

}  // namespace ukh::io
