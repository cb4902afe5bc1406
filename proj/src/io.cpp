#include "ukhlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ukhlab/error.hpp"

namespace ukh::io {

namespace {

[[noreturn]] void bad(const std::string& source, const std::string& where, const std::string& msg) {
  fail(ErrorCode::InvalidInput, source + ": " + (where.empty() ? "/" : where) + ": " + msg);
}

const Json& field(const Json& j, const std::string& key, const std::string& source, const std::string& where) {
  if (!j.is_object()) bad(source, where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(source, where + "/" + key, "missing field");
  return *it;
}

std::int64_t as_int(const Json& v, const std::string& source, const std::string& where) {
  if (!v.is_number_integer()) bad(source, where, "expected an integer");
  return v.get<std::int64_t>();
}

double as_double(const Json& v, const std::string& source, const std::string& where) {
  if (!v.is_number()) bad(source, where, "expected a number");
  return v.get<double>();
}

const Json& as_array(const Json& v, const std::string& source, const std::string& where) {
  if (!v.is_array()) bad(source, where, "expected an array");
  return v;
}

std::vector<std::int64_t> int_list(const Json& v, const std::string& source, const std::string& where) {
  std::vector<std::int64_t> out;
  const auto& a = as_array(v, source, where);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_int(a[i], source, where + "/" + std::to_string(i)));
  return out;
}

// Re-throw library validation errors with the source location attached.
template <class F>
auto located(const std::string& source, const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    fail(e.code(), source + ": " + (where.empty() ? "/" : where) + ": " + e.what());
  }
}

FiniteGraph finite_from_json(const Json& j, const std::string& source, const std::string& where) {
  FiniteGraph g;
  g.vertex_count = as_int(field(j, "vertices", source, where), source, where + "/vertices");
  if (g.vertex_count < 0) bad(source, where + "/vertices", "vertex count must be nonnegative");
  const std::string ew = where + "/edges";
  const auto& edges = j.contains("edges") ? as_array(j["edges"], source, ew) : Json::array();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto w = ew + "/" + std::to_string(i);
    const auto& e = as_array(edges[i], source, w);
    if (e.size() != 2) bad(source, w, "an edge is [source, target]");
    g.edges.push_back({as_int(e[0], source, w + "/0"), as_int(e[1], source, w + "/1")});
  }
  return g;
}

Json finite_to_json(const FiniteGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back({e.source, e.target});
  return {{"vertices", g.vertex_count}, {"edges", edges}};
}

std::vector<CrossEdge> cross_from_json(const Json& j, const std::string& source, const std::string& where) {
  std::vector<CrossEdge> out;
  const auto& a = as_array(j, source, where);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto w = where + "/" + std::to_string(i);
    const auto& e = as_array(a[i], source, w);
    if (e.size() != 3) bad(source, w, "a cross edge is [source_local, target_local, shift]");
    out.push_back({as_int(e[0], source, w + "/0"), as_int(e[1], source, w + "/1"), as_int(e[2], source, w + "/2")});
  }
  return out;
}

Complex complex_entry(const Json& v, const std::string& source, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {as_double(v[0], source, where + "/0"), as_double(v[1], source, where + "/1")};
  }
  bad(source, where, "expected a number or a [re, im] pair");
}

Json complex_entry_to_json(Complex z) {
  if (z.imag() == 0) return z.real();
  return Json::array({z.real(), z.imag()});
}

double parse_number(std::string_view cell, const std::string& source, std::size_t line, std::size_t col) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    fail(ErrorCode::InvalidInput, source + ": line " + std::to_string(line) + ", column " + std::to_string(col) +
                                      ": not a number: '" + std::string(cell) + "'");
  }
  return v;
}

struct CsvRows {
  std::vector<std::vector<std::string_view>> cells;
  std::vector<std::size_t> lines;
};

CsvRows split_csv(const std::string& text) {
  CsvRows out;
  std::size_t pos = 0, line = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line;
    std::string_view row(text.data() + pos, end - pos);
    pos = end + 1;
    std::string_view trimmed = row;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.remove_suffix(1);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::vector<std::string_view> cells;
    std::size_t c = 0;
    while (true) {
      const auto comma = trimmed.find(',', c);
      cells.push_back(trimmed.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    out.cells.push_back(std::move(cells));
    out.lines.push_back(line);
  }
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidInput, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line number.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) line += text[i] == '\n';
    fail(ErrorCode::InvalidInput, source + ": line " + std::to_string(line) + ": malformed JSON");
  }
}

GraphPresentation graph_from_json(const Json& j, const std::string& source) {
  const auto& kind_v = field(j, "kind", source, "");
  if (!kind_v.is_string()) bad(source, "/kind", "expected a string");
  const auto kind = kind_v.get<std::string>();
  if (kind == "finite") {
    auto g = finite_from_json(j, source, "");
    return located(source, "", [&] { return GraphPresentation::finite(g.vertex_count, std::move(g.edges)); });
  }
  if (kind == "line_periodic") {
    auto cell = finite_from_json(field(j, "cell", source, ""), source, "/cell");
    auto cross = cross_from_json(field(j, "cross_edges", source, ""), source, "/cross_edges");
    return located(source, "", [&] { return GraphPresentation::line_periodic(std::move(cell), std::move(cross)); });
  }
  if (kind == "ray_periodic") {
    FiniteGraph head;
    if (j.contains("head")) head = finite_from_json(j["head"], source, "/head");
    std::vector<AttachEdge> attach;
    if (j.contains("attach")) {
      const auto& a = as_array(j["attach"], source, "/attach");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto w = "/attach/" + std::to_string(i);
        const auto& e = as_array(a[i], source, w);
        if (e.size() != 3 && e.size() != 4) bad(source, w, "an attach edge is [head_vertex, cell, local(, \"in\")]");
        AttachEdge ae{as_int(e[0], source, w + "/0"), as_int(e[1], source, w + "/1"), as_int(e[2], source, w + "/2"),
                      false};
        if (e.size() == 4) {
          if (!e[3].is_string() || (e[3] != "in" && e[3] != "out")) bad(source, w + "/3", "expected \"in\" or \"out\"");
          ae.into_head = e[3] == "in";
        }
        attach.push_back(ae);
      }
    }
    auto cell = finite_from_json(field(j, "cell", source, ""), source, "/cell");
    auto cross = cross_from_json(field(j, "cross_edges", source, ""), source, "/cross_edges");
    return located(source, "", [&] {
      return GraphPresentation::ray_periodic(std::move(head), std::move(attach), std::move(cell), std::move(cross));
    });
  }
  if (kind == "window_generated") {
    const auto& rule = field(j, "rule", source, "");
    if (rule == "regular_tree") {
      const auto d = as_int(field(j, "degree", source, ""), source, "/degree");
      return located(source, "/degree", [&] { return GraphPresentation::regular_tree(d); });
    }
    if (rule == "square_lattice") return GraphPresentation::square_lattice();
    bad(source, "/rule", "unknown rule (expected regular_tree or square_lattice)");
  }
  bad(source, "/kind", "unknown graph kind '" + kind + "'");
}

Json graph_to_json(const GraphPresentation& g) {
  switch (g.kind()) {
    case PresentationKind::Finite: {
      Json j = finite_to_json(g.finite_graph());
      j["kind"] = "finite";
      return j;
    }
    case PresentationKind::LinePeriodic:
    case PresentationKind::RayPeriodic: {
      const auto& p = g.periodic();
      Json cross = Json::array();
      for (const auto& c : p.cross_edges) cross.push_back({c.source_local, c.target_local, c.shift});
      Json j{{"cell", finite_to_json(p.cell)}, {"cross_edges", cross}};
      if (g.kind() == PresentationKind::LinePeriodic) {
        j["kind"] = "line_periodic";
      } else {
        j["kind"] = "ray_periodic";
        j["head"] = finite_to_json(p.head);
        Json attach = Json::array();
        for (const auto& a : p.attach) attach.push_back({a.head_vertex, a.cell, a.local, a.into_head ? "in" : "out"});
        j["attach"] = attach;
      }
      return j;
    }
    case PresentationKind::WindowGenerated: {
      const auto& gen = g.generated();
      if (gen.rule_name == "regular_tree") {
        return {{"kind", "window_generated"}, {"rule", "regular_tree"}, {"degree", gen.rule_parameter}};
      }
      if (gen.rule_name == "square_lattice") return {{"kind", "window_generated"}, {"rule", "square_lattice"}};
      fail(ErrorCode::Unsupported, "rule '" + gen.rule_name + "' has no file representation");
    }
  }
  fail(ErrorCode::Unsupported, "unknown presentation kind");
}

EventuallyPeriodicSequence sequence_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) bad(source, "", "expected an object");
  EventuallyPeriodicSequence s;
  if (j.contains("core")) s.core = int_list(j["core"], source, "/core");
  if (j.contains("core_start")) s.core_start = as_int(j["core_start"], source, "/core_start");
  if (j.contains("left_period")) s.left_period = int_list(j["left_period"], source, "/left_period");
  if (j.contains("right_period")) s.right_period = int_list(j["right_period"], source, "/right_period");
  for (const auto& key : j.items()) {
    if (key.key() != "core" && key.key() != "core_start" && key.key() != "left_period" && key.key() != "right_period") {
      bad(source, "/" + key.key(), "unknown field");
    }
  }
  return s;
}

Json sequence_to_json(const EventuallyPeriodicSequence& s) {
  return {{"core", s.core}, {"core_start", s.core_start}, {"left_period", s.left_period},
          {"right_period", s.right_period}};
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Matrix matrix_from_csv(const std::string& text, const std::string& source) {
  const auto rows = split_csv(text);
  if (rows.cells.empty()) fail(ErrorCode::InvalidInput, source + ": empty matrix");
  const auto cols = rows.cells.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.cells.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.cells.size(); ++i) {
    if (rows.cells[i].size() != cols) {
      fail(ErrorCode::InvalidInput, source + ": line " + std::to_string(rows.lines[i]) + ": expected " +
                                        std::to_string(cols) + " columns, found " +
                                        std::to_string(rows.cells[i].size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          parse_number(rows.cells[i][c], source, rows.lines[i], c + 1);
    }
  }
  return m;
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

CMatrix complex_from_csv(const std::string& re, const std::string& im, const std::string& source) {
  const Matrix a = matrix_from_csv(re, source + " (real part)");
  const Matrix b = matrix_from_csv(im, source + " (imaginary part)");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::InvalidInput, source + ": real and imaginary parts have different shapes");
  }
  CMatrix m(a.rows(), a.cols());
  m.real() = a;
  m.imag() = b;
  return m;
}

std::pair<std::string, std::string> complex_to_csv(const CMatrix& m) {
  return {matrix_to_csv(m.real()), matrix_to_csv(m.imag())};
}

SpinorGridState state_from_csv(const std::string& text, double x0, double h, const std::string& source) {
  auto rows = split_csv(text);
  if (!rows.cells.empty()) {
    // Header line: first cell is not numeric.
    double dummy = 0;
    auto first = rows.cells.front().front();
    while (!first.empty() && first.front() == ' ') first.remove_prefix(1);
    const auto r = std::from_chars(first.data(), first.data() + first.size(), dummy);
    if (r.ec != std::errc()) {
      rows.cells.erase(rows.cells.begin());
      rows.lines.erase(rows.lines.begin());
    }
  }
  if (rows.cells.empty()) fail(ErrorCode::InvalidInput, source + ": state has no rows");
  SpinorGridState s;
  s.x0 = x0;
  s.h = h;
  for (std::size_t i = 0; i < rows.cells.size(); ++i) {
    const auto line = rows.lines[i];
    if (rows.cells[i].size() != 5) {
      fail(ErrorCode::InvalidInput, source + ": line " + std::to_string(line) +
                                        ": expected index, re u+, im u+, re u-, im u-");
    }
    const double idx = parse_number(rows.cells[i][0], source, line, 1);
    if (idx != static_cast<double>(i)) {
      fail(ErrorCode::InvalidInput, source + ": line " + std::to_string(line) + ": expected index " + std::to_string(i));
    }
    s.up.emplace_back(parse_number(rows.cells[i][1], source, line, 2), parse_number(rows.cells[i][2], source, line, 3));
    s.um.emplace_back(parse_number(rows.cells[i][3], source, line, 4), parse_number(rows.cells[i][4], source, line, 5));
  }
  located(source, "", [&] {
    s.validate();
    return 0;
  });
  return s;
}

std::string state_to_csv(const SpinorGridState& s) {
  std::string out = "index,re_up,im_up,re_um,im_um\n";
  for (std::int64_t j = 0; j < s.size(); ++j) {
    out += std::to_string(j) + ',' + format_double(s.up[j].real()) + ',' + format_double(s.up[j].imag()) + ',' +
           format_double(s.um[j].real()) + ',' + format_double(s.um[j].imag()) + '\n';
  }
  return out;
}

LaurentOperator laurent_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) bad(source, "", "expected an object");
  if (j.contains("direct_sum")) {
    const auto& parts = as_array(j["direct_sum"], source, "/direct_sum");
    if (parts.empty()) bad(source, "/direct_sum", "empty direct sum");
    auto op = laurent_from_json(parts[0], source + "/direct_sum/0");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      op = op.direct_sum(laurent_from_json(parts[i], source + "/direct_sum/" + std::to_string(i)));
    }
    return op;
  }
  const std::int64_t rank = j.contains("rank") ? as_int(j["rank"], source, "/rank") : 1;
  if (rank < 1 || rank > 64) bad(source, "/rank", "rank must lie in 1..64");
  std::optional<std::int64_t> band;
  if (j.contains("band")) {
    band = as_int(j["band"], source, "/band");
    if (*band < 0) bad(source, "/band", "band must be nonnegative");
  }
  const auto& diags = field(j, "diagonals", source, "");
  if (!diags.is_object()) bad(source, "/diagonals", "expected an object keyed by diagonal offset");
  std::map<std::int64_t, CMatrix> coeffs;
  for (const auto& item : diags.items()) {
    const auto w = "/diagonals/" + item.key();
    std::int64_t k = 0;
    const auto& key = item.key();
    const auto res = std::from_chars(key.data(), key.data() + key.size(), k);
    if (res.ec != std::errc() || res.ptr != key.data() + key.size()) bad(source, w, "diagonal offset must be an integer");
    if (band && std::abs(k) > *band) bad(source, w, "offset exceeds the declared band " + std::to_string(*band));
    CMatrix c(rank, rank);
    const auto& v = item.value();
    if (rank == 1) {
      c(0, 0) = complex_entry(v, source, w);
    } else {
      const auto& rows = as_array(v, source, w);
      if (static_cast<std::int64_t>(rows.size()) != rank) bad(source, w, "expected " + std::to_string(rank) + " rows");
      for (std::int64_t a = 0; a < rank; ++a) {
        const auto& row = as_array(rows[a], source, w + "/" + std::to_string(a));
        if (static_cast<std::int64_t>(row.size()) != rank) {
          bad(source, w + "/" + std::to_string(a), "expected " + std::to_string(rank) + " entries");
        }
        for (std::int64_t b = 0; b < rank; ++b) {
          c(a, b) = complex_entry(row[b], source, w + "/" + std::to_string(a) + "/" + std::to_string(b));
        }
      }
    }
    coeffs.emplace(k, std::move(c));
  }
  return located(source, "", [&] { return LaurentOperator(static_cast<int>(rank), std::move(coeffs)); });
}

Json laurent_to_json(const LaurentOperator& op) {
  Json diags = Json::object();
  for (const auto& [k, c] : op.coefficients()) {
    if (op.rank() == 1) {
      diags[std::to_string(k)] = complex_entry_to_json(c(0, 0));
      continue;
    }
    Json rows = Json::array();
    for (Eigen::Index a = 0; a < c.rows(); ++a) {
      Json row = Json::array();
      for (Eigen::Index b = 0; b < c.cols(); ++b) row.push_back(complex_entry_to_json(c(a, b)));
      rows.push_back(row);
    }
    diags[std::to_string(k)] = rows;
  }
  return {{"rank", op.rank()}, {"band", op.band()}, {"diagonals", diags}};
}

HermitianLineOperator hermitian_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) bad(source, "", "expected an object");
  if (j.contains("kind")) {
    if (j["kind"] != "momentum") bad(source, "/kind", "unknown operator kind (expected momentum)");
    const std::int64_t copies = j.contains("copies") ? as_int(j["copies"], source, "/copies") : 1;
    if (copies < 1 || copies > 64) bad(source, "/copies", "copies must lie in 1..64");
    return HermitianLineOperator::momentum(static_cast<int>(copies));
  }
  if (j.contains("direct_sum")) {
    const auto& parts = as_array(j["direct_sum"], source, "/direct_sum");
    if (parts.empty()) bad(source, "/direct_sum", "empty direct sum");
    auto op = hermitian_from_json(parts[0], source + "/direct_sum/0");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto next = hermitian_from_json(parts[i], source + "/direct_sum/" + std::to_string(i));
      op = located(source, "/direct_sum", [&] { return op.direct_sum(next); });
    }
    return op;
  }
  auto op = laurent_from_json(j, source);
  return located(source, "", [&] { return HermitianLineOperator::from_banded(std::move(op)); });
}

std::vector<SymMatrix> path_from_json(const Json& j, const std::string& source) {
  const auto& samples = as_array(field(j, "samples", source, ""), source, "/samples");
  std::vector<SymMatrix> out;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto w = "/samples/" + std::to_string(s);
    const auto& rows = as_array(samples[s], source, w);
    if (rows.empty()) bad(source, w, "empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto rw = w + "/" + std::to_string(i);
      const auto& row = as_array(rows[i], source, rw);
      if (row.size() != rows.size()) bad(source, rw, "matrix must be square");
      for (std::size_t c = 0; c < row.size(); ++c) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            as_double(row[c], source, rw + "/" + std::to_string(c));
      }
    }
    out.push_back(located(source, w, [&] { return SymMatrix(m); }));
  }
  return out;
}

BandlimitedRequest bandlimited_from_json(const Json& j, const std::string& source) {
  BandlimitedRequest r;
  r.sites = as_int(field(j, "sites", source, ""), source, "/sites");
  r.h = as_double(field(j, "h", source, ""), source, "/h");
  r.r = as_double(field(j, "R", source, ""), source, "/R");
  r.dt = j.contains("dt") ? as_double(j["dt"], source, "/dt") : r.h;
  if (j.contains("speed")) r.speed = as_double(j["speed"], source, "/speed");
  const auto& samples = as_array(field(j, "samples", source, ""), source, "/samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto w = "/samples/" + std::to_string(i);
    const auto& s = as_array(samples[i], source, w);
    if (s.size() != 2 && s.size() != 3) bad(source, w, "a sample is [t, re] or [t, re, im]");
    const double t = as_double(s[0], source, w + "/0");
    const double re = as_double(s[1], source, w + "/1");
    const double im = s.size() == 3 ? as_double(s[2], source, w + "/2") : 0.0;
    r.samples.push_back({t, {re, im}});
  }
  return r;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json complex_to_json(const CMatrix& m) {
  return {{"re", matrix_to_json(m.real())}, {"im", matrix_to_json(m.imag())}};
}

}  // namespace ukh::io
