#include <catch_amalgamated.hpp>

#include <functional>
#include <random>
#include <regex>
#include <set>

#include "ukhlab/commands.hpp"
#include "ukhlab/error.hpp"
#include "ukhlab/io.hpp"

using namespace ukh;
using io::Json;

namespace {

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

// Enough of JSON Schema 2020-12 for docs/report.schema.json: type, enum,
// const, required, properties, additionalProperties, items, pattern,
// minimum, allOf, anyOf, oneOf, if/then and local $ref.
class Validator {
 public:
  explicit Validator(Json root) : root_(std::move(root)) {}

  bool valid(const Json& v) const { return check(root_, v); }

 private:
  const Json& resolve(const std::string& ref) const {
    REQUIRE(ref.rfind("#/", 0) == 0);
    return root_.at(Json::json_pointer(ref.substr(1)));
  }

  static bool type_ok(const std::string& t, const Json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    FAIL("unknown schema type " << t);
    return false;
  }

  bool check(const Json& s, const Json& v) const {
    if (s.contains("$ref") && !check(resolve(s["$ref"]), v)) return false;
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok = ok || type_ok(t, v);
      } else {
        ok = type_ok(s["type"], v);
      }
      if (!ok) return false;
    }
    if (s.contains("const") && s["const"] != v) return false;
    if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end()) return false;
    if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>()) return false;
    if (s.contains("pattern") && v.is_string() &&
        !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>()))) {
      return false;
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& k : s["required"])
          if (!v.contains(k.get<std::string>())) return false;
      }
      if (s.contains("properties")) {
        for (const auto& [k, sub] : s["properties"].items())
          if (v.contains(k) && !check(sub, v[k])) return false;
      }
      if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
        for (const auto& [k, _] : v.items())
          if (!s["properties"].contains(k)) return false;
      }
    }
    if (v.is_array() && s.contains("items")) {
      for (const auto& x : v)
        if (!check(s["items"], x)) return false;
    }
    if (s.contains("allOf")) {
      for (const auto& sub : s["allOf"])
        if (!check(sub, v)) return false;
    }
    if (s.contains("anyOf")) {
      bool any = false;
      for (const auto& sub : s["anyOf"]) any = any || check(sub, v);
      if (!any) return false;
    }
    if (s.contains("oneOf")) {
      int n = 0;
      for (const auto& sub : s["oneOf"]) n += check(sub, v);
      if (n != 1) return false;
    }
    if (s.contains("if") && check(s["if"], v) && s.contains("then") && !check(s["then"], v)) return false;
    return true;
  }

  Json root_;
};

const Validator& schema() {
  static const Validator v(io::parse_json(io::read_file("docs/report.schema.json"), "schema"));
  return v;
}

struct Invocation {
  std::string command;
  Json request;
};

std::vector<Invocation> every_command() {
  return {
      {"graph homology", {{"input", "data/triangle.json"}}},
      {"graph classify", {{"input", "data/z_path.json"}}},
      {"graph classify", {{"input", "data/tree3.json"}}},
      {"graph ends", {{"input", "data/tree3.json"}, {"radius", 4}}},
      {"graph forest", {{"input", "data/ladder.json"}}},
      {"seq in-s", {{"input", "data/delta0.json"}, {"side", "right"}}},
      {"seq in-s", {{"input", "data/ones.json"}, {"side", "right"}}},
      {"seq class", {{"input", "data/delta0.json"}, {"graph", "data/n_ray.json"}}},
      {"flow find", {{"input", "data/tree3.json"}, {"radius", 3}}},
      {"spec eigen", {{"input", "data/gapped.csv"}}},
      {"spec eta", {{"input", "data/diag_pm1.csv"}}},
      {"spec bounded-transform", {{"input", "data/gapped.csv"}}},
      {"spec cayley", {{"input", "data/gapped.csv"}}},
      {"spec cheb", {{"input", "data/tridiag.csv"}, {"function", "tanh"}, {"degree", 10}}},
      {"wave evolve", {{"input", "data/bump.csv"}, {"h", 0.125}, {"t", 0.5}}},
      {"wave report", {{"input", "data/bump.csv"}, {"h", 0.125}, {"t", -0.25}, {"boundary", "chirality"}}},
      {"wave report", {{"sweep", true}, {"sites", 256}, {"max_exp", 6}}},
      {"wave bandlimited", {{"input", "data/two_node.json"}, {"emit_matrix", true}}},
      {"sobolev reflect", {{"k", 3}, {"input", "data/samples.csv"}}},
      {"sobolev torus-schatten", {{"input", "data/torus.json"}, {"cutoff", 1000}}},
      {"sobolev torus-schatten", {{"n", 2}, {"t", 1}, {"p", 2}}},
      {"sobolev classify", {{"n", 2}, {"t", 1.5}, {"p", 2}}},
      {"index compressed", {{"input", "data/shift_sum.json"}}},
      {"index compressed", {{"random", 2}, {"seed", 5}}},
      {"index pm", {{"input", "data/momentum.json"}}},
      {"index flow", {{"input", "data/flow_path.json"}}},
      {"index aps", {{"input", "data/gapped.csv"}}},
      {"index rho", {{"input", "data/gapped.csv"}, {"gap", 0.5}}},
      {"index consistency", {{"input", "data/gapped.csv"}}},
      {"index consistency", {{"random", 3}, {"seed", 9}}},
  };
}

}  // namespace

TEST_CASE("every command emits a report that validates against the schema") {
  std::set<std::string> seen;
  for (const auto& inv : every_command()) {
    INFO(inv.command << " " << inv.request.dump());
    const auto report = run_command(inv.command, inv.request);
    CHECK(schema().valid(report));
    seen.insert(inv.command);
  }
  const auto names = command_names();
  CHECK(seen == std::set<std::string>(names.begin(), names.end()));
}

TEST_CASE("the schema rejects malformed reports") {
  auto good = run_command("graph homology", {{"input", "data/triangle.json"}});
  REQUIRE(schema().valid(good));
  auto bad = good;
  bad["outputs"].erase("h1");
  CHECK_FALSE(schema().valid(bad));
  bad = good;
  bad["inputs"][0]["digest"] = "xyz";
  CHECK_FALSE(schema().valid(bad));
  bad = good;
  bad["extra"] = 1;
  CHECK_FALSE(schema().valid(bad));
  const Json err{{"command", "graph homology"}, {"error", {{"status", "invalid_input"}, {"message", "m"}}}};
  CHECK(schema().valid(err));
}

TEST_CASE("identical requests give byte-identical reports") {
  for (const auto& inv : every_command()) {
    INFO(inv.command);
    CHECK(run_command(inv.command, inv.request).dump() == run_command(inv.command, inv.request).dump());
  }
}

TEST_CASE("input digests are FNV-1a of the file bytes") {
  CHECK(io::hex64(io::fnv1a64("")) == "cbf29ce484222325");
  CHECK(io::hex64(io::fnv1a64("a")) == "af63dc4c8601ec8c");
  const auto r = run_command("graph homology", {{"input", "data/triangle.json"}});
  CHECK(r["inputs"][0]["digest"] == io::hex64(io::fnv1a64(io::read_file("data/triangle.json"))));
}

TEST_CASE("graph presentations round trip") {
  std::vector<GraphPresentation> graphs{
      GraphPresentation::finite(4, {{0, 1}, {1, 1}, {2, 3}, {0, 1}}),
      GraphPresentation::integer_ladder(),
      GraphPresentation::ray_periodic({2, {{0, 1}}}, {{0, 0, 0, false}, {1, 1, 0, true}}, {1, {}}, {{0, 0, 1}}),
      GraphPresentation::regular_tree(4),
      GraphPresentation::square_lattice(),
  };
  for (const auto& g : graphs) {
    const auto j = io::graph_to_json(g);
    INFO(j.dump());
    const auto back = io::graph_from_json(io::parse_json(j.dump(), "rt"), "rt");
    CHECK(io::graph_to_json(back) == j);
    CHECK(back.kind() == g.kind());
  }
}

TEST_CASE("random sequences round trip") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(0, 5), val(-9, 9), start(-6, 6);
  for (int trial = 0; trial < 100; ++trial) {
    EventuallyPeriodicSequence s;
    s.core_start = start(rng);
    for (int i = len(rng); i > 0; --i) s.core.push_back(val(rng));
    for (int i = len(rng) + 1; i > 0; --i) s.left_period.push_back(val(rng));
    for (int i = len(rng) + 1; i > 0; --i) s.right_period.push_back(val(rng));
    const auto j = io::sequence_to_json(s);
    const auto back = io::sequence_from_json(j, "rt");
    CHECK(io::sequence_to_json(back) == j);
    for (std::int64_t n = -20; n <= 20; ++n) CHECK(back.at(n) == s.at(n));
  }
}

TEST_CASE("CSV matrices round trip exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 30; ++trial) {
    const int r = 1 + trial % 5, c = 1 + (trial * 7) % 4;
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = trial % 3 == 0 ? u(rng) * 1e-200 : u(rng);
    const Matrix back = io::matrix_from_csv(io::matrix_to_csv(m), "rt");
    CHECK(back == m);
    CMatrix z = m.cast<Complex>() + Complex(0, 1) * Matrix(m.reverse()).cast<Complex>();
    const auto [re, im] = io::complex_to_csv(z);
    CHECK(io::complex_from_csv(re, im, "rt") == z);
  }
}

TEST_CASE("grid states round trip") {
  SpinorGridState s;
  s.x0 = -0.5;
  s.h = 0.0625;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int j = 0; j < 17; ++j) {
    s.up.emplace_back(g(rng), g(rng));
    s.um.emplace_back(g(rng), g(rng));
  }
  const auto back = io::state_from_csv(io::state_to_csv(s), s.x0, s.h, "rt");
  CHECK(back.up == s.up);
  CHECK(back.um == s.um);
}

TEST_CASE("Laurent operators round trip") {
  std::map<std::int64_t, CMatrix> coeffs;
  CMatrix a(2, 2), b(2, 2);
  a << Complex(1, 0.5), 0, Complex(0, -2), 3;
  b << 0, 1, Complex(0.25, 0), 0;
  coeffs[-2] = a;
  coeffs[1] = b;
  const LaurentOperator op(2, coeffs);
  for (const auto& o : {op, LaurentOperator::shift(-3), op.direct_sum(LaurentOperator::identity(1))}) {
    const auto j = io::laurent_to_json(o);
    const auto back = io::laurent_from_json(io::parse_json(j.dump(), "rt"), "rt");
    CHECK(io::laurent_to_json(back) == j);
    for (double th : {0.0, 0.7, 2.9}) CHECK((back.symbol(th) - o.symbol(th)).norm() == 0);
  }
}

TEST_CASE("loaders accept their own emitters' output") {
  const auto bt = run_command("spec bounded-transform", {{"input", "data/gapped.csv"}, {"format", "csv"}});
  const Matrix z = io::matrix_from_csv(bt["csv"], "emitted");
  CHECK(z.rows() == 4);
  CHECK(io::matrix_to_json(z) == bt["outputs"]["matrix"]);

  const auto ev = run_command("wave evolve", {{"input", "data/bump.csv"}, {"h", 0.125}, {"t", 0.25}, {"format", "csv"}});
  const auto state = io::state_from_csv(ev["csv"], 0, 0.125, "emitted");
  CHECK(state.size() == 16);

  const auto cay = run_command("spec cayley", {{"input", "data/gapped.csv"}, {"format", "csv"}});
  const std::string text = cay["csv"];
  const auto split = text.find("\n\n");
  REQUIRE(split != std::string::npos);
  const CMatrix u = io::complex_from_csv(text.substr(0, split + 1), text.substr(split + 2), "emitted");
  CHECK((u.adjoint() * u - CMatrix::Identity(4, 4)).norm() < 1e-12);

  const auto rnd = run_command("index compressed", {{"random", 3}, {"seed", 2}});
  for (const auto& f : rnd["outputs"]["fixtures"]) {
    const auto op = io::laurent_from_json(f["operator"], "emitted");
    CHECK(winding_number(op.symbol_samples(512)) == f["winding"].get<std::int64_t>());
  }
}

TEST_CASE("load errors name the source and field") {
  std::string msg;
  CHECK(code_of([] { io::parse_json("{\n  \"a\": [1,\n}", "bad.json"); }, &msg) == ErrorCode::InvalidInput);
  CHECK(msg.find("bad.json") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);

  CHECK(code_of([] { io::graph_from_json(Json::parse(R"({"kind":"finite","vertices":2,"edges":[[0,5]]})"), "g.json"); },
                &msg) == ErrorCode::InvalidInput);
  CHECK(msg.find("g.json") != std::string::npos);

  CHECK(code_of([] { io::sequence_from_json(Json::parse(R"({"core":[1],"colour":2})"), "s.json"); }, &msg) ==
        ErrorCode::InvalidInput);
  CHECK(msg.find("colour") != std::string::npos);

  CHECK(code_of([] { io::matrix_from_csv("1,2\n3,x\n", "m.csv"); }, &msg) == ErrorCode::InvalidInput);
  CHECK(msg.find("m.csv") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);

  CHECK(code_of([] { io::matrix_from_csv("1,2\n3\n", "ragged.csv"); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { io::laurent_from_json(Json::parse(R"({"rank":1,"diagonals":{"one":1}})"), "l.json"); }, &msg) ==
        ErrorCode::InvalidInput);
  CHECK(msg.find("l.json") != std::string::npos);
}

TEST_CASE("command errors") {
  std::string msg;
  CHECK(code_of([] { run_command("graph nothing", Json::object()); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { run_command("graph homology", Json::object()); }, &msg) == ErrorCode::InvalidInput);
  CHECK(msg.find("/input") != std::string::npos);
  CHECK(code_of([] { run_command("graph homology", {{"input", "data/triangle.json"}, {"format", "csv"}}); }) ==
        ErrorCode::InvalidInput);
  CHECK(code_of([] { run_command("graph homology", {{"input", "data/tree3.json"}}); }) == ErrorCode::Unsupported);
  CHECK(code_of([] { run_command("sobolev reflect", {{"k", "two"}}); }, &msg) == ErrorCode::InvalidInput);
  CHECK(msg.find("/k") != std::string::npos);
  CHECK(code_of([] { run_command("spec eigen", {{"input", "data/missing.csv"}}); }, &msg) == ErrorCode::InvalidInput);
  CHECK(msg.find("data/missing.csv") != std::string::npos);
  CHECK(code_of([] { run_command("wave evolve", {{"input", "data/bump.csv"}, {"h", 0.125}, {"t", 0.3}}); }) ==
        ErrorCode::InvalidInput);
}

TEST_CASE("documented command examples") {
  const auto h = run_command("graph homology", {{"input", "data/triangle.json"}})["outputs"];
  CHECK(h["h0"] == 1);
  CHECK(h["h1"] == 1);
  CHECK(h["torsion"] == Json::array());

  const auto t = run_command("sobolev torus-schatten",
                             {{"n", 1}, {"r", 6.283185}, {"m", 1}, {"t", 1}, {"p", 2}, {"cutoff", 1000000}})["outputs"];
  CHECK(std::abs(t["value"].get<double>() - 1.775767) < 1e-5);

  const auto c = run_command("index compressed", {{"input", "data/shift.json"}, {"windows", {16, 32, 64}}})["outputs"];
  CHECK(c["stabilized_index"] == -1);
}
