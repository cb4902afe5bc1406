// ukh: command-line front end over the C API. Every subcommand turns its
// flags into a JSON request, runs it through ukh_execute and prints the
// report (or, with --csv, the primary matrix/state as CSV).

#include <chrono>
#include <iostream>
#include <list>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ukhlab/ukhlab.h"

namespace {

using Json = nlohmann::json;

enum class Kind { Str, Real, Int, Flag, IntList };

struct OptSpec {
  const char* name;   // flag name without dashes; request key uses '_'
  Kind kind;
  const char* help;
};

struct CommandSpec {
  const char* group;
  const char* name;
  const char* help;
  bool positional_input;
  std::vector<OptSpec> opts;
};

const OptSpec kSymTol{"symmetry-tol", Kind::Real, "symmetry check tolerance relative to |A|_max (default 1e-12)"};
const OptSpec kIdxWindows{"windows", Kind::IntList, "comma separated window sizes (default 16,32,64)"};
const OptSpec kIdxTol{"tol", Kind::Real, "singular values below this count as kernel (default 1e-8)"};
const OptSpec kIdxStab{"stabilization", Kind::Int, "trailing windows that must agree (default 3)"};
const OptSpec kSeed{"seed", Kind::Int, "seed for randomized suites (default 1)"};
const OptSpec kChi{"chi", Kind::Str, "normalizing function: smooth-sign, chebyshev-sign, arctan (default smooth-sign)"};
const OptSpec kDegree{"degree", Kind::Int, "polynomial degree (default 16)"};

std::vector<OptSpec> aps_opts() {
  return {{"horizon", Kind::Real, "initial quadrature horizon (default 1)"},
          {"step", Kind::Real, "quadrature step (default 1e-2)"},
          {"divergence", Kind::Real, "divergence threshold (default 1e12)"},
          {"stabilization", Kind::Real, "relative stabilization increment (default 1e-10)"},
          {"max-doublings", Kind::Int, "maximum horizon doublings (default 200)"},
          {"tol", Kind::Real, "zero eigenvalue threshold (default 1e-9 |A|)"},
          kSymTol};
}

std::vector<OptSpec> wave_state_opts() {
  return {{"x0", Kind::Real, "coordinate of site 0 (default 0)"},
          {"h", Kind::Real, "lattice spacing"},
          {"t", Kind::Real, "time, a multiple of h"},
          {"boundary", Kind::Str, "free, chirality or periodic (default free)"},
          {"sign", Kind::Int, "chirality sign +1 or -1 (default 1)"}};
}

template <class... V>
std::vector<OptSpec> join(std::vector<OptSpec> a, const V&... more) {
  (a.insert(a.end(), more.begin(), more.end()), ...);
  return a;
}

std::vector<CommandSpec> commands() {
  return {
      {"graph", "homology", "H0, H1 and torsion of a finite graph", true, {}},
      {"graph", "classify", "decide whether K0 and K1 of the uniform Roe algebra vanish", true,
       {{"flow-capacity", Kind::Int, "flow certificate capacity (default 2)"},
        {"radius-min", Kind::Int, "smallest flow window radius (default 2)"},
        {"radius-max", Kind::Int, "largest flow window radius (default 6)"},
        {"folner-epsilon", Kind::Real, "Folner ratio threshold (default 0.05)"},
        {"ends-radius", Kind::Int, "end counting radius (default 6)"}}},
      {"graph", "ends", "count ends", true, {{"radius", Kind::Int, "shell radius (default 6)"}}},
      {"graph", "forest", "acyclicity with an explicit cycle when false", true, {}},
      {"seq", "in-s", "bounded partial sums decision", true,
       {{"side", Kind::Str, "left, right or both (default both)"},
        {"witness-candidate", Kind::Int, "partial sum to exceed when unbounded (default 1000)"}}},
      {"seq", "class", "K0 class invariant of a sequence on a ray or line graph", true,
       {{"graph", Kind::Str, "graph presentation file"}}},
      {"flow", "find", "divergence-one flow on a window", true,
       {{"base", Kind::Int, "window base vertex"},
        {"radius", Kind::Int, "window radius (default 4)"},
        {"capacity", Kind::Int, "edge capacity (default 2)"}}},
      {"spec", "eigen", "symmetric eigensolve", true,
       {{"tol", Kind::Real, "residual bound relative to |A| (default 1e-8)"}, kSymTol}},
      {"spec", "eta", "eta invariant", true,
       {{"s", Kind::Real, "eta parameter (default 0)"}, {"tol", Kind::Real, "zero threshold (default 1e-9 |A|)"},
        kSymTol}},
      {"spec", "bounded-transform", "Z = A (1 + A^T A)^{-1/2}", true, {}},
      {"spec", "cayley", "Cayley transform (A - i)(A + i)^{-1}", true,
       {{"imag", Kind::Str, "CSV with the imaginary part of a Hermitian input"}, kSymTol}},
      {"spec", "cheb", "Chebyshev approximation of f(A) for banded A", true,
       {{"band", Kind::Int, "declared band (default: observed)"},
        {"function", Kind::Str, "smooth-sign, arctan, exp or tanh (default smooth-sign)"},
        {"gap", Kind::Real, "gap for smooth-sign"},
        kDegree,
        {"lo", Kind::Real, "interval start (default -|A|)"},
        {"hi", Kind::Real, "interval end (default |A|)"},
        {"samples", Kind::Int, "error estimation samples (default 20001)"}}},
      {"wave", "evolve", "exact evolution of a lattice spinor", true, wave_state_opts()},
      {"wave", "report", "finite propagation report, or the periodic-shift sweep", true,
       join(wave_state_opts(),
            std::vector<OptSpec>{{"speed", Kind::Real, "propagation speed c_D (default 1)"},
                                 {"sweep", Kind::Flag, "run the periodic-shift delta sweep instead"},
                                 {"sites", Kind::Int, "sweep lattice size (default 1024)"},
                                 {"min-exp", Kind::Int, "smallest delta = 2^-max-exp .. 2^-min-exp (default 3)"},
                                 {"max-exp", Kind::Int, "(default 8)"}})},
      {"wave", "bandlimited", "f(D) from samples of the Fourier transform of f", true,
       {{"emit-matrix", Kind::Flag, "include the matrix in the JSON report"}}},
      {"sobolev", "reflect", "reflection coefficients and optional extension of samples", true,
       {{"k", Kind::Int, "order"}, {"depth", Kind::Int, "extension depth (default maximal)"}}},
      {"sobolev", "torus-schatten", "Schatten norm of the torus Sobolev embedding", true,
       {{"n", Kind::Int, "dimension"},
        {"r", Kind::Real, "circumference"},
        {"m", Kind::Int, "fibre rank"},
        {"t", Kind::Real, "Sobolev order"},
        {"p", Kind::Real, "Schatten exponent"},
        {"cutoff", Kind::Int, "lattice cutoff (default 1000000)"},
        {"max-points", Kind::Real, "largest enumerated lattice (default 4e9)"}}},
      {"sobolev", "classify", "convergence of the torus Schatten sum", false,
       {{"n", Kind::Int, "dimension"}, {"t", Kind::Real, "Sobolev order"}, {"p", Kind::Real, "Schatten exponent"}}},
      {"index", "compressed", "index of a compressed Laurent operator", true,
       {kIdxWindows, kIdxTol, kIdxStab,
        {"random", Kind::Int, "run this many random shift polynomials instead"},
        kSeed,
        {"max-band", Kind::Int, "random fixture band (default 3)"}}},
      {"index", "pm", "partitioned-manifold index via the Cayley transform", true, {kIdxWindows, kIdxTol, kIdxStab}},
      {"index", "flow", "spectral flow of a sampled path", true,
       {{"tol", Kind::Real, "zero eigenvalue threshold (default 1e-9 |A|)"}}},
      {"index", "aps", "APS positive count for d/du + A", true, aps_opts()},
      {"index", "rho", "projection (1 + chi(D)) / 2", true,
       {{"gap", Kind::Real, "spectral gap c"}, kChi, kDegree, kSymTol}},
      {"index", "consistency", "rho trace, APS count and subspace comparison", true,
       join(aps_opts(), std::vector<OptSpec>{{"gap", Kind::Real, "spectral gap c (default |lambda|_min / 2)"},
                                             kChi,
                                             kDegree,
                                             {"angle-tol", Kind::Real, "principal angle bound (default 1e-8)"},
                                             {"random", Kind::Int, "run this many random gapped matrices instead"},
                                             kSeed,
                                             {"max-order", Kind::Int, "random matrix order bound (default 8)"}})},
  };
}

struct Holder {
  OptSpec spec;
  std::string s;
  double d = 0;
  std::int64_t i = 0;
  bool b = false;
  std::vector<std::int64_t> list;
  CLI::Option* opt = nullptr;
};

struct Bound {
  CommandSpec spec;
  CLI::App* app = nullptr;
  std::string input;
  std::list<Holder> holders;
};

std::string key_of(const char* flag) {
  std::string k = flag;
  for (auto& ch : k) {
    if (ch == '-') ch = '_';
  }
  return k;
}

int exit_code(ukh_status s) {
  switch (s) {
    case UKH_OK: return 0;
    case UKH_INVALID_INPUT:
    case UKH_DEGREE: return 2;
    case UKH_NUMERICAL:
    case UKH_CONTRADICTION: return 3;
    case UKH_UNSUPPORTED: return 4;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse index and finite propagation toolkit"};
  app.require_subcommand(1);
  // Leave "-h" free: wave commands take the lattice spacing as --h.
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", std::string(ukh_version()));
  bool csv = false;
  app.add_flag("--csv", csv, "print the primary matrix or state as CSV instead of the JSON report");
  app.add_flag("--json", "print the JSON report (default)");

  std::list<Bound> bound;
  std::map<std::string, CLI::App*> groups;
  for (auto& spec : commands()) {
    auto& g = groups[spec.group];
    if (g == nullptr) {
      g = app.add_subcommand(spec.group, std::string(spec.group) + " commands");
      g->require_subcommand(1);
      g->set_help_flag("--help", "print help and exit");
    }
    auto& b = bound.emplace_back();
    b.spec = spec;
    b.app = g->add_subcommand(spec.name, spec.help);
    b.app->set_help_flag("--help", "print help and exit");
    if (spec.positional_input) b.app->add_option("input", b.input, "input file");
    for (const auto& o : spec.opts) {
      auto& h = b.holders.emplace_back();
      h.spec = o;
      const std::string flag = std::string("--") + o.name;
      switch (o.kind) {
        case Kind::Str: h.opt = b.app->add_option(flag, h.s, o.help); break;
        case Kind::Real: h.opt = b.app->add_option(flag, h.d, o.help); break;
        case Kind::Int: h.opt = b.app->add_option(flag, h.i, o.help); break;
        case Kind::Flag: h.opt = b.app->add_flag(flag, h.b, o.help); break;
        case Kind::IntList: h.opt = b.app->add_option(flag, h.list, o.help)->delimiter(','); break;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Bound* chosen = nullptr;
  for (const auto& b : bound) {
    if (b.app->parsed()) chosen = &b;
  }
  if (chosen == nullptr) return 2;

  Json request = Json::object();
  if (!chosen->input.empty()) request["input"] = chosen->input;
  for (const auto& h : chosen->holders) {
    if (h.opt->count() == 0) continue;
    const auto key = key_of(h.spec.name);
    switch (h.spec.kind) {
      case Kind::Str: request[key] = h.s; break;
      case Kind::Real: request[key] = h.d; break;
      case Kind::Int: request[key] = h.i; break;
      case Kind::Flag: request[key] = h.b; break;
      case Kind::IntList: request[key] = h.list; break;
    }
  }
  if (csv) request["format"] = "csv";

  const std::string command = std::string(chosen->spec.group) + " " + chosen->spec.name;
  const auto start = std::chrono::steady_clock::now();
  char* raw = nullptr;
  const auto status = ukh_execute(command.c_str(), request.dump().c_str(), &raw);
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (status != UKH_OK) {
    const std::string message = ukh_last_error();
    std::cerr << "error: " << message << "\n";
    Json err{{"command", command},
             {"error", {{"status", ukh_status_name(status)}, {"message", message}}},
             {"elapsed_ms", elapsed}};
    std::cout << err.dump(2) << "\n";
    return exit_code(status);
  }
  Json report = Json::parse(raw);
  ukh_string_free(raw);
  if (csv) {
    std::cout << report["csv"].get<std::string>();
    return 0;
  }
  report["elapsed_ms"] = elapsed;
  std::cout << report.dump(2) << "\n";
  return 0;
}
