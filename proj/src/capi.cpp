#include "ukhlab/ukhlab.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "ukhlab/commands.hpp"
#include "ukhlab/error.hpp"
#include "ukhlab/ufh.hpp"

struct ukh_graph {
  ukh::GraphPresentation g;
};
struct ukh_sequence {
  ukh::EventuallyPeriodicSequence s;
};
struct ukh_matrix {
  ukh::Matrix m;
};
struct ukh_laurent {
  ukh::LaurentOperator op;
};

namespace {

thread_local std::string last_error;

ukh_status status_of(ukh::ErrorCode c) {
  switch (c) {
    case ukh::ErrorCode::InvalidInput: return UKH_INVALID_INPUT;
    case ukh::ErrorCode::NumericalFailure: return UKH_NUMERICAL;
    case ukh::ErrorCode::Unsupported: return UKH_UNSUPPORTED;
    case ukh::ErrorCode::DegreeViolation: return UKH_DEGREE;
    case ukh::ErrorCode::Contradiction: return UKH_CONTRADICTION;
  }
  return UKH_INTERNAL;
}

template <class F>
ukh_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return UKH_OK;
  } catch (const ukh::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return UKH_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return UKH_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) ukh::fail(ukh::ErrorCode::InvalidInput, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ukh::SymMatrix symmetric(const ukh_matrix* m) {
  need(m, "matrix");
  return ukh::SymMatrix(m->m);
}

int verdict(ukh::Verdict v) {
  switch (v) {
    case ukh::Verdict::Yes: return 1;
    case ukh::Verdict::No: return 0;
    case ukh::Verdict::Unknown: return -1;
  }
  return -1;
}

}  // namespace

extern "C" {

const char* ukh_version(void) { return "0.1.0"; }

const char* ukh_last_error(void) { return last_error.c_str(); }

const char* ukh_status_name(ukh_status s) {
  switch (s) {
    case UKH_OK: return "ok";
    case UKH_INTERNAL: return "internal";
    case UKH_INVALID_INPUT: return "invalid_input";
    case UKH_NUMERICAL: return "numerical_failure";
    case UKH_UNSUPPORTED: return "unsupported";
    case UKH_DEGREE: return "degree_violation";
    case UKH_CONTRADICTION: return "contradiction";
  }
  return "unknown";
}

ukh_status ukh_execute(const char* command, const char* request_json, char** report) {
  return guarded([&] {
    need(command, "command");
    need(report, "report");
    *report = nullptr;
    const auto req = request_json ? ukh::io::parse_json(request_json, "request") : ukh::io::Json::object();
    *report = dup(ukh::run_command(command, req).dump(2));
  });
}

void ukh_string_free(char* s) { delete[] s; }

ukh_status ukh_commands(char** names) {
  return guarded([&] {
    need(names, "names");
    std::string out;
    for (const auto& n : ukh::command_names()) out += n + "\n";
    *names = dup(out);
  });
}

ukh_status ukh_graph_from_json(const char* json, ukh_graph** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new ukh_graph{ukh::io::graph_from_json(ukh::io::parse_json(json, "graph"), "graph")};
  });
}

void ukh_graph_free(ukh_graph* g) { delete g; }

ukh_status ukh_graph_homology(const ukh_graph* g, int64_t* h0, int64_t* h1, int64_t* torsion_count) {
  return guarded([&] {
    need(g, "graph");
    if (g->g.kind() != ukh::PresentationKind::Finite) {
      ukh::fail(ukh::ErrorCode::Unsupported, "homology is computed for finite graphs");
    }
    const auto h = ukh::homology_finite(g->g.finite_graph());
    if (h0) *h0 = h.h0_rank;
    if (h1) *h1 = h.h1_rank;
    if (torsion_count) *torsion_count = static_cast<int64_t>(h.torsion.size());
  });
}

ukh_status ukh_graph_is_forest(const ukh_graph* g, int* is_forest) {
  return guarded([&] {
    need(g, "graph");
    need(is_forest, "is_forest");
    *is_forest = ukh::is_forest(g->g).is_forest ? 1 : 0;
  });
}

ukh_status ukh_graph_classify(const ukh_graph* g, int* k0_zero, int* k1_zero) {
  return guarded([&] {
    need(g, "graph");
    const auto r = ukh::classify_k(g->g);
    if (k0_zero) *k0_zero = verdict(r.k0_zero);
    if (k1_zero) *k1_zero = verdict(r.k1_zero);
  });
}

ukh_status ukh_sequence_from_json(const char* json, ukh_sequence** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new ukh_sequence{ukh::io::sequence_from_json(ukh::io::parse_json(json, "sequence"), "sequence")};
  });
}

void ukh_sequence_free(ukh_sequence* s) { delete s; }

ukh_status ukh_sequence_in_s(const ukh_sequence* s, int side, int* in_s) {
  return guarded([&] {
    need(s, "sequence");
    need(in_s, "in_s");
    ukh::Side sd = ukh::Side::Both;
    if (side == 1) {
      sd = ukh::Side::Left;
    } else if (side == 2) {
      sd = ukh::Side::Right;
    } else if (side != 0) {
      ukh::fail(ukh::ErrorCode::InvalidInput, "side must be 0, 1 or 2");
    }
    *in_s = ukh::in_s(s->s, sd).in_s ? 1 : 0;
  });
}

ukh_status ukh_matrix_create(size_t rows, size_t cols, const double* data, ukh_matrix** out) {
  return guarded([&] {
    need(out, "out");
    if (rows == 0 || cols == 0) ukh::fail(ukh::ErrorCode::InvalidInput, "matrix dimensions must be positive");
    if (data == nullptr) ukh::fail(ukh::ErrorCode::InvalidInput, "data is null");
    ukh::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
    if (!m.allFinite()) ukh::fail(ukh::ErrorCode::InvalidInput, "matrix has non-finite entries");
    *out = new ukh_matrix{std::move(m)};
  });
}

void ukh_matrix_free(ukh_matrix* m) { delete m; }

size_t ukh_matrix_rows(const ukh_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }

size_t ukh_matrix_cols(const ukh_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

ukh_status ukh_matrix_copy_data(const ukh_matrix* m, double* data, size_t count) {
  return guarded([&] {
    need(m, "matrix");
    need(data, "data");
    if (count < static_cast<size_t>(m->m.size())) ukh::fail(ukh::ErrorCode::InvalidInput, "buffer too small");
    for (Eigen::Index i = 0; i < m->m.rows(); ++i)
      for (Eigen::Index j = 0; j < m->m.cols(); ++j) data[i * m->m.cols() + j] = m->m(i, j);
  });
}

ukh_status ukh_matrix_norm(const ukh_matrix* m, double* norm) {
  return guarded([&] {
    need(m, "matrix");
    need(norm, "norm");
    *norm = ukh::operator_norm(m->m);
  });
}

ukh_status ukh_matrix_eigenvalues(const ukh_matrix* m, double* values) {
  return guarded([&] {
    need(values, "values");
    const auto s = ukh::eigensolve(symmetric(m));
    for (Eigen::Index i = 0; i < s.values.size(); ++i) values[i] = s.values(i);
  });
}

ukh_status ukh_matrix_eta(const ukh_matrix* m, double s, double* eta) {
  return guarded([&] {
    need(eta, "eta");
    *eta = ukh::eta(ukh::eigensolve(symmetric(m)), s);
  });
}

ukh_status ukh_matrix_bounded_transform(const ukh_matrix* m, ukh_matrix** out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    *out = new ukh_matrix{ukh::bounded_transform(m->m)};
  });
}

ukh_status ukh_matrix_aps_count(const ukh_matrix* m, int64_t* quadrature, int64_t* eigen) {
  return guarded([&] {
    const auto r = ukh::aps_positive_count(ukh::ApsModel(symmetric(m)));
    if (quadrature) *quadrature = r.quadrature_count;
    if (eigen) *eigen = r.eigenvalue_count;
  });
}

ukh_status ukh_laurent_from_json(const char* json, ukh_laurent** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new ukh_laurent{ukh::io::laurent_from_json(ukh::io::parse_json(json, "operator"), "operator")};
  });
}

ukh_status ukh_laurent_shift(int64_t power, ukh_laurent** out) {
  return guarded([&] {
    need(out, "out");
    *out = new ukh_laurent{ukh::LaurentOperator::shift(power)};
  });
}

void ukh_laurent_free(ukh_laurent* op) { delete op; }

int64_t ukh_laurent_band(const ukh_laurent* op) { return op ? op->op.band() : -1; }

ukh_status ukh_laurent_winding(const ukh_laurent* op, int64_t* winding) {
  return guarded([&] {
    need(op, "operator");
    need(winding, "winding");
    const auto samples = static_cast<int>(std::max<int64_t>(256, 16 * op->op.band()));
    *winding = ukh::winding_number(op->op.symbol_samples(samples));
  });
}

ukh_status ukh_laurent_compressed_index(const ukh_laurent* op, const int64_t* windows, size_t window_count,
                                        int64_t* index, int* stable) {
  return guarded([&] {
    need(op, "operator");
    ukh::IndexOptions o;
    if (windows != nullptr) o.windows.assign(windows, windows + window_count);
    const auto r = ukh::compressed_index(op->op, o);
    if (stable) *stable = r.stabilized_index ? 1 : 0;
    if (index) *index = r.stabilized_index.value_or(0);
  });
}

}  // extern "C"
