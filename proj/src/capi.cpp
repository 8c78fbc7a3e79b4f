#include "qkdrt.h"

#include <exception>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "qkdrt/bounds.hpp"
#include "qkdrt/counts_io.hpp"
#include "qkdrt/error.hpp"
#include "qkdrt/gmath.hpp"
#include "qkdrt/sweep.hpp"
#include "qkdrt/version.hpp"

struct qkdrt_config {
  qkdrt::SweepConfig cfg;
};

struct qkdrt_counts {
  qkdrt::CountsDocument doc;
};

struct qkdrt_report {
  qkdrt::SweepConfig cfg;
  std::vector<qkdrt::SweepRow> rows;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_kind;

qkdrt_status status_of(qkdrt::ErrorKind kind) {
  using qkdrt::ErrorKind;
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::schema:
      return QKDRT_ERR_CONFIG;
    case ErrorKind::io:
      return QKDRT_ERR_IO;
    default:
      return QKDRT_ERR_COMPUTE;
  }
}

qkdrt_status fail(qkdrt_status status, const char* kind, const std::string& what) {
  last_error = what;
  last_kind = kind;
  return status;
}

template <typename F>
qkdrt_status guarded(F&& body) {
  last_error.clear();
  last_kind.clear();
  try {
    body();
    return QKDRT_OK;
  } catch (const qkdrt::Error& e) {
    return fail(status_of(e.kind()), qkdrt::to_string(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QKDRT_ERR_COMPUTE, "OutOfMemory", "out of memory");
  } catch (const std::exception& e) {
    return fail(QKDRT_ERR_COMPUTE, "Error", e.what());
  } catch (...) {
    return fail(QKDRT_ERR_COMPUTE, "Error", "unknown failure");
  }
}

qkdrt_status null_argument(const char* name) {
  return fail(QKDRT_ERR_ARGUMENT, "InvalidArgument", std::string("null argument: ") + name);
}

#define QKDRT_REQUIRE(p) \
  if (!(p)) return null_argument(#p)

template <typename Write>
void write_to(const char* path, Write write) {
  if (!path) {
    write(std::cout);
    std::cout.flush();
    if (!std::cout) throw qkdrt::Error(qkdrt::ErrorKind::io, "failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qkdrt::Error(qkdrt::ErrorKind::io, std::string("cannot open '") + path + "' for writing");
  write(out);
  if (!out) throw qkdrt::Error(qkdrt::ErrorKind::io, std::string("failed writing '") + path + "'");
}

}  // namespace

extern "C" {

const char* qkdrt_version(void) { return qkdrt::version_string; }
const char* qkdrt_last_error(void) { return last_error.c_str(); }
const char* qkdrt_last_error_kind(void) { return last_kind.c_str(); }

qkdrt_status qkdrt_g_plus(double y, double z, double* out) {
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = qkdrt::g_plus(qkdrt::UnitScalar(y), qkdrt::UnitScalar(z)); });
}

qkdrt_status qkdrt_g_minus(double y, double z, double* out) {
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = qkdrt::g_minus(qkdrt::UnitScalar(y), qkdrt::UnitScalar(z)); });
}

qkdrt_status qkdrt_binary_entropy(double x, double* out) {
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = qkdrt::binary_entropy(qkdrt::UnitScalar(x)); });
}

qkdrt_status qkdrt_epsilon_effective(double eps_prime, uint32_t lc, double* out) {
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = qkdrt::epsilon_effective(qkdrt::UnitScalar(eps_prime), lc); });
}

qkdrt_status qkdrt_key_rate(double y_z, double e_ph_u, double e_bit, double f, double* out) {
  QKDRT_REQUIRE(out);
  return guarded([&] {
    *out = qkdrt::key_rate(y_z, qkdrt::UnitScalar(e_ph_u), qkdrt::UnitScalar(e_bit), f).rate;
  });
}

qkdrt_status qkdrt_config_create(qkdrt_config** out) {
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = new qkdrt_config{}; });
}

void qkdrt_config_destroy(qkdrt_config* cfg) { delete cfg; }

qkdrt_status qkdrt_config_load_file(qkdrt_config* cfg, const char* path) {
  QKDRT_REQUIRE(cfg);
  QKDRT_REQUIRE(path);
  return guarded([&] { cfg->cfg.load_file(path); });
}

qkdrt_status qkdrt_config_set(qkdrt_config* cfg, const char* key, const char* value) {
  QKDRT_REQUIRE(cfg);
  QKDRT_REQUIRE(key);
  QKDRT_REQUIRE(value);
  return guarded([&] { cfg->cfg.set(key, value); });
}

qkdrt_status qkdrt_config_validate(const qkdrt_config* cfg) {
  QKDRT_REQUIRE(cfg);
  return guarded([&] { cfg->cfg.validate(); });
}

qkdrt_status qkdrt_sweep_run(const qkdrt_config* cfg, unsigned threads, qkdrt_report** out) {
  QKDRT_REQUIRE(cfg);
  QKDRT_REQUIRE(out);
  return guarded([&] {
    auto rows = qkdrt::run_sweep(cfg->cfg, threads);
    *out = new qkdrt_report{cfg->cfg, std::move(rows)};
  });
}

qkdrt_status qkdrt_simulate_run(const qkdrt_config* cfg, qkdrt_counts** out) {
  QKDRT_REQUIRE(cfg);
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = new qkdrt_counts{qkdrt::run_simulate(cfg->cfg)}; });
}

qkdrt_status qkdrt_bound_run(const qkdrt_counts* counts, const qkdrt_config* cfg,
                             qkdrt_report** out) {
  QKDRT_REQUIRE(counts);
  QKDRT_REQUIRE(cfg);
  QKDRT_REQUIRE(out);
  return guarded([&] {
    qkdrt::SweepRow row = qkdrt::run_bound(counts->doc, cfg->cfg);
    qkdrt::SweepConfig header = cfg->cfg;
    const qkdrt::ObservedStatistics& st = counts->doc.stats;
    header.mode = st.mode == qkdrt::StatisticsMode::counts ? qkdrt::RunMode::finite
                                                           : qkdrt::RunMode::asymptotic;
    if (counts->doc.seed) header.seed = *counts->doc.seed;
    if (st.mode == qkdrt::StatisticsMode::counts) header.rounds = st.aggregate().rounds;
    if (counts->doc.channel) {
      header.p_d = counts->doc.channel->p_d;
      header.theta_mis = counts->doc.channel->theta_mis;
    }
    header.f = row.report.f;
    *out = new qkdrt_report{std::move(header), {std::move(row)}};
  });
}

qkdrt_status qkdrt_counts_read(const char* path, qkdrt_counts** out) {
  QKDRT_REQUIRE(path);
  QKDRT_REQUIRE(out);
  return guarded([&] { *out = new qkdrt_counts{qkdrt::read_counts_file(path)}; });
}

qkdrt_status qkdrt_counts_write(const qkdrt_counts* counts, const char* path) {
  QKDRT_REQUIRE(counts);
  return guarded([&] {
    const std::string text = qkdrt::to_json(counts->doc);
    write_to(path, [&](std::ostream& os) { os << text; });
  });
}

void qkdrt_counts_destroy(qkdrt_counts* counts) { delete counts; }

qkdrt_status qkdrt_report_size(const qkdrt_report* report, size_t* out) {
  QKDRT_REQUIRE(report);
  QKDRT_REQUIRE(out);
  *out = report->rows.size();
  return guarded([] {});
}

qkdrt_status qkdrt_report_row(const qkdrt_report* report, size_t i, qkdrt_row* out) {
  QKDRT_REQUIRE(report);
  QKDRT_REQUIRE(out);
  if (i >= report->rows.size()) {
    return fail(QKDRT_ERR_ARGUMENT, "InvalidArgument", "row index out of range");
  }
  const qkdrt::SweepRow& r = report->rows[i];
  out->protocol = r.protocol == qkdrt::Protocol::bb84 ? QKDRT_BB84 : QKDRT_THREE_STATE;
  out->loss_db = r.loss_db;
  out->epsilon_u = r.epsilon_u;
  out->delta = r.delta;
  out->cap_delta = r.cap_delta;
  out->lc = r.lc;
  out->y_z = r.report.y_z;
  out->e_bit = r.report.e_bit;
  out->e_ph_u = r.report.e_ph_u;
  out->rate = r.report.rate;
  out->f = r.report.f;
  out->tags = r.report.e_ph_u_per_tag.size();
  return guarded([] {});
}

qkdrt_status qkdrt_report_tag(const qkdrt_report* report, size_t i, size_t w, double* e_ph_u,
                              double* weight) {
  QKDRT_REQUIRE(report);
  QKDRT_REQUIRE(e_ph_u);
  QKDRT_REQUIRE(weight);
  if (i >= report->rows.size() || w >= report->rows[i].report.e_ph_u_per_tag.size()) {
    return fail(QKDRT_ERR_ARGUMENT, "InvalidArgument", "row or tag index out of range");
  }
  *e_ph_u = report->rows[i].report.e_ph_u_per_tag[w];
  *weight = report->rows[i].report.tag_weights[w];
  return guarded([] {});
}

qkdrt_status qkdrt_report_secret_fraction(const qkdrt_report* report, size_t i, double* lhs,
                                          double* mid, double* rhs) {
  QKDRT_REQUIRE(report);
  QKDRT_REQUIRE(lhs);
  QKDRT_REQUIRE(mid);
  QKDRT_REQUIRE(rhs);
  if (i >= report->rows.size()) {
    return fail(QKDRT_ERR_ARGUMENT, "InvalidArgument", "row index out of range");
  }
  return guarded([&] {
    const qkdrt::KeyRateReport& r = report->rows[i].report;
    std::vector<double> e = r.e_ph_u_per_tag;
    std::vector<double> q = r.tag_weights;
    if (e.empty()) {
      e = {r.e_ph_u};
      q = {1.0};
    }
    const auto chain = qkdrt::secret_fraction_check(e, q, r.e_ph_u);
    *lhs = chain.lhs;
    *mid = chain.mid;
    *rhs = chain.rhs;
  });
}

qkdrt_status qkdrt_report_write_csv(const qkdrt_report* report, const char* path) {
  QKDRT_REQUIRE(report);
  return guarded([&] {
    write_to(path, [&](std::ostream& os) { qkdrt::write_csv(os, report->cfg, report->rows); });
  });
}

void qkdrt_report_destroy(qkdrt_report* report) { delete report; }

}  // extern "C"
