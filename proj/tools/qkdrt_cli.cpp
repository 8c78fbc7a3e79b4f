// qkdrt command-line front end: sweep, simulate, bound.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qkdrt.h"

namespace {

struct Handles {
  qkdrt_config* cfg = nullptr;
  qkdrt_counts* counts = nullptr;
  qkdrt_report* report = nullptr;

  ~Handles() {
    qkdrt_report_destroy(report);
    qkdrt_counts_destroy(counts);
    qkdrt_config_destroy(cfg);
  }
};

int report_failure(qkdrt_status status) {
  std::fprintf(stderr, "qkdrt: %s: %s\n", qkdrt_last_error_kind(), qkdrt_last_error());
  return status == QKDRT_ERR_ARGUMENT ? 4 : static_cast<int>(status);
}

#define CHECK(call)                        \
  do {                                     \
    const qkdrt_status st_ = (call);       \
    if (st_ != QKDRT_OK) return report_failure(st_); \
  } while (0)

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> counts;
  // Flag name → config key; values kept as text and handed to the library.
  std::map<std::string, std::string> values;
};

void add_parameter_flags(CLI::App* cmd, Options& opts) {
  static const std::pair<const char*, const char*> flags[] = {
      {"--protocol", "protocol"},   {"--loss-start", "loss_start"},
      {"--loss-end", "loss_end"},   {"--loss-step", "loss_step"},
      {"--epsilon-u", "epsilon_u"}, {"--delta", "delta"},
      {"--cap-delta", "cap_delta"}, {"--lc", "lc"},
      {"--pd", "pd"},               {"--f", "f"},
      {"--theta-mis", "theta_mis"}, {"--mode", "mode"},
      {"--n", "n"},                 {"--seed", "seed"},
      {"--p-za", "p_za"},           {"--p-zb", "p_zb"},
  };
  for (const auto& [flag, key] : flags) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        flag, [&opts, k](const std::string& v) { opts.values[k] = v; },
        "sets '" + k + "'");
  }
  cmd->add_option("--config", opts.config, "YAML file of parameter keys");
  cmd->add_option("--out", opts.out, "output file (default stdout)");
}

int load_config(Handles& h, const Options& opts) {
  CHECK(qkdrt_config_create(&h.cfg));
  if (opts.config) CHECK(qkdrt_config_load_file(h.cfg, opts.config->c_str()));
  for (const auto& [key, value] : opts.values) {
    CHECK(qkdrt_config_set(h.cfg, key.c_str(), value.c_str()));
  }
  return 0;
}

const char* out_path(const Options& opts) { return opts.out ? opts.out->c_str() : nullptr; }

int run_sweep(const Options& opts) {
  Handles h;
  if (int rc = load_config(h, opts)) return rc;
  CHECK(qkdrt_sweep_run(h.cfg, 0, &h.report));
  CHECK(qkdrt_report_write_csv(h.report, out_path(opts)));
  return 0;
}

int run_simulate(const Options& opts) {
  Handles h;
  if (int rc = load_config(h, opts)) return rc;
  CHECK(qkdrt_simulate_run(h.cfg, &h.counts));
  CHECK(qkdrt_counts_write(h.counts, out_path(opts)));
  return 0;
}

int run_bound(const Options& opts) {
  Handles h;
  if (int rc = load_config(h, opts)) return rc;
  CHECK(qkdrt_counts_read(opts.counts->c_str(), &h.counts));
  CHECK(qkdrt_bound_run(h.counts, h.cfg, &h.report));

  qkdrt_row row;
  CHECK(qkdrt_report_row(h.report, 0, &row));
  std::printf("protocol   %s\n", row.protocol == QKDRT_BB84 ? "bb84" : "three-state");
  if (!std::isnan(row.loss_db)) std::printf("loss_db    %.8e\n", row.loss_db);
  std::printf("epsilon_u  %.8e\n", row.epsilon_u);
  std::printf("delta      %.8e\n", row.delta);
  std::printf("Delta      %.8e\n", row.cap_delta);
  std::printf("l_c        %u\n", row.lc);
  std::printf("Y_Z        %.8e\n", row.y_z);
  std::printf("e_bit      %.8e\n", row.e_bit);
  std::printf("e_ph_u     %.8e\n", row.e_ph_u);
  for (size_t w = 0; w < row.tags; ++w) {
    double e = 0, q = 0;
    CHECK(qkdrt_report_tag(h.report, 0, w, &e, &q));
    std::printf("e_ph_u[%zu]  %.8e  (q_w %.8e)\n", w, e, q);
  }
  if (row.tags > 1) {
    double lhs = 0, mid = 0, rhs = 0;
    CHECK(qkdrt_report_secret_fraction(h.report, 0, &lhs, &mid, &rhs));
    std::printf("sum q_w h(e_w) %.8e <= h(sum q_w e_w) %.8e <= h(e_ph_u) %.8e\n", lhs, mid, rhs);
  }
  std::printf("rate       %.8e\n", row.rate);
  if (opts.out) CHECK(qkdrt_report_write_csv(h.report, opts.out->c_str()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret-key rate bounds for BB84 and three-state QKD with imperfect sources"};
  app.set_version_flag("--version", std::string(qkdrt_version()));
  app.require_subcommand(1);

  Options sweep_opts, simulate_opts, bound_opts;
  auto* sweep = app.add_subcommand("sweep", "evaluate the key rate over a parameter grid, CSV output");
  add_parameter_flags(sweep, sweep_opts);
  auto* simulate = app.add_subcommand("simulate", "simulate one parameter point, counts document output");
  add_parameter_flags(simulate, simulate_opts);
  auto* bound = app.add_subcommand("bound", "bound the key rate of a counts document");
  add_parameter_flags(bound, bound_opts);
  bound->add_option("counts", bound_opts.counts, "counts document (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*sweep) return run_sweep(sweep_opts);
  if (*simulate) return run_simulate(simulate_opts);
  return run_bound(bound_opts);
}
