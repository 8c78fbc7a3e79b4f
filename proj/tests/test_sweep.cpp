#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qkdrt/error.hpp"
#include "qkdrt/sweep.hpp"

using namespace qkdrt;

namespace {

std::string config_error_text(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::ofstream(name) << text;
  return name;
}

std::string csv_of(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_csv(out, cfg, rows);
  return out.str();
}

}  // namespace

TEST_CASE("defaults describe the reference experiment") {
  const SweepConfig cfg;
  CHECK(cfg.protocols == std::vector<Protocol>{Protocol::bb84});
  CHECK(cfg.delta == std::vector<double>{0.063});
  CHECK(cfg.cap_delta == std::vector<double>{0.03});
  CHECK(cfg.epsilon_u == std::vector<double>{0.0, 1e-6, 1e-4, 1e-3});
  CHECK(cfg.p_d == 1e-8);
  CHECK(cfg.f == 1.16);
  CHECK(cfg.mode == RunMode::asymptotic);
  CHECK(cfg.probs(Protocol::bb84).efficient_limit());
  const auto grid = cfg.loss_grid();
  REQUIRE(grid.size() == 17);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 80.0);
}

TEST_CASE("setting keys") {
  SweepConfig cfg;
  cfg.set("protocol", "both");
  CHECK(cfg.protocols.size() == 2);
  cfg.set("protocol", "three-state");
  CHECK(cfg.protocols == std::vector<Protocol>{Protocol::three_state});
  cfg.set("epsilon_u", "1e-6, 1e-3");
  CHECK(cfg.epsilon_u == std::vector<double>{1e-6, 1e-3});
  cfg.set("lc", "[0, 2]");
  CHECK(cfg.lc == std::vector<std::uint32_t>{0, 2});
  cfg.set("n", "1e6");
  CHECK(cfg.rounds == 1000000);
  cfg.set("Delta", "0.01");
  CHECK(cfg.cap_delta == std::vector<double>{0.01});
  cfg.set("loss_start", "0");
  cfg.set("loss_end", "0.3");
  cfg.set("loss_step", "0.1");
  CHECK(cfg.loss_grid().size() == 4);
  CHECK(cfg.assigned.count("cap_delta"));

  CHECK(config_error_text([&] { cfg.set("colour", "red"); }).find("colour") != std::string::npos);
  CHECK(config_error_text([&] { cfg.set("pd", "abc"); }).find("'pd'") != std::string::npos);
  config_error_text([&] { cfg.set("protocol", "b92"); });
  config_error_text([&] { cfg.set("mode", "lazy"); });
  config_error_text([&] { cfg.set("n", "-4"); });
  config_error_text([&] { cfg.set("n", "2.5"); });
  config_error_text([&] { cfg.set("epsilon_u", "1e-3,,2"); });
  config_error_text([&] { cfg.set("delta", ""); });
}

TEST_CASE("validation") {
  SweepConfig cfg;
  cfg.loss_end = -1;
  CHECK(config_error_text([&] { cfg.validate(); }).find("empty") != std::string::npos);
  cfg = SweepConfig{};
  cfg.loss_step = 0;
  config_error_text([&] { cfg.validate(); });
  cfg = SweepConfig{};
  cfg.epsilon_u = {2.0};
  config_error_text([&] { cfg.validate(); });
  cfg = SweepConfig{};
  cfg.f = 0.5;
  config_error_text([&] { cfg.validate(); });
  cfg = SweepConfig{};
  cfg.mode = RunMode::finite;
  cfg.p_za = 0.0;
  config_error_text([&] { cfg.validate(); });
}

TEST_CASE("YAML config files") {
  SweepConfig cfg;
  cfg.load_file(write_temp("sweep_ok.yaml",
                           "protocol: both\n"
                           "epsilon_u: [1.0e-6, 1.0e-3]\n"
                           "delta: [0.063, 0.126]\n"
                           "loss_step: 10\n"
                           "mode: finite\n"
                           "n: 20000\n"));
  CHECK(cfg.protocols.size() == 2);
  CHECK(cfg.delta.size() == 2);
  CHECK(cfg.loss_step == 10);
  CHECK(cfg.mode == RunMode::finite);
  CHECK(cfg.rounds == 20000);
  CHECK(cfg.loss_end == 80);

  SweepConfig bad;
  const std::string msg = config_error_text(
      [&] { bad.load_file(write_temp("sweep_bad.yaml", "protocol: bb84\n\nloss_step: fast\n")); });
  CHECK(msg.find("sweep_bad.yaml:3") != std::string::npos);
  CHECK(msg.find("loss_step") != std::string::npos);
  config_error_text([&] { bad.load_file(write_temp("sweep_bad2.yaml", "- 1\n- 2\n")); });
  config_error_text([&] { bad.load_file(write_temp("sweep_bad3.yaml", "delta: {a: 1}\n")); });
  config_error_text([&] { bad.load_file(write_temp("sweep_bad4.yaml", "delta: [0.1\n")); });
  try {
    bad.load_file("missing.yaml");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("rows come out in grid order regardless of thread count") {
  SweepConfig cfg;
  cfg.set("protocol", "both");
  cfg.set("delta", "0.063,0.126");
  cfg.set("lc", "0,1");
  cfg.set("loss_step", "20");
  const auto one = run_sweep(cfg, 1);
  const auto many = run_sweep(cfg, 8);
  REQUIRE(one.size() == 2 * 5 * 4 * 2 * 1 * 2);
  CHECK(csv_of(cfg, one) == csv_of(cfg, many));
  CHECK(one[0].protocol == Protocol::bb84);
  CHECK(one[0].lc == 0);
  CHECK(one[1].lc == 1);
  CHECK(one[2].delta == 0.126);
  CHECK(one[4].epsilon_u == 1e-6);
  CHECK(one[16].loss_db == 20.0);
  CHECK(one.back().protocol == Protocol::three_state);
}

TEST_CASE("finite sweeps are reproducible and match the bound of a replayed document") {
  SweepConfig cfg;
  cfg.set("mode", "finite");
  cfg.set("n", "50000");
  cfg.set("seed", "3");
  cfg.set("lc", "1");
  cfg.set("loss_start", "5");
  cfg.set("loss_end", "5");
  cfg.set("epsilon_u", "1e-4");
  const auto rows = run_sweep(cfg);
  CHECK(csv_of(cfg, rows) == csv_of(cfg, run_sweep(cfg)));
  REQUIRE(rows.size() == 1);

  const CountsDocument doc = counts_from_json(to_json(run_simulate(cfg)));
  const SweepRow replay = run_bound(doc, SweepConfig{});
  std::ostringstream a, b;
  write_csv_row(a, rows[0]);
  write_csv_row(b, replay);
  CHECK(a.str() == b.str());
  CHECK(replay.report.e_ph_u == rows[0].report.e_ph_u);
  CHECK(replay.report.e_ph_u_per_tag.size() == 2);
}

TEST_CASE("bound overrides and tag consistency") {
  SweepConfig sim;
  sim.set("mode", "finite");
  sim.set("n", "20000");
  sim.set("lc", "2");
  sim.set("epsilon_u", "0");
  const CountsDocument doc = run_simulate(sim);

  SweepConfig over;
  over.set("epsilon_u", "1e-3");
  const SweepRow looser = run_bound(doc, over);
  const SweepRow plain = run_bound(doc, SweepConfig{});
  CHECK(looser.epsilon_u == 1e-3);
  CHECK(looser.report.e_ph_u > plain.report.e_ph_u);

  SweepConfig wrong;
  wrong.set("lc", "1");
  config_error_text([&] { run_bound(doc, wrong); });

  SweepConfig grid;
  grid.set("delta", "0.063,0.126");
  config_error_text([&] { run_simulate(grid); });
}

TEST_CASE("csv layout") {
  SweepConfig cfg;
  cfg.set("loss_end", "0");
  cfg.set("epsilon_u", "0");
  const std::string text = csv_of(cfg, run_sweep(cfg));
  CHECK(text.rfind("# qkdrt ", 0) == 0);
  CHECK(text.find("# channel_model: single-photon-threshold-v1\n") != std::string::npos);
  CHECK(text.find("# seed: 1\n") != std::string::npos);
  CHECK(text.find("\nprotocol,loss_db,epsilon_u,delta,Delta,l_c,Y_Z,e_bit,e_ph_u,rate\n") !=
        std::string::npos);
  CHECK(text.find("\nbb84,0.00000000e+00,0.00000000e+00,6.30000000e-02,3.00000000e-02,0,") !=
        std::string::npos);
}
