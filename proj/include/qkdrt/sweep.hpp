#pragma once

// Sweep configuration, grid evaluation and CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qkdrt/bounds.hpp"
#include "qkdrt/counts_io.hpp"
#include "qkdrt/simulator.hpp"
#include "qkdrt/source.hpp"

namespace qkdrt {

enum class RunMode { asymptotic, finite };

struct SweepConfig {
  std::vector<Protocol> protocols{Protocol::bb84};
  double loss_start = 0.0;
  double loss_end = 80.0;
  double loss_step = 5.0;
  std::vector<double> epsilon_u{0.0, 1e-6, 1e-4, 1e-3};
  std::vector<double> delta{0.063};
  std::vector<double> cap_delta{0.03};
  std::vector<std::uint32_t> lc{0};
  double p_d = 1e-8;
  double f = 1.16;
  double theta_mis = 0.0;
  RunMode mode = RunMode::asymptotic;
  std::uint64_t rounds = 1'000'000;
  std::uint64_t seed = 1;
  double p_za = 0.5;
  double p_zb = 0.5;
  std::string out;

  /// Keys assigned by a file or by set(); lets `bound` tell defaults apart.
  std::set<std::string> assigned;

  /// Sets one key from its textual value; lists are comma separated.
  /// Throws ErrorKind::config naming the key.
  void set(const std::string& key, const std::string& value);
  /// Reads a YAML mapping of the same keys. Throws ErrorKind::config with
  /// the line of the offending entry, or ErrorKind::io.
  void load_file(const std::string& path);
  void validate() const;

  std::vector<double> loss_grid() const;
  ChannelParams channel(double loss_db) const;
  ProtocolProbs probs(Protocol protocol) const;
};

struct SweepRow {
  Protocol protocol = Protocol::bb84;
  double loss_db = 0.0;
  double epsilon_u = 0.0;
  double delta = 0.0;
  double cap_delta = 0.0;
  std::uint32_t lc = 0;
  KeyRateReport report;
};

/// Evaluates every (protocol, loss, ε, δ, Δ, l_c) cell, in that nesting
/// order, using `threads` workers (0 picks the hardware concurrency).
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, unsigned threads = 0);

/// Single parameter point of the config as a counts document. Assigned
/// lists must hold one value, unassigned ones contribute their first entry;
/// the loss is loss_start.
CountsDocument run_simulate(const SweepConfig& cfg);

/// Bounds a counts document. Source and f come from the config when
/// assigned there, otherwise from the document, otherwise defaults.
SweepRow run_bound(const CountsDocument& doc, const SweepConfig& cfg);

void write_csv_header(std::ostream& out, const SweepConfig& cfg);
void write_csv_row(std::ostream& out, const SweepRow& row);
void write_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows);

}  // namespace qkdrt
