#include "qkdrt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include <yaml-cpp/yaml.h>

#include "qkdrt/error.hpp"
#include "qkdrt/version.hpp"

namespace qkdrt {

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::config, "'" + key + "': " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> items;
  std::string text = trim(value);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
    text = text.substr(1, text.size() - 2);
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) config_error(key, "empty list entry");
    items.push_back(item);
  }
  if (items.empty()) config_error(key, "list is empty");
  return items;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    config_error(key, "expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t.front() == '-') config_error(key, "expected a nonnegative integer, got '" + text + "'");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end == t.c_str() + t.size() && errno != ERANGE) return v;
  // Accept integral values written in exponent form, e.g. 1e6.
  const double d = parse_real(key, t);
  if (d < 0 || d != std::floor(d) || d > 1.8e19) {
    config_error(key, "expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_reals(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(key, value)) out.push_back(parse_real(key, item));
  return out;
}

const std::map<std::string, std::string>& key_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"protocol", "protocol"},     {"loss_start", "loss_start"}, {"loss_end", "loss_end"},
      {"loss_step", "loss_step"},   {"epsilon_u", "epsilon_u"},   {"delta", "delta"},
      {"cap_delta", "cap_delta"},   {"Delta", "cap_delta"},       {"lc", "lc"},
      {"l_c", "lc"},                {"pd", "pd"},                 {"p_d", "pd"},
      {"f", "f"},                   {"theta_mis", "theta_mis"},   {"mode", "mode"},
      {"n", "n"},                   {"N", "n"},                   {"rounds", "n"},
      {"seed", "seed"},             {"p_za", "p_za"},             {"p_zb", "p_zb"},
      {"out", "out"},
  };
  return aliases;
}

// Lists left at their defaults contribute their first entry; assigned lists
// must hold exactly one value.
template <typename T>
const T& single(const SweepConfig& cfg, const std::vector<T>& v, const char* key) {
  if (v.empty() || (v.size() != 1 && cfg.assigned.count(key))) {
    config_error(key, "expects a single value here");
  }
  return v.front();
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  // First failure in grid order.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

}  // namespace

void SweepConfig::set(const std::string& raw_key, const std::string& value) {
  const auto it = key_aliases().find(raw_key);
  if (it == key_aliases().end()) config_error(raw_key, "unknown key");
  const std::string& key = it->second;

  if (key == "protocol") {
    const std::string v = trim(value);
    if (v == "both") {
      protocols = {Protocol::bb84, Protocol::three_state};
    } else {
      protocols.clear();
      for (const auto& item : split_list(key, v)) {
        try {
          const Protocol p = parse_protocol(item);
          if (std::find(protocols.begin(), protocols.end(), p) == protocols.end()) protocols.push_back(p);
        } catch (const Error&) {
          config_error(key, "expected bb84, three-state or both, got '" + item + "'");
        }
      }
    }
  } else if (key == "loss_start") {
    loss_start = parse_real(key, value);
  } else if (key == "loss_end") {
    loss_end = parse_real(key, value);
  } else if (key == "loss_step") {
    loss_step = parse_real(key, value);
  } else if (key == "epsilon_u") {
    epsilon_u = parse_reals(key, value);
  } else if (key == "delta") {
    delta = parse_reals(key, value);
  } else if (key == "cap_delta") {
    cap_delta = parse_reals(key, value);
  } else if (key == "lc") {
    lc.clear();
    for (const auto& item : split_list(key, value)) {
      const std::uint64_t v = parse_count(key, item);
      if (v > 64) config_error(key, "correlation length above 64 is not supported");
      lc.push_back(static_cast<std::uint32_t>(v));
    }
  } else if (key == "pd") {
    p_d = parse_real(key, value);
  } else if (key == "f") {
    f = parse_real(key, value);
  } else if (key == "theta_mis") {
    theta_mis = parse_real(key, value);
  } else if (key == "mode") {
    const std::string v = trim(value);
    if (v == "asymptotic") {
      mode = RunMode::asymptotic;
    } else if (v == "finite") {
      mode = RunMode::finite;
    } else {
      config_error(key, "expected asymptotic or finite, got '" + v + "'");
    }
  } else if (key == "n") {
    rounds = parse_count(key, value);
  } else if (key == "seed") {
    seed = parse_count(key, value);
  } else if (key == "p_za") {
    p_za = parse_real(key, value);
  } else if (key == "p_zb") {
    p_zb = parse_real(key, value);
  } else if (key == "out") {
    out = trim(value);
  }
  assigned.insert(key);
}

void SweepConfig::load_file(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw Error(ErrorKind::io, "cannot open config '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::config, path + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (root.IsNull()) return;
  if (!root.IsMap()) {
    throw Error(ErrorKind::config, path + ": top level must be a mapping of keys to values");
  }
  for (const auto& entry : root) {
    const std::string where = path + ":" + std::to_string(entry.first.Mark().line + 1) + ": ";
    try {
      const std::string key = entry.first.as<std::string>();
      const YAML::Node& node = entry.second;
      std::string value;
      if (node.IsScalar()) {
        value = node.Scalar();
      } else if (node.IsSequence()) {
        for (std::size_t i = 0; i < node.size(); ++i) {
          if (!node[i].IsScalar()) config_error(key, "list entries must be scalars");
          value += (i ? "," : "") + node[i].Scalar();
        }
        if (node.size() == 0) config_error(key, "list is empty");
      } else {
        config_error(key, "expected a scalar or a list");
      }
      set(key, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, where + e.what());
    } catch (const YAML::Exception& e) {
      throw Error(ErrorKind::config, where + e.msg);
    }
  }
}

void SweepConfig::validate() const {
  if (protocols.empty()) config_error("protocol", "no protocol selected");
  if (!(loss_step > 0)) config_error("loss_step", "must be positive");
  if (loss_start < 0) config_error("loss_start", "must be nonnegative");
  if (loss_end < loss_start) config_error("loss_end", "loss grid is empty (loss_end < loss_start)");
  if (epsilon_u.empty()) config_error("epsilon_u", "list is empty");
  for (double e : epsilon_u) {
    if (!(e >= 0 && e <= 1)) config_error("epsilon_u", "values must lie in [0, 1]");
  }
  if (delta.empty()) config_error("delta", "list is empty");
  for (double d : delta) {
    if (!(d >= 0)) config_error("delta", "values must be nonnegative");
  }
  if (cap_delta.empty()) config_error("cap_delta", "list is empty");
  for (double d : cap_delta) {
    if (!(d >= 0)) config_error("cap_delta", "values must be nonnegative");
  }
  if (lc.empty()) config_error("lc", "list is empty");
  if (!(p_d >= 0 && p_d <= 1)) config_error("pd", "must lie in [0, 1]");
  if (!(f >= 1)) config_error("f", "must be at least 1");
  if (mode == RunMode::finite) {
    for (std::uint32_t l : lc) {
      if (rounds < std::uint64_t{l} + 1) config_error("n", "needs at least l_c + 1 rounds");
    }
  }
  for (Protocol p : protocols) {
    try {
      (void)probs(p);
    } catch (const Error& e) {
      config_error("p_za", e.what());
    }
  }
}

std::vector<double> SweepConfig::loss_grid() const {
  std::vector<double> grid;
  if (!(loss_step > 0) || loss_end < loss_start) return grid;
  const auto n = static_cast<std::size_t>(std::floor((loss_end - loss_start) / loss_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) grid.push_back(loss_start + static_cast<double>(i) * loss_step);
  return grid;
}

ChannelParams SweepConfig::channel(double loss_db) const {
  ChannelParams ch;
  ch.loss_db = loss_db;
  ch.p_d = p_d;
  ch.theta_mis = theta_mis;
  ch.f = f;
  return ch;
}

ProtocolProbs SweepConfig::probs(Protocol protocol) const {
  const bool explicit_probs = assigned.count("p_za") || assigned.count("p_zb");
  if (mode == RunMode::asymptotic && !explicit_probs) return ProtocolProbs::efficient(protocol);
  return {protocol, p_za, p_zb};
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::vector<double> losses = cfg.loss_grid();

  struct Cell {
    std::size_t sim;
    SweepRow row;
  };
  using SimKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
  std::map<SimKey, std::size_t> sim_index;
  std::vector<SimKey> sims;
  std::vector<Cell> cells;

  for (std::size_t ip = 0; ip < cfg.protocols.size(); ++ip)
    for (std::size_t il = 0; il < losses.size(); ++il)
      for (double eps : cfg.epsilon_u)
        for (std::size_t id = 0; id < cfg.delta.size(); ++id)
          for (double cap : cfg.cap_delta)
            for (std::size_t ic = 0; ic < cfg.lc.size(); ++ic) {
              // Asymptotic statistics ignore the correlation length.
              const SimKey key{ip, il, id, cfg.mode == RunMode::finite ? ic : 0};
              auto [it, fresh] = sim_index.try_emplace(key, sims.size());
              if (fresh) sims.push_back(key);
              SweepRow row;
              row.protocol = cfg.protocols[ip];
              row.loss_db = losses[il];
              row.epsilon_u = eps;
              row.delta = cfg.delta[id];
              row.cap_delta = cap;
              row.lc = cfg.lc[ic];
              cells.push_back({it->second, row});
            }

  std::vector<ObservedStatistics> stats(sims.size());
  parallel_for(sims.size(), threads, [&](std::size_t i) {
    const auto [ip, il, id, ic] = sims[i];
    const Protocol protocol = cfg.protocols[ip];
    SourceSpec spec;
    spec.delta = cfg.delta[id];
    const ChannelParams ch = cfg.channel(losses[il]);
    if (cfg.mode == RunMode::asymptotic) {
      stats[i] = simulate_asymptotic(spec, cfg.probs(protocol), ch);
    } else {
      RunConfig run;
      run.rounds = cfg.rounds;
      run.seed = cfg.seed;
      run.correlation_length = cfg.lc[ic];
      run.probs = cfg.probs(protocol);
      stats[i] = simulate_finite(run, spec, ch);
    }
  });

  parallel_for(cells.size(), threads, [&](std::size_t i) {
    SweepRow& row = cells[i].row;
    SourceSpec spec;
    spec.delta = row.delta;
    spec.cap_delta = row.cap_delta;
    spec.epsilon_u = row.epsilon_u;
    spec.correlation_length = row.lc;
    const BoundParameters params = make_bound_parameters(row.protocol, spec);
    row.report = evaluate(stats[cells[i].sim], params, cfg.f);
  });

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (auto& c : cells) rows.push_back(std::move(c.row));
  return rows;
}

CountsDocument run_simulate(const SweepConfig& cfg) {
  cfg.validate();
  const Protocol protocol = single(cfg, cfg.protocols, "protocol");
  SourceSpec spec;
  spec.delta = single(cfg, cfg.delta, "delta");
  spec.cap_delta = single(cfg, cfg.cap_delta, "cap_delta");
  spec.epsilon_u = single(cfg, cfg.epsilon_u, "epsilon_u");
  spec.correlation_length = single(cfg, cfg.lc, "lc");
  const ChannelParams ch = cfg.channel(cfg.loss_start);

  CountsDocument doc;
  doc.source = spec;
  doc.channel = ch;
  if (cfg.mode == RunMode::asymptotic) {
    doc.stats = simulate_asymptotic(spec, cfg.probs(protocol), ch);
  } else {
    RunConfig run;
    run.rounds = cfg.rounds;
    run.seed = cfg.seed;
    run.correlation_length = spec.correlation_length;
    run.probs = cfg.probs(protocol);
    doc.stats = simulate_finite(run, spec, ch);
    doc.seed = cfg.seed;
  }
  return doc;
}

SweepRow run_bound(const CountsDocument& doc, const SweepConfig& cfg) {
  const ObservedStatistics& stats = doc.stats;
  SourceSpec spec = doc.source.value_or(SourceSpec{});
  if (cfg.assigned.count("delta")) spec.delta = single(cfg, cfg.delta, "delta");
  if (cfg.assigned.count("cap_delta")) spec.cap_delta = single(cfg, cfg.cap_delta, "cap_delta");
  if (cfg.assigned.count("epsilon_u")) spec.epsilon_u = single(cfg, cfg.epsilon_u, "epsilon_u");
  if (stats.mode == StatisticsMode::counts) {
    const auto tags = static_cast<std::uint32_t>(stats.tags.size() - 1);
    if (cfg.assigned.count("lc") && single(cfg, cfg.lc, "lc") != tags) {
      config_error("lc", "document carries " + std::to_string(tags + 1) + " tags");
    }
    spec.correlation_length = tags;
  } else if (cfg.assigned.count("lc")) {
    spec.correlation_length = single(cfg, cfg.lc, "lc");
  }
  double f = doc.channel ? doc.channel->f : ChannelParams{}.f;
  if (cfg.assigned.count("f")) f = cfg.f;
  if (!(f >= 1)) config_error("f", "must be at least 1");

  SweepRow row;
  row.protocol = stats.probs.protocol();
  row.loss_db = doc.channel ? doc.channel->loss_db : std::nan("");
  row.epsilon_u = spec.epsilon_u;
  row.delta = spec.delta;
  row.cap_delta = spec.cap_delta;
  row.lc = spec.correlation_length;
  row.report = evaluate(stats, make_bound_parameters(row.protocol, spec), f);
  return row;
}

void write_csv_header(std::ostream& out, const SweepConfig& cfg) {
  out << "# qkdrt " << version_string << "\n";
  out << "# mode: " << (cfg.mode == RunMode::asymptotic ? "asymptotic" : "finite") << "\n";
  out << "# channel_model: " << channel_model_id << "\n";
  out << "# rng: " << rng_id << "\n";
  out << "# seed: " << cfg.seed << "\n";
  if (cfg.mode == RunMode::finite) out << "# rounds: " << cfg.rounds << "\n";
  out << "# p_d: " << format_real(cfg.p_d) << "\n";
  out << "# f: " << format_real(cfg.f) << "\n";
  out << "# theta_mis: " << format_real(cfg.theta_mis) << "\n";
  out << "protocol,loss_db,epsilon_u,delta,Delta,l_c,Y_Z,e_bit,e_ph_u,rate\n";
}

void write_csv_row(std::ostream& out, const SweepRow& row) {
  out << to_string(row.protocol) << ',' << (std::isnan(row.loss_db) ? "" : format_real(row.loss_db))
      << ',' << format_real(row.epsilon_u) << ',' << format_real(row.delta) << ','
      << format_real(row.cap_delta) << ',' << row.lc << ',' << format_real(row.report.y_z) << ','
      << format_real(row.report.e_bit) << ',' << format_real(row.report.e_ph_u) << ','
      << format_real(row.report.rate) << '\n';
}

void write_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  write_csv_header(out, cfg);
  for (const auto& row : rows) write_csv_row(out, row);
}

}  // namespace qkdrt
