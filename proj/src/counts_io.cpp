#include "qkdrt/counts_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qkdrt/error.hpp"
#include "qkdrt/version.hpp"

namespace qkdrt {

using json = nlohmann::ordered_json;

namespace {

json table_to_json(const auto& table) {
  json out = json::object();
  for (Setting s : all_settings) out[to_string(s)] = {table[index(s)][0], table[index(s)][1]};
  return out;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::schema, "counts document: " + what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double number(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) schema_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& what) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    schema_error(what + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

template <typename T, typename Read>
SettingTable<T> table_from_json(const json& obj, const char* key, Read read) {
  const json& t = field(obj, key);
  SettingTable<T> out{};
  for (Setting s : all_settings) {
    const json& pair = field(t, to_string(s));
    if (!pair.is_array() || pair.size() != 2) {
      schema_error(std::string(key) + "." + to_string(s) + " must be a two-element array");
    }
    for (std::size_t g = 0; g < 2; ++g) out[index(s)][g] = read(pair[g]);
  }
  return out;
}

}  // namespace

std::string to_json(const CountsDocument& doc) {
  const ObservedStatistics& st = doc.stats;
  json j;
  j["format"] = counts_format_name;
  j["version"] = counts_format_version;
  j["generator"] = std::string("qkdrt ") + version_string;
  j["mode"] = st.mode == StatisticsMode::asymptotic ? "asymptotic" : "counts";
  j["protocol"] = to_string(st.probs.protocol());
  j["probabilities"] = {{"p_za", st.probs.p_za()}, {"p_zb", st.probs.p_zb()}};
  if (doc.seed) {
    j["rng"] = {{"engine", rng_id}, {"seed", *doc.seed}};
  }
  if (doc.source) {
    j["source"] = {{"delta", doc.source->delta},
                   {"cap_delta", doc.source->cap_delta},
                   {"epsilon_u", doc.source->epsilon_u},
                   {"correlation_length", doc.source->correlation_length}};
  }
  if (doc.channel) {
    j["channel"] = {{"model", channel_model_id},
                    {"loss_db", doc.channel->loss_db},
                    {"p_d", doc.channel->p_d},
                    {"theta_mis", doc.channel->theta_mis},
                    {"f", doc.channel->f}};
  }
  if (st.mode == StatisticsMode::asymptotic) {
    j["conditional"] = table_to_json(st.conditional);
    j["yield_z"] = st.yield_z;
    j["e_bit"] = st.e_bit;
  } else {
    json tags = json::array();
    for (std::size_t w = 0; w < st.tags.size(); ++w) {
      const TagCounts& t = st.tags[w];
      tags.push_back({{"tag", w},
                      {"rounds", t.rounds},
                      {"x_clicks", table_to_json(t.x_clicks)},
                      {"sifted", t.sifted},
                      {"sifted_errors", t.sifted_errors}});
    }
    j["tags"] = std::move(tags);
  }
  return j.dump(2) + "\n";
}

CountsDocument counts_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("top level must be an object");
  if (field(j, "format") != counts_format_name) schema_error("unexpected format tag");
  if (field(j, "version") != counts_format_version) schema_error("unsupported version");

  CountsDocument doc;
  ObservedStatistics& st = doc.stats;
  Protocol protocol{};
  const json& proto = field(j, "protocol");
  if (!proto.is_string()) schema_error("protocol must be a string");
  try {
    protocol = parse_protocol(proto.get<std::string>());
    const json& probs = field(j, "probabilities");
    st.probs = ProtocolProbs(protocol, number(probs, "p_za"), number(probs, "p_zb"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    schema_error(e.what());
  }

  const json& mode = field(j, "mode");
  if (mode == "asymptotic") {
    st.mode = StatisticsMode::asymptotic;
    st.conditional = table_from_json<double>(j, "conditional", [](const json& v) {
      if (!v.is_number()) schema_error("conditional probabilities must be numbers");
      return v.get<double>();
    });
    st.yield_z = number(j, "yield_z");
    st.e_bit = number(j, "e_bit");
  } else if (mode == "counts") {
    st.mode = StatisticsMode::counts;
    const json& tags = field(j, "tags");
    if (!tags.is_array() || tags.empty()) schema_error("tags must be a nonempty array");
    for (std::size_t w = 0; w < tags.size(); ++w) {
      const json& t = tags[w];
      if (count(field(t, "tag"), "tag") != w) schema_error("tags must be listed in order 0..l_c");
      TagCounts c;
      c.rounds = count(field(t, "rounds"), "rounds");
      c.x_clicks = table_from_json<std::uint64_t>(
          t, "x_clicks", [](const json& v) { return count(v, "x_clicks entry"); });
      c.sifted = count(field(t, "sifted"), "sifted");
      c.sifted_errors = count(field(t, "sifted_errors"), "sifted_errors");
      st.tags.push_back(c);
    }
  } else {
    schema_error("mode must be 'asymptotic' or 'counts'");
  }

  if (j.contains("source")) {
    const json& s = j["source"];
    SourceSpec src;
    src.delta = number(s, "delta");
    src.cap_delta = number(s, "cap_delta");
    src.epsilon_u = number(s, "epsilon_u");
    src.correlation_length =
        static_cast<std::uint32_t>(count(field(s, "correlation_length"), "correlation_length"));
    doc.source = src;
  }
  if (j.contains("channel")) {
    const json& c = j["channel"];
    ChannelParams ch;
    ch.loss_db = number(c, "loss_db");
    ch.p_d = number(c, "p_d");
    ch.theta_mis = number(c, "theta_mis");
    ch.f = number(c, "f");
    doc.channel = ch;
  }
  if (j.contains("rng")) doc.seed = count(field(j["rng"], "seed"), "seed");

  try {
    st.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    schema_error(e.what());
  }
  return doc;
}

void write_counts_file(const CountsDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << to_json(doc);
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

CountsDocument read_counts_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return counts_from_json(buf.str());
}

}  // namespace qkdrt
