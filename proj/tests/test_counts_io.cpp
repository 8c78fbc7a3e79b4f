#include <cstdio>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qkdrt/counts_io.hpp"
#include "qkdrt/error.hpp"

using namespace qkdrt;
using json = nlohmann::ordered_json;

namespace {

CountsDocument finite_doc() {
  RunConfig cfg;
  cfg.rounds = 30000;
  cfg.seed = 9;
  cfg.correlation_length = 1;
  SourceSpec src;
  src.epsilon_u = 1e-4;
  src.correlation_length = 1;
  ChannelParams ch;
  ch.loss_db = 3;
  CountsDocument doc;
  doc.stats = simulate_finite(cfg, src, ch);
  doc.source = src;
  doc.channel = ch;
  doc.seed = cfg.seed;
  return doc;
}

ErrorKind parse_kind(const std::string& text) {
  try {
    counts_from_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("finite documents round-trip exactly") {
  const CountsDocument doc = finite_doc();
  const std::string text = to_json(doc);
  CHECK(text == to_json(finite_doc()));
  const CountsDocument back = counts_from_json(text);
  CHECK(back.stats.tags == doc.stats.tags);
  CHECK(back.stats.probs == doc.stats.probs);
  CHECK(back.stats.mode == StatisticsMode::counts);
  CHECK(back.source->epsilon_u == 1e-4);
  CHECK(back.channel->loss_db == 3);
  CHECK(*back.seed == 9);
  CHECK(to_json(back) == text);
}

TEST_CASE("asymptotic documents round-trip exactly") {
  CountsDocument doc;
  doc.stats = simulate_asymptotic(SourceSpec{}, ProtocolProbs::efficient(Protocol::three_state),
                                  ChannelParams{});
  const CountsDocument back = counts_from_json(to_json(doc));
  CHECK(back.stats.mode == StatisticsMode::asymptotic);
  CHECK(back.stats.conditional == doc.stats.conditional);
  CHECK(back.stats.yield_z == doc.stats.yield_z);
  CHECK(back.stats.e_bit == doc.stats.e_bit);
  CHECK(back.stats.probs.protocol() == Protocol::three_state);
  CHECK_FALSE(back.source.has_value());
}

TEST_CASE("files") {
  const std::string path = "counts_io_test.json";
  write_counts_file(finite_doc(), path);
  CHECK(read_counts_file(path).stats.tags == finite_doc().stats.tags);
  std::remove(path.c_str());
  try {
    read_counts_file("no/such/file.json");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("schema violations") {
  const json good = json::parse(to_json(finite_doc()));
  auto mutated = [&](auto&& edit) {
    json j = good;
    edit(j);
    return parse_kind(j.dump());
  };
  CHECK(parse_kind("{not json") == ErrorKind::schema);
  CHECK(parse_kind("[1, 2]") == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["format"] = "other"; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["version"] = 2; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j.erase("protocol"); }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["protocol"] = "b92"; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["mode"] = "other"; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["probabilities"]["p_za"] = 0; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"] = json::array(); }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["rounds"] = -5; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["rounds"] = 1.5; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["tag"] = 1; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["x_clicks"]["1X"] = {1}; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["x_clicks"].erase("0Z"); }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["sifted_errors"] = 1u << 30; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][0]["rounds"] = 1; }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["source"].erase("delta"); }) == ErrorKind::schema);
  CHECK(mutated([](json& j) { j["tags"][1]["x_clicks"]["0X"][0] = "12"; }) == ErrorKind::schema);
}

TEST_CASE("hand-written minimal document") {
  const std::string text = R"({
    "format": "qkdrt-counts", "version": 1, "mode": "counts", "protocol": "three-state",
    "probabilities": {"p_za": 0.5, "p_zb": 0.5},
    "tags": [{"tag": 0, "rounds": 1000,
              "x_clicks": {"0Z": [10, 11], "1Z": [12, 9], "0X": [20, 1], "1X": [0, 0]},
              "sifted": 100, "sifted_errors": 2}]
  })";
  const CountsDocument doc = counts_from_json(text);
  CHECK(doc.stats.probs.protocol() == Protocol::three_state);
  CHECK(doc.stats.tags[0].x_clicks[index(Setting::x0)][0] == 20);
  CHECK_FALSE(doc.source.has_value());
  CHECK_FALSE(doc.seed.has_value());
}
