#pragma once

// Versioned JSON document carrying ObservedStatistics plus the metadata
// needed to replay it through the bound pipeline.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qkdrt/bounds.hpp"
#include "qkdrt/simulator.hpp"

namespace qkdrt {

inline constexpr const char* counts_format_name = "qkdrt-counts";
inline constexpr int counts_format_version = 1;

struct CountsDocument {
  ObservedStatistics stats;
  std::optional<SourceSpec> source;
  std::optional<ChannelParams> channel;
  std::optional<std::uint64_t> seed;
};

std::string to_json(const CountsDocument& doc);
/// Throws ErrorKind::schema on any structural or type problem.
CountsDocument counts_from_json(const std::string& text);

void write_counts_file(const CountsDocument& doc, const std::string& path);
CountsDocument read_counts_file(const std::string& path);

}  // namespace qkdrt
