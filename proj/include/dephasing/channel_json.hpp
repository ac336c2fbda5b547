#pragma once

// Channel file format:
//   {"n": 4, "d": [[[re, im], ...], ...]}
// row-major, one [re, im] pair per entry.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dephasing/channel.hpp"

namespace dephasing {

/// Malformed channel document (bad JSON, wrong shape, non-numeric entries).
class ChannelParseError : public std::runtime_error {
 public:
  explicit ChannelParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses the damping matrix without validating it as a channel.
CMatrix matrix_from_json(const nlohmann::json& doc);
CMatrix parse_channel_matrix(const std::string& text);

nlohmann::json channel_to_json(const CMatrix& d);
inline nlohmann::json channel_to_json(const PhaseDampingChannel& d) {
  return channel_to_json(d.matrix());
}

CMatrix read_channel_file(const std::string& path);
void write_channel_file(const std::string& path, const PhaseDampingChannel& d);

}  // namespace dephasing
