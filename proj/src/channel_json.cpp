#include "dephasing/channel_json.hpp"

#include <fstream>
#include <sstream>

namespace dephasing {

using nlohmann::json;

CMatrix matrix_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("d")) {
    throw ChannelParseError("channel document needs keys \"n\" and \"d\"");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
    throw ChannelParseError("\"n\" must be a positive integer");
  }
  const auto n = static_cast<Eigen::Index>(doc["n"].get<long long>());
  const json& rows = doc["d"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
    throw ChannelParseError("\"d\" must be an array of n rows");
  }
  CMatrix d(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const json& row = rows[m];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ChannelParseError("row " + std::to_string(m) + " must have n entries");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& z = row[k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw ChannelParseError("entry (" + std::to_string(m) + "," + std::to_string(k) +
                                ") must be a [re, im] pair");
      }
      d(m, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return d;
}

CMatrix parse_channel_matrix(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ChannelParseError(std::string("invalid JSON: ") + e.what());
  }
  return matrix_from_json(doc);
}

json channel_to_json(const CMatrix& d) {
  json rows = json::array();
  for (Eigen::Index m = 0; m < d.rows(); ++m) {
    json row = json::array();
    for (Eigen::Index k = 0; k < d.cols(); ++k) row.push_back({d(m, k).real(), d(m, k).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"n", d.rows()}, {"d", std::move(rows)}};
}

CMatrix read_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ChannelParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_channel_matrix(buf.str());
}

void write_channel_file(const std::string& path, const PhaseDampingChannel& d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << channel_to_json(d).dump(2) << '\n';
}

}  // namespace dephasing
