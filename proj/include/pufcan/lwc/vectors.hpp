#pragma once

// Test-vector files: whitespace-separated hex fields, one vector per line.
// '#' starts a comment; a lone '-' stands for an empty field.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pufcan/bits.hpp"

namespace pufcan {

using VectorRecord = std::vector<Bytes>;

inline std::vector<VectorRecord> read_vector_file(const std::string& path, std::size_t fields) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::vector<VectorRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    VectorRecord rec;
    for (std::string tok; ss >> tok;) rec.push_back(tok == "-" ? Bytes{} : from_hex(tok));
    if (rec.empty()) continue;
    if (rec.size() != fields) {
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": expected " +
                                        std::to_string(fields) + " fields");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pufcan
