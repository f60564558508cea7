#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fieldconc/errors.hpp"
#include "fieldconc/field.hpp"

namespace fieldconc {

/// Shortest representation that round-trips a double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Field CSV: a header row `d,n_1,...,n_d`, then one value per line in
/// row-major order (first coordinate slowest).
inline void write_field_csv(std::ostream& os, const FieldSample& field) {
  field.validate();
  os << field.shape.dim();
  for (auto c : field.shape.coords) os << ',' << c;
  os << '\n';
  for (double v : field.values) os << format_double(v) << '\n';
}

inline FieldSample read_field_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw InvalidInputError("field csv: missing header");
  std::istringstream hs(header);
  std::string tok;
  if (!std::getline(hs, tok, ',')) throw InvalidInputError("field csv: bad header");
  const int d = std::stoi(tok);
  if (d < 1) throw InvalidInputError("field csv: dimension must be >= 1");
  std::vector<std::int64_t> coords;
  while (std::getline(hs, tok, ',')) coords.push_back(std::stoll(tok));
  if (static_cast<int>(coords.size()) != d)
    throw InvalidInputError("field csv: header shape does not match dimension");
  FieldSample field;
  field.shape = MultiIndex(std::move(coords));
  field.values.reserve(static_cast<std::size_t>(field.shape.count()));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    field.values.push_back(std::stod(line));
  }
  field.validate();
  return field;
}

}  // namespace fieldconc
