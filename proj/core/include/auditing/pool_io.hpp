#pragma once

#include <iosfwd>
#include <string>

#include "auditing/types.hpp"

namespace auditing {

// CSV pool format: header `i,x0,...,x{d-1},y`, one row per point, y in
// {-1,1}, LF line endings. Coordinates are written in shortest round-trip
// form so a written pool reads back bit-identically.
void write_pool_csv(std::ostream& out, const Pool& pool);
Pool read_pool_csv(std::istream& in);

void save_pool_csv(const std::string& path, const Pool& pool);
Pool load_pool_csv(const std::string& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace auditing
