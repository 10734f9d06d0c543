#include "auditing/pool_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "csv.hpp"

namespace auditing {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_pool_csv(std::ostream& out, const Pool& pool) {
  out << 'i';
  for (std::size_t k = 0; k < pool.dim(); ++k) out << ",x" << k;
  out << ",y\n";
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out << i;
    for (double v : pool.point(i)) out << ',' << format_double(v);
    out << ',' << to_int(pool.label(i)) << '\n';
  }
}

Pool read_pool_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("pool CSV: missing header");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header.front() != "i" || header.back() != "y") {
    throw std::runtime_error("pool CSV: header must be i,x0,...,x{d-1},y");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[k + 1] != "x" + std::to_string(k)) {
      throw std::runtime_error("pool CSV: unexpected column '" + header[k + 1] + "'");
    }
  }
  Pool pool(d);
  std::vector<double> x(d);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != d + 2) {
      throw std::runtime_error("pool CSV: row " + std::to_string(row) +
                               " has wrong number of fields");
    }
    for (std::size_t k = 0; k < d; ++k) x[k] = detail::parse_double(cells[k + 1]);
    pool.add(x, label_from_int(static_cast<int>(detail::parse_int(cells.back()))));
    ++row;
  }
  return pool;
}

void save_pool_csv(const std::string& path, const Pool& pool) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_pool_csv(out, pool);
}

Pool load_pool_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_pool_csv(in);
}

}  // namespace auditing
