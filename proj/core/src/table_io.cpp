#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "auditing/greedy.hpp"
#include "auditing/pool_io.hpp"
#include "csv.hpp"

namespace auditing {

FiniteClassTable read_class_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("class table CSV: missing header");
  auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.front() != "id") {
    throw std::runtime_error("class table CSV: header must be id,<point ids...>");
  }
  std::vector<std::string> point_ids(header.begin() + 1, header.end());
  std::vector<std::string> ids;
  std::vector<std::vector<int>> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("class table CSV: row '" + cells.front() +
                               "' has wrong number of fields");
    }
    ids.push_back(cells.front());
    std::vector<int> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      row.push_back(static_cast<int>(detail::parse_int(cells[j])));
    }
    labels.push_back(std::move(row));
  }
  return FiniteClassTable(std::move(labels), std::move(ids), std::move(point_ids));
}

void write_class_table(std::ostream& out, const FiniteClassTable& table) {
  out << "id";
  for (const auto& p : table.point_ids()) out << ',' << p;
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << table.hypothesis_ids()[r];
    for (int v : table.row(r)) out << ',' << v;
    out << '\n';
  }
}

FiniteClassTable load_class_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_class_table(in);
}

CostSpec read_cost_matrix(std::istream& in, const FiniteClassTable& table) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("cost CSV: missing header");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.front() != "point") {
    throw std::runtime_error("cost CSV: header must be point,<labels...>");
  }
  std::vector<int> labels;
  for (std::size_t j = 1; j < header.size(); ++j) {
    labels.push_back(static_cast<int>(detail::parse_int(header[j])));
  }
  std::vector<std::vector<double>> matrix(table.cols());
  std::vector<bool> filled(table.cols(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("cost CSV: row '" + cells.front() + "' has wrong number of fields");
    }
    const auto& ids = table.point_ids();
    const auto it = std::find(ids.begin(), ids.end(), cells.front());
    if (it == ids.end()) throw std::runtime_error("cost CSV: unknown point '" + cells.front() + "'");
    const auto x = static_cast<std::size_t>(it - ids.begin());
    if (filled[x]) throw std::runtime_error("cost CSV: duplicate point '" + cells.front() + "'");
    filled[x] = true;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      matrix[x].push_back(detail::parse_double(cells[j]));
    }
  }
  for (std::size_t x = 0; x < filled.size(); ++x) {
    if (!filled[x]) {
      throw std::runtime_error("cost CSV: no row for point '" + table.point_ids()[x] + "'");
    }
  }
  CostSpec spec = CostSpec::outcome(std::move(matrix), std::move(labels));
  spec.validate(table);
  return spec;
}

void write_cost_matrix(std::ostream& out, const CostSpec& cost, const FiniteClassTable& table) {
  if (cost.kind != CostKind::outcome_matrix) {
    throw std::invalid_argument("only outcome matrices have a CSV form");
  }
  out << "point";
  for (int y : cost.labels) out << ',' << y;
  out << '\n';
  for (std::size_t x = 0; x < table.cols(); ++x) {
    out << table.point_ids()[x];
    for (double c : cost.matrix.at(x)) out << ',' << format_double(c);
    out << '\n';
  }
}

CostSpec load_cost_matrix(const std::string& path, const FiniteClassTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_cost_matrix(in, table);
}

}  // namespace auditing
