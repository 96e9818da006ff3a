#include "bgcwm/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "bgcwm/error.hpp"

namespace bgcwm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_number(const std::string& cell, std::size_t line, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v))
    throw Error(ErrorKind::Io, "line " + std::to_string(line) + ", column '" + column +
                                   "': not a finite number: '" + cell + "'");
  return v;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "dataset '" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);
  long y_col = -1;
  long label_col = -1;
  std::vector<std::size_t> x_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") {
      if (y_col >= 0) throw Error(ErrorKind::Io, "duplicate 'y' column in '" + path + "'");
      y_col = static_cast<long>(c);
    } else if (header[c] == "label") {
      label_col = static_cast<long>(c);
    } else {
      x_cols.push_back(c);
    }
  }
  if (y_col < 0) throw Error(ErrorKind::Io, "dataset '" + path + "' has no 'y' column");
  if (x_cols.empty()) throw Error(ErrorKind::Io, "dataset '" + path + "' has no covariate columns");

  std::vector<double> y;
  std::vector<double> x;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw Error(ErrorKind::Io, "line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, found " +
                                     std::to_string(cells.size()));
    y.push_back(parse_number(cells[y_col], line_no, "y"));
    for (std::size_t c : x_cols) x.push_back(parse_number(cells[c], line_no, header[c]));
    if (label_col >= 0) {
      const double l = parse_number(cells[label_col], line_no, "label");
      if (l != std::floor(l)) throw Error(ErrorKind::Io, "line " + std::to_string(line_no) + ": label must be an integer");
      labels.push_back(static_cast<int>(l));
    }
  }
  Dataset d;
  d.y = arma::vec(y);
  const arma::uword p = x_cols.size();
  d.X = arma::mat(x.data(), p, y.size()).t();
  d.labels = std::move(labels);
  d.validate();
  return d;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write dataset '" + path + "'");
  const bool has_labels = !data.labels.empty();
  out << "y";
  for (arma::uword j = 0; j < data.p(); ++j) out << ",x" << j + 1;
  if (has_labels) out << ",label";
  out << '\n';
  char buf[32];
  for (arma::uword i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", data.y[i]);
    out << buf;
    for (arma::uword j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.X(i, j));
      out << ',' << buf;
    }
    if (has_labels) out << ',' << data.labels[i];
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing dataset '" + path + "'");
}

}  // namespace bgcwm
