#include "hmwm/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hmwm {

namespace {

void header_group(std::ostream& os, const char* base, Eigen::Index width) {
  for (Eigen::Index j = 0; j < width; ++j) os << ',' << base << j + 1;
}

void row_group(std::string& line, const Matrix& M, Eigen::Index row) {
  char buf[40];
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    std::snprintf(buf, sizeof buf, ",%.17g", M(row, j));
    line += buf;
  }
}

// columns named base1..basek determine the stored width of each signal
Eigen::Index group_width(const std::vector<std::string>& names, const std::string& base) {
  Eigen::Index w = 0;
  for (const auto& n : names)
    if (n.size() > base.size() && n.compare(0, base.size(), base) == 0 &&
        n.find_first_not_of("0123456789", base.size()) == std::string::npos)
      ++w;
  return w;
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path) {
  const auto T = trace.steps();
  if (trace.y_p.rows() != T || trace.u.rows() != T || trace.y_w.rows() != T ||
      trace.y_q.rows() != T || trace.r.rows() != T || trace.chi2.size() != T ||
      trace.mode_w.size() != T || trace.mode_q.size() != T ||
      trace.x_w.rows() != T || trace.x_q.rows() != T)
    throw std::invalid_argument("write_trace_csv: column lengths disagree");

  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trace_csv: cannot open " + path);

  os << 'k';
  header_group(os, "x_p", trace.x_p.cols());
  header_group(os, "y_p", trace.y_p.cols());
  header_group(os, "u", trace.u.cols());
  header_group(os, "y_w", trace.y_w.cols());
  header_group(os, "y_q", trace.y_q.cols());
  header_group(os, "r", trace.r.cols());
  os << ",chi2_stat,mode_w,mode_q";
  header_group(os, "x_w", trace.x_w.cols());
  header_group(os, "x_q", trace.x_q.cols());
  os << '\n';

  std::string line;
  char buf[40];
  for (Eigen::Index k = 0; k < T; ++k) {
    line.clear();
    line += std::to_string(k);
    row_group(line, trace.x_p, k);
    row_group(line, trace.y_p, k);
    row_group(line, trace.u, k);
    row_group(line, trace.y_w, k);
    row_group(line, trace.y_q, k);
    row_group(line, trace.r, k);
    std::snprintf(buf, sizeof buf, ",%.17g", trace.chi2(k));
    line += buf;
    line += ',' + std::to_string(trace.mode_w(k));
    line += ',' + std::to_string(trace.mode_q(k));
    row_group(line, trace.x_w, k);
    row_group(line, trace.x_q, k);
    os << line << '\n';
  }
  if (!os) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

SimTrace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_trace_csv: cannot open " + path);

  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_trace_csv: empty file");

  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  const Eigen::Index n = group_width(names, "x_p");
  const Eigen::Index p = group_width(names, "y_p");
  const Eigen::Index m = group_width(names, "u");
  const Eigen::Index n_w = group_width(names, "x_w");
  const Eigen::Index expected = 1 + n + 4 * p + m + 3 + 2 * n_w;
  if (names.empty() || names[0] != "k" ||
      static_cast<Eigen::Index>(names.size()) != expected)
    throw std::runtime_error("read_trace_csv: unrecognized header in " + path);

  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(expected);
    const char* s = line.c_str();
    char* end = nullptr;
    for (Eigen::Index j = 0; j < expected; ++j) {
      row.push_back(std::strtod(s, &end));
      if (end == s)
        throw std::runtime_error("read_trace_csv: malformed row in " + path);
      s = end;
      if (*s == ',') ++s;
    }
    rows.push_back(std::move(row));
  }

  const auto T = static_cast<Eigen::Index>(rows.size());
  SimTrace tr;
  tr.x_p = Matrix(T, n);
  tr.y_p = Matrix(T, p);
  tr.u = Matrix(T, m);
  tr.y_w = Matrix(T, p);
  tr.y_q = Matrix(T, p);
  tr.r = Matrix(T, p);
  tr.chi2 = Vector(T);
  tr.mode_w = Eigen::VectorXi(T);
  tr.mode_q = Eigen::VectorXi(T);
  tr.x_w = Matrix(T, n_w);
  tr.x_q = Matrix(T, n_w);
  for (Eigen::Index k = 0; k < T; ++k) {
    const auto& row = rows[k];
    Eigen::Index c = 1;  // skip the step index
    for (Eigen::Index j = 0; j < n; ++j) tr.x_p(k, j) = row[c++];
    for (Eigen::Index j = 0; j < p; ++j) tr.y_p(k, j) = row[c++];
    for (Eigen::Index j = 0; j < m; ++j) tr.u(k, j) = row[c++];
    for (Eigen::Index j = 0; j < p; ++j) tr.y_w(k, j) = row[c++];
    for (Eigen::Index j = 0; j < p; ++j) tr.y_q(k, j) = row[c++];
    for (Eigen::Index j = 0; j < p; ++j) tr.r(k, j) = row[c++];
    tr.chi2(k) = row[c++];
    tr.mode_w(k) = static_cast<int>(row[c++]);
    tr.mode_q(k) = static_cast<int>(row[c++]);
    for (Eigen::Index j = 0; j < n_w; ++j) tr.x_w(k, j) = row[c++];
    for (Eigen::Index j = 0; j < n_w; ++j) tr.x_q(k, j) = row[c++];
  }
  return tr;
}

}  // namespace hmwm
