#include "dcmm/io.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#ifdef _WIN32
#include <process.h>
#else
#include <unistd.h>
#endif

namespace dcmm {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& tok, const std::string& context) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw DcmmError(ErrorCode::kIoError, "bad number '" + tok + "' in " + context);
  }
  if (trim(tok.substr(pos)) != "") {
    throw DcmmError(ErrorCode::kIoError, "bad number '" + tok + "' in " + context);
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DcmmError(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DcmmError(ErrorCode::kIoError, "cannot write " + path.string());
  }
  return out;
}

// Splits "[[1, 2], [3, 4]]" into its top-level bracketed items.
std::vector<std::string> bracket_items(const std::string& body,
                                       const std::string& context) {
  std::vector<std::string> items;
  int depth = 0;
  std::string cur;
  for (char c : body) {
    if (c == '[') {
      ++depth;
      cur += c;
    } else if (c == ']') {
      --depth;
      if (depth < 0) {
        throw DcmmError(ErrorCode::kIoError, "unbalanced ']' in " + context);
      }
      cur += c;
    } else if (c == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) {
    throw DcmmError(ErrorCode::kIoError, "unbalanced '[' in " + context);
  }
  if (!trim(cur).empty() || !items.empty()) items.push_back(trim(cur));
  return items;
}

ConfigValue parse_value(const std::string& raw, const std::string& key) {
  std::string v = trim(raw);
  if (v.empty()) {
    throw DcmmError(ErrorCode::kIoError, "empty value for key " + key);
  }
  if (v.front() == '[') {
    if (v.back() != ']') {
      throw DcmmError(ErrorCode::kIoError, "unterminated list for key " + key);
    }
    std::string body = trim(v.substr(1, v.size() - 2));
    if (!body.empty() && body.front() == '[') {
      std::vector<std::vector<double>> mat;
      for (const std::string& item : bracket_items(body, key)) {
        if (item.size() < 2 || item.front() != '[' || item.back() != ']') {
          throw DcmmError(ErrorCode::kIoError, "bad matrix row in key " + key);
        }
        std::vector<double> row;
        std::string inner = trim(item.substr(1, item.size() - 2));
        if (!inner.empty()) {
          for (const std::string& tok : split(inner, ',')) {
            row.push_back(parse_number(trim(tok), "key " + key));
          }
        }
        mat.push_back(std::move(row));
      }
      return mat;
    }
    std::vector<double> list;
    if (!body.empty()) {
      for (const std::string& tok : split(body, ',')) {
        list.push_back(parse_number(trim(tok), "key " + key));
      }
    }
    return list;
  }
  std::size_t pos = 0;
  try {
    double num = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return num;
  } catch (const std::exception&) {
  }
  return v;  // bare word
}

std::atomic<uint64_t> g_stager_counter{0};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- adjacency I/O ----

AdjacencyMatrix read_adjacency_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& tok : split(line, ',')) {
      double v = parse_number(trim(tok), path.string());
      if (v != 0.0 && v != 1.0) {
        throw DcmmError(ErrorCode::kIoError,
                        "adjacency CSV entries must be 0 or 1");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) {
    throw DcmmError(ErrorCode::kIoError, "empty adjacency file");
  }
  Eigen::MatrixXd x(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw DcmmError(ErrorCode::kIoError, "adjacency CSV is not square");
    }
    for (std::size_t j = 0; j < n; ++j) x(i, j) = rows[i][j];
  }
  return AdjacencyMatrix::from_matrix(std::move(x));
}

void write_adjacency_csv(const AdjacencyMatrix& x,
                         const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (int i = 0; i < x.n(); ++i) {
    for (int j = 0; j < x.n(); ++j) {
      out << (x.x(i, j) != 0.0 ? '1' : '0');
      out << (j + 1 == x.n() ? '\n' : ',');
    }
  }
}

AdjacencyMatrix read_edge_list(const std::filesystem::path& path, int n,
                               bool strict) {
  std::ifstream in = open_input(path);
  std::set<std::pair<int, int>> edges;
  int max_node = -1;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long i, j;
    if (!(ls >> i >> j) || i < 0 || j < 0) {
      throw DcmmError(ErrorCode::kIoError, "bad edge line: " + line);
    }
    std::string rest;
    if (ls >> rest) {
      throw DcmmError(ErrorCode::kIoError, "trailing tokens on edge line: " + line);
    }
    edges.emplace(static_cast<int>(i), static_cast<int>(j));
    max_node = std::max({max_node, static_cast<int>(i), static_cast<int>(j)});
  }
  if (n < 0) n = max_node + 1;
  if (n <= 0 || max_node >= n) {
    throw DcmmError(ErrorCode::kIoError, "edge list node ids exceed n");
  }
  if (strict) {
    for (const auto& [i, j] : edges) {
      if (i != j && !edges.count({j, i})) {
        throw DcmmError(ErrorCode::kIoError,
                        "asymmetric edge list in strict mode: " +
                            std::to_string(i) + " " + std::to_string(j));
      }
    }
  }
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges) {
    x(i, j) = 1.0;
    x(j, i) = 1.0;  // symmetric closure
  }
  return AdjacencyMatrix{std::move(x)};
}

void write_edge_list(const AdjacencyMatrix& x,
                     const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  // both orientations, so strict readers accept the output
  for (int i = 0; i < x.n(); ++i) {
    for (int j = 0; j < x.n(); ++j) {
      if (x.x(i, j) != 0.0) out << i << ' ' << j << '\n';
    }
  }
}

// ---- params document ----

void write_params(const DcmmParams& params, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "n = " << params.n << '\n';
  out << "k = " << params.k << '\n';
  out << "theta = [";
  for (int i = 0; i < params.n; ++i) {
    out << format_double(params.theta(i)) << (i + 1 == params.n ? "" : ", ");
  }
  out << "]\n";
  auto write_matrix = [&](const char* key, const Eigen::MatrixXd& m) {
    out << key << " = [";
    for (int i = 0; i < m.rows(); ++i) {
      out << '[';
      for (int j = 0; j < m.cols(); ++j) {
        out << format_double(m(i, j)) << (j + 1 == m.cols() ? "" : ", ");
      }
      out << ']' << (i + 1 == m.rows() ? "" : ", ");
    }
    out << "]\n";
  };
  write_matrix("pi", params.pi);
  write_matrix("p", params.p);
}

DcmmParams read_params(const std::filesystem::path& path) {
  KeyValueDoc doc = KeyValueDoc::parse_file(path);
  int n = static_cast<int>(doc.get_number("n"));
  int k = static_cast<int>(doc.get_number("k"));
  std::vector<double> theta = doc.get_list("theta");
  Eigen::MatrixXd pi = doc.get_matrix("pi");
  Eigen::MatrixXd p = doc.get_matrix("p");
  if (static_cast<int>(theta.size()) != n || pi.rows() != n || pi.cols() != k ||
      p.rows() != k || p.cols() != k) {
    throw DcmmError(ErrorCode::kIoError, "params document shapes inconsistent");
  }
  Eigen::VectorXd th = Eigen::Map<Eigen::VectorXd>(theta.data(), theta.size());
  return DcmmParams::checked(std::move(th), std::move(pi), std::move(p));
}

// ---- key-value documents ----

KeyValueDoc KeyValueDoc::parse_string(const std::string& text) {
  KeyValueDoc doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DcmmError(ErrorCode::kIoError,
                      "expected 'key = value' at line " + std::to_string(lineno));
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw DcmmError(ErrorCode::kIoError,
                      "empty key at line " + std::to_string(lineno));
    }
    doc.entries_[key] = parse_value(line.substr(eq + 1), key);
  }
  return doc;
}

KeyValueDoc KeyValueDoc::parse_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool KeyValueDoc::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

double KeyValueDoc::get_number(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw DcmmError(ErrorCode::kIoError, "missing key " + key);
  }
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  throw DcmmError(ErrorCode::kIoError, "key " + key + " is not a number");
}

double KeyValueDoc::get_number_or(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

std::string KeyValueDoc::get_word(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw DcmmError(ErrorCode::kIoError, "missing key " + key);
  }
  if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
  throw DcmmError(ErrorCode::kIoError, "key " + key + " is not a word");
}

std::string KeyValueDoc::get_word_or(const std::string& key,
                                     const std::string& fallback) const {
  return has(key) ? get_word(key) : fallback;
}

std::vector<double> KeyValueDoc::get_list(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw DcmmError(ErrorCode::kIoError, "missing key " + key);
  }
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  if (const double* v = std::get_if<double>(&it->second)) return {*v};
  throw DcmmError(ErrorCode::kIoError, "key " + key + " is not a list");
}

Eigen::MatrixXd KeyValueDoc::get_matrix(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw DcmmError(ErrorCode::kIoError, "missing key " + key);
  }
  const auto* rows = std::get_if<std::vector<std::vector<double>>>(&it->second);
  if (!rows || rows->empty()) {
    throw DcmmError(ErrorCode::kIoError, "key " + key + " is not a matrix");
  }
  Eigen::MatrixXd m(rows->size(), (*rows)[0].size());
  for (std::size_t i = 0; i < rows->size(); ++i) {
    if ((*rows)[i].size() != static_cast<std::size_t>(m.cols())) {
      throw DcmmError(ErrorCode::kIoError, "ragged matrix for key " + key);
    }
    for (std::size_t j = 0; j < (*rows)[i].size(); ++j) m(i, j) = (*rows)[i][j];
  }
  return m;
}

// ---- atomic output staging ----

OutputStager::OutputStager(const std::filesystem::path& target_dir)
    : target_(target_dir) {
  std::filesystem::path parent = target_.parent_path();
  if (parent.empty()) parent = ".";
  std::filesystem::create_directories(parent);
  uint64_t tag = g_stager_counter.fetch_add(1);
  tmp_ = parent / (target_.filename().string() + ".tmp-" +
                   std::to_string(getpid()) + "-" + std::to_string(tag));
  std::filesystem::create_directories(tmp_);
}

OutputStager::~OutputStager() {
  if (!committed_) {
    std::error_code ec;
    std::filesystem::remove_all(tmp_, ec);
  }
}

std::filesystem::path OutputStager::stage(const std::string& filename) {
  files_.push_back(filename);
  return tmp_ / filename;
}

void OutputStager::commit() {
  std::filesystem::create_directories(target_);
  for (const std::string& f : files_) {
    std::filesystem::rename(tmp_ / f, target_ / f);
  }
  std::error_code ec;
  std::filesystem::remove_all(tmp_, ec);
  committed_ = true;
}

}  // namespace dcmm
