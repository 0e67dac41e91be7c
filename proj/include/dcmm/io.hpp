#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "dcmm/model.hpp"

namespace dcmm {

// ---- adjacency I/O ----

// Dense CSV of 0/1 integers, one row per line.
AdjacencyMatrix read_adjacency_csv(const std::filesystem::path& path);
void write_adjacency_csv(const AdjacencyMatrix& x,
                         const std::filesystem::path& path);

// Edge list, one "i j" pair per line, 0-indexed, self-loops as "i i".
// Symmetric closure and deduplication applied on read; with strict=true an
// asymmetric input (an edge present in only one direction) is an error.
AdjacencyMatrix read_edge_list(const std::filesystem::path& path, int n = -1,
                               bool strict = false);
void write_edge_list(const AdjacencyMatrix& x,
                     const std::filesystem::path& path);

// ---- params document ----
//
// Flat key-value grammar shared with experiment configs:
//   key = value            value: number | word | [a, b, c] | [[a, b], [c, d]]
//   '#' starts a comment. Keys for a params document: n, k, theta, pi, p.
void write_params(const DcmmParams& params, const std::filesystem::path& path);
DcmmParams read_params(const std::filesystem::path& path);

// ---- key-value config documents ----

using ConfigValue =
    std::variant<double, std::string, std::vector<double>,
                 std::vector<std::vector<double>>>;

class KeyValueDoc {
 public:
  static KeyValueDoc parse_file(const std::filesystem::path& path);
  static KeyValueDoc parse_string(const std::string& text);

  bool has(const std::string& key) const;
  double get_number(const std::string& key) const;
  double get_number_or(const std::string& key, double fallback) const;
  std::string get_word(const std::string& key) const;
  std::string get_word_or(const std::string& key,
                          const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  Eigen::MatrixXd get_matrix(const std::string& key) const;

  const std::map<std::string, ConfigValue>& entries() const { return entries_; }

 private:
  std::map<std::string, ConfigValue> entries_;
};

// ---- formatting ----

// Round-trip-exact double formatting used for every emitted file, so that
// identical runs produce identical bytes.
std::string format_double(double v);

// ---- atomic output staging ----

// Files are written into a temporary sibling directory and renamed into the
// target only on commit, so failed runs leave nothing behind.
class OutputStager {
 public:
  explicit OutputStager(const std::filesystem::path& target_dir);
  ~OutputStager();

  OutputStager(const OutputStager&) = delete;
  OutputStager& operator=(const OutputStager&) = delete;

  // Path to write a staged file to.
  std::filesystem::path stage(const std::string& filename);
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path tmp_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

}  // namespace dcmm
