#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"

namespace socioscope {

/// n x n matrix over class pairs, 1-based like class indices. Missing cells are NaN.
class ClassMatrix {
 public:
  ClassMatrix() = default;
  ClassMatrix(int n, std::string label, double fill = 0.0)
      : n_(n), label_(std::move(label)), v_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

  int size() const { return n_; }
  const std::string& label() const { return label_; }

  double& operator()(int i, int j) { return v_[index(i, j)]; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }

  bool symmetric() const {
    for (int i = 1; i <= n_; ++i)
      for (int j = i + 1; j <= n_; ++j) {
        double a = (*this)(i, j), b = (*this)(j, i);
        if (!(a == b || (is_missing(a) && is_missing(b)))) return false;
      }
    return true;
  }

  /// CSV with a header row and column of class indices; missing cells are written as NA.
  void write_csv(std::ostream& out) const {
    out << label_;
    for (int j = 1; j <= n_; ++j) out << ',' << j;
    out << '\n';
    for (int i = 1; i <= n_; ++i) {
      out << i;
      for (int j = 1; j <= n_; ++j) out << ',' << csv::format((*this)(i, j));
      out << '\n';
    }
  }

  static ClassMatrix read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty matrix file");
    auto header = csv::split(line);
    int n = static_cast<int>(header.size()) - 1;
    ClassMatrix m(n, header[0]);
    for (int i = 1; i <= n; ++i) {
      if (!std::getline(in, line)) throw ParseError(static_cast<std::size_t>(i) + 1, "missing matrix row");
      auto f = csv::split(line);
      if (static_cast<int>(f.size()) != n + 1) throw ParseError(static_cast<std::size_t>(i) + 1, "ragged matrix row");
      for (int j = 1; j <= n; ++j) m(i, j) = csv::parse_cell(f[static_cast<std::size_t>(j)]);
    }
    return m;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j - 1);
  }

  int n_ = 0;
  std::string label_;
  std::vector<double> v_;
};

}  // namespace socioscope
