#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace densub {

using Index = Eigen::Index;
using IndexSet = std::vector<Index>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free copy of `set`.
IndexSet normalized(IndexSet set);

/// Indicator vector of `set` in R^size.
Vector indicator(const IndexSet& set, Index size);

/// {0, 1, ..., count-1} shifted by `offset`.
IndexSet iota_set(Index count, Index offset = 0);

/// Dense M x N matrix over {0,1}. Construction rejects anything else.
class BinaryMatrix {
 public:
  using Storage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

  BinaryMatrix() = default;
  BinaryMatrix(Index rows, Index cols, bool fill = false);

  /// Throws InvalidArgument unless every entry is exactly 0 or 1.
  static BinaryMatrix from_real(const Matrix& values);
  /// Any nonzero entry becomes 1.
  static BinaryMatrix binarized(const Matrix& values);

  Index rows() const { return data_.rows(); }
  Index cols() const { return data_.cols(); }

  bool operator()(Index i, Index j) const { return data_(i, j) != 0; }
  void set(Index i, Index j, bool value) { data_(i, j) = value ? 1 : 0; }

  Index count_ones() const;
  bool is_symmetric() const;
  Matrix to_real() const { return data_.cast<double>(); }
  const Storage& storage() const { return data_; }

  friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.data_ == b.data_;
  }

 private:
  Storage data_;
};

}  // namespace densub
