#include "densub/error.hpp"
#include "densub/rng.hpp"
#include "densub/types.hpp"

#include <algorithm>

namespace densub {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::InfeasibleRule: return "infeasible-rule";
    case ErrorKind::InfeasibleCertificate: return "infeasible-certificate";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::TooLarge: return "too-large";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

IndexSet normalized(IndexSet set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

Vector indicator(const IndexSet& set, Index size) {
  Vector v = Vector::Zero(size);
  for (Index i : set) {
    require(i >= 0 && i < size, ErrorKind::InvalidArgument,
            "index " + std::to_string(i) + " out of range");
    v(i) = 1.0;
  }
  return v;
}

IndexSet iota_set(Index count, Index offset) {
  IndexSet out(static_cast<std::size_t>(std::max<Index>(count, 0)));
  for (Index i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = offset + i;
  return out;
}

BinaryMatrix::BinaryMatrix(Index rows, Index cols, bool fill) {
  require(rows >= 1 && cols >= 1, ErrorKind::InvalidArgument,
          "binary matrix needs at least one row and one column");
  data_ = Storage::Constant(rows, cols, fill ? 1 : 0);
}

BinaryMatrix BinaryMatrix::from_real(const Matrix& values) {
  BinaryMatrix out(values.rows(), values.cols());
  for (Index j = 0; j < values.cols(); ++j) {
    for (Index i = 0; i < values.rows(); ++i) {
      const double v = values(i, j);
      require(v == 0.0 || v == 1.0, ErrorKind::InvalidArgument,
              "entry (" + std::to_string(i) + "," + std::to_string(j) +
                  ") is not 0 or 1");
      out.data_(i, j) = v == 1.0 ? 1 : 0;
    }
  }
  return out;
}

BinaryMatrix BinaryMatrix::binarized(const Matrix& values) {
  BinaryMatrix out(values.rows(), values.cols());
  out.data_ = (values.array() != 0.0).cast<std::uint8_t>();
  return out;
}

Index BinaryMatrix::count_ones() const {
  return data_.cast<Index>().sum();
}

bool BinaryMatrix::is_symmetric() const {
  return rows() == cols() && data_ == data_.transpose();
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  require(bound > 0, ErrorKind::InvalidArgument, "Rng::below needs bound > 0");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    const unsigned __int128 product =
        static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(bound);
    if (static_cast<std::uint64_t>(product) >= threshold) {
      return static_cast<std::uint64_t>(product >> 64);
    }
  }
}

}  // namespace densub
