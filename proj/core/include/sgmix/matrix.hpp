#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgmix {

/// Row-major dense matrix. Plain storage, no view semantics.
template <typename T>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

  T* row(std::size_t i) { return data.data() + i * cols; }
  const T* row(std::size_t i) const { return data.data() + i * cols; }

  std::span<T> row_span(std::size_t i) { return {row(i), cols}; }
  std::span<const T> row_span(std::size_t i) const { return {row(i), cols}; }

  T& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool empty() const { return data.empty(); }

  template <typename U>
  DenseMatrix<U> cast() const {
    DenseMatrix<U> out(rows, cols);
    for (std::size_t k = 0; k < data.size(); ++k) out.data[k] = static_cast<U>(data[k]);
    return out;
  }
};

}  // namespace sgmix
