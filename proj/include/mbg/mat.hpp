#pragma once
// Dense row-major matrix, just enough for activation/coefficient storage.

#include <cstddef>
#include <vector>

namespace mbg {

template <typename T>
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, T value = T(0)) { resize(r, c, value); }

  void resize(std::size_t r, std::size_t c, T value = T(0)) {
    rows = r;
    cols = c;
    data.assign(r * c, value);
  }

  void fill(T value) { std::fill(data.begin(), data.end(), value); }

  T* row(std::size_t i) { return data.data() + i * cols; }
  const T* row(std::size_t i) const { return data.data() + i * cols; }

  T& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool empty() const { return data.empty(); }
};

}  // namespace mbg
