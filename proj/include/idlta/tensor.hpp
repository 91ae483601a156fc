// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_TENSOR_HPP_
#define IDLTA_TENSOR_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace idlta {

using cd = std::complex<double>;

// Dense 3-way tensor, first index fastest. Matches the on-disk tensor
// payload order, so file I/O is a flat copy.
template <class T>
struct Tensor3 {
  int ni = 0;
  int nj = 0;
  int nk = 0;
  std::vector<T> v;

  Tensor3() = default;
  Tensor3(int i, int j, int k)
      : ni(i), nj(j), nk(k), v(static_cast<size_t>(i) * j * k, T{}) {}

  T& operator()(int i, int j, int k) {
    return v[(static_cast<size_t>(k) * nj + j) * ni + i];
  }
  const T& operator()(int i, int j, int k) const {
    return v[(static_cast<size_t>(k) * nj + j) * ni + i];
  }

  size_t size() const { return v.size(); }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.ni == b.ni && a.nj == b.nj && a.nk == b.nk && a.v == b.v;
  }
};

using RealTensor = Tensor3<double>;
using ComplexTensor = Tensor3<cd>;

}  // namespace idlta

#endif  // IDLTA_TENSOR_HPP_
