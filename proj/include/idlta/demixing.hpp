// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_DEMIXING_HPP_
#define IDLTA_DEMIXING_HPP_

#include <vector>

#include <Eigen/Dense>

namespace idlta {

// Per-frequency demixing matrices. Row n of matrices[i] is w_in^H, so
// the separated signal is y_ijn = (matrices[i] * x_ij)(n).
struct DemixingSet {
  std::vector<Eigen::MatrixXcd> matrices;  // bins x (sources x channels)

  int bins() const { return static_cast<int>(matrices.size()); }
  int sources() const {
    return matrices.empty() ? 0 : static_cast<int>(matrices[0].rows());
  }
  int channels() const {
    return matrices.empty() ? 0 : static_cast<int>(matrices[0].cols());
  }

  // Demixing row w_in as a column vector.
  Eigen::VectorXcd row_vector(int i, int n) const {
    return matrices[i].row(n).adjoint();
  }

  static DemixingSet identity(int bins, int sources) {
    DemixingSet w;
    w.matrices.assign(bins, Eigen::MatrixXcd::Identity(sources, sources));
    return w;
  }
};

}  // namespace idlta

#endif  // IDLTA_DEMIXING_HPP_
