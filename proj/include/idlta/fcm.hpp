// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_FCM_HPP_
#define IDLTA_FCM_HPP_

#include <Eigen/Dense>

#include "idlta/demixing.hpp"
#include "idlta/stft.hpp"
#include "idlta/tensor.hpp"

namespace idlta {

// Diagonal-plus-rank-1 frequency covariance series. For every frame j
// and source n the implied covariance over bins is
//   R_jn = (1 - alpha) * diag(d^2_:jn) + alpha * z_:jn z_:jn^H,
// never materialized densely outside tests.
struct FcmSeries {
  RealTensor diag_power;  // d^2, (I, J, N), strictly positive
  ComplexTensor rank1;    // z,   (I, J, N)
  double alpha = 0.0;     // in [0, 1); shared across the run
  double floor_epsilon = 0.0;  // lower bound in force on diag_power

  int bins() const { return diag_power.ni; }
  int frames() const { return diag_power.nj; }
  int sources() const { return diag_power.nk; }
};

void validate(const FcmSeries& fcm);

// Sherman-Morrison factors of R_jn^{-1}:
//   R_jn^{-1} = 1/(1-alpha) * (diag(d^2)^{-1} - alpha * zhat zhat^H),
//   zhat_ijn  = xi_jn * z_ijn / d^2_ijn,
//   xi_jn     = (1 - alpha + alpha * sum_i |z_ijn|^2 / d^2_ijn)^(-1/2).
struct FcmInverseCache {
  ComplexTensor zhat;   // (I, J, N)
  Eigen::ArrayXXd xi;   // (J, N), strictly positive
};

FcmInverseCache build_inverse_cache(const FcmSeries& fcm);

// [R_jn^{-1}]_{row,col} in O(1).
inline cd inverse_entry(const FcmInverseCache& cache, const FcmSeries& fcm,
                        int row, int col, int j, int n) {
  const double inv1m = 1.0 / (1.0 - fcm.alpha);
  cd value = -fcm.alpha * cache.zhat(row, j, n) *
             std::conj(cache.zhat(col, j, n));
  if (row == col) value += 1.0 / fcm.diag_power(row, j, n);
  return inv1m * value;
}

// Diagonal entry [R_jn^{-1}]_{ii}, the VCD covariance weight.
inline double inverse_diag_entry(const FcmInverseCache& cache,
                                 const FcmSeries& fcm, int i, int j, int n) {
  return (1.0 / (1.0 - fcm.alpha)) *
         (1.0 / fcm.diag_power(i, j, n) -
          fcm.alpha * std::norm(cache.zhat(i, j, n)));
}

// log det R_jn by the matrix determinant lemma:
//   (I-1) log(1-alpha) + sum_i log d^2_ijn - 2 log xi_jn.
double log_det(const FcmSeries& fcm, int j, int n);

// Negative log-likelihood term of one separated frame:
//   log det R_jn + y^H R_jn^{-1} y, quadratic form in O(I) via the cache.
double source_nll(const Eigen::VectorXcd& y, const FcmSeries& fcm,
                  const FcmInverseCache& cache, int j, int n);

// Separated spectrogram y_ij = W_i x_ij (channels become sources).
Spectrogram demix(const Spectrogram& spec, const DemixingSet& w);

// Full negative log-likelihood:
//   sum_{n,j} source_nll - J * sum_i log |det W_i|^2.
double total_objective(const Spectrogram& spec, const DemixingSet& w,
                       const FcmSeries& fcm, const FcmInverseCache& cache);
double total_objective(const Spectrogram& spec, const DemixingSet& w,
                       const FcmSeries& fcm);

}  // namespace idlta

#endif  // IDLTA_FCM_HPP_
