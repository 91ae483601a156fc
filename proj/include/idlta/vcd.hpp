// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_VCD_HPP_
#define IDLTA_VCD_HPP_

#include <vector>

#include <Eigen/Dense>

#include "idlta/demixing.hpp"
#include "idlta/fcm.hpp"
#include "idlta/stft.hpp"

namespace idlta {

// Weighted covariances Q_in and cross-frequency vectors gamma_in for one
// source, indexed by frequency bin.
struct SourceStatistics {
  std::vector<Eigen::MatrixXcd> q;      // bins x (M x M)
  std::vector<Eigen::VectorXcd> gamma;  // bins x M
};

// Accelerated statistics:
//   Q_in     = 1/J sum_j [R_jn^{-1}]_{ii} x_ij x_ij^H
//   gamma_in = 1/J sum_j (sum_{i'!=i} [R_jn^{-1}]_{i'i} x_{i'j}^H w_{i'n}) x_ij
// with the i' sum collapsed through c_jn = sum_{i'} zhat_{i'jn} x_{i'j}^H w_{i'n}
// into -alpha/(1-alpha) * conj(zhat_ijn) * (c_jn - zhat_ijn x_ij^H w_in),
// so the whole source costs O(I J M^2) instead of O(I^2 J M).
SourceStatistics compute_statistics(const Spectrogram& spec,
                                    const DemixingSet& w,
                                    const FcmSeries& fcm,
                                    const FcmInverseCache& cache, int n);

// Literal double-loop evaluation of the same statistics from caller-supplied
// dense inverses R_jn^{-1} (one matrix per frame). Reference path for
// equivalence tests and the benchmark baseline.
SourceStatistics compute_statistics_direct(
    const Spectrogram& spec, const DemixingSet& w, int n,
    const std::vector<Eigen::MatrixXcd>& inverse_per_frame);

// Dense R_jn^{-1} materialized from the cache in O(I^2).
Eigen::MatrixXcd dense_inverse(const FcmInverseCache& cache,
                               const FcmSeries& fcm, int j, int n);

// eta_hat branch split of the closed-form row update; treats
// |eta_hat| <= 1e-12 sqrt(eta) as zero.
bool zero_eta_hat_branch(cd eta_hat, double eta);

// Closed-form global minimizer of the per-row objective
//   w^H Q w + w^H gamma + gamma^H w - log |det W_i|^2
// over w_in with the other rows fixed:
//   zeta     = (W_i Q)^{-1} e_n,  zetahat = Q^{-1} gamma,
//   eta      = zeta^H Q zeta,     etahat  = zeta^H Q zetahat,
//   w        = zeta/sqrt(eta) - zetahat                     (etahat = 0)
//              etahat/(2 eta) (1 - sqrt(1 + 4 eta/|etahat|^2)) zeta - zetahat.
// Q is regularized by 1e-12 trace(Q)/M * I before inversion. Throws
// IllConditionedUpdateError on a singular system.
Eigen::VectorXcd update_row(const Eigen::MatrixXcd& wi,
                            const Eigen::MatrixXcd& q,
                            const Eigen::VectorXcd& gamma, int n);

// Q_in for every bin of source n (W-independent, so reusable across all
// sweeps under one FCM estimate).
std::vector<Eigen::MatrixXcd> weighted_covariances(const Spectrogram& spec,
                                                   const FcmSeries& fcm,
                                                   const FcmInverseCache& cache,
                                                   int n);

// One full VCD sweep (sources outer, bins inner, ascending), updating W in
// place. gamma is refreshed after every row update through incremental
// c_jn bookkeeping; u/c are recomputed from scratch at the start of each
// source to cap drift. Returns the number of rows skipped as
// ill-conditioned.
int vcd_sweep(const Spectrogram& spec, DemixingSet& w, const FcmSeries& fcm,
              const FcmInverseCache& cache,
              const std::vector<std::vector<Eigen::MatrixXcd>>& q_all);

// Dedicated diagonal-FCM path (the alpha = 0 model): gamma vanishes and
// the update reduces to zeta normalization.
std::vector<Eigen::MatrixXcd> diagonal_covariances(const Spectrogram& spec,
                                                   const FcmSeries& fcm,
                                                   int n);
Eigen::VectorXcd update_row_diagonal(const Eigen::MatrixXcd& wi,
                                     const Eigen::MatrixXcd& q, int n);
int diagonal_sweep(const Spectrogram& spec, DemixingSet& w,
                   const std::vector<std::vector<Eigen::MatrixXcd>>& q_all);

}  // namespace idlta

#endif  // IDLTA_VCD_HPP_
