// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/vcd.hpp"

#include <cmath>
#include <string>

#include "idlta/errors.hpp"

namespace idlta {
namespace {

constexpr double kDetFloor = 1e-300;
constexpr double kRegScale = 1e-12;

Eigen::MatrixXcd regularized(const Eigen::MatrixXcd& q) {
  const int m = static_cast<int>(q.rows());
  const double reg = kRegScale * q.trace().real() / m;
  return q + reg * Eigen::MatrixXcd::Identity(m, m);
}

void check_finite(const Eigen::VectorXcd& v, int i, int n, const char* what) {
  if (!v.allFinite())
    throw NumericalError(std::string(what) + " non-finite at bin " +
                         std::to_string(i) + ", source " + std::to_string(n));
}

}  // namespace

SourceStatistics compute_statistics(const Spectrogram& spec,
                                    const DemixingSet& w,
                                    const FcmSeries& fcm,
                                    const FcmInverseCache& cache, int n) {
  const int num_bins = spec.bins;
  const int num_frames = spec.frames;
  const int num_chan = spec.channels;
  const double inv_frames = 1.0 / num_frames;
  const double cross_scale = -fcm.alpha / (1.0 - fcm.alpha);

  // u(i,j) = x_ij^H w_in, c(j) = sum_i zhat_ijn u(i,j).
  std::vector<cd> u(static_cast<size_t>(num_bins) * num_frames);
  std::vector<cd> c(num_frames, cd{});
  for (int i = 0; i < num_bins; ++i) {
    const Eigen::VectorXcd w_in = w.row_vector(i, n);
    for (int j = 0; j < num_frames; ++j) {
      const cd uij = spec.slot(i, j).dot(w_in);
      u[static_cast<size_t>(i) * num_frames + j] = uij;
      c[j] += cache.zhat(i, j, n) * uij;
    }
  }

  SourceStatistics stats;
  stats.q.reserve(num_bins);
  stats.gamma.reserve(num_bins);
  Eigen::MatrixXcd q(num_chan, num_chan);
  Eigen::VectorXcd gamma(num_chan);
  for (int i = 0; i < num_bins; ++i) {
    q.setZero();
    gamma.setZero();
    for (int j = 0; j < num_frames; ++j) {
      const auto x = spec.slot(i, j);
      const double wgt = inverse_diag_entry(cache, fcm, i, j, n);
      q.noalias() += wgt * (x * x.adjoint());
      const cd zh = cache.zhat(i, j, n);
      const cd coeff =
          cross_scale * std::conj(zh) *
          (c[j] - zh * u[static_cast<size_t>(i) * num_frames + j]);
      gamma.noalias() += coeff * x;
    }
    q *= inv_frames;
    gamma *= inv_frames;
    stats.q.push_back(q);
    stats.gamma.push_back(gamma);
  }
  return stats;
}

SourceStatistics compute_statistics_direct(
    const Spectrogram& spec, const DemixingSet& w, int n,
    const std::vector<Eigen::MatrixXcd>& inverse_per_frame) {
  const int num_bins = spec.bins;
  const int num_frames = spec.frames;
  const int num_chan = spec.channels;
  const double inv_frames = 1.0 / num_frames;

  // p(i',j) = x_{i'j}^H w_{i'n}
  std::vector<cd> p(static_cast<size_t>(num_bins) * num_frames);
  for (int i = 0; i < num_bins; ++i) {
    const Eigen::VectorXcd w_in = w.row_vector(i, n);
    for (int j = 0; j < num_frames; ++j)
      p[static_cast<size_t>(i) * num_frames + j] = spec.slot(i, j).dot(w_in);
  }

  SourceStatistics stats;
  stats.q.reserve(num_bins);
  stats.gamma.reserve(num_bins);
  Eigen::MatrixXcd q(num_chan, num_chan);
  Eigen::VectorXcd gamma(num_chan);
  for (int i = 0; i < num_bins; ++i) {
    q.setZero();
    gamma.setZero();
    for (int j = 0; j < num_frames; ++j) {
      const auto x = spec.slot(i, j);
      const Eigen::MatrixXcd& rinv = inverse_per_frame[j];
      q.noalias() += rinv(i, i).real() * (x * x.adjoint());
      cd coeff = 0.0;
      for (int ip = 0; ip < num_bins; ++ip) {
        if (ip == i) continue;
        coeff += rinv(ip, i) * p[static_cast<size_t>(ip) * num_frames + j];
      }
      gamma.noalias() += coeff * x;
    }
    q *= inv_frames;
    gamma *= inv_frames;
    stats.q.push_back(q);
    stats.gamma.push_back(gamma);
  }
  return stats;
}

Eigen::MatrixXcd dense_inverse(const FcmInverseCache& cache,
                               const FcmSeries& fcm, int j, int n) {
  const int num_bins = fcm.bins();
  Eigen::MatrixXcd rinv(num_bins, num_bins);
  for (int col = 0; col < num_bins; ++col)
    for (int row = 0; row < num_bins; ++row)
      rinv(row, col) = inverse_entry(cache, fcm, row, col, j, n);
  return rinv;
}

bool zero_eta_hat_branch(cd eta_hat, double eta) {
  return std::abs(eta_hat) <= 1e-12 * std::sqrt(eta);
}

Eigen::VectorXcd update_row(const Eigen::MatrixXcd& wi,
                            const Eigen::MatrixXcd& q,
                            const Eigen::VectorXcd& gamma, int n) {
  const int num_chan = static_cast<int>(wi.cols());
  const Eigen::MatrixXcd q_reg = regularized(q);

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_wq(wi * q_reg);
  if (std::abs(lu_wq.determinant()) < kDetFloor)
    throw IllConditionedUpdateError("update_row: singular W_i Q_in");
  const Eigen::VectorXcd zeta =
      lu_wq.solve(Eigen::VectorXcd::Unit(num_chan, n));

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_q(q_reg);
  if (std::abs(lu_q.determinant()) < kDetFloor)
    throw IllConditionedUpdateError("update_row: singular Q_in");
  const Eigen::VectorXcd zetahat = lu_q.solve(gamma);

  const double eta = zeta.dot(q_reg * zeta).real();
  const cd eta_hat = zeta.dot(q_reg * zetahat);
  if (!std::isfinite(eta) || eta <= 0.0)
    throw IllConditionedUpdateError("update_row: nonpositive eta");

  Eigen::VectorXcd w_new;
  if (zero_eta_hat_branch(eta_hat, eta)) {
    w_new = zeta / std::sqrt(eta) - zetahat;
  } else {
    const cd scale = eta_hat / (2.0 * eta) *
                     (1.0 - std::sqrt(1.0 + 4.0 * eta / std::norm(eta_hat)));
    w_new = scale * zeta - zetahat;
  }
  if (!w_new.allFinite())
    throw IllConditionedUpdateError("update_row: non-finite result");
  return w_new;
}

std::vector<Eigen::MatrixXcd> weighted_covariances(const Spectrogram& spec,
                                                   const FcmSeries& fcm,
                                                   const FcmInverseCache& cache,
                                                   int n) {
  const int num_chan = spec.channels;
  const double inv_frames = 1.0 / spec.frames;
  std::vector<Eigen::MatrixXcd> q_all;
  q_all.reserve(spec.bins);
  Eigen::MatrixXcd q(num_chan, num_chan);
  for (int i = 0; i < spec.bins; ++i) {
    q.setZero();
    for (int j = 0; j < spec.frames; ++j) {
      const auto x = spec.slot(i, j);
      const double wgt = inverse_diag_entry(cache, fcm, i, j, n);
      q.noalias() += wgt * (x * x.adjoint());
    }
    q *= inv_frames;
    q_all.push_back(q);
  }
  return q_all;
}

int vcd_sweep(const Spectrogram& spec, DemixingSet& w, const FcmSeries& fcm,
              const FcmInverseCache& cache,
              const std::vector<std::vector<Eigen::MatrixXcd>>& q_all) {
  const int num_bins = spec.bins;
  const int num_frames = spec.frames;
  const int num_src = w.sources();
  const double inv_frames = 1.0 / num_frames;
  const double cross_scale = -fcm.alpha / (1.0 - fcm.alpha);

  int skipped = 0;
  std::vector<cd> u(static_cast<size_t>(num_bins) * num_frames);
  std::vector<cd> c(num_frames);
  Eigen::VectorXcd gamma(w.channels());

  for (int n = 0; n < num_src; ++n) {
    // Fresh u/c per source; gamma depends on the current rows of this
    // source at every bin.
    std::fill(c.begin(), c.end(), cd{});
    for (int i = 0; i < num_bins; ++i) {
      const Eigen::VectorXcd w_in = w.row_vector(i, n);
      for (int j = 0; j < num_frames; ++j) {
        const cd uij = spec.slot(i, j).dot(w_in);
        u[static_cast<size_t>(i) * num_frames + j] = uij;
        c[j] += cache.zhat(i, j, n) * uij;
      }
    }

    for (int i = 0; i < num_bins; ++i) {
      gamma.setZero();
      for (int j = 0; j < num_frames; ++j) {
        const cd zh = cache.zhat(i, j, n);
        const cd coeff =
            cross_scale * std::conj(zh) *
            (c[j] - zh * u[static_cast<size_t>(i) * num_frames + j]);
        gamma.noalias() += coeff * spec.slot(i, j);
      }
      gamma *= inv_frames;
      check_finite(gamma, i, n, "vcd statistics");

      Eigen::VectorXcd w_new;
      try {
        w_new = update_row(w.matrices[i], q_all[n][i], gamma, n);
      } catch (const IllConditionedUpdateError&) {
        ++skipped;
        continue;
      }

      for (int j = 0; j < num_frames; ++j) {
        const cd u_new = spec.slot(i, j).dot(w_new);
        c[j] += cache.zhat(i, j, n) *
                (u_new - u[static_cast<size_t>(i) * num_frames + j]);
        u[static_cast<size_t>(i) * num_frames + j] = u_new;
      }
      w.matrices[i].row(n) = w_new.adjoint();
    }
  }
  return skipped;
}

std::vector<Eigen::MatrixXcd> diagonal_covariances(const Spectrogram& spec,
                                                   const FcmSeries& fcm,
                                                   int n) {
  const int num_chan = spec.channels;
  const double inv_frames = 1.0 / spec.frames;
  std::vector<Eigen::MatrixXcd> q_all;
  q_all.reserve(spec.bins);
  Eigen::MatrixXcd q(num_chan, num_chan);
  for (int i = 0; i < spec.bins; ++i) {
    q.setZero();
    for (int j = 0; j < spec.frames; ++j) {
      const auto x = spec.slot(i, j);
      const double wgt = 1.0 / fcm.diag_power(i, j, n);
      q.noalias() += wgt * (x * x.adjoint());
    }
    q *= inv_frames;
    q_all.push_back(q);
  }
  return q_all;
}

Eigen::VectorXcd update_row_diagonal(const Eigen::MatrixXcd& wi,
                                     const Eigen::MatrixXcd& q, int n) {
  const int num_chan = static_cast<int>(wi.cols());
  const Eigen::MatrixXcd q_reg = regularized(q);

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_wq(wi * q_reg);
  if (std::abs(lu_wq.determinant()) < kDetFloor)
    throw IllConditionedUpdateError("update_row_diagonal: singular W_i Q_in");
  const Eigen::VectorXcd zeta =
      lu_wq.solve(Eigen::VectorXcd::Unit(num_chan, n));

  const double eta = zeta.dot(q_reg * zeta).real();
  if (!std::isfinite(eta) || eta <= 0.0)
    throw IllConditionedUpdateError("update_row_diagonal: nonpositive eta");

  Eigen::VectorXcd w_new = zeta / std::sqrt(eta);
  if (!w_new.allFinite())
    throw IllConditionedUpdateError("update_row_diagonal: non-finite result");
  return w_new;
}

int diagonal_sweep(const Spectrogram& spec, DemixingSet& w,
                   const std::vector<std::vector<Eigen::MatrixXcd>>& q_all) {
  int skipped = 0;
  for (int n = 0; n < w.sources(); ++n) {
    for (int i = 0; i < spec.bins; ++i) {
      try {
        const Eigen::VectorXcd w_new =
            update_row_diagonal(w.matrices[i], q_all[n][i], n);
        w.matrices[i].row(n) = w_new.adjoint();
      } catch (const IllConditionedUpdateError&) {
        ++skipped;
      }
    }
  }
  return skipped;
}

}  // namespace idlta
