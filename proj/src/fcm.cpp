// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/fcm.hpp"

#include <cmath>

#include "idlta/errors.hpp"

namespace idlta {

void validate(const FcmSeries& fcm) {
  if (fcm.alpha < 0.0 || fcm.alpha >= 1.0)
    throw ModelDomainError("fcm: alpha must lie in [0, 1)");
  if (fcm.rank1.ni != fcm.diag_power.ni || fcm.rank1.nj != fcm.diag_power.nj ||
      fcm.rank1.nk != fcm.diag_power.nk)
    throw InvalidInputError("fcm: diag_power/rank1 shape mismatch");
  if (fcm.floor_epsilon <= 0.0)
    throw ModelDomainError("fcm: floor_epsilon must be positive");
  for (double d : fcm.diag_power.v) {
    if (!std::isfinite(d) || d < fcm.floor_epsilon)
      throw ModelDomainError("fcm: diag power below floor or non-finite");
  }
  for (const cd& z : fcm.rank1.v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InvalidInputError("fcm: non-finite rank1 entry");
  }
}

FcmInverseCache build_inverse_cache(const FcmSeries& fcm) {
  validate(fcm);
  const int num_bins = fcm.bins();
  const int num_frames = fcm.frames();
  const int num_src = fcm.sources();

  FcmInverseCache cache;
  cache.zhat = ComplexTensor(num_bins, num_frames, num_src);
  cache.xi = Eigen::ArrayXXd(num_frames, num_src);

  for (int n = 0; n < num_src; ++n) {
    for (int j = 0; j < num_frames; ++j) {
      double ratio = 0.0;  // sum_i |z|^2 / d^2
      for (int i = 0; i < num_bins; ++i)
        ratio += std::norm(fcm.rank1(i, j, n)) / fcm.diag_power(i, j, n);
      const double xi =
          1.0 / std::sqrt(1.0 - fcm.alpha + fcm.alpha * ratio);
      if (!std::isfinite(xi) || xi <= 0.0)
        throw NumericalError("fcm cache: xi non-finite at frame " +
                             std::to_string(j) + ", source " +
                             std::to_string(n));
      cache.xi(j, n) = xi;
      for (int i = 0; i < num_bins; ++i)
        cache.zhat(i, j, n) = xi * fcm.rank1(i, j, n) / fcm.diag_power(i, j, n);
    }
  }
  return cache;
}

double log_det(const FcmSeries& fcm, int j, int n) {
  const int num_bins = fcm.bins();
  double sum_log_d = 0.0;
  double ratio = 0.0;
  for (int i = 0; i < num_bins; ++i) {
    sum_log_d += std::log(fcm.diag_power(i, j, n));
    ratio += std::norm(fcm.rank1(i, j, n)) / fcm.diag_power(i, j, n);
  }
  const double xi = 1.0 / std::sqrt(1.0 - fcm.alpha + fcm.alpha * ratio);
  return (num_bins - 1) * std::log1p(-fcm.alpha) + sum_log_d -
         2.0 * std::log(xi);
}

double source_nll(const Eigen::VectorXcd& y, const FcmSeries& fcm,
                  const FcmInverseCache& cache, int j, int n) {
  const int num_bins = fcm.bins();
  double diag_term = 0.0;
  cd projection = 0.0;  // zhat^H y
  for (int i = 0; i < num_bins; ++i) {
    diag_term += std::norm(y(i)) / fcm.diag_power(i, j, n);
    projection += std::conj(cache.zhat(i, j, n)) * y(i);
  }
  const double quad = (diag_term - fcm.alpha * std::norm(projection)) /
                      (1.0 - fcm.alpha);
  return quad + log_det(fcm, j, n);
}

Spectrogram demix(const Spectrogram& spec, const DemixingSet& w) {
  if (w.bins() != spec.bins || w.channels() != spec.channels)
    throw InvalidInputError("demix: shape mismatch");
  Spectrogram out(spec.bins, spec.frames, w.sources(), spec.config,
                  spec.source_length);
  for (int i = 0; i < spec.bins; ++i) {
    const Eigen::MatrixXcd& wi = w.matrices[i];
    for (int j = 0; j < spec.frames; ++j)
      out.slot(i, j).noalias() = wi * spec.slot(i, j);
  }
  return out;
}

double total_objective(const Spectrogram& spec, const DemixingSet& w,
                       const FcmSeries& fcm, const FcmInverseCache& cache) {
  if (fcm.bins() != spec.bins || fcm.frames() != spec.frames ||
      fcm.sources() != w.sources())
    throw InvalidInputError("total_objective: shape mismatch");
  const Spectrogram y = demix(spec, w);
  const int num_frames = spec.frames;

  double loss = 0.0;
  Eigen::VectorXcd frame(spec.bins);
  for (int n = 0; n < y.channels; ++n) {
    for (int j = 0; j < num_frames; ++j) {
      for (int i = 0; i < spec.bins; ++i) frame(i) = y.at(i, j, n);
      loss += source_nll(frame, fcm, cache, j, n);
    }
  }
  for (int i = 0; i < spec.bins; ++i) {
    const double det2 = std::norm(w.matrices[i].determinant());
    if (det2 < 1e-300)
      throw DegenerateDemixingError("total_objective: singular W at bin " +
                                    std::to_string(i));
    loss -= num_frames * std::log(det2);
  }
  return loss;
}

double total_objective(const Spectrogram& spec, const DemixingSet& w,
                       const FcmSeries& fcm) {
  return total_objective(spec, w, fcm, build_inverse_cache(fcm));
}

}  // namespace idlta
