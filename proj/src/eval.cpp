// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "idlta/errors.hpp"

namespace idlta {
namespace {

// Hungarian algorithm (potentials form), minimizing total cost.
// Returns row -> column assignment.
std::vector<int> solve_assignment_min(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

}  // namespace

double sdr(const TimeSignal& estimate, const TimeSignal& reference) {
  if (estimate.channels() != 1 || reference.channels() != 1)
    throw InvalidInputError("sdr: expects mono signals");
  if (estimate.length() != reference.length())
    throw InvalidInputError("sdr: length mismatch");
  const Eigen::VectorXd est = estimate.samples.row(0);
  const Eigen::VectorXd ref = reference.samples.row(0);
  const double ref_energy = ref.squaredNorm();
  if (ref_energy <= 0.0)
    throw InvalidInputError("sdr: all-zero reference");

  const double gain = est.dot(ref) / ref_energy;
  const Eigen::VectorXd target = gain * ref;
  const double target_energy = target.squaredNorm();
  const double error_energy = (est - target).squaredNorm();
  if (error_energy <= 0.0 || target_energy <= 0.0)
    return error_energy <= 0.0 ? kSdrCapDb : -kSdrCapDb;
  return std::min(kSdrCapDb, 10.0 * std::log10(target_energy / error_energy));
}

EvalReport align_and_score(const std::vector<TimeSignal>& estimates,
                           const std::vector<TimeSignal>& references,
                           const TimeSignal& mixture, int reference_channel) {
  if (estimates.empty() || estimates.size() != references.size())
    throw InvalidInputError("align_and_score: estimate/reference count "
                            "mismatch");
  if (reference_channel < 0 || reference_channel >= mixture.channels())
    throw InvalidInputError("align_and_score: reference channel out of range");
  const int n = static_cast<int>(estimates.size());

  Eigen::MatrixXd scores(n, n);  // (estimate, reference)
  for (int e = 0; e < n; ++e)
    for (int r = 0; r < n; ++r) scores(e, r) = sdr(estimates[e], references[r]);

  // est_for_ref[r] = estimate assigned to reference r.
  std::vector<int> est_for_ref(n);
  if (n <= 4) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> candidate = perm;
    do {
      double total = 0.0;
      for (int r = 0; r < n; ++r) total += scores(candidate[r], r);
      if (total > best) {
        best = total;
        est_for_ref = candidate;
      }
    } while (std::next_permutation(candidate.begin(), candidate.end()));
  } else {
    const std::vector<int> est_to_ref = solve_assignment_min(-scores);
    for (int e = 0; e < n; ++e) est_for_ref[est_to_ref[e]] = e;
  }

  const TimeSignal baseline = mixture.channel(reference_channel);
  EvalReport report;
  report.permutation = est_for_ref;
  for (int r = 0; r < n; ++r) {
    const double score = scores(est_for_ref[r], r);
    report.sdr_per_source.push_back(score);
    report.sdr_improvement_per_source.push_back(score -
                                                sdr(baseline, references[r]));
  }
  report.mean_sdr_improvement =
      std::accumulate(report.sdr_improvement_per_source.begin(),
                      report.sdr_improvement_per_source.end(), 0.0) /
      n;
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json doc;
  auto rounded = [](const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(round4(x));
    return out;
  };
  doc["sdr_per_source"] = rounded(report.sdr_per_source);
  doc["sdr_improvement_per_source"] =
      rounded(report.sdr_improvement_per_source);
  doc["mean_sdr_improvement"] = round4(report.mean_sdr_improvement);
  doc["permutation"] = report.permutation;
  doc["baseline"] = report.baseline;
  return doc;
}

}  // namespace idlta
