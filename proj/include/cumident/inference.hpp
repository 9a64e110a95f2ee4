#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cumident/cumulant.hpp"
#include "cumident/identify.hpp"
#include "cumident/labeling.hpp"

namespace cumident {

// Covariance convention: every covariance in this module is reported for
// sqrt(n) (theta_hat - theta). Interval construction divides by n.

using MomentStatistic = std::function<VectorXd(const RawMomentVector&)>;
using Labeler = std::function<LabelingResult(const MatrixXd&)>;

// Result of one evaluation of an estimator inside a resampling loop.
struct StatOutput {
    VectorXd value;
    std::vector<int> labels;  // permutation chosen by labeling, if any
    bool near_degenerate = false;
};

// Raw moments -> cumulant map -> contractions -> H -> oriented eigenvectors
// -> optional labeling. Order 3 only; the raw-moment route has no fourth
// moments.
class DemixingPipeline {
public:
    DemixingPipeline(ProbeVectors probes, IdentifyOptions options = {}, Labeler labeler = {});

    DemixingEstimate demix(const RawMomentVector& m) const;

    // Labeled estimate: value = row-major vec(lambda_final). Without a labeler
    // the value is vec(lambda_tilde).
    StatOutput run(const RawMomentVector& m) const;

    // vec(lambda_final) with the permutation held fixed; used for Jacobians so
    // that perturbed points keep the labeling of the base estimate.
    VectorXd labeled_with(const RawMomentVector& m, const std::vector<int>& permutation) const;

    const ProbeVectors& probes() const noexcept { return probes_; }
    const IdentifyOptions& options() const noexcept { return options_; }
    bool has_labeler() const noexcept { return static_cast<bool>(labeler_); }

private:
    ProbeVectors probes_;
    IdentifyOptions options_;
    Labeler labeler_;
};

struct DeltaVarianceResult {
    VectorXd estimate;
    MatrixXd sigma_u;   // G Sigma_M G'
    MatrixXd jacobian;  // p x D, columns in MonomialIndex order
    MatrixXd sigma_m;   // D x D raw-moment covariance
    VectorXd fd_step;
};

struct JackknifeResult {
    MatrixXd estimates;  // n x p leave-one-out values
    VectorXd mean;
    MatrixXd variance;   // sqrt(n) scale: (n - 1) sum (t_i - t_bar)(t_i - t_bar)'
    bool aligned = true;
    int label_flips = 0;
    int near_degenerate = 0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Central differences with step cbrt(eps) * max(1, |m_j|) per coordinate.
// `step_scale` multiplies every step (used to cross-check the Jacobian).
MatrixXd numerical_jacobian(const MomentStatistic& statistic, const RawMomentVector& m_hat,
                            double step_scale = 1.0, VectorXd* steps = nullptr);

// (1/n) sum (M(X_i) - M_hat)(M(X_i) - M_hat)'.
MatrixXd moment_covariance(const Eigen::Ref<const MatrixXd>& x);

// Generic delta method for a statistic of the raw moments of x.
DeltaVarianceResult delta_variance(const Eigen::Ref<const MatrixXd>& x, const MomentStatistic& statistic);

// Delta-method covariance of the oriented eigenvectors: row k of
// lambda_tilde, or every row stacked (row-major) when k is empty. The sample
// is centred first; the statistic is translation invariant.
DeltaVarianceResult delta_variance(const Sample& sample, const ProbeVectors& probes,
                                   std::optional<int> k = std::nullopt, const IdentifyOptions& options = {});

// Delta-method covariance of vec(lambda_final) for a labeled pipeline; the
// permutation chosen on the full sample is held fixed while differentiating.
DeltaVarianceResult delta_variance(const Sample& sample, const DemixingPipeline& pipeline);

// Delete-1 jackknife by explicit row deletion. Requires n >= 30.
JackknifeResult jackknife_variance(const Eigen::Ref<const MatrixXd>& x,
                                   const std::function<StatOutput(const MatrixXd&)>& estimator);

// Delete-1 jackknife for statistics of the raw moments. Leave-one-out raw
// moments are obtained by downdating, which is algebraically the same as
// re-estimating on the reduced sample. When `center` is set the data are
// shifted by the full-sample mean first (only valid for translation
// invariant statistics).
JackknifeResult jackknife_moments(const Eigen::Ref<const MatrixXd>& x,
                                  const std::function<StatOutput(const RawMomentVector&)>& estimator,
                                  bool center = true);

// Jackknife of the labeled pipeline; labeling is re-run per resample and
// label flips against the full-sample labeling are counted.
JackknifeResult jackknife_variance(const Sample& sample, const DemixingPipeline& pipeline);

// point +/- z_{(1+level)/2} sqrt(variance / n), variance on the sqrt(n) scale.
Interval confidence_interval(double point, double variance, double n, double level);

double normal_quantile(double p);

}  // namespace cumident
