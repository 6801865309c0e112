#pragma once

#include "fnets/common.hpp"
#include "fnets/precision_network.hpp"
#include "fnets/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fnets {

enum class CommonDgp { C0, C1, C2 };
enum class IdioDgp { E1, E2, E3 };

struct DgpSpec {
    CommonDgp common = CommonDgp::C0;
    IdioDgp idio = IdioDgp::E1;
    Index n = 200;
    Index p = 50;
    int q = 2;
    std::uint64_t seed = 0;
    int burnin = 500;

    void validate() const;
};

/// Parses e.g. "C1xE2" (case-insensitive).
DgpSpec parse_dgp(const std::string& tag);
std::string dgp_tag(const DgpSpec& spec);

struct GroundTruth {
    Matrix A1;
    Matrix delta;
    Matrix gamma; // innovation covariance
    Matrix omega; // 2 pi (I - A1)^T delta (I - A1)
    BoolMatrix omega_support;
};

struct IdioSample {
    Matrix xi; // p x n
    GroundTruth truth;
};

IdioSample gen_idio(const DgpSpec& spec);

/// Common component; C2 uses xi to calibrate the per-series variance ratio to one.
Matrix gen_common(const DgpSpec& spec, const Matrix& xi);

struct MatrixErrors {
    double frobenius = 0.0;
    double spectral = 0.0;
};

/// Relative errors |est - truth| / |truth| in Frobenius and spectral norm.
MatrixErrors score_matrix(const Matrix& est, const Matrix& truth);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // FPR non-decreasing
    double tpr_at_5pct = 0.0;
    double auc = 0.0;
};

/// Threshold sweep over the distinct magnitudes of est. When off_diagonal is set only
/// the strict upper triangle is scored (undirected targets).
RocCurve roc_curve(const Matrix& est, const Matrix& truth, bool off_diagonal);

/// TPR at a given FPR by linear interpolation along the curve.
double tpr_at_fpr(const std::vector<RocPoint>& points, double fpr);

enum class ForecastErrorMode {
    predictor_l2,  // |xhat - x|_2^2 / |x|_2^2
    predictor_max, // |xhat - x|_inf / |x|_inf
    realized_l2,   // |xhat - x|_2^2 / |x|_2
    realized_max,  // |xhat - x|_inf / |x|_inf
};

double forecast_errors(const Vector& xhat, const Vector& x, ForecastErrorMode mode);

/// Sum_t |est_t - truth_t|^2 / Sum_t |truth_t|^2 over the columns of two p x n matrices.
double insample_error(const Matrix& est, const Matrix& truth);

/// Spectral radius of a square real matrix.
double spectral_radius(const Matrix& m);

} // namespace fnets
