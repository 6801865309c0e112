#pragma once

#include "fnets/network.hpp"
#include "fnets/spectral.hpp"
#include "fnets/var_network.hpp"

#include <string>
#include <vector>

namespace fnets {

struct InnovationCovariance {
    Matrix gamma;
    double min_eigenvalue = 0.0;
    std::string warning; // non-empty when gamma is indefinite
};

/// Gamma_xi(0) - beta^T g, symmetrised. Indefinite results are returned as-is with a warning.
InnovationCovariance innovation_cov(const AcvSet& acv_xi, const VarEstimate& est);

struct PrecisionEstimate {
    Matrix gamma_hat;
    Matrix delta_check; // column-wise solutions before symmetrisation
    Matrix delta_hat;
    double eta = 0.0;
    std::vector<SolverReport> reports;
};

/// Column-wise constrained l1 inverse of gamma with budget eta, then the
/// smaller-magnitude symmetrisation (ties keep the (i, j) entry).
PrecisionEstimate estimate_delta(const Matrix& gamma_hat, double eta);

UndirectedNetwork contemporaneous_network(const Matrix& delta_hat, double t_delta);

struct LongRunEstimate {
    Matrix omega_hat;
    Matrix a_of_one; // I - sum_l A_l
};

/// Omega = 2 pi A(1)^T Delta A(1) with A(1) built from beta thresholded at t.
LongRunEstimate longrun_matrix(const VarEstimate& est, double t, const Matrix& delta_hat);

UndirectedNetwork longrun_network(const LongRunEstimate& lr, double t_omega);

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Pairs (i, j) whose long-run partial covariance can be nonzero given the
/// supports of the transition matrices and of Delta. Symmetric with a true diagonal.
BoolMatrix structural_longrun_support(const std::vector<Matrix>& lags, const Matrix& delta);

} // namespace fnets
