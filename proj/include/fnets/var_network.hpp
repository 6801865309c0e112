#pragma once

#include "fnets/l1_solvers.hpp"
#include "fnets/network.hpp"
#include "fnets/spectral.hpp"

#include <vector>

namespace fnets {

/// Yule-Walker system for a VAR(d): gram is the pd x pd block-Toeplitz matrix with
/// block (k, l) = Gamma(k - l); cross stacks Gamma(1), ..., Gamma(d) (pd x p).
struct YwSystem {
    Matrix gram;
    Matrix cross;
    int d = 1;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;

    Index p() const { return cross.cols(); }
    bool is_psd() const { return min_eigenvalue >= -1e-8 * std::max(max_eigenvalue, 0.0); }
};

YwSystem build_yw(const AcvSet& acv, int d);

/// Stacked transition matrices beta = [A_1^T; ...; A_d^T].
struct VarEstimate {
    Matrix beta;
    int d = 1;
    double lambda = 0.0;
    Solver solver = Solver::lasso;
    std::vector<SolverReport> reports;

    Index p() const { return beta.cols(); }
    /// A_l for l = 1..d, optionally from beta thresholded at t.
    Matrix transition(int lag) const;
    std::vector<Matrix> transitions(double threshold = 0.0) const;
};

/// Column-separable l1-regularised Yule-Walker fit. A warm start (same shape as
/// beta) seeds the coordinate-descent solver and is ignored by the LP.
VarEstimate estimate_beta(const YwSystem& yw, double lambda, Solver solver, const Matrix* warm_start = nullptr);

/// Entries with |x| <= t are set to zero.
Matrix threshold_matrix(const Matrix& est, double t);

/// Edge (i, j) whenever A_l(i, j) survives thresholding at some lag; weight is the
/// l2-norm across lags, or the signed coefficient when d = 1.
DirectedNetwork granger_network(const VarEstimate& est, double t);

} // namespace fnets
