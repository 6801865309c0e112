#pragma once

#include "fnets/precision_network.hpp"
#include "fnets/spectral.hpp"
#include "fnets/var_network.hpp"

#include <vector>

namespace fnets {

struct CvGrid {
    std::vector<double> lambdas; // descending
    std::vector<int> orders;
    int folds = 1;

    void validate() const;
};

struct CvScore {
    double lambda = 0.0;
    int d = 1;
    double score = 0.0;
};

struct LambdaOrderSelection {
    double lambda = 0.0;
    int d = 1;
    std::vector<CvScore> table;
};

/// Train/test segment boundaries [begin, end) for each fold.
struct FoldSplit {
    Index train_begin = 0;
    Index train_end = 0;
    Index test_end = 0;
};
std::vector<FoldSplit> cv_folds(Index n, int folds);

/// tr(Gamma_test(0) - beta^T g - g^T beta + beta^T G beta) for one fold and order.
double yw_prediction_score(const Matrix& beta, const AcvSet& test_xi, int d);

/// Joint selection of the l1 penalty and VAR order by Yule-Walker prediction error.
/// Ties prefer the larger penalty, then the smaller order.
LambdaOrderSelection cv_select_lambda_d(const Matrix& x, int q, const CvGrid& grid, Solver solver);

struct EtaScore {
    double eta = 0.0;
    double score = 0.0;
};

struct EtaSelection {
    double eta = 0.0;
    std::vector<EtaScore> table;
};

/// Per-fold inputs for the precision-matrix cross-validation.
struct EtaFold {
    Matrix gamma_train;
    Matrix gamma_test;
};

/// tr(D G) - log det(D G) - p, or +inf when det(D G) <= 0.
double burg_divergence(const Matrix& delta, const Matrix& gamma);

/// Burg-divergence selection of the CLIME budget; ties prefer the larger eta.
EtaSelection cv_select_eta(const std::vector<EtaFold>& folds, const std::vector<double>& etas);

/// Builds the per-fold innovation covariances for cv_select_eta from a panel.
std::vector<EtaFold> eta_folds(const Matrix& x, int q, double lambda, int d, Solver solver, int folds);

/// Sparsity-kink threshold: over 100 log-spaced candidates between the smallest nonzero
/// and the largest magnitude, maximise the second difference of log(1 + #{|x| > t}).
double select_threshold(const Matrix& est);

/// 10 log-spaced values from 2 max_l |Gamma_xi(l)|_inf (l = 1..max_order) down to 1/100 of it.
std::vector<double> default_lambda_grid(const AcvSet& acv_xi, int max_order, int count = 10);

/// Orders 1..max_order with d p below the shortest training segment; {1} if none qualify.
std::vector<int> default_order_grid(Index p, Index n, int folds, int max_order);

/// 10 log-spaced values in [0.01, 1] * |gamma|_inf.
std::vector<double> default_eta_grid(const Matrix& gamma, int count = 10);

std::vector<double> log_spaced(double hi, double lo, int count);

} // namespace fnets
