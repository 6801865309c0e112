#include "fnets/var_network.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace fnets {

YwSystem build_yw(const AcvSet& acv, int d)
{
    if (d < 1) throw Error("build_yw: VAR order must be positive");
    if (acv.max_lag < d)
        throw Error("build_yw: ACVs cover lags up to " + std::to_string(acv.max_lag) + " but d=" + std::to_string(d));
    const Index p = acv.p();
    YwSystem yw;
    yw.d = d;
    yw.gram.resize(p * d, p * d);
    yw.cross.resize(p * d, p);
    for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) yw.gram.block(k * p, l * p, p, p) = acv.at(k - l);
        yw.cross.middleRows(k * p, p) = acv.at(k + 1);
    }
    const Matrix skew = yw.gram - yw.gram.transpose();
    const double scale = std::max(1.0, yw.gram.cwiseAbs().maxCoeff());
    if (skew.cwiseAbs().maxCoeff() > 1e-9 * scale) throw Error("build_yw: assembled Gram matrix is not symmetric");
    yw.gram = symmetrize(yw.gram);

    Eigen::SelfAdjointEigenSolver<Matrix> es(yw.gram, Eigen::EigenvaluesOnly);
    yw.min_eigenvalue = es.eigenvalues().minCoeff();
    yw.max_eigenvalue = es.eigenvalues().maxCoeff();
    return yw;
}

Matrix VarEstimate::transition(int lag) const
{
    if (lag < 1 || lag > d) throw Error("VAR transition lag out of range");
    return beta.middleRows((lag - 1) * p(), p()).transpose();
}

std::vector<Matrix> VarEstimate::transitions(double threshold) const
{
    const Matrix b = threshold > 0.0 ? threshold_matrix(beta, threshold) : beta;
    std::vector<Matrix> out;
    for (int l = 1; l <= d; ++l) out.push_back(b.middleRows((l - 1) * p(), p()).transpose());
    return out;
}

VarEstimate estimate_beta(const YwSystem& yw, double lambda, Solver solver, const Matrix* warm_start)
{
    if (lambda < 0.0) throw Error("estimate_beta: lambda must be nonnegative");
    if (solver == Solver::lasso && !yw.is_psd())
        throw Error("estimate_beta: Yule-Walker Gram matrix is indefinite (min eigenvalue " +
                    std::to_string(yw.min_eigenvalue) + ")");
    const Index k = yw.gram.rows();
    const Index p = yw.p();
    VarEstimate est;
    est.d = yw.d;
    est.lambda = lambda;
    est.solver = solver;
    est.beta.resize(k, p);
    est.reports.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        try {
            L1Solution<double> sol;
            if (solver == Solver::lasso) {
                QuadL1Options opt;
                opt.check_psd = false;
                std::optional<Vector> init;
                if (warm_start && warm_start->rows() == k && warm_start->cols() == p) init = Vector(warm_start->col(j));
                sol = solve_quad_l1(QuadL1Problem<double>{yw.gram, yw.cross.col(j), lambda}, opt, init);
            } else {
                sol = solve_supcon_l1(SupConL1Problem<double>{yw.gram, yw.cross.col(j), lambda});
            }
            est.beta.col(j) = sol.solution;
            est.reports.push_back(sol.report);
        } catch (const std::exception& e) {
            throw Error("estimate_beta: column " + std::to_string(j) + ": " + e.what());
        }
    }
    return est;
}

Matrix threshold_matrix(const Matrix& est, double t)
{
    if (t < 0.0) throw Error("threshold must be nonnegative");
    return hard_threshold(est, t);
}

DirectedNetwork granger_network(const VarEstimate& est, double t)
{
    const Index p = est.p();
    const std::vector<Matrix> lags = est.transitions(t);
    DirectedNetwork net{Matrix::Zero(p, p)};
    if (est.d == 1) {
        net.weights = lags.front();
        return net;
    }
    for (const auto& a : lags) net.weights += a.cwiseAbs2();
    net.weights = net.weights.cwiseSqrt();
    return net;
}

} // namespace fnets
