#include "fnets/precision_network.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace fnets {

InnovationCovariance innovation_cov(const AcvSet& acv_xi, const VarEstimate& est)
{
    const Index p = est.p();
    if (acv_xi.p() != p || est.beta.rows() != p * est.d)
        throw Error("innovation_cov: dimension mismatch between ACVs and VAR estimate");
    if (acv_xi.max_lag < est.d) throw Error("innovation_cov: ACVs do not cover the VAR order");
    Matrix cross(p * est.d, p);
    for (int l = 1; l <= est.d; ++l) cross.middleRows((l - 1) * p, p) = acv_xi.at(l);

    InnovationCovariance out;
    out.gamma = symmetrize(acv_xi.at(0) - est.beta.transpose() * cross);
    if (p > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(out.gamma, Eigen::EigenvaluesOnly);
        out.min_eigenvalue = es.eigenvalues().minCoeff();
        const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
        if (out.min_eigenvalue < -1e-8 * top)
            out.warning = "innovation covariance is indefinite (min eigenvalue " + std::to_string(out.min_eigenvalue) + ")";
    }
    return out;
}

PrecisionEstimate estimate_delta(const Matrix& gamma_hat, double eta)
{
    const Index p = gamma_hat.rows();
    if (gamma_hat.cols() != p) throw Error("estimate_delta: matrix must be square");
    if (eta < 0.0) throw Error("estimate_delta: eta must be nonnegative");
    PrecisionEstimate out;
    out.gamma_hat = gamma_hat;
    out.eta = eta;
    out.delta_check.resize(p, p);
    for (Index j = 0; j < p; ++j) {
        try {
            auto sol = solve_supcon_l1(SupConL1Problem<double>{gamma_hat, Vector::Unit(p, j), eta});
            out.delta_check.col(j) = sol.solution;
            out.reports.push_back(sol.report);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("estimate_delta: column " + std::to_string(j) + " infeasible for eta=" +
                                  std::to_string(eta) + ": " + e.what());
        }
    }
    out.delta_hat.resize(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index k = 0; k < p; ++k) {
            const double a = out.delta_check(i, k);
            const double b = out.delta_check(k, i);
            out.delta_hat(i, k) = std::abs(a) <= std::abs(b) ? a : b;
        }
    }
    return out;
}

UndirectedNetwork contemporaneous_network(const Matrix& delta_hat, double t_delta)
{
    return partial_correlation_network(delta_hat, t_delta);
}

LongRunEstimate longrun_matrix(const VarEstimate& est, double t, const Matrix& delta_hat)
{
    const Index p = est.p();
    if (delta_hat.rows() != p || delta_hat.cols() != p) throw Error("longrun_matrix: dimension mismatch");
    LongRunEstimate lr;
    lr.a_of_one = Matrix::Identity(p, p);
    for (const auto& a : est.transitions(t)) lr.a_of_one -= a;
    lr.omega_hat = 2.0 * kPi * lr.a_of_one.transpose() * delta_hat * lr.a_of_one;
    return lr;
}

UndirectedNetwork longrun_network(const LongRunEstimate& lr, double t_omega)
{
    return partial_correlation_network(lr.omega_hat, t_omega);
}

BoolMatrix structural_longrun_support(const std::vector<Matrix>& lags, const Matrix& delta)
{
    const Index p = delta.rows();
    Matrix total = Matrix::Zero(p, p);
    for (const auto& a : lags) total += a;
    const BoolMatrix causal = total.array() != 0.0; // causal(j, i): sum_l A_l(j, i) != 0
    const BoolMatrix linked = delta.array() != 0.0;

    BoolMatrix support = BoolMatrix::Constant(p, p, false);
    for (Index i = 0; i < p; ++i) {
        support(i, i) = true;
        for (Index k = i + 1; k < p; ++k) {
            bool hit = linked(i, k) || linked(k, i) || causal(k, i) || causal(i, k);
            for (Index j = 0; j < p && !hit; ++j) {
                if (j == i || j == k) continue;
                hit = (causal(j, i) && linked(k, j)) || (causal(j, k) && linked(i, j)) || (causal(j, i) && causal(j, k));
            }
            for (Index j = 0; j < p && !hit; ++j) {
                if (j == i || j == k || !causal(j, i)) continue;
                for (Index jj = 0; jj < p && !hit; ++jj) {
                    if (jj == i || jj == k) continue;
                    hit = causal(jj, k) && linked(j, jj);
                }
            }
            support(i, k) = hit;
            support(k, i) = hit;
        }
    }
    return support;
}

} // namespace fnets
