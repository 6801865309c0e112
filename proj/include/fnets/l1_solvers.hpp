#pragma once

// Convex solvers for the two l1 programs used throughout:
//   quadratic:   min_m  m^T G m - 2 m^T g + lambda |m|_1      (G symmetric PSD)
//   sup-norm:    min_m  |m|_1  s.t.  |A m - b|_inf <= eps
// Both are templated on the scalar type; everything else in the library uses double.

#include "fnets/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fnets {

struct SolverReport {
    int iterations = 0;
    double kkt_residual = 0.0;
    double objective = 0.0;
    bool converged = false;
};

template <typename Scalar>
struct L1Solution {
    VectorX<Scalar> solution;
    SolverReport report;
};

template <typename Scalar>
struct QuadL1Problem {
    MatrixX<Scalar> G;
    VectorX<Scalar> g;
    Scalar lambda = 0;
};

template <typename Scalar>
struct SupConL1Problem {
    MatrixX<Scalar> A;
    VectorX<Scalar> b;
    Scalar eps = 0;
};

struct QuadL1Options {
    double tol = 1e-7;
    int maxiter = 20000;
    bool check_psd = true;
};

/// Thrown when the sup-norm constraint set is empty.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar t)
{
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return Scalar(0);
}

template <typename Scalar>
Scalar quad_l1_objective(const QuadL1Problem<Scalar>& prob, const VectorX<Scalar>& m)
{
    return m.dot(prob.G * m) - Scalar(2) * m.dot(prob.g) + prob.lambda * m.template lpNorm<1>();
}

/// max KKT violation of the quadratic program at m: on the zero set
/// (|grad| - lambda)_+, on the support |grad + lambda sign(m)|, grad = 2(Gm - g).
template <typename Scalar>
Scalar quad_l1_kkt_residual(const QuadL1Problem<Scalar>& prob, const VectorX<Scalar>& m)
{
    const VectorX<Scalar> grad = Scalar(2) * (prob.G * m - prob.g);
    Scalar worst = 0;
    for (Index i = 0; i < m.size(); ++i) {
        const Scalar v = m(i) == Scalar(0) ? std::max(Scalar(0), std::abs(grad(i)) - prob.lambda)
                                           : std::abs(grad(i) + prob.lambda * (m(i) > 0 ? Scalar(1) : Scalar(-1)));
        worst = std::max(worst, v);
    }
    return worst;
}

template <typename Scalar>
void check_symmetric_psd(const MatrixX<Scalar>& G, bool check_psd)
{
    const Scalar scale = std::max(Scalar(1), G.cwiseAbs().maxCoeff());
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10) * scale)
        throw Error("solve_quad_l1: Gram matrix is not symmetric");
    if (check_psd && G.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(G, Eigen::EigenvaluesOnly);
        const Scalar lo = es.eigenvalues().minCoeff();
        const Scalar hi = std::max(Scalar(0), es.eigenvalues().maxCoeff());
        if (lo < Scalar(-1e-8) * std::max(hi, Scalar(1e-300)))
            throw Error("solve_quad_l1: Gram matrix is not positive semi-definite");
    }
}

/// Solves the stationarity equations G_SS m_S = g_S - (lambda/2) sign(m_S) on the support S of m.
/// The refined point is returned only if it is no worse than m in both KKT residual and
/// objective; a sign flip under a positive penalty shows up as a KKT violation.
template <typename Scalar>
std::optional<VectorX<Scalar>> polish_on_support(const QuadL1Problem<Scalar>& prob, const VectorX<Scalar>& m)
{
    std::vector<Index> support;
    for (Index i = 0; i < m.size(); ++i)
        if (m(i) != Scalar(0)) support.push_back(i);
    if (support.empty()) return std::nullopt;
    const auto s = static_cast<Index>(support.size());
    MatrixX<Scalar> gs(s, s);
    VectorX<Scalar> rhs(s);
    for (Index a = 0; a < s; ++a) {
        const Index i = support[static_cast<std::size_t>(a)];
        for (Index b = 0; b < s; ++b) gs(a, b) = prob.G(i, support[static_cast<std::size_t>(b)]);
        rhs(a) = prob.g(i) - prob.lambda / Scalar(2) * (m(i) > 0 ? Scalar(1) : Scalar(-1));
    }
    const Eigen::LDLT<MatrixX<Scalar>> ldlt(gs);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    const VectorX<Scalar> ms = ldlt.solve(rhs);
    if (!ms.allFinite()) return std::nullopt;
    VectorX<Scalar> refined = VectorX<Scalar>::Zero(m.size());
    for (Index a = 0; a < s; ++a) refined(support[static_cast<std::size_t>(a)]) = ms(a);
    if (quad_l1_kkt_residual(prob, refined) > quad_l1_kkt_residual(prob, m)) return std::nullopt;
    if (quad_l1_objective(prob, refined) > quad_l1_objective(prob, m)) return std::nullopt;
    return refined;
}

/// Cyclic coordinate descent with exact soft-threshold updates in natural index order,
/// followed by an exact solve on the detected support once the sweeps have converged.
template <typename Scalar>
L1Solution<Scalar> solve_quad_l1(const QuadL1Problem<Scalar>& prob, const QuadL1Options& opt = {},
                                 const std::optional<VectorX<Scalar>>& init = std::nullopt)
{
    const Index k = prob.G.rows();
    if (prob.G.cols() != k || prob.g.size() != k) throw Error("solve_quad_l1: dimension mismatch");
    if (prob.lambda < 0) throw Error("solve_quad_l1: lambda must be nonnegative");
    check_symmetric_psd(prob.G, opt.check_psd);
    for (Index i = 0; i < k; ++i)
        if (!(prob.G(i, i) > 0))
            throw Error("solve_quad_l1: nonpositive diagonal entry G(" + std::to_string(i) + "," + std::to_string(i) + ")");

    const Scalar half_lambda = prob.lambda / Scalar(2);
    const Scalar tol = static_cast<Scalar>(opt.tol);
    VectorX<Scalar> m = init ? *init : VectorX<Scalar>::Zero(k);
    if (m.size() != k) throw Error("solve_quad_l1: initial point has wrong size");
    VectorX<Scalar> gm = prob.G * m;

    L1Solution<Scalar> out;
    Scalar prev_obj = m.dot(gm) - Scalar(2) * m.dot(prob.g) + prob.lambda * m.template lpNorm<1>();
    int iter = 0;
    for (; iter < opt.maxiter; ++iter) {
        Scalar max_change = 0;
        for (Index i = 0; i < k; ++i) {
            const Scalar gii = prob.G(i, i);
            const Scalar z = prob.g(i) - (gm(i) - gii * m(i));
            const Scalar updated = soft_threshold(z, half_lambda) / gii;
            const Scalar delta = updated - m(i);
            if (delta != Scalar(0)) {
                gm.noalias() += delta * prob.G.col(i);
                m(i) = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        const Scalar obj = m.dot(gm) - Scalar(2) * m.dot(prob.g) + prob.lambda * m.template lpNorm<1>();
        if (obj > prev_obj + Scalar(1e-10) * (Scalar(1) + std::abs(prev_obj)))
            throw Error("solve_quad_l1: objective increased during a sweep");
        prev_obj = obj;
        if (max_change <= tol * (Scalar(1) + m.template lpNorm<Eigen::Infinity>())) {
            if (quad_l1_kkt_residual(prob, m) <= Scalar(10) * tol) {
                ++iter;
                out.report.converged = true;
                if (auto refined = polish_on_support(prob, m)) m = std::move(*refined);
                break;
            }
        }
    }
    for (Index i = 0; i < k; ++i)
        if (std::abs(m(i)) <= Scalar(1e-12)) m(i) = 0;
    out.report.iterations = iter;
    out.report.kkt_residual = static_cast<double>(quad_l1_kkt_residual(prob, m));
    out.report.objective = static_cast<double>(quad_l1_objective(prob, m));
    out.solution = std::move(m);
    return out;
}

namespace detail {

/// Dense bounded-variable primal simplex for
///   min c^T x  s.t.  M x = 0,  lo <= x <= hi
/// starting from a basis of artificial columns. Dantzig pricing with a switch to
/// Bland's rule after a run of degenerate pivots.
template <typename Scalar>
class BoundedSimplex {
public:
    static constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();

    BoundedSimplex(MatrixX<Scalar> tableau, std::vector<Index> basis, VectorX<Scalar> x, VectorX<Scalar> lo,
                   VectorX<Scalar> hi)
        : T_(std::move(tableau)), basis_(std::move(basis)), x_(std::move(x)), lo_(std::move(lo)), hi_(std::move(hi))
    {
        is_basic_.assign(static_cast<std::size_t>(T_.cols()), -1);
        for (std::size_t r = 0; r < basis_.size(); ++r) is_basic_[static_cast<std::size_t>(basis_[r])] = static_cast<Index>(r);
    }

    /// Returns the number of pivots; max dual infeasibility is left in dual_residual().
    int run(const VectorX<Scalar>& cost, int max_iter)
    {
        const Index rows = T_.rows();
        const Index cols = T_.cols();
        int degenerate_run = 0;
        int iter = 0;
        for (; iter < max_iter; ++iter) {
            VectorX<Scalar> cb(rows);
            for (Index r = 0; r < rows; ++r) cb(r) = cost(basis_[static_cast<std::size_t>(r)]);
            const VectorX<Scalar> d = cost - (cb.transpose() * T_).transpose();
            const bool bland = degenerate_run > 50;

            Index enter = -1;
            Scalar best = dual_tol_;
            int dir = 0;
            for (Index j = 0; j < cols; ++j) {
                if (is_basic_[static_cast<std::size_t>(j)] >= 0 || lo_(j) == hi_(j)) continue;
                const bool at_lower = x_(j) <= lo_(j);
                Scalar score = 0;
                int jdir = 0;
                if (at_lower && d(j) < -dual_tol_) {
                    score = -d(j);
                    jdir = 1;
                } else if (!at_lower && d(j) > dual_tol_) {
                    score = d(j);
                    jdir = -1;
                }
                if (jdir == 0) continue;
                if (bland) {
                    enter = j;
                    dir = jdir;
                    break;
                }
                if (score > best) {
                    best = score;
                    enter = j;
                    dir = jdir;
                }
            }
            if (enter < 0) {
                dual_residual_ = 0;
                for (Index j = 0; j < cols; ++j) {
                    if (is_basic_[static_cast<std::size_t>(j)] >= 0 || lo_(j) == hi_(j)) continue;
                    const bool at_lower = x_(j) <= lo_(j);
                    dual_residual_ = std::max(dual_residual_, at_lower ? std::max(Scalar(0), -d(j)) : std::max(Scalar(0), d(j)));
                }
                return iter;
            }

            // Ratio test.
            Scalar theta = hi_(enter) - lo_(enter);
            Index leave_row = -1;
            bool leave_to_upper = false;
            for (Index r = 0; r < rows; ++r) {
                const Scalar alpha = dir * T_(r, enter);
                const Index b = basis_[static_cast<std::size_t>(r)];
                Scalar step = inf;
                bool to_upper = false;
                if (alpha > pivot_tol_) {
                    step = (x_(b) - lo_(b)) / alpha;
                } else if (alpha < -pivot_tol_ && hi_(b) < inf) {
                    step = (hi_(b) - x_(b)) / -alpha;
                    to_upper = true;
                } else {
                    continue;
                }
                step = std::max(step, Scalar(0));
                bool take = step < theta;
                if (!take && step == theta && leave_row >= 0) {
                    const Index cur = basis_[static_cast<std::size_t>(leave_row)];
                    take = bland ? b < cur : std::abs(T_(r, enter)) > std::abs(T_(leave_row, enter));
                } else if (!take && step == theta && leave_row < 0 && theta < inf) {
                    // Prefer a basis change over a bound flip of equal length.
                    take = true;
                }
                if (take) {
                    theta = step;
                    leave_row = r;
                    leave_to_upper = to_upper;
                }
            }
            if (theta == inf) throw Error("simplex: unbounded direction");

            degenerate_run = theta <= Scalar(1e-12) ? degenerate_run + 1 : 0;

            // Move along the edge.
            for (Index r = 0; r < rows; ++r) x_(basis_[static_cast<std::size_t>(r)]) -= dir * theta * T_(r, enter);
            x_(enter) += dir * theta;

            if (leave_row < 0) {
                // Bound flip of the entering variable.
                x_(enter) = dir > 0 ? hi_(enter) : lo_(enter);
                continue;
            }
            const Index leave = basis_[static_cast<std::size_t>(leave_row)];
            x_(leave) = leave_to_upper ? hi_(leave) : lo_(leave);
            pivot(leave_row, enter);
        }
        throw Error("simplex: iteration limit reached");
    }

    void fix_at_zero(Index j)
    {
        lo_(j) = 0;
        hi_(j) = 0;
    }

    const VectorX<Scalar>& x() const { return x_; }
    const std::vector<Index>& basis() const { return basis_; }
    Scalar dual_residual() const { return dual_residual_; }

private:
    void pivot(Index row, Index col)
    {
        const Scalar piv = T_(row, col);
        T_.row(row) /= piv;
        for (Index r = 0; r < T_.rows(); ++r) {
            if (r == row) continue;
            const Scalar f = T_(r, col);
            if (f != Scalar(0)) T_.row(r).noalias() -= f * T_.row(row);
        }
        const Index old = basis_[static_cast<std::size_t>(row)];
        is_basic_[static_cast<std::size_t>(old)] = -1;
        basis_[static_cast<std::size_t>(row)] = col;
        is_basic_[static_cast<std::size_t>(col)] = row;
    }

    MatrixX<Scalar> T_;
    std::vector<Index> basis_;
    std::vector<Index> is_basic_;
    VectorX<Scalar> x_;
    VectorX<Scalar> lo_;
    VectorX<Scalar> hi_;
    Scalar dual_residual_ = 0;
    Scalar dual_tol_ = Scalar(1e-10);
    Scalar pivot_tol_ = Scalar(1e-11);
};

} // namespace detail

/// Solves min |m|_1 s.t. |A m - b|_inf <= eps as a linear program in (m+, m-, w)
/// with w = A m bounded in [b - eps, b + eps]. Phase 1 minimises the artificial mass.
template <typename Scalar>
L1Solution<Scalar> solve_supcon_l1(const SupConL1Problem<Scalar>& prob, double tol = 1e-7)
{
    const Index rows = prob.A.rows();
    const Index k = prob.A.cols();
    if (prob.b.size() != rows) throw Error("solve_supcon_l1: dimension mismatch");
    if (prob.eps < 0) throw Error("solve_supcon_l1: eps must be nonnegative");

    // Columns: [m+ (k) | m- (k) | w (rows) | artificial (rows)].
    const Index cols = 2 * k + 2 * rows;
    const Index w0 = 2 * k;
    const Index a0 = 2 * k + rows;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    VectorX<Scalar> lo = VectorX<Scalar>::Zero(cols);
    VectorX<Scalar> hi = VectorX<Scalar>::Constant(cols, inf);
    VectorX<Scalar> x = VectorX<Scalar>::Zero(cols);
    VectorX<Scalar> sigma(rows);
    for (Index i = 0; i < rows; ++i) {
        lo(w0 + i) = prob.b(i) - prob.eps;
        hi(w0 + i) = prob.b(i) + prob.eps;
        const Scalar v = std::abs(lo(w0 + i)) <= std::abs(hi(w0 + i)) ? lo(w0 + i) : hi(w0 + i);
        x(w0 + i) = v;
        sigma(i) = v >= 0 ? Scalar(1) : Scalar(-1);
        x(a0 + i) = std::abs(v);
    }

    // Row i: A_i m+ - A_i m- - w_i + sigma_i a_i = 0. Basis = artificials, so
    // the tableau is the constraint matrix scaled row-wise by sigma_i.
    MatrixX<Scalar> T(rows, cols);
    T.leftCols(k) = prob.A;
    T.middleCols(k, k) = -prob.A;
    T.middleCols(w0, rows) = -MatrixX<Scalar>::Identity(rows, rows);
    T.rightCols(rows) = sigma.asDiagonal();
    for (Index i = 0; i < rows; ++i) T.row(i) *= sigma(i);
    std::vector<Index> basis(static_cast<std::size_t>(rows));
    for (Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = a0 + i;

    detail::BoundedSimplex<Scalar> lp(std::move(T), std::move(basis), std::move(x), std::move(lo), std::move(hi));
    const int max_iter = static_cast<int>(50 * (rows + 2 * k) + 1000);

    VectorX<Scalar> phase1_cost = VectorX<Scalar>::Zero(cols);
    phase1_cost.tail(rows).setOnes();
    int iters = lp.run(phase1_cost, max_iter);
    const Scalar infeas = lp.x().tail(rows).sum();
    const Scalar scale = std::max(Scalar(1), prob.b.template lpNorm<Eigen::Infinity>());
    if (infeas > Scalar(1e-9) * scale)
        throw InfeasibleError("solve_supcon_l1: infeasible (residual mass " + std::to_string(static_cast<double>(infeas)) +
                              "); eps is too small");
    for (Index i = 0; i < rows; ++i) lp.fix_at_zero(a0 + i);

    VectorX<Scalar> cost = VectorX<Scalar>::Zero(cols);
    cost.head(2 * k).setOnes();
    iters += lp.run(cost, max_iter);

    VectorX<Scalar> m = lp.x().head(k) - lp.x().segment(k, k);

    // Re-solve the basic variables from the original columns to shed tableau drift.
    {
        const auto& basis_now = lp.basis();
        MatrixX<Scalar> full(rows, cols);
        full.leftCols(k) = prob.A;
        full.middleCols(k, k) = -prob.A;
        full.middleCols(w0, rows) = -MatrixX<Scalar>::Identity(rows, rows);
        full.rightCols(rows) = sigma.asDiagonal();
        MatrixX<Scalar> B(rows, rows);
        VectorX<Scalar> xfull = lp.x();
        std::vector<char> basic(static_cast<std::size_t>(cols), 0);
        for (Index r = 0; r < rows; ++r) {
            B.col(r) = full.col(basis_now[static_cast<std::size_t>(r)]);
            basic[static_cast<std::size_t>(basis_now[static_cast<std::size_t>(r)])] = 1;
        }
        VectorX<Scalar> rhs = VectorX<Scalar>::Zero(rows);
        for (Index j = 0; j < cols; ++j)
            if (!basic[static_cast<std::size_t>(j)] && xfull(j) != Scalar(0)) rhs -= xfull(j) * full.col(j);
        Eigen::FullPivLU<MatrixX<Scalar>> lu(B);
        if (lu.isInvertible()) {
            const VectorX<Scalar> xb = lu.solve(rhs);
            for (Index r = 0; r < rows; ++r) xfull(basis_now[static_cast<std::size_t>(r)]) = xb(r);
            const VectorX<Scalar> refined = xfull.head(k) - xfull.segment(k, k);
            const Scalar viol_old = ((prob.A * m - prob.b).cwiseAbs().array() - prob.eps).maxCoeff();
            const Scalar viol_new = ((prob.A * refined - prob.b).cwiseAbs().array() - prob.eps).maxCoeff();
            if (viol_new <= std::max(viol_old, Scalar(0))) m = refined;
        }
    }
    for (Index i = 0; i < k; ++i)
        if (std::abs(m(i)) <= Scalar(1e-12)) m(i) = 0;

    L1Solution<Scalar> out;
    out.report.iterations = iters;
    out.report.objective = static_cast<double>(m.template lpNorm<1>());
    const Scalar viol = rows > 0 ? std::max(Scalar(0), ((prob.A * m - prob.b).cwiseAbs().array() - prob.eps).maxCoeff())
                                 : Scalar(0);
    out.report.kkt_residual = static_cast<double>(std::max(viol, lp.dual_residual()));
    out.report.converged = out.report.kkt_residual <= tol;
    out.solution = std::move(m);
    return out;
}

} // namespace fnets
