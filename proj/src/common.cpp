#include "fnets/common.hpp"

namespace fnets {

std::string to_string(Solver s)
{
    return s == Solver::lasso ? "lasso" : "dantzig";
}

std::string to_string(CommonMethod m)
{
    return m == CommonMethod::restricted ? "restricted" : "unrestricted";
}

Solver parse_solver(const std::string& s)
{
    if (s == "lasso") return Solver::lasso;
    if (s == "dantzig") return Solver::dantzig;
    throw Error("unknown solver '" + s + "' (expected lasso|dantzig)");
}

CommonMethod parse_common_method(const std::string& s)
{
    if (s == "restricted") return CommonMethod::restricted;
    if (s == "unrestricted") return CommonMethod::unrestricted;
    throw Error("unknown common-component method '" + s + "' (expected restricted|unrestricted)");
}

SymEigen sym_eigen_desc(const Matrix& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed");
    const Index k = s.rows();
    SymEigen out{es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
    // Deterministic sign: largest-magnitude entry positive.
    for (Index j = 0; j < k; ++j) {
        Index imax = 0;
        out.vectors.col(j).cwiseAbs().maxCoeff(&imax);
        if (out.vectors(imax, j) < 0) out.vectors.col(j) *= -1.0;
    }
    return out;
}

} // namespace fnets
