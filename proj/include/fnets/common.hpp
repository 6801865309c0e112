#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fnets {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised for every contract violation or numerical failure in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Prefixes the message of a propagated error with a stage tag.
[[noreturn]] inline void rethrow_tagged(const std::string& stage, const std::exception& e)
{
    throw Error("[" + stage + "] " + e.what());
}

enum class Solver { lasso, dantzig };
enum class CommonMethod { restricted, unrestricted };

std::string to_string(Solver s);
std::string to_string(CommonMethod m);
Solver parse_solver(const std::string& s);
CommonMethod parse_common_method(const std::string& s);

/// Entrywise hard threshold with strict inequality: |x| > t survives.
template <typename Derived>
MatrixX<typename Derived::Scalar> hard_threshold(const Eigen::MatrixBase<Derived>& m,
                                                 typename Derived::Scalar t)
{
    using Scalar = typename Derived::Scalar;
    return m.unaryExpr([t](Scalar v) { return std::abs(v) > t ? v : Scalar(0); });
}

/// Symmetric part (A + A^T) / 2.
template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& m)
{
    return (m + m.transpose()) / typename Derived::Scalar(2);
}

/// Eigen-pairs of a real symmetric matrix, eigenvalues descending.
struct SymEigen {
    Vector values;
    Matrix vectors;
};
SymEigen sym_eigen_desc(const Matrix& s);

} // namespace fnets
