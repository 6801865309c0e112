#pragma once

#include "fnets/common.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing {

using fnets::Index;
using fnets::Matrix;
using fnets::Vector;

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("fnets_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols)
{
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = z(rng);
    return m;
}

/// Stationary VAR(1) sample path, p x n, after a burn-in of 200 steps.
inline Matrix var1_path(std::mt19937_64& rng, const Matrix& A, Index n)
{
    const Index p = A.rows();
    std::normal_distribution<double> z;
    Vector state = Vector::Zero(p);
    Matrix out(p, n);
    for (Index t = -200; t < n; ++t) {
        Vector e(p);
        for (Index i = 0; i < p; ++i) e(i) = z(rng);
        state = A * state + e;
        if (t >= 0) out.col(t) = state;
    }
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace testing
