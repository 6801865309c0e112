#pragma once

#include "fnets/spectral.hpp"

#include <string>

namespace fnets {

enum class FactorMethod { user, eigen_ratio };

struct FactorCounts {
    int q = 0;
    int r = 0;
    FactorMethod q_method = FactorMethod::user;
    FactorMethod r_method = FactorMethod::user;
    std::string warning; // set when q > r with both estimated
};

std::string to_string(FactorMethod m);

/// argmax_{1<=j<=jmax} v_j / v_{j+1} over a descending sequence, first index on ties.
/// Values below 1e-12 are floored at 1e-12 before division.
int eigen_ratio_argmax(const Vector& descending, int jmax);

/// Number of dynamic factors from frequency-averaged dynamic eigenvalues.
int estimate_q(const SpectralEstimate& spec, int qmax);

/// Number of static factors from the eigenvalues of Gamma(0).
int estimate_r(const AcvSet& acv, int rmax);

/// min(10, floor(p / 2)), at least 1.
int default_max_factors(Index p);

} // namespace fnets
