#include "fnets/factor_numbers.hpp"

#include <algorithm>

namespace fnets {

std::string to_string(FactorMethod m)
{
    return m == FactorMethod::user ? "user" : "eigen_ratio";
}

int eigen_ratio_argmax(const Vector& descending, int jmax)
{
    if (jmax < 1 || jmax + 1 > descending.size()) throw Error("eigen_ratio_argmax: need jmax+1 eigenvalues");
    int best = 1;
    double best_ratio = -1.0;
    for (int j = 1; j <= jmax; ++j) {
        const double num = std::max(descending(j - 1), 1e-12);
        const double den = std::max(descending(j), 1e-12);
        const double ratio = num / den;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = j;
        }
    }
    return best;
}

int estimate_q(const SpectralEstimate& spec, int qmax)
{
    const Index p = spec.p();
    if (qmax < 1 || qmax >= p) throw Error("estimate_q: qmax must satisfy 1 <= qmax < p");
    Vector avg = Vector::Zero(qmax + 1);
    for (const auto& s : spec.matrices) avg += hermitian_eigen_desc(s).values.head(qmax + 1);
    avg /= static_cast<double>(spec.matrices.size());
    return eigen_ratio_argmax(avg, qmax);
}

int estimate_r(const AcvSet& acv, int rmax)
{
    const Index p = acv.p();
    if (rmax < 1 || rmax >= p) throw Error("estimate_r: rmax must satisfy 1 <= rmax < p");
    const SymEigen eig = sym_eigen_desc(symmetrize(acv.at(0)));
    return eigen_ratio_argmax(eig.values.head(rmax + 1), rmax);
}

int default_max_factors(Index p)
{
    return static_cast<int>(std::max<Index>(1, std::min<Index>(10, p / 2)));
}

} // namespace fnets
