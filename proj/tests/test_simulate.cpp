#include <doctest.h>

#include "fnets/simulate.hpp"
#include "fnets/spectral.hpp"
#include "support.hpp"

#include <cmath>

using namespace fnets;

namespace {

DgpSpec make_spec(const std::string& tag, Index n, Index p, std::uint64_t seed)
{
    DgpSpec s = parse_dgp(tag);
    s.n = n;
    s.p = p;
    s.seed = seed;
    return s;
}

double sample_variance(const Eigen::Ref<const Eigen::RowVectorXd>& row)
{
    return (row.array() - row.mean()).square().sum() / static_cast<double>(row.size() - 1);
}

} // namespace

TEST_CASE("dgp tags parse and print")
{
    const DgpSpec s = parse_dgp("c2xe3");
    CHECK(s.common == CommonDgp::C2);
    CHECK(s.idio == IdioDgp::E3);
    CHECK(dgp_tag(s) == "C2xE3");
    CHECK_THROWS_AS(parse_dgp("C4xE1"), Error);
    CHECK_THROWS_AS(parse_dgp("C1"), Error);
}

TEST_CASE("transition graph: average out-degree near one")
{
    double edges = 0.0;
    const int seeds = 50;
    const Index p = 100;
    for (int s = 0; s < seeds; ++s) edges += (gen_idio(make_spec("C0xE1", 10, p, 900 + s)).truth.A1.array() != 0.0).count();
    const double per_node = edges / (seeds * static_cast<double>(p));
    CHECK(per_node >= 0.7);
    CHECK(per_node <= 1.3);
}

TEST_CASE("idiosyncratic sample: truth is consistent and stable")
{
    const IdioSample s = gen_idio(make_spec("C0xE2", 50, 30, 4));
    CHECK(spectral_radius(s.truth.A1) < 1.0);
    CHECK(testing::max_abs_diff(s.truth.gamma * s.truth.delta, Matrix::Identity(30, 30)) < 1e-10);
    const Matrix a1 = Matrix::Identity(30, 30) - s.truth.A1;
    CHECK(testing::max_abs_diff(s.truth.omega, 2.0 * kPi * a1.transpose() * s.truth.delta * a1) < 1e-12);
    CHECK(s.truth.delta.diagonal().isConstant(1.5));
    CHECK(s.xi.allFinite());
}

TEST_CASE("heavy-tailed innovations have unit variance")
{
    const IdioSample s = gen_idio(make_spec("C0xE3", 2000, 50, 8));
    const Matrix eps = s.xi.rightCols(1999) - s.truth.A1 * s.xi.leftCols(1999);
    const double var = (eps.array() - eps.mean()).square().sum() / static_cast<double>(eps.size() - 1);
    CHECK(var >= 0.9);
    CHECK(var <= 1.1);
}

TEST_CASE("generation is reproducible for a fixed seed")
{
    const DgpSpec spec = make_spec("C1xE2", 80, 12, 21);
    const IdioSample a = gen_idio(spec);
    const IdioSample b = gen_idio(spec);
    CHECK(a.xi == b.xi);
    CHECK(gen_common(spec, a.xi) == gen_common(spec, b.xi));
    const IdioSample c = gen_idio(make_spec("C1xE2", 80, 12, 22));
    CHECK(a.xi != c.xi);
}

TEST_CASE("common component: oracle setting and C2 calibration")
{
    const DgpSpec c0 = make_spec("C0xE1", 40, 6, 1);
    CHECK(gen_common(c0, gen_idio(c0).xi).isZero(0.0));

    const DgpSpec c2 = make_spec("C2xE1", 300, 20, 2);
    const Matrix xi = gen_idio(c2).xi;
    const Matrix chi = gen_common(c2, xi);
    for (Index i = 0; i < 20; ++i) CHECK(std::abs(sample_variance(chi.row(i)) / sample_variance(xi.row(i)) - 1.0) < 1e-6);
}

TEST_CASE("common component: C1 spectrum has dynamic rank q")
{
    const DgpSpec c1 = make_spec("C1xE1", 4000, 15, 3);
    const Matrix chi = gen_common(c1, gen_idio(c1).xi);
    const int m = 20;
    const auto spec = spectral_density(sample_acv(chi, m), m);
    Vector avg = Vector::Zero(15);
    for (const auto& s : spec.matrices) avg += hermitian_eigen_desc(s).values;
    CHECK(avg(2) < 0.05 * avg(1));
    CHECK(avg(1) > 0.0);
}

TEST_CASE("matrix errors: exact, zero and doubled estimates")
{
    std::mt19937_64 rng(5);
    const Matrix truth = testing::gaussian_matrix(rng, 5, 5);
    const auto same = score_matrix(truth, truth);
    CHECK(same.frobenius == 0.0);
    CHECK(same.spectral == 0.0);
    const auto zero = score_matrix(Matrix::Zero(5, 5), truth);
    CHECK(zero.frobenius == doctest::Approx(1.0));
    CHECK(zero.spectral == doctest::Approx(1.0));
    const auto twice = score_matrix(2.0 * truth, truth);
    CHECK(twice.frobenius == doctest::Approx(1.0));
    CHECK(twice.spectral == doctest::Approx(1.0));
    CHECK_THROWS_AS(score_matrix(truth, Matrix::Zero(5, 5)), Error);
}

TEST_CASE("roc: exact support, full sweep and a small enumeration")
{
    std::mt19937_64 rng(6);
    Matrix truth = Matrix::Zero(6, 6);
    truth(0, 1) = truth(2, 3) = truth(4, 4) = 1.0;
    const RocCurve exact = roc_curve(truth * 0.7, truth, false);
    bool corner = false;
    for (const auto& pt : exact.points) corner = corner || (pt.fpr == 0.0 && pt.tpr == 1.0);
    CHECK(corner);
    CHECK(exact.tpr_at_5pct == 1.0);
    CHECK(exact.auc == doctest::Approx(1.0));

    const Matrix noisy = testing::gaussian_matrix(rng, 6, 6);
    const RocCurve sweep = roc_curve(noisy, truth, false);
    CHECK(sweep.points.back().fpr == 1.0);
    CHECK(sweep.points.back().tpr == 1.0);
    for (std::size_t k = 1; k < sweep.points.size(); ++k) CHECK(sweep.points[k].fpr >= sweep.points[k - 1].fpr);

    Matrix t2 = Matrix::Zero(2, 2);
    t2(0, 1) = 1.0;
    Matrix e2(2, 2);
    e2 << 0.3, 0.9, 0.2, 0.1;
    CHECK(roc_curve(e2, t2, false).auc == doctest::Approx(1.0));
    CHECK_THROWS_AS(roc_curve(e2, Matrix::Zero(2, 2), false), Error);
}

TEST_CASE("roc: off-diagonal scoring uses the upper triangle only")
{
    Matrix truth = Matrix::Identity(3, 3);
    truth(0, 2) = truth(2, 0) = 1.0;
    Matrix est = Matrix::Zero(3, 3);
    est(0, 2) = 0.5;
    est(1, 0) = 9.0; // lower triangle, ignored
    const RocCurve c = roc_curve(est, truth, true);
    CHECK(c.tpr_at_5pct == 1.0);
}

TEST_CASE("tpr at fpr interpolates linearly")
{
    const std::vector<RocPoint> pts{{0, 0.0, 0.0}, {0, 0.1, 0.8}, {0, 1.0, 1.0}};
    CHECK(tpr_at_fpr(pts, 0.05) == doctest::Approx(0.4));
    CHECK(tpr_at_fpr(pts, 0.1) == doctest::Approx(0.8));
}

TEST_CASE("forecast errors: exact, zero and negated forecasts")
{
    const Vector x = (Vector(3) << 1.0, -2.0, 0.5).finished();
    for (auto mode : {ForecastErrorMode::predictor_l2, ForecastErrorMode::predictor_max, ForecastErrorMode::realized_l2,
                      ForecastErrorMode::realized_max}) {
        CHECK(forecast_errors(x, x, mode) == 0.0);
    }
    CHECK(forecast_errors(Vector::Zero(3), x, ForecastErrorMode::predictor_l2) == doctest::Approx(1.0));
    CHECK(forecast_errors(Vector::Zero(3), x, ForecastErrorMode::predictor_max) == doctest::Approx(1.0));
    CHECK(forecast_errors(-x, x, ForecastErrorMode::predictor_l2) == doctest::Approx(4.0));
    CHECK(forecast_errors(-x, x, ForecastErrorMode::realized_l2) == doctest::Approx(4.0 * x.norm()));
    CHECK_THROWS_AS(forecast_errors(x, Vector::Zero(3), ForecastErrorMode::predictor_l2), Error);

    const Matrix m = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    CHECK(insample_error(m, m) == 0.0);
    CHECK(insample_error(Matrix::Zero(2, 2), m) == doctest::Approx(1.0));
}
