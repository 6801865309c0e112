#include <doctest.h>

#include "fnets/forecast.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <numeric>

using namespace fnets;

namespace {

AcvSet acv_from_positive_lags(const std::vector<Matrix>& pos)
{
    AcvSet acv;
    acv.component = AcvComponent::chi;
    acv.max_lag = static_cast<Index>(pos.size()) - 1;
    acv.gammas.resize(2 * pos.size() - 1);
    for (Index l = 0; l <= acv.max_lag; ++l) {
        acv.at(l) = pos[static_cast<std::size_t>(l)];
        acv.at(-l) = pos[static_cast<std::size_t>(l)].transpose();
    }
    return acv;
}

std::vector<Index> identity_order(Index p)
{
    std::vector<Index> v(static_cast<std::size_t>(p));
    std::iota(v.begin(), v.end(), Index(0));
    return v;
}

VarEstimate var_from_lags(const std::vector<Matrix>& lags)
{
    VarEstimate est;
    est.d = static_cast<int>(lags.size());
    const Index p = lags.front().rows();
    est.beta.resize(p * est.d, p);
    for (int l = 0; l < est.d; ++l) est.beta.middleRows(l * p, p) = lags[static_cast<std::size_t>(l)].transpose();
    return est;
}

} // namespace

TEST_CASE("restricted forecast: in-sample estimator is an idempotent projection")
{
    std::mt19937_64 rng(1);
    const Matrix x = testing::gaussian_matrix(rng, 6, 80);
    const AcvSet acv = sample_acv(x, 2);
    const CommonForecast fc = restricted_common_forecast(x, acv, 2, 0);
    CHECK(fc.horizons.empty());
    const Matrix e = restricted_model(acv, 2).loadings;
    CHECK(testing::max_abs_diff(fc.insample, e * e.transpose() * x) < 1e-12);
    const CommonForecast again = restricted_common_forecast(fc.insample, acv, 2, 0);
    CHECK(testing::max_abs_diff(again.insample, fc.insample) < 1e-10);
}

TEST_CASE("restricted forecast: zero lagged common ACV gives a zero forecast")
{
    Matrix g0 = Matrix::Zero(4, 4);
    g0(0, 0) = 3.0;
    g0(1, 1) = 2.0;
    const AcvSet acv = acv_from_positive_lags({g0, Matrix::Zero(4, 4)});
    std::mt19937_64 rng(2);
    const CommonForecast fc = restricted_common_forecast(testing::gaussian_matrix(rng, 4, 10), acv, 2, 1);
    CHECK(fc.horizons.at(0).isZero(0.0));
}

TEST_CASE("restricted forecast: observations in the factor span are reconstructed")
{
    std::mt19937_64 rng(3);
    const Matrix load = testing::gaussian_matrix(rng, 5, 2);
    const Matrix g0 = load * load.transpose();
    const AcvSet acv = acv_from_positive_lags({g0, 0.5 * g0});
    const Matrix x = load * testing::gaussian_matrix(rng, 2, 12);
    const CommonForecast fc = restricted_common_forecast(x, acv, 2, 1);
    CHECK((fc.insample.col(11) - x.col(11)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THROWS_AS(restricted_model(acv, 3), Error);
    CHECK_THROWS_AS(restricted_common_forecast(x, acv, 2, 2), Error);
}

TEST_CASE("block partition: remainder joins the final block")
{
    const auto blocks = partition_blocks(identity_order(7), 2);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0] == std::vector<Index>{0, 1, 2});
    CHECK(blocks[1] == std::vector<Index>{3, 4, 5, 6});
    CHECK_THROWS_AS(partition_blocks(identity_order(2), 2), Error);
    CHECK_THROWS_AS(partition_blocks(identity_order(4), 0), Error);
}

TEST_CASE("block VAR: population AR(1) block is recovered")
{
    Matrix a(2, 2);
    a << 0.6, 0.2, -0.1, 0.4;
    const auto pop = oracle::var1_population_acv(a, Matrix::Identity(2, 2), 3);
    const AcvSet acv = acv_from_positive_lags(pop);
    for (int s_max : {1, 3}) {
        const auto blocks = fit_block_var(acv, 1, s_max, 100000, identity_order(2));
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0].order == 1);
        CHECK(testing::max_abs_diff(blocks[0].coefs[0], a) < 1e-8);
    }
}

TEST_CASE("block VAR: white common ACVs give zero coefficients and order one")
{
    const AcvSet acv = acv_from_positive_lags({Matrix::Identity(4, 4), Matrix::Zero(4, 4), Matrix::Zero(4, 4)});
    const auto blocks = fit_block_var(acv, 1, 2, 200, identity_order(4));
    REQUIRE(blocks.size() == 2);
    for (const auto& b : blocks) {
        CHECK(b.order == 1);
        CHECK(b.coefs[0].isZero(0.0));
    }
}

TEST_CASE("block VAR: s_max = 1 forces first order everywhere")
{
    std::mt19937_64 rng(4);
    const AcvSet acv = sample_acv(testing::var1_path(rng, 0.5 * Matrix::Identity(6, 6), 300), 1);
    for (const auto& b : fit_block_var(acv, 2, 1, 300, identity_order(6))) CHECK(b.order == 1);
}

TEST_CASE("unrestricted forecast: one permutation on one block equals the single-ordering path")
{
    std::mt19937_64 rng(5);
    const Matrix x = testing::var1_path(rng, 0.6 * Matrix::Identity(3, 3), 120);
    const AcvSet acv = sample_acv(x, 3);
    UnrestrictedOptions opt;
    opt.n_perm = 1;
    opt.truncation_lag = 5;
    opt.block_max_order = 3;
    const CommonForecast avg = unrestricted_common_forecast(x, acv, 2, 2, opt);
    const CommonForecast one = unrestricted_single(x, acv, 2, 2, 5, 3, identity_order(3));
    CHECK(avg.insample == one.insample);
    for (std::size_t h = 0; h < 2; ++h) CHECK(avg.horizons[h] == one.horizons[h]);
}

TEST_CASE("unrestricted forecast: no common dynamics collapses to a static projection")
{
    std::mt19937_64 rng(6);
    const Index p = 4, n = 60;
    const Matrix x = testing::gaussian_matrix(rng, p, n);
    AcvSet acv = sample_acv(x, 2);
    acv.at(1).setZero();
    acv.at(-1).setZero();
    acv.at(2).setZero();
    acv.at(-2).setZero();
    const CommonForecast fc = unrestricted_single(x, acv, 1, 2, 2, 1, identity_order(p));
    for (const auto& h : fc.horizons) CHECK(h.cwiseAbs().maxCoeff() < 1e-12);

    // Filtered data equal x from t = 1 on; with K = 2 the in-sample fit at t is the leading
    // eigen-projection of x_t, which does not depend on the eigenvector signs.
    const Index len = n - 1;
    const Matrix z = x.rightCols(len);
    const SymEigen eig = sym_eigen_desc(z * z.transpose() / static_cast<double>(len));
    const Vector e = eig.vectors.col(0);
    for (double sign : {1.0, -1.0}) {
        const Vector es = sign * e;
        CHECK((fc.insample.col(n - 1) - es * es.dot(x.col(n - 1))).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("unrestricted forecast: averaging is reproducible for a fixed seed")
{
    std::mt19937_64 rng(7);
    const Matrix x = testing::var1_path(rng, 0.5 * Matrix::Identity(6, 6), 150);
    const AcvSet acv = sample_acv(x, 3);
    UnrestrictedOptions opt;
    opt.n_perm = 4;
    opt.truncation_lag = 6;
    opt.block_max_order = 2;
    opt.seed = 11;
    const CommonForecast a = unrestricted_common_forecast(x, acv, 1, 2, opt);
    const CommonForecast b = unrestricted_common_forecast(x, acv, 1, 2, opt);
    CHECK(a.insample == b.insample);
    CHECK(a.horizons[1] == b.horizons[1]);
    opt.truncation_lag = 1;
    CHECK_THROWS_AS(unrestricted_common_forecast(x, acv, 1, 2, opt), Error);
}

TEST_CASE("idiosyncratic forecast: recursion instances")
{
    std::mt19937_64 rng(8);
    const Matrix xi = testing::gaussian_matrix(rng, 3, 10);
    const Matrix a1 = 0.3 * testing::gaussian_matrix(rng, 3, 3);
    const Matrix a2 = 0.3 * testing::gaussian_matrix(rng, 3, 3);

    for (const auto& v : idio_forecast(var_from_lags({Matrix::Zero(3, 3)}), xi, 3)) CHECK(v.isZero(0.0));

    const auto two = idio_forecast(var_from_lags({a1}), xi, 2);
    const Vector a1_xi = a1 * xi.col(9);
    CHECK(two[1] == Vector(a1 * a1_xi));

    const auto one = idio_forecast(var_from_lags({a1, a2}), xi, 1);
    Vector expect = a1 * xi.col(9);
    expect.noalias() += a2 * xi.col(8);
    CHECK(one[0] == expect);
    CHECK_THROWS_AS(idio_forecast(var_from_lags({a1}), xi, 0), Error);
}

TEST_CASE("forecast assembly: total is the exact sum")
{
    std::mt19937_64 rng(9);
    CommonForecast common;
    common.insample = Matrix::Zero(3, 5);
    std::vector<Vector> xi;
    for (int h = 0; h < 3; ++h) {
        common.horizons.push_back(testing::gaussian_matrix(rng, 3, 1));
        xi.push_back(testing::gaussian_matrix(rng, 3, 1));
    }
    const ForecastResult r = assemble_forecast(common, xi, CommonMethod::restricted);
    for (std::size_t h = 0; h < 3; ++h) CHECK(r.x[h] == Vector(common.horizons[h] + xi[h]));
    xi.pop_back();
    CHECK_THROWS_AS(assemble_forecast(common, xi, CommonMethod::restricted), Error);
}
