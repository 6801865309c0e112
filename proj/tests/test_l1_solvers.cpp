#include <doctest.h>

#include "fnets/l1_solvers.hpp"
#include "oracles.hpp"

#include <random>

using namespace fnets;

namespace {

Matrix random_psd(std::mt19937_64& rng, Index k, double ridge)
{
    std::normal_distribution<double> z;
    Matrix b(k + 2, k);
    for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < k; ++j) b(i, j) = z(rng);
    return b.transpose() * b / static_cast<double>(k) + ridge * Matrix::Identity(k, k);
}

Vector random_vector(std::mt19937_64& rng, Index k)
{
    std::normal_distribution<double> z;
    Vector v(k);
    for (Index i = 0; i < k; ++i) v(i) = z(rng);
    return v;
}

} // namespace

TEST_CASE("quad l1: unpenalised identity Gram returns g")
{
    const Vector g = (Vector(3) << 0.4, -1.2, 3.0).finished();
    auto sol = solve_quad_l1(QuadL1Problem<double>{Matrix::Identity(3, 3), g, 0.0});
    CHECK(sol.report.converged);
    CHECK((sol.solution - g).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("quad l1: identity Gram soft-thresholds at lambda / 2")
{
    const Vector g = (Vector(2) << 3.0, 0.1).finished();
    auto sol = solve_quad_l1(QuadL1Problem<double>{Matrix::Identity(2, 2), g, 1.0});
    CHECK(sol.solution(0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(sol.solution(1) == 0.0);
}

TEST_CASE("quad l1: kill condition lambda >= 2 |g|_inf gives exact zero")
{
    std::mt19937_64 rng(7);
    const Matrix G = random_psd(rng, 6, 0.2);
    const Vector g = random_vector(rng, 6);
    auto sol = solve_quad_l1(QuadL1Problem<double>{G, g, 2.0 * g.lpNorm<Eigen::Infinity>()});
    CHECK(sol.solution.isZero(0.0));
}

TEST_CASE("quad l1: matches proximal gradient and certifies KKT")
{
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Index k = 3 + rep % 8;
        const Matrix G = random_psd(rng, k, 0.3);
        const Vector g = random_vector(rng, k);
        const double lambda = 0.3;
        auto sol = solve_quad_l1(QuadL1Problem<double>{G, g, lambda});
        REQUIRE(sol.report.converged);
        CHECK(sol.report.kkt_residual <= 1e-6);
        const Vector ref = oracle::proximal_gradient(G, g, lambda);
        CHECK((sol.solution - ref).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("quad l1: coordinate permutation is equivariant")
{
    std::mt19937_64 rng(3);
    const Index k = 7;
    const Matrix G = random_psd(rng, k, 0.5);
    const Vector g = random_vector(rng, k);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(k);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + k, rng);
    auto a = solve_quad_l1(QuadL1Problem<double>{G, g, 0.2});
    auto b = solve_quad_l1(QuadL1Problem<double>{perm * G * perm.transpose(), perm * g, 0.2});
    CHECK((perm * a.solution - b.solution).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("quad l1: rejects nonpositive diagonal and asymmetric input")
{
    Matrix G = Matrix::Identity(2, 2);
    G(1, 1) = 0.0;
    CHECK_THROWS_AS(solve_quad_l1(QuadL1Problem<double>{G, Vector::Ones(2), 0.1}), Error);
    Matrix H = Matrix::Identity(2, 2);
    H(0, 1) = 0.5;
    CHECK_THROWS_AS(solve_quad_l1(QuadL1Problem<double>{H, Vector::Ones(2), 0.1}), Error);
}

TEST_CASE("quad l1: maxiter exhaustion reports non-convergence")
{
    std::mt19937_64 rng(5);
    const Matrix G = random_psd(rng, 10, 1e-3);
    QuadL1Options opt;
    opt.maxiter = 1;
    auto sol = solve_quad_l1(QuadL1Problem<double>{G, random_vector(rng, 10), 0.01}, opt);
    CHECK_FALSE(sol.report.converged);
    CHECK(sol.report.iterations == 1);
}

TEST_CASE("quad l1: works in single precision")
{
    const Eigen::VectorXf g = (Eigen::VectorXf(2) << 3.0f, 0.1f).finished();
    auto sol = solve_quad_l1(QuadL1Problem<float>{Eigen::MatrixXf::Identity(2, 2), g, 1.0f}, QuadL1Options{1e-5, 100, true});
    CHECK(sol.solution(0) == doctest::Approx(2.5f));
}

TEST_CASE("supcon l1: zero right-hand side gives zero")
{
    auto sol = solve_supcon_l1(SupConL1Problem<double>{Matrix::Identity(3, 3), Vector::Zero(3), 0.1});
    CHECK(sol.solution.isZero(0.0));
    CHECK(sol.report.objective == 0.0);
}

TEST_CASE("supcon l1: identity shrinks each coordinate by eps")
{
    const Vector b = (Vector(2) << 2.0, 0.0).finished();
    auto sol = solve_supcon_l1(SupConL1Problem<double>{Matrix::Identity(2, 2), b, 0.5});
    CHECK(sol.solution(0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(sol.solution(1) == 0.0);
    CHECK(sol.report.converged);
}

TEST_CASE("supcon l1: eps = 0 solves the linear system")
{
    std::mt19937_64 rng(19);
    const Matrix A = random_psd(rng, 5, 0.5);
    const Vector b = random_vector(rng, 5);
    auto sol = solve_supcon_l1(SupConL1Problem<double>{A, b, 0.0});
    CHECK((sol.solution - A.lu().solve(b)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("supcon l1: matches vertex enumeration and beats the exact solve")
{
    std::mt19937_64 rng(23);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 15; ++rep) {
        const Index k = 2 + rep % 4;
        Matrix A(k, k);
        for (Index i = 0; i < k; ++i)
            for (Index j = 0; j < k; ++j) A(i, j) = z(rng);
        A += 2.0 * Matrix::Identity(k, k);
        const Vector b = random_vector(rng, k);
        auto sol = solve_supcon_l1(SupConL1Problem<double>{A, b, 0.1});
        REQUIRE(sol.report.converged);
        CHECK(((A * sol.solution - b).cwiseAbs().array() - 0.1).maxCoeff() <= 1e-7);
        const double ref = oracle::supcon_vertex_enumeration(A, b, 0.1);
        CHECK(sol.report.objective == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
        CHECK(sol.report.objective <= A.fullPivLu().solve(b).lpNorm<1>() + 1e-9);
    }
}

TEST_CASE("supcon l1: infeasible budget raises")
{
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 1.0;
    const Vector b = (Vector(2) << 0.0, 1.0).finished();
    CHECK_THROWS_AS(solve_supcon_l1(SupConL1Problem<double>{A, b, 0.1}), InfeasibleError);
}

TEST_CASE("supcon l1: rectangular systems are accepted")
{
    Matrix A(3, 2);
    A << 1, 0, 0, 1, 1, 1;
    const Vector b = (Vector(3) << 1.0, 1.0, 2.0).finished();
    auto sol = solve_supcon_l1(SupConL1Problem<double>{A, b, 0.0});
    CHECK((sol.solution - Vector::Ones(2)).lpNorm<Eigen::Infinity>() < 1e-10);
}
