#include <doctest.h>

#include "fnets/network.hpp"
#include "fnets/panel.hpp"
#include "support.hpp"

#include <cmath>
#include <fstream>

using namespace fnets;
using testing::TempDir;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("panel: CSV of zeros loads as a centered zero panel")
{
    TempDir dir("panel");
    write_text(dir / "zeros.csv", "t,a,b,c\n1,0,0,0\n2,0,0,0\n3,0,0,0\n4,0,0,0\n5,0,0,0\n");
    const auto panel = load_panel(dir / "zeros.csv");
    CHECK(panel.p() == 3);
    CHECK(panel.n() == 5);
    CHECK(panel.values.isZero(0.0));
    CHECK(panel.centered);
    CHECK(panel.labels == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("panel: a non-numeric cell names its position")
{
    TempDir dir("panel");
    write_text(dir / "na.csv", "t,a,b\n1,0.5,1\n2,NA,2\n3,1,1\n");
    try {
        load_panel(dir / "na.csv");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("non-numeric at (t=2, series=a)") != std::string::npos);
    }
}

TEST_CASE("panel: ragged rows and missing files are rejected")
{
    TempDir dir("panel");
    write_text(dir / "ragged.csv", "t,a,b\n1,0.5,1\n2,3\n");
    CHECK_THROWS_AS(load_panel(dir / "ragged.csv"), Error);
    CHECK_THROWS_AS(load_panel(dir / "absent.csv"), Error);
}

TEST_CASE("panel: demeaning a constant row gives zeros")
{
    Matrix v(2, 4);
    v << 3, 3, 3, 3, 1, 2, 3, 4;
    const auto panel = make_panel(v, {}, true);
    CHECK(panel.values.row(0).isZero(0.0));
    CHECK(panel.values.row(1).sum() == doctest::Approx(0.0));
    CHECK(panel.labels == std::vector<std::string>{"s1", "s2"});
}

TEST_CASE("panel: write then load reproduces values bit for bit")
{
    std::mt19937_64 rng(3);
    TempDir dir("panel");
    const auto panel = make_panel(testing::gaussian_matrix(rng, 4, 30), {"w", "x", "y", "z"});
    write_panel(panel, dir / "p.csv");
    const auto back = load_panel(dir / "p.csv", false);
    CHECK(back.labels == panel.labels);
    CHECK(back.values == panel.values);
}

TEST_CASE("panel: validation errors")
{
    CHECK_THROWS_AS(make_panel(Matrix::Zero(1, 10)), Error);
    CHECK_THROWS_AS(make_panel(Matrix::Zero(3, 10), {"a", "b"}), Error);
    Matrix bad = Matrix::Zero(2, 5);
    bad(1, 2) = std::nan("");
    CHECK_THROWS_AS(make_panel(bad), Error);
    const auto panel = make_panel(Matrix::Ones(2, 6));
    CHECK(panel.segment(1, 4).n() == 3);
    CHECK_THROWS_AS(panel.segment(4, 4), Error);
}

TEST_CASE("config: JSON round trip keeps auto and explicit values")
{
    RunConfig c;
    c.q = 2;
    c.lambda = 0.125;
    c.solver = Solver::dantzig;
    c.common = CommonMethod::unrestricted;
    c.seed = 99;
    const RunConfig back = config_from_json(config_to_json(c));
    CHECK(back.q == c.q);
    CHECK(!back.r);
    CHECK(back.lambda == c.lambda);
    CHECK(back.solver == Solver::dantzig);
    CHECK(back.common == CommonMethod::unrestricted);
    CHECK(back.seed == 99);
    CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("config: validation rejects impossible settings")
{
    RunConfig c;
    c.d = 3;
    CHECK_THROWS_AS(c.validate(50, 10), Error);
    c.d = 1;
    c.bandwidth = 10;
    CHECK_THROWS_AS(c.validate(5, 10), Error);
    c.bandwidth.reset();
    c.q = 5;
    CHECK_THROWS_AS(c.validate(5, 100), Error);
    c.q = 1;
    CHECK_NOTHROW(c.validate(5, 100));
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"q", "many"}}), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"solver", "simplex"}}), Error);
}

TEST_CASE("network: empty network writes a header-only edge list")
{
    TempDir dir("net");
    NetworkSet nets;
    nets.granger.weights = Matrix::Zero(3, 3);
    nets.contemporaneous.weights = Matrix::Zero(3, 3);
    nets.longrun.weights = Matrix::Zero(3, 3);
    nets.labels = {"s1", "s2", "s3"};
    write_network_edgelist(nets, dir.path());
    CHECK(read_text(dir / "granger.csv") == "source,target,weight\n");
    CHECK(read_text(dir / "longrun.csv") == "source,target,weight\n");
}

TEST_CASE("network: partial correlation weight on a 2x2 precision matrix")
{
    Matrix delta(2, 2);
    delta << 2.0, -0.6, -0.6, 1.5;
    const auto net = partial_correlation_network(delta, 0.0);
    const auto edges = net.edges();
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].source == 0);
    CHECK(edges[0].target == 1);
    CHECK(edges[0].weight == doctest::Approx(0.6 / std::sqrt(3.0)).epsilon(1e-14));

    TempDir dir("net");
    NetworkSet nets;
    nets.granger.weights = Matrix::Zero(2, 2);
    nets.contemporaneous = net;
    nets.longrun.weights = Matrix::Zero(2, 2);
    nets.labels = {"s1", "s2"};
    write_network_edgelist(nets, dir.path());
    CHECK(read_text(dir / "contemporaneous.csv") ==
          "source,target,weight\ns1,s2," + format_double(0.6 / std::sqrt(3.0)) + "\n");
}

TEST_CASE("network: edge lists round-trip to 1e-12")
{
    std::mt19937_64 rng(5);
    const Index p = 6;
    Matrix g = testing::gaussian_matrix(rng, p, p);
    Matrix u = testing::gaussian_matrix(rng, p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) {
            if ((i * 7 + j * 3) % 4 == 0) g(i, j) = 0.0;
            if ((i + j) % 3 == 0) u(i, j) = 0.0;
        }
    u = symmetrize(u);
    u.diagonal().setZero();

    TempDir dir("net");
    NetworkSet nets;
    nets.granger.weights = g;
    nets.contemporaneous.weights = u;
    nets.longrun.weights = u * 0.5;
    for (Index i = 0; i < p; ++i) nets.labels.push_back("n" + std::to_string(i));
    write_network_edgelist(nets, dir.path());
    CHECK(testing::max_abs_diff(read_edgelist(dir / "granger.csv", nets.labels, true), g) <= 1e-12);
    CHECK(testing::max_abs_diff(read_edgelist(dir / "contemporaneous.csv", nets.labels, false), u) <= 1e-12);
    CHECK(testing::max_abs_diff(read_edgelist(dir / "longrun.csv", nets.labels, false), u * 0.5) <= 1e-12);
}

TEST_CASE("network: non-positive diagonal is rejected")
{
    Matrix delta = Matrix::Identity(2, 2);
    delta(1, 1) = 0.0;
    CHECK_THROWS_AS(partial_correlation_network(delta, 0.0), Error);
}
