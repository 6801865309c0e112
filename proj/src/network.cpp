#include "fnets/network.hpp"
#include "fnets/panel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace fnets {

std::vector<Edge> DirectedNetwork::edges() const
{
    std::vector<Edge> out;
    for (Index i = 0; i < weights.rows(); ++i)
        for (Index j = 0; j < weights.cols(); ++j)
            if (weights(i, j) != 0.0) out.push_back({i, j, weights(i, j)});
    return out;
}

std::vector<Edge> UndirectedNetwork::edges() const
{
    std::vector<Edge> out;
    for (Index i = 0; i < weights.rows(); ++i)
        for (Index j = i + 1; j < weights.cols(); ++j)
            if (weights(i, j) != 0.0) out.push_back({i, j, weights(i, j)});
    return out;
}

UndirectedNetwork partial_correlation_network(const Matrix& precision, double threshold)
{
    const Index p = precision.rows();
    if (precision.cols() != p) throw Error("partial correlation network needs a square matrix");
    for (Index i = 0; i < p; ++i)
        if (!(precision(i, i) > 0.0))
            throw Error("partial correlation undefined: diagonal entry " + std::to_string(i) + " is not positive");
    UndirectedNetwork net{Matrix::Zero(p, p)};
    for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
            const double x = precision(i, j);
            if (std::abs(x) > threshold) {
                const double w = -x / std::sqrt(precision(i, i) * precision(j, j));
                net.weights(i, j) = w;
                net.weights(j, i) = w;
            }
        }
    }
    return net;
}

namespace {

void write_edges(const std::vector<Edge>& edges, const std::vector<std::string>& labels, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write edge list " + path.string());
    out << "source,target,weight\n";
    for (const auto& e : edges)
        out << labels[static_cast<std::size_t>(e.source)] << ',' << labels[static_cast<std::size_t>(e.target)] << ','
            << format_double(e.weight) << '\n';
    if (!out) throw Error("I/O failure writing " + path.string());
}

} // namespace

void write_network_edgelist(const NetworkSet& nets, const std::filesystem::path& dir)
{
    const Index p = nets.granger.nodes();
    if (static_cast<Index>(nets.labels.size()) != p || nets.contemporaneous.nodes() != p || nets.longrun.nodes() != p)
        throw Error("network set has inconsistent node counts");
    write_edges(nets.granger.edges(), nets.labels, dir / "granger.csv");
    write_edges(nets.contemporaneous.edges(), nets.labels, dir / "contemporaneous.csv");
    write_edges(nets.longrun.edges(), nets.labels, dir / "longrun.csv");
}

Matrix read_edgelist(const std::filesystem::path& path, const std::vector<std::string>& labels, bool directed)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open edge list " + path.string());
    std::unordered_map<std::string, Index> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<Index>(i);
    const auto p = static_cast<Index>(labels.size());
    Matrix w = Matrix::Zero(p, p);
    std::string line;
    std::getline(in, line);
    if (line.rfind("source,target,weight", 0) != 0) throw Error("edge list " + path.string() + " has an unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string s, t, v;
        std::getline(row, s, ',');
        std::getline(row, t, ',');
        std::getline(row, v);
        const auto si = index.find(s);
        const auto ti = index.find(t);
        if (si == index.end() || ti == index.end()) throw Error("edge list " + path.string() + " names an unknown node");
        const double weight = std::stod(v);
        w(si->second, ti->second) = weight;
        if (!directed) w(ti->second, si->second) = weight;
    }
    return w;
}

} // namespace fnets
