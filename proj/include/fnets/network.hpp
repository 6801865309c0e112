#pragma once

#include "fnets/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fnets {

struct Edge {
    Index source = 0;
    Index target = 0;
    double weight = 0.0;
};

/// Weighted directed graph on p nodes stored as a dense weight matrix;
/// entry (i, j) != 0 is the edge i -> j.
struct DirectedNetwork {
    Matrix weights;

    Index nodes() const { return weights.rows(); }
    std::vector<Edge> edges() const;
};

/// Weighted undirected graph; weights symmetric with a zero diagonal.
struct UndirectedNetwork {
    Matrix weights;

    Index nodes() const { return weights.rows(); }
    /// Edges with source < target.
    std::vector<Edge> edges() const;
};

struct NetworkSet {
    DirectedNetwork granger;
    UndirectedNetwork contemporaneous;
    UndirectedNetwork longrun;
    double threshold_beta = 0.0;
    double threshold_delta = 0.0;
    double threshold_omega = 0.0;
    std::vector<std::string> labels;
};

/// Partial-correlation network from a precision-type matrix: weight
/// -x_ij / sqrt(x_ii x_jj) for i != j when |x_ij| > threshold.
UndirectedNetwork partial_correlation_network(const Matrix& precision, double threshold);

/// Writes granger.csv, contemporaneous.csv and longrun.csv (source,target,weight) into dir.
void write_network_edgelist(const NetworkSet& nets, const std::filesystem::path& dir);

/// Reads one edge-list file back into a p x p weight matrix using the given node labels.
Matrix read_edgelist(const std::filesystem::path& path, const std::vector<std::string>& labels, bool directed);

} // namespace fnets
