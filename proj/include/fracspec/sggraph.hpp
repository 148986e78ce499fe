#pragma once

#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/boundary.hpp"
#include "fracspec/selfsim.hpp"

namespace fracspec {

struct SpectralSystem;

struct LatticeGraph {
    int level = 0;
    std::vector<Point> vertices;                // sorted lexicographically by (x, y)
    std::vector<std::pair<int, int>> edges;     // i < j, sorted
    std::vector<int> boundary;                  // the three corners, ascending
    std::vector<std::vector<int>> adjacency;

    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
    std::vector<int> interior() const;
};

inline constexpr int max_graph_level = 8;

LatticeGraph build_graph(int level);

// Probabilistic Laplacian P - I with p(x,y) = 1/deg(x); Dirichlet drops boundary rows/columns.
Eigen::MatrixXd graph_laplacian(const LatticeGraph& g, Boundary bc);

// D^{1/2} (P - I) D^{-1/2}: same spectrum, symmetric. Equal to graph_laplacian for Dirichlet on SG.
Eigen::MatrixXd symmetric_laplacian(const LatticeGraph& g, Boundary bc);

struct EigenCluster {
    double value;
    int multiplicity;
};

struct DenseSpectrum {
    std::vector<double> values;          // ascending, with repetition
    std::vector<EigenCluster> clusters;  // relative tolerance 1e-8
    double max_residual = 0;             // max ||Av - lambda v|| / ||A||
};

DenseSpectrum eigensolve_dense(const Eigen::MatrixXd& a, bool check_residuals = true);

// E(u,u) = u^T Q u.
struct FiniteForm {
    Eigen::MatrixXd Q;

    int size() const { return static_cast<int>(Q.rows()); }
    double energy(const Eigen::VectorXd& u) const { return u.dot(Q * u); }
};

// Conductance form sum over edges c (u_x - u_y)^2.
FiniteForm conductance_form(const LatticeGraph& g, double conductance = 1.0);
FiniteForm conductance_form(int n, const std::vector<std::pair<int, int>>& edges, const std::vector<double>& c);

// Schur complement onto `subset` (order kept as given).
FiniteForm restrict_form(const FiniteForm& form, const std::vector<int>& subset);

struct BranchRow {
    int k;                      // 1-based rank, counted with multiplicity
    std::vector<double> nu;     // nu_k^{(n)} per level, nu = -(graph eigenvalue)
    std::vector<double> ratio;  // nu^{(n)} / nu^{(n+1)}
    std::vector<double> scaled; // lambda^n nu^{(n)}
    double continuum = 0;       // k-th enumerated eigenvalue
    double fitted = 0;          // c lambda^n nu^{(n)} at the finest level
    double rel_error = 0;
};

struct LevelExceptional {
    int level;
    std::vector<EigenCluster> clusters;  // clusters at nu in {1/2, 3/4, 5/4}
};

struct DecimationOracleReport {
    std::vector<int> levels;
    std::vector<int> counts;
    std::vector<BranchRow> rows;
    double c = 0;               // fitted at the ground branch, finest level
    bool conclusive = false;
    std::vector<LevelExceptional> exceptional;
};

DecimationOracleReport verify_decimation_oracle(int level_lo, int level_hi, Boundary bc,
                                                const SpectralSystem& sys, int branches = 10);

void write_matrix_coo(std::ostream& os, const Eigen::MatrixXd& a);
void write_spectrum_csv(std::ostream& os, const DenseSpectrum& s);

}  // namespace fracspec
