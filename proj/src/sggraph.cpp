#include "fracspec/sggraph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "fracspec/decimation.hpp"

namespace fracspec {

std::vector<int> LatticeGraph::interior() const {
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
        if (!std::binary_search(boundary.begin(), boundary.end(), v)) out.push_back(v);
    return out;
}

namespace {

using Lattice = std::pair<long long, long long>;  // (U, V): U e1 + V e2 in units of 2^-n

void collect_cells(long long u0, long long v0, long long size, std::vector<std::array<Lattice, 3>>& cells) {
    if (size == 1) {
        cells.push_back({Lattice{u0, v0}, Lattice{u0 + 1, v0}, Lattice{u0, v0 + 1}});
        return;
    }
    long long h = size / 2;
    collect_cells(u0, v0, h, cells);
    collect_cells(u0 + h, v0, h, cells);
    collect_cells(u0, v0 + h, h, cells);
}

}  // namespace

LatticeGraph build_graph(int level) {
    if (level < 0 || level > max_graph_level)
        throw CapacityError("build_graph: level " + std::to_string(level) + " outside [0, " +
                            std::to_string(max_graph_level) + "]");
    const long long side = 1LL << level;
    std::vector<std::array<Lattice, 3>> cells;
    collect_cells(0, 0, side, cells);

    // Lexicographic order by (x, y) is the order of (2U + V, V).
    auto key = [](const Lattice& l) { return std::pair<long long, long long>(2 * l.first + l.second, l.second); };
    std::map<std::pair<long long, long long>, Lattice> sorted;
    for (auto& c : cells)
        for (auto& l : c) sorted.emplace(key(l), l);
    std::map<Lattice, int> index;
    LatticeGraph g;
    g.level = level;
    const double s = 1.0 / double(side);
    for (auto& [k, l] : sorted) {
        index[l] = static_cast<int>(g.vertices.size());
        g.vertices.emplace_back(s * (double(l.first) + 0.5 * double(l.second)), s * double(l.second) * std::sqrt(3.0) / 2);
    }
    std::set<std::pair<int, int>> edges;
    for (auto& c : cells)
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                int i = index.at(c[a]), j = index.at(c[b]);
                edges.insert({std::min(i, j), std::max(i, j)});
            }
    g.edges.assign(edges.begin(), edges.end());
    g.adjacency.assign(g.vertices.size(), {});
    for (auto& [i, j] : g.edges) {
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    g.boundary = {index.at({0, 0}), index.at({side, 0}), index.at({0, side})};
    std::sort(g.boundary.begin(), g.boundary.end());
    return g;
}

Eigen::MatrixXd graph_laplacian(const LatticeGraph& g, Boundary bc) {
    const int n = static_cast<int>(g.vertices.size());
    Eigen::MatrixXd full = -Eigen::MatrixXd::Identity(n, n);
    for (int v = 0; v < n; ++v)
        for (int u : g.adjacency[v]) full(v, u) += 1.0 / g.degree(v);
    if (bc == Boundary::neumann) return full;
    auto in = g.interior();
    Eigen::MatrixXd out(in.size(), in.size());
    for (std::size_t a = 0; a < in.size(); ++a)
        for (std::size_t b = 0; b < in.size(); ++b) out(a, b) = full(in[a], in[b]);
    return out;
}

Eigen::MatrixXd symmetric_laplacian(const LatticeGraph& g, Boundary bc) {
    const int n = static_cast<int>(g.vertices.size());
    Eigen::MatrixXd full = -Eigen::MatrixXd::Identity(n, n);
    for (int v = 0; v < n; ++v)
        for (int u : g.adjacency[v]) full(v, u) += 1.0 / std::sqrt(double(g.degree(v)) * g.degree(u));
    if (bc == Boundary::neumann) return full;
    auto in = g.interior();
    Eigen::MatrixXd out(in.size(), in.size());
    for (std::size_t a = 0; a < in.size(); ++a)
        for (std::size_t b = 0; b < in.size(); ++b) out(a, b) = full(in[a], in[b]);
    return out;
}

DenseSpectrum eigensolve_dense(const Eigen::MatrixXd& a, bool check_residuals) {
    if (a.rows() != a.cols() || a.rows() == 0) throw ContractError("eigensolve_dense: need a nonempty square matrix");
    const double norm = std::max(a.norm(), 1e-300);
    if ((a - a.transpose()).norm() > 1e-13 * norm) throw ContractError("eigensolve_dense: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, check_residuals ? Eigen::ComputeEigenvectors
                                                                          : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolve_dense: solver failed");
    DenseSpectrum out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
    if (check_residuals) {
        Eigen::MatrixXd r = a * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal();
        out.max_residual = r.colwise().norm().maxCoeff() / norm;
    }
    const double scale = std::max(1.0, std::abs(out.values.front()) + std::abs(out.values.back()));
    for (double v : out.values) {
        if (!out.clusters.empty() && std::abs(v - out.clusters.back().value) <= 1e-8 * scale) {
            auto& c = out.clusters.back();
            c.value = (c.value * c.multiplicity + v) / (c.multiplicity + 1);
            ++c.multiplicity;
        } else {
            out.clusters.push_back({v, 1});
        }
    }
    return out;
}

FiniteForm conductance_form(int n, const std::vector<std::pair<int, int>>& edges, const std::vector<double>& c) {
    if (c.size() != edges.size()) throw DomainError("conductance_form: one conductance per edge");
    FiniteForm f{Eigen::MatrixXd::Zero(n, n)};
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [i, j] = edges[e];
        f.Q(i, i) += c[e];
        f.Q(j, j) += c[e];
        f.Q(i, j) -= c[e];
        f.Q(j, i) -= c[e];
    }
    return f;
}

FiniteForm conductance_form(const LatticeGraph& g, double conductance) {
    return conductance_form(static_cast<int>(g.vertices.size()), g.edges,
                            std::vector<double>(g.edges.size(), conductance));
}

FiniteForm restrict_form(const FiniteForm& form, const std::vector<int>& subset) {
    const int n = form.size();
    if (subset.empty()) throw DomainError("restrict_form: empty subset");
    std::vector<char> in(n, 0);
    for (int v : subset) {
        if (v < 0 || v >= n) throw DomainError("restrict_form: index out of range");
        if (in[v]) throw DomainError("restrict_form: repeated index");
        in[v] = 1;
    }
    std::vector<int> rest;
    for (int v = 0; v < n; ++v)
        if (!in[v]) rest.push_back(v);
    const int k = static_cast<int>(subset.size()), r = static_cast<int>(rest.size());
    Eigen::MatrixXd quu(k, k), qub(k, r), qbb(r, r);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) quu(a, b) = form.Q(subset[a], subset[b]);
        for (int b = 0; b < r; ++b) qub(a, b) = form.Q(subset[a], rest[b]);
    }
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) qbb(a, b) = form.Q(rest[a], rest[b]);
    if (r == 0) return FiniteForm{quu};
    Eigen::LLT<Eigen::MatrixXd> llt(qbb);
    if (llt.info() != Eigen::Success) throw DegenerateNetworkError("restrict_form: eliminated block is singular");
    Eigen::MatrixXd s = quu - qub * llt.solve(qub.transpose());
    return FiniteForm{0.5 * (s + s.transpose())};
}

DecimationOracleReport verify_decimation_oracle(int level_lo, int level_hi, Boundary bc, const SpectralSystem& sys,
                                                int branches) {
    DecimationOracleReport rep;
    if (level_hi < level_lo) std::swap(level_lo, level_hi);
    if (level_lo < 1) level_lo = 1;
    const double lam = sys.lambda();
    std::vector<std::vector<double>> nus;
    for (int n = level_lo; n <= level_hi; ++n) {
        auto g = build_graph(n);
        auto spec = eigensolve_dense(symmetric_laplacian(g, bc), false);
        std::vector<double> nu;
        for (auto it = spec.values.rbegin(); it != spec.values.rend(); ++it) nu.push_back(-*it);
        // Neumann: the constant mode is the continuum's zero mode, not a branch.
        if (bc == Boundary::neumann && !nu.empty()) nu.erase(nu.begin());
        rep.levels.push_back(n);
        rep.counts.push_back(static_cast<int>(spec.values.size()));
        nus.push_back(nu);
        LevelExceptional ex{n, {}};
        for (auto& c : spec.clusters)
            for (double target : {0.5, 0.75, 1.25})
                if (std::abs(-c.value - target) < 1e-8) ex.clusters.push_back(c);
        rep.exceptional.push_back(ex);
    }
    if (rep.levels.size() < 2) return rep;

    double X = 50.0;
    std::vector<double> cont;
    for (int tries = 0; tries < 30; ++tries, X *= 2) {
        cont = enumerate_spectrum(sys, X).expanded(branches);
        if (static_cast<int>(cont.size()) >= branches) break;
    }
    const auto& finest = nus.back();
    const int nfin = rep.levels.back();
    int kmax = std::min<int>(branches, static_cast<int>(cont.size()));
    for (auto& nu : nus) kmax = std::min<int>(kmax, static_cast<int>(nu.size()));
    if (kmax < 1) return rep;
    rep.c = cont[0] / (std::pow(lam, nfin) * finest[0]);
    for (int k = 0; k < kmax; ++k) {
        BranchRow row;
        row.k = k + 1;
        for (std::size_t i = 0; i < nus.size(); ++i) {
            row.nu.push_back(nus[i][k]);
            row.scaled.push_back(std::pow(lam, rep.levels[i]) * nus[i][k]);
            if (i + 1 < nus.size()) row.ratio.push_back(nus[i][k] / nus[i + 1][k]);
        }
        row.continuum = cont[k];
        row.fitted = rep.c * row.scaled.back();
        row.rel_error = std::abs(row.fitted - row.continuum) / row.continuum;
        rep.rows.push_back(row);
    }
    rep.conclusive = kmax == branches;
    return rep;
}

void write_matrix_coo(std::ostream& os, const Eigen::MatrixXd& a) {
    os << "row,col,value\n";
    os.precision(17);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0.0) os << i << ',' << j << ',' << a(i, j) << '\n';
}

void write_spectrum_csv(std::ostream& os, const DenseSpectrum& s) {
    os << "index,eigenvalue,multiplicity\n";
    os.precision(17);
    for (std::size_t i = 0; i < s.clusters.size(); ++i)
        os << i << ',' << s.clusters[i].value << ',' << s.clusters[i].multiplicity << '\n';
}

}  // namespace fracspec
