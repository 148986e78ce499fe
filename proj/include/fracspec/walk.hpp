#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "fracspec/rng.hpp"
#include "fracspec/sggraph.hpp"

namespace fracspec {

// Walk on G_level; the coarse set is V_{level-1} (V_0 itself when level = 0).
struct WalkConfig {
    int level = 1;
    int start = 0;                 // vertex index in G_level, must be coarse
    std::int64_t step_budget = 1000000;
    std::int64_t samples = 100000;
    std::uint64_t seed = default_seed;
    int threads = 1;
};

struct AtomEstimate {
    std::int64_t t;
    double p;
    double stderr_;
};

struct HittingStats {
    std::int64_t samples = 0;
    double mean = 0, variance = 0, stderr_mean = 0;
    std::int64_t max_t = 0;
    std::vector<std::int64_t> histogram;  // histogram[t] = #{T = t}
    AtomEstimate atom(std::int64_t t) const;
};

std::vector<int> coarse_vertices(const LatticeGraph& g);

HittingStats simulate_hitting_times(const WalkConfig& cfg);

// num(z) / den(z), ascending coefficients.
struct Pgf {
    std::vector<double> num;
    std::vector<double> den;

    double operator()(double z) const;
    double derivative(double z) const;
    double mean() const { return derivative(1.0); }
    std::vector<double> series(int M) const;
};

// z^2 / (4 - 3z): number of fine steps per coarse step on SG.
Pgf sg_offspring_pgf();

struct BranchingStats {
    int generations = 0;
    std::int64_t samples = 0;
    double offspring_mean = 0;
    std::vector<double> mean_Z, mean_W, stderr_W;  // per generation 0..n, W = Z / m^n
    std::vector<std::vector<std::int64_t>> Z;       // Z[sample][generation]
};

BranchingStats branching_simulate(const Pgf& q, int generations, std::int64_t samples,
                                  std::uint64_t seed = default_seed, int threads = 1);

struct ReturnProbabilities {
    int level = 0;
    int vertex = 0;
    double d_S = 0;
    std::vector<double> p;       // p_n(x, x), n = 0..max_steps
    std::vector<double> scaled;  // n^{d_S/2} p_n(x, x)
    double max_mass_defect = 0;  // max_n |sum_y p_n(x, y) - 1|
};

inline constexpr int max_return_level = 6;

ReturnProbabilities return_probabilities(int level, int max_steps);

struct FluctuationBand {
    double lo = 0, hi = 0;
    double ratio() const { return hi / lo; }
};

FluctuationBand fluctuation_band(const ReturnProbabilities& r, int n_lo, int n_hi);

struct ConjugationReport {
    double psi_at_1 = 0;
    double lambda = 0;                // psi'(1)
    bool polynomial = false;
    std::vector<double> P;            // 1/psi(1/z), ascending
    std::vector<double> conjugate;    // P moved to the fixed point 1 and made monic
    double remainder = 0;
};

ConjugationReport pgf_conjugation_check(const Pgf& psi);

void write_histogram_csv(std::ostream& os, const HittingStats& s);
void write_returns_csv(std::ostream& os, const ReturnProbabilities& r);

}  // namespace fracspec
