#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fracspec/boundary.hpp"
#include "fracspec/poincare.hpp"

namespace fracspec {

using rational = boost::multiprecision::cpp_rational;

// num(z) / den(z), ascending coefficients, den(0) != 0.
struct RationalGF {
    std::vector<rational> num;
    std::vector<rational> den;

    std::vector<rational> series(int M) const;
    rational eval(const rational& z) const;
    cplx eval(cplx z) const;
    double eval(double z) const { return eval(cplx(z)).real(); }
    // Largest modulus among 1/(roots of den): growth rate of the coefficients.
    double growth() const;
};

RationalGF make_gf(std::vector<long long> num, std::vector<long long> den);

// beta_0..beta_M; throws SystemDefinitionError on non-integral or negative coefficients.
std::vector<std::int64_t> multiplicity_coeffs(const RationalGF& R, int M);

// Constants for exp(C1 x^rho) <= Phi(x) <= exp(C2 x^rho), x >= x0.
struct GrowthConstants {
    double C1 = 1.0;
    double C2 = 1.08;
    double x0 = 10.0;
};

struct SpectralSystem {
    std::string name;
    PolynomialMap<double> p;
    RealPoincare phi;
    std::vector<double> A;
    std::vector<RationalGF> R;
    Boundary bc = Boundary::dirichlet;
    int zero_modes = 0;  // eigenvalue 0, counted by N(x) but not by zeta
    GrowthConstants growth;

    double lambda() const { return p.multiplier(); }
    double rho() const { return phi.rho(); }
    // Exponent d_S with N(x) of order x^{d_S/2}.
    double spectral_dim() const;
    void validate() const;
};

SpectralSystem sg_spectral_system(Boundary bc);

// Distinct real preimages of y under p, descending (index 0 is the branch towards 0).
std::vector<double> real_preimages(const PolynomialMap<double>& p, double y);

// mu with Phi(-mu) = y reached by the attracting branch only.
double attracting_limit(const RealPoincare& phi, double y);

double preimage_eigenvalue(const RealPoincare& phi, double w, const std::vector<int>& word);

struct EigenRecord {
    double mu;
    std::int64_t multiplicity;
    int m;               // power of lambda
    double w;
    std::vector<int> word;
};

struct EigenvalueList {
    std::vector<EigenRecord> records;  // ascending
    double cutoff = 0;
    std::vector<std::string> warnings;

    std::int64_t total() const;
    std::vector<double> expanded(std::size_t max_count) const;  // values repeated by multiplicity
};

// All distinct mu < X with Phi(-mu) = w (m = 0, multiplicity 1).
EigenvalueList enumerate_partial(const RealPoincare& phi, double w, double X, std::size_t node_budget = 2000000);

EigenvalueList enumerate_spectrum(const SpectralSystem& sys, double X, std::size_t node_budget = 2000000);

class CountingFunction {
public:
    CountingFunction(const SpectralSystem& sys, double xmax);
    std::int64_t operator()(double x) const;
    // Partial count N_w(x) = #{mu <= x : Phi(-mu) = w}.
    std::int64_t partial(std::size_t w_index, double x) const;
    double xmax() const { return xmax_; }

private:
    double xmax_;
    double lambda_;
    int zero_modes_;
    std::vector<std::vector<double>> mus_;
    std::vector<std::vector<std::int64_t>> beta_;
};

std::int64_t counting_function(const SpectralSystem& sys, double x);

struct RenewalDim {
    double d_S = 0;
    bool lattice = false;
    std::string warning;
};

RenewalDim renewal_spectral_dim(const std::vector<double>& gamma);

struct RenewalResult {
    double d_S = 0;
    bool lattice = false;
    double period = 0;                  // lattice span in t
    std::vector<double> t, f;
    std::vector<double> profile_t;      // last full period
    std::vector<double> profile;
    double period_defect = 0;           // sup |f(t) - f(t - period)| over the last period
    double limit = 0;                   // non-lattice: mean over the last window
};

// f(t) = sum_j p_j f(t - alpha_j) + u(t), alpha_j = -2 log gamma_j, p_j = gamma_j^{d_S},
// f = 0 before t0, on the grid t0 + k h. Shifts off the grid are interpolated linearly.
RenewalResult renewal_iterate(const std::vector<double>& gamma, const std::function<double(double)>& u,
                              double t0, double t1, double h);

void write_eigenvalues_csv(std::ostream& os, const EigenvalueList& l);

}  // namespace fracspec
