#ifndef BNF_ENGINE_HPP
#define BNF_ENGINE_HPP

#include <map>
#include <optional>
#include <vector>

#include "bnf/homology.hpp"
#include "bnf/lie.hpp"
#include "bnf/schedule.hpp"
#include "bnf/tf_series.hpp"

namespace bnf {

/// Prescribed normal-form family N = N0 + sum_{j>=2} b_j N0^j together with
/// the derived multipliers g_{2j} = j b_j N0^{j-1}, g_{2j+1} = 0.
struct NormalFormProfile {
    QuadraticForm omega;
    std::vector<double> b;  // b[0] is b_2

    TFSeries normal_form(int degree_cap) const;
    /// g_m for m >= 3 (odd indices are identically zero).
    TFSeries multiplier(int m, int degree_cap) const;
};

/// H = N_n + R_tilde with N_n the theta-free part of degrees [2, m_n] and
/// R_tilde supported on degrees > m_n.
struct HamiltonianState {
    int n = 0;
    TFSeries N;
    TFSeries R;

    long long m() const { return (1LL << n) + 1; }

    /// Splits H0 = N0 + higher terms into the step-0 state; rejects inputs
    /// that do not have the required shape.
    static HamiltonianState initial(const TFSeries& H0,
                                    const QuadraticForm& omega, double tol);
};

struct StepFlags {
    bool est_N = true;   // new normal-form blocks < delta_n^(kappa+1)
    bool est_g = true;   // |g_j| <= 4^-j for j = 3..m_n
    bool est_Rn = true;  // |R_{n+1}| at rho_{n+1} <= delta_{n+1}^kappa
    bool est_Phi = true; // coordinate deviation < delta_n

    bool all() const { return est_N && est_g && est_Rn && est_Phi; }
};

struct NewtonStepReport {
    int n = 0;
    long long m = 0;       // m_n
    long long m_next = 0;  // m_{n+1} = 2 m_n - 1
    TFSeries F;            // generator, degrees [m_n, m_{n+1}-1], zero-average
    HamiltonianState next;
    CoordinateMap phi;
    TFSeries C;  // the explicit high-degree bracket remainder

    std::vector<double> S;  // |{N0, F^{[m+j-1]}}| at (rho_n, rho_n), j=1..m-1
    double norm_R_before = 0.0;  // at (rho_n, rho_n)
    double norm_R_after = 0.0;   // at (rho_{n+1}, rho_{n+1})
    double norm_C = 0.0;         // at (rho_n, rho_n)
    double c_bound_formula = 0.0;   // (1/3) sum 4^-(k+1) S_{m-k}
    double c_bound_schedule = 0.0;  // delta_n^kappa
    double coord_deviation = 0.0;
    double low_degree_defect = 0.0;
    double worst_residue = 0.0;
    StepFlags flags;
    std::vector<double> b_extracted;      // from the new N via the A3 fit
    std::map<int, double> a3_residuals;   // per degree
};

struct EngineOptions {
    bool compliant = false;
    std::optional<NormalFormProfile> profile;  // absent means "discover"
    double tol = 1e-9;
    double rho0 = 1.0;
};

NewtonStepReport newton_step(const HamiltonianState& state,
                             const QuadraticForm& omega,
                             const EngineOptions& opts,
                             const ConstantsSchedule& schedule, int degree_cap);

struct RunResult {
    std::vector<NewtonStepReport> steps;
    CoordinateMap transform;  // Phi_0 o Phi_1 o ... o Phi_{steps-1}
    TFSeries normal_form;
    std::vector<double> b;
    std::map<int, double> a3_residuals;
    double prescale = 1.0;  // lemma_base factor applied in compliant mode
};

RunResult run(const TFSeries& H0, const QuadraticForm& omega, int steps,
              int degree_cap, const EngineOptions& opts);

/// (1/a^2) H(aI, theta): coefficient of (j, k) scaled by a^(|j|_1 - 2).
TFSeries scale_hamiltonian(const TFSeries& H, double a);

/// Builds H = N o X_{-G}^1, guaranteed normalizable with ground truth
/// (profile, G) retained by the caller.
TFSeries make_instance(const NormalFormProfile& profile, const TFSeries& G,
                       int degree_cap);

struct OracleResult {
    TFSeries normal_form;
    std::vector<TFSeries> generators;  // one per eliminated degree
};

/// Classical order-by-order elimination (degrees 3, 4, ..., cap); an
/// independent path from the degree-doubling step.
OracleResult classical_oracle(const TFSeries& H, const QuadraticForm& omega,
                              int degree_cap, double tol = 1e-9);

struct A3Result {
    std::vector<double> b;  // b[0] is b_2
    std::map<int, double> residuals;  // per degree, odd content in full
    bool pass = true;
};

/// Least-squares fit of each even block N^{[2j]} against N0^j. Residuals are
/// compared against tol times the coefficient norm of the whole polynomial.
A3Result verify_A3(const TFSeries& N, const QuadraticForm& omega, double tol);

}  // namespace bnf

#endif
