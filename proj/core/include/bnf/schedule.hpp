#ifndef BNF_SCHEDULE_HPP
#define BNF_SCHEDULE_HPP

#include <string>
#include <vector>

#include "bnf/errors.hpp"

namespace bnf {

/// The constants controlling the degree-doubling iteration:
///   kappa = d + 6,          b = 2^-(kappa+3),
///   delta_0 = rho0 * 2^-(kappa+6),  delta_{n+1} = delta_n / 2,
///   q_n = (2b)^(2^-(n+1)),  rho_{n+1} = (rho_n - 3 delta_n) q_n,
///   m_n = 2^n + 1.
struct ConstantsSchedule {
    int d = 0;
    double rho0 = 0.0;
    int kappa = 0;
    double b = 0.0;
    std::vector<double> delta;
    std::vector<double> q;
    std::vector<double> rho;
    std::vector<long long> m;

    int horizon() const { return static_cast<int>(delta.size()) - 1; }
};

ConstantsSchedule build_schedule(int d, double rho0, int horizon);

/// One inequality check at one step of the ledger.
struct LedgerRow {
    std::string family;  // "delta0", "rho_floor", "q_product", "q_power", "delta_tail"
    int n = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct ConvergenceLedger {
    std::vector<LedgerRow> rows;
    bool all_pass = true;
};

/// Checks, for every n up to the horizon:
///   (a) 6 delta_0 < b rho_0
///   (b) rho_n > b rho_0
///   (c) prod_{j<=n} q_j >= 2b
///   (d) q_n^(m_{n+1}+1) < 2b
///   (e) sum_{j>=n} delta_j == 2^(1-n) delta_0  (closed form)
ConvergenceLedger check_convergence_chain(const ConstantsSchedule& s);

/// S_1 = P_1, S_j = P_j + sum_{i=1}^{j-1} 4^-i S_{j-i}.
/// Requires 0 < P_j <= epsilon; the output satisfies S_j <= 2 epsilon.
std::vector<double> majorant_recursion(const std::vector<double>& P,
                                       double epsilon);

}  // namespace bnf

#endif
