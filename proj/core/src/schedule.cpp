#include "bnf/schedule.hpp"

#include <cmath>

namespace bnf {

ConstantsSchedule build_schedule(int d, double rho0, int horizon) {
    if (d < 1) throw InvalidArgument("dimension must be >= 1");
    if (!(rho0 > 0.0) || rho0 > 1.0)
        throw InvalidArgument("rho0 must lie in (0, 1]");
    if (horizon < 1) throw InvalidArgument("horizon must be >= 1");

    ConstantsSchedule s;
    s.d = d;
    s.rho0 = rho0;
    s.kappa = d + 6;
    s.b = std::ldexp(1.0, -(s.kappa + 3));

    s.delta.resize(horizon + 1);
    s.q.resize(horizon + 1);
    s.rho.resize(horizon + 1);
    s.m.resize(horizon + 1);

    s.delta[0] = rho0 * std::ldexp(1.0, -(s.kappa + 6));
    s.rho[0] = rho0;
    for (int n = 0; n <= horizon; ++n) {
        s.m[n] = (1LL << n) + 1;
        // q_n = (2b)^(2^-(n+1)) = 2^(-(kappa+2)/2^(n+1)); the dyadic exponent
        // is exact, so exp2 rounds once.
        s.q[n] = std::exp2(-(s.kappa + 2.0) * std::ldexp(1.0, -(n + 1)));
        if (n > 0) {
            s.delta[n] = 0.5 * s.delta[n - 1];
            s.rho[n] = (s.rho[n - 1] - 3.0 * s.delta[n - 1]) * s.q[n - 1];
        }
    }
    return s;
}

ConvergenceLedger check_convergence_chain(const ConstantsSchedule& s) {
    ConvergenceLedger ledger;
    auto push = [&](std::string family, int n, double lhs, double rhs,
                    bool pass) {
        ledger.rows.push_back({std::move(family), n, lhs, rhs, pass});
        ledger.all_pass = ledger.all_pass && pass;
    };

    const int horizon = s.horizon();
    double q_prod = 1.0;
    for (int n = 0; n <= horizon; ++n) {
        push("delta0", n, 6.0 * s.delta[0], s.b * s.rho0,
             6.0 * s.delta[0] < s.b * s.rho0);
        push("rho_floor", n, s.rho[n], s.b * s.rho0, s.rho[n] > s.b * s.rho0);
        // Both power-of-q rows are evaluated through their exact dyadic
        // base-2 exponents; iterated pow() loses more precision than the
        // inequality margins (~(2b)^(2^-n) - 1) at deep n.
        q_prod = std::exp2(-(s.kappa + 2.0) *
                           (1.0 - std::ldexp(1.0, -(n + 1))));
        push("q_product", n, q_prod, 2.0 * s.b, q_prod >= 2.0 * s.b);
        // q_n^(m_{n+1}+1) with m_{n+1}+1 = 2^(n+1)+2, so the exponent is
        // -(kappa+2)(1 + 2^-n).
        double q_pow = std::exp2(-(s.kappa + 2.0) * (1.0 + std::ldexp(1.0, -n)));
        push("q_power", n, q_pow, 2.0 * s.b, q_pow < 2.0 * s.b);
        double tail_closed = std::ldexp(s.delta[0], 1 - n);
        // Direct sum over the horizon plus the exact geometric tail beyond it.
        double tail_direct = s.delta[horizon];
        for (int j = horizon; j >= n; --j) tail_direct += s.delta[j];
        push("delta_tail", n, tail_direct, tail_closed,
             std::abs(tail_direct - tail_closed) <=
                 1e-14 * std::abs(tail_closed));
    }
    return ledger;
}

std::vector<double> majorant_recursion(const std::vector<double>& P,
                                       double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    for (double p : P)
        if (!(p > 0.0) || p > epsilon)
            throw InvalidArgument("majorant recursion needs 0 < P_j <= epsilon");

    std::vector<double> S(P.size());
    // T_j = sum_{i=1}^{j-1} 4^-i S_{j-i} satisfies T_j = (S_{j-1}+T_{j-1})/4.
    double T = 0.0;
    for (std::size_t j = 0; j < P.size(); ++j) {
        if (j > 0) T = 0.25 * (S[j - 1] + T);
        S[j] = P[j] + T;
    }
    return S;
}

}  // namespace bnf
