#include "bnf/engine.hpp"

#include <algorithm>
#include <cmath>

namespace bnf {

namespace {

double coeff_norm2(const TFSeries& f) {
    double s = 0.0;
    for (const auto& [key, c] : f.terms()) s += std::norm(c);
    return std::sqrt(s);
}

// Real inner product of the coefficient vectors (imaginary parts are treated
// as fit residue, not signal).
double coeff_dot_real(const TFSeries& a, const TFSeries& b) {
    double s = 0.0;
    for (const auto& [key, c] : a.terms()) s += c.real() * b.coeff(key).real();
    return s;
}

}  // namespace

TFSeries NormalFormProfile::normal_form(int degree_cap) const {
    TFSeries n0 = omega.n0(degree_cap);
    TFSeries out = n0;
    TFSeries power = n0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        power = mul(power, n0, degree_cap);  // N0^(i+2)
        if (power.empty()) break;
        if (b[i] != 0.0) out = add(out, scaled(power, b[i]));
    }
    return out;
}

TFSeries NormalFormProfile::multiplier(int m, int degree_cap) const {
    if (m < 3) throw InvalidArgument("multipliers are defined for m >= 3");
    TFSeries out(omega.dim(), degree_cap);
    if (m % 2 != 0) return out;  // g_{2j+1} == 0
    int j = m / 2;
    if (j - 2 >= static_cast<int>(b.size()) || b[j - 2] == 0.0) return out;
    TFSeries n0 = omega.n0(degree_cap);
    TFSeries power = TFSeries::monomial(
        omega.dim(), degree_cap, MultiDegree{std::vector<int>(omega.dim(), 0)},
        WaveVector{std::vector<int>(omega.dim(), 0)}, 1.0);
    for (int p = 0; p < j - 1; ++p) power = mul(power, n0, degree_cap);
    return scaled(power, static_cast<double>(j) * b[j - 2]);
}

HamiltonianState HamiltonianState::initial(const TFSeries& H0,
                                           const QuadraticForm& omega,
                                           double tol) {
    if (H0.dim() != omega.dim())
        throw DimensionMismatch("Hamiltonian dimension differs from Omega");
    TFSeries low = project_degrees(H0, 0, 1);
    if (!low.empty())
        throw InvalidArgument("H0 has terms of degree < 2");
    TFSeries deg2 = project_degrees(H0, 2, 2);
    if (!project_nonzero_modes(deg2).empty())
        throw InvalidArgument("H0 has theta-dependent quadratic terms");
    TFSeries n0 = omega.n0(H0.degree_cap());
    if (coeff_norm2(sub(deg2, n0)) > tol * std::max(1.0, coeff_norm2(n0)))
        throw InvalidArgument("quadratic part of H0 does not match Omega");

    HamiltonianState state;
    state.n = 0;
    state.N = deg2;
    state.R = project_degrees(H0, 3, H0.degree_cap());
    return state;
}

NewtonStepReport newton_step(const HamiltonianState& state,
                             const QuadraticForm& omega,
                             const EngineOptions& opts,
                             const ConstantsSchedule& schedule, int degree_cap) {
    const int d = omega.dim();
    const long long m = state.m();
    const long long m1 = 2 * m - 1;
    if (degree_cap < m1)
        throw DegreeBudgetExceeded("degree cap " + std::to_string(degree_cap) +
                                   " below m_{n+1} = " + std::to_string(m1));
    if (schedule.horizon() < state.n + 1)
        throw InvalidArgument("schedule horizon too short for this step");

    const double rho_n = schedule.rho[state.n];
    const double rho_n1 = schedule.rho[state.n + 1];
    const double delta_n = schedule.delta[state.n];
    const DomainBox box_n(rho_n, rho_n);

    NewtonStepReport rep;
    rep.n = state.n;
    rep.m = m;
    rep.m_next = m1;
    rep.norm_R_before = majorant_norm(state.R, box_n);
    rep.c_bound_schedule = std::pow(delta_n, schedule.kappa);

    // Multipliers g_3..g_m, from the prescribed profile or fitted from N_n.
    std::vector<double> b_coeffs;
    if (opts.profile) {
        b_coeffs = opts.profile->b;
    } else {
        A3Result fit = verify_A3(state.N, omega, opts.tol);
        if (!fit.pass)
            throw A3Violation("current normal form is not a function of N0");
        b_coeffs = fit.b;
    }
    NormalFormProfile gsrc{omega, b_coeffs};
    std::vector<TFSeries> g;  // g[l] = g_{l+3}
    for (long long l = 3; l <= m; ++l)
        g.push_back(gsrc.multiplier(static_cast<int>(l), degree_cap));

    // Triangular solve of the order-by-order system: for j = 1..m-1, the
    // unknown X_j = {N0, F^{[m+j-1]}} satisfies
    //   X_j = N^{[m+j]} - R^{[m+j]} - sum_{i<j} g_{j-i+2} X_i,
    // where N^{[m+j]} is exactly the k = 0 content of the right-hand side.
    std::vector<TFSeries> X;
    TFSeries F(d, degree_cap);
    for (long long j = 1; j <= m - 1; ++j) {
        TFSeries Y = negated(project_degrees(state.R, m + j, m + j));
        for (long long i = 1; i < j; ++i) {
            long long l = j - i + 2;
            if (l >= 3 && !g[l - 3].empty())
                Y = sub(Y, mul(g[l - 3], X[i - 1], static_cast<int>(m + j)));
        }
        TFSeries Xj = project_nonzero_modes(Y);
        X.push_back(Xj);
        rep.S.push_back(majorant_norm(Xj, box_n));

        // Truncated-arithmetic noise in Xj scales with the norm of the
        // whole Hamiltonian the step works on, not with the possibly tiny
        // Xj itself; widen the residue tolerance accordingly.
        DomainBox ref_box(0.5, 0.05);
        double h_scale =
            majorant_norm(add(state.N, state.R), ref_box);
        double q_scale = majorant_norm(Xj, ref_box);
        double tol_eff = opts.tol;
        if (q_scale > 0.0 && h_scale > q_scale) tol_eff *= h_scale / q_scale;
        HomologySolution sol =
            solve_homological(omega, Xj, tol_eff, SolveMode::Strict);
        rep.worst_residue = std::max(rep.worst_residue, sol.worst_residue);
        F = add(F, sol.F);
    }
    rep.F = F;

    // Pull back and split H_{n+1} = N_{n+1} + R_{n+1}; any k != 0 content
    // left in degrees <= m_{n+1} is the structural defect of the step.
    TFSeries H = add(state.N, state.R);
    TFSeries H1 = lie_pullback(H, F, degree_cap);
    TFSeries head = project_degrees(H1, 0, static_cast<int>(m1));
    TFSeries defect = project_nonzero_modes(head);
    rep.low_degree_defect = majorant_norm(defect, box_n);
    if (rep.low_degree_defect > opts.tol * std::max(1.0, rep.norm_R_before))
        throw InvalidArgument(
            "structural identity failed: k != 0 content of degree <= m_{n+1} "
            "has norm " +
            std::to_string(rep.low_degree_defect));

    rep.next.n = state.n + 1;
    rep.next.N = project_zero_mode(head);
    rep.next.R = project_degrees(H1, static_cast<int>(m1) + 1, degree_cap);
    rep.norm_R_after = majorant_norm(rep.next.R, DomainBox(rho_n1, rho_n1));

    // C_n = sum_{k=1}^{m-2} {F^{[2m-1-k]}, N0} (sum_{j=k+2}^{m} g_j).
    TFSeries C(d, degree_cap);
    for (long long k = 1; k <= m - 2; ++k) {
        TFSeries gsum(d, degree_cap);
        for (long long j = k + 2; j <= m; ++j) gsum = add(gsum, g[j - 3]);
        if (gsum.empty()) continue;
        // {F^{[2m-1-k]}, N0} = -X_{m-k}.
        C = add(C, mul(negated(X[m - k - 1]), gsum, degree_cap));
    }
    rep.C = C;
    rep.norm_C = majorant_norm(C, box_n);
    for (long long k = 1; k <= m - 2; ++k)
        rep.c_bound_formula += std::pow(4.0, -static_cast<double>(k + 1)) *
                               rep.S[m - k - 1] / 3.0;

    rep.phi = flow_coordinates(F, degree_cap);
    double shrink = rho_n - 3.0 * delta_n;
    if (shrink > 0.0) {
        DomainBox dev_box(shrink, shrink);
        for (int i = 0; i < d; ++i) {
            TFSeries du = sub(rep.phi.U[i],
                              TFSeries::action_coordinate(d, degree_cap, i));
            rep.coord_deviation += majorant_norm(du, dev_box);
            rep.coord_deviation += majorant_norm(rep.phi.v[i], dev_box);
        }
    }

    // Per-step hypotheses of the schedule.
    double delta_pow_k1 = std::pow(delta_n, schedule.kappa + 1);
    for (long long deg = m; deg <= m1; ++deg) {
        TFSeries block = project_degrees(rep.next.N, deg, deg);
        if (deg == 2) continue;  // N0 itself is not part of est_N
        if (majorant_norm(block, box_n) >= delta_pow_k1) rep.flags.est_N = false;
    }
    for (long long l = 3; l <= m; ++l) {
        if (majorant_norm(g[l - 3], box_n) > std::pow(4.0, -static_cast<double>(l)))
            rep.flags.est_g = false;
    }
    rep.flags.est_Rn =
        rep.norm_R_after <= std::pow(schedule.delta[state.n + 1], schedule.kappa);
    rep.flags.est_Phi = rep.coord_deviation < delta_n;

    A3Result a3 = verify_A3(rep.next.N, omega, opts.tol);
    if (!a3.pass)
        throw A3Violation("extracted normal form violates A3 at step " +
                          std::to_string(state.n));
    rep.b_extracted = a3.b;
    rep.a3_residuals = a3.residuals;
    return rep;
}

RunResult run(const TFSeries& H0, const QuadraticForm& omega, int steps,
              int degree_cap, const EngineOptions& opts) {
    if (steps < 1) throw InvalidArgument("need at least one step");
    long long m_final = (1LL << steps) + 1;
    if (degree_cap < m_final)
        throw DegreeBudgetExceeded(
            "degree cap " + std::to_string(degree_cap) +
            " cannot host " + std::to_string(steps) + " steps (m_" +
            std::to_string(steps) + " = " + std::to_string(m_final) + ")");

    ConstantsSchedule schedule =
        build_schedule(omega.dim(), opts.rho0, std::max(steps + 1, 2));

    RunResult result;
    TFSeries H = H0;
    HamiltonianState state = HamiltonianState::initial(H, omega, opts.tol);

    if (opts.compliant) {
        double r0 =
            majorant_norm(state.R, DomainBox(schedule.rho[0], schedule.rho[0]));
        double budget = std::pow(schedule.delta[0], schedule.kappa);
        if (r0 > budget) {
            result.prescale = budget / r0;
            H = scale_hamiltonian(H0, result.prescale);
            state = HamiltonianState::initial(H, omega, opts.tol);
        }
    }

    result.transform = CoordinateMap::identity(omega.dim(), degree_cap);
    for (int n = 0; n < steps; ++n) {
        NewtonStepReport rep =
            newton_step(state, omega, opts, schedule, degree_cap);
        if (opts.compliant && !rep.flags.all())
            throw ScheduleHypothesisFailure(
                "schedule hypothesis failed at step " + std::to_string(n));
        // (Phi_acc o X_F^1) coordinatewise: composing with a flow map is a
        // Lie pullback of each coordinate series, which stays linear in the
        // accumulated size where generic compose_maps substitution does not.
        for (int i = 0; i < omega.dim(); ++i) {
            result.transform.U[i] =
                lie_pullback(result.transform.U[i], rep.F, degree_cap);
            result.transform.v[i] =
                add(rep.phi.v[i],
                    lie_pullback(result.transform.v[i], rep.F, degree_cap));
        }
        state = rep.next;
        result.steps.push_back(std::move(rep));
    }

    result.normal_form = state.N;
    A3Result a3 = verify_A3(state.N, omega, opts.tol);
    result.b = a3.b;
    result.a3_residuals = a3.residuals;
    return result;
}

TFSeries scale_hamiltonian(const TFSeries& H, double a) {
    if (!(a > 0.0)) throw InvalidArgument("scale factor must be positive");
    TFSeries out(H.dim(), H.degree_cap());
    for (const auto& [key, c] : H.terms())
        out.set(key.j, key.k, c * std::pow(a, key.j.total() - 2));
    return out;
}

TFSeries make_instance(const NormalFormProfile& profile, const TFSeries& G,
                       int degree_cap) {
    if (!G.empty()) {
        if (G.lowest_degree() < 2)
            throw InvalidArgument("generator must have lowest degree >= 2");
        if (!project_zero_mode(G).empty())
            throw InvalidArgument(
                "generator must be zero-average (resonance-free)");
    }
    TFSeries N = profile.normal_form(degree_cap);
    return lie_pullback(N, negated(G), degree_cap);
}

OracleResult classical_oracle(const TFSeries& H, const QuadraticForm& omega,
                              int degree_cap, double tol) {
    HamiltonianState::initial(H, omega, tol);  // shape validation only
    OracleResult out{TFSeries(H.dim(), degree_cap), {}};
    TFSeries Hc = project_degrees(H, 0, degree_cap);
    for (int deg = 3; deg <= degree_cap; ++deg) {
        TFSeries Q = project_nonzero_modes(project_degrees(Hc, deg, deg));
        if (Q.empty()) continue;
        // As in newton_step, roundoff noise in Q scales with the whole
        // Hamiltonian, not with the (often tiny) per-degree block.
        DomainBox ref_box(0.5, 0.05);
        double h_scale = majorant_norm(Hc, ref_box);
        double q_scale = majorant_norm(Q, ref_box);
        double tol_eff = tol;
        if (q_scale > 0.0 && h_scale > q_scale) tol_eff *= h_scale / q_scale;
        HomologySolution sol =
            solve_homological(omega, negated(Q), tol_eff, SolveMode::Strict);
        Hc = lie_pullback(Hc, sol.F, degree_cap);
        out.generators.push_back(sol.F);
    }
    TFSeries leftover = project_nonzero_modes(Hc);
    double defect = majorant_norm(leftover, DomainBox(0.5, 0.05));
    if (defect > tol * std::max(1.0, majorant_norm(Hc, DomainBox(0.5, 0.05))))
        throw InvalidArgument("oracle left theta-dependent content behind");
    out.normal_form = project_zero_mode(Hc);
    return out;
}

A3Result verify_A3(const TFSeries& N, const QuadraticForm& omega, double tol) {
    if (!N.empty() && N.lowest_degree() < 2)
        throw InvalidArgument("normal form must have degrees >= 2");
    A3Result out;
    double scale = coeff_norm2(N);
    if (scale == 0.0) return out;

    int top = N.highest_degree();
    TFSeries n0 = omega.n0(std::max(top, 2));
    TFSeries power = n0;  // N0^j while scanning degree 2j

    for (int deg = 2; deg <= top; ++deg) {
        TFSeries block = project_degrees(N, deg, deg);
        if (deg % 2 != 0) {
            // Odd content cannot be a function of N0; report it in full.
            double r = coeff_norm2(block);
            if (r > 0.0) out.residuals[deg] = r;
            if (r > tol * scale) out.pass = false;
            continue;
        }
        int j = deg / 2;
        if (j > 1)
            power = (j == 2) ? mul(n0, n0, top) : mul(power, n0, top);
        double denom = coeff_dot_real(power, power);
        double bj = denom > 0.0 ? coeff_dot_real(block, power) / denom : 0.0;
        double r = coeff_norm2(sub(block, scaled(power, bj)));
        out.residuals[deg] = r;
        if (r > tol * scale) out.pass = false;
        if (j >= 2) {
            out.b.resize(std::max<std::size_t>(out.b.size(), j - 1), 0.0);
            out.b[j - 2] = bj;
        }
    }
    return out;
}

}  // namespace bnf
