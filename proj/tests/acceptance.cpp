// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
//
// Every tolerance below is pinned; none is derived at runtime from the
// quantity it checks (the single recorded baseline for criterion 10 is a
// frozen constant measured once from the seeded suite and committed here).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnf/engine.hpp"
#include "bnf/homology.hpp"
#include "bnf/lie.hpp"
#include "bnf/schedule.hpp"
#include "bnf/tf_series.hpp"

using namespace bnf;
using Clock = std::chrono::steady_clock;

namespace {

MultiDegree deg(std::vector<int> j) { return MultiDegree{std::move(j)}; }
WaveVector mode(std::vector<int> k) { return WaveVector{std::move(k)}; }

QuadraticForm identity_form(int d) {
    return QuadraticForm(Eigen::MatrixXd::Identity(d, d));
}

double elapsed_s(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Random zero-average real-symmetric series with the given degree and mode
// budget.
TFSeries random_zero_average(std::mt19937& rng, int dim, int cap, int min_deg,
                             int max_deg, int max_mode_l1, double amp,
                             int terms) {
    std::uniform_int_distribution<int> edist(0, max_deg);
    std::uniform_int_distribution<int> kdist(-max_mode_l1, max_mode_l1);
    std::uniform_real_distribution<double> cdist(-amp, amp);
    TFSeries F(dim, cap);
    int placed = 0;
    while (placed < terms) {
        std::vector<int> j(dim), k(dim);
        int tot = 0;
        for (int& e : j) {
            e = edist(rng);
            tot += e;
        }
        int kl1 = 0;
        for (int& kk : k) {
            kk = kdist(rng);
            kl1 += std::abs(kk);
        }
        if (tot < min_deg || tot > max_deg || kl1 == 0 || kl1 > max_mode_l1)
            continue;
        Complex c{cdist(rng), cdist(rng)};
        TermKey key{deg(j), mode(k)};
        F.set(key.j, key.k, F.coeff(key) + c);
        TermKey mir{key.j, key.k.negated()};
        F.set(mir.j, mir.k, F.coeff(mir) + std::conj(c));
        ++placed;
    }
    return F;
}

double max_coeff_diff(const TFSeries& a, const TFSeries& b) {
    double worst = 0.0;
    TFSeries d = sub(a, b);
    for (const auto& [key, c] : d.terms())
        worst = std::max(worst, std::abs(c));
    return worst;
}

// All monomial exponent vectors of total degree `total` in `dim` variables.
void enumerate_degrees(int dim, int total, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == dim - 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int e = 0; e <= total; ++e) {
        cur.push_back(e);
        enumerate_degrees(dim, total - e, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> degree_basis(int dim, int total) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    enumerate_degrees(dim, total, cur, out);
    return out;
}

struct FactoryInstance {
    int dim = 0;
    int cap = 0;
    NormalFormProfile profile;
    TFSeries G;
    TFSeries H;
};

FactoryInstance make_factory_instance(std::mt19937& rng, int dim, int cap,
                                      double amp, int max_mode_l1) {
    QuadraticForm q = identity_form(dim);
    std::uniform_real_distribution<double> bdist(0.02, 0.2);
    std::uniform_int_distribution<int> sign(0, 1);
    auto draw_b = [&] { return (sign(rng) ? 1.0 : -1.0) * bdist(rng); };
    NormalFormProfile prof{q, {draw_b(), draw_b()}};
    TFSeries G = random_zero_average(rng, dim, cap, 3, 5, max_mode_l1, amp, 6);
    TFSeries H = make_instance(prof, G, cap);
    return FactoryInstance{dim, cap, prof, G, H};
}

// Recorded once from the seed-4040 suite of criterion 10 (see the matching
// loop below); the criterion checks every ratio against twice this value.
constexpr double kRatioSuiteMax = 1.504854e-04;

bool verdict(int idx, const char* what, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s — %s%s%s\n", idx, ok ? "PASS" : "FAIL",
                what, detail.empty() ? "" : "; ", detail.c_str());
    std::fflush(stdout);
    return ok;
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

}  // namespace

int main() {
    bool all_ok = true;
    std::vector<FactoryInstance> deep_suite;   // cap 17, criteria 3, 4, 6
    std::vector<RunResult> deep_runs;
    std::vector<FactoryInstance> wide_suite;   // cap 9, criteria 3, 5
    std::vector<RunResult> wide_runs;

    // ---- criterion 1: homological round trip -----------------------------
    {
        auto t0 = Clock::now();
        bool ok = true;
        double worst_rel = 0.0;
        for (int d = 1; d <= 3 && ok; ++d) {
            QuadraticForm q = identity_form(d);
            TFSeries n0 = q.n0(8);
            for (int s = 0; s < 50 && ok; ++s) {
                std::mt19937 rng(1000 * d + s);
                TFSeries F =
                    random_zero_average(rng, d, 9, 2, 8, 5, 1.0, 8);
                TFSeries Q = poisson_bracket(n0, F, 9);
                HomologySolution sol = solve_homological(q, Q, 1e-9);
                if (!sol.absorbed.empty()) ok = false;
                for (const auto& [key, c] : F.terms()) {
                    double rel =
                        std::abs(sol.F.coeff(key) - c) / std::abs(c);
                    worst_rel = std::max(worst_rel, rel);
                }
                double fmax = F.max_abs_coeff();
                for (const auto& [key, c] : sol.F.terms())
                    if (F.coeff(key) == Complex{0.0, 0.0})
                        worst_rel =
                            std::max(worst_rel, std::abs(c) / fmax);
            }
        }
        double dt = elapsed_s(t0);
        ok = ok && worst_rel <= 1e-10 && dt <= 30.0;
        all_ok &= verdict(1, "homological round trip (150 seeded solves)", ok,
                          fmt("worst rel err %.3e, %.1f s", worst_rel, dt));
    }

    // ---- criterion 2: obstruction detection ------------------------------
    {
        bool ok = true;
        double min_residue = 1e300, max_pass_residue = 0.0;
        for (int t = 0; t < 20 && ok; ++t) {
            std::mt19937 rng(2000 + t);
            int d = 2 + t % 2;
            QuadraticForm q = identity_form(d);
            std::vector<int> kv(d, 0);
            kv[0] = 1 + t % 2;
            kv[1] = -1;
            WaveVector k{kv};
            // v = <Omega k, I> for the identity form.
            int e = 2 + t % 3;  // numerator degree e + 1
            auto num_basis = degree_basis(d, e + 1);
            auto den_basis = degree_basis(d, e);
            // Multiplication-by-v matrix in the monomial bases.
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(
                static_cast<int>(num_basis.size()),
                static_cast<int>(den_basis.size()));
            auto index_of = [&](const std::vector<int>& j) {
                for (size_t i = 0; i < num_basis.size(); ++i)
                    if (num_basis[i] == j) return static_cast<int>(i);
                return -1;
            };
            for (size_t c = 0; c < den_basis.size(); ++c)
                for (int i = 0; i < d; ++i) {
                    if (kv[i] == 0) continue;
                    std::vector<int> j = den_basis[c];
                    j[i] += 1;
                    M(index_of(j), static_cast<int>(c)) +=
                        static_cast<double>(kv[i]);
                }
            std::uniform_real_distribution<double> cdist(-1.0, 1.0);
            Eigen::VectorXd p(num_basis.size());
            for (int i = 0; i < p.size(); ++i) p(i) = cdist(rng);
            // Independent orthogonal complement of the image of M.
            Eigen::VectorXd fit =
                M.colPivHouseholderQr().solve(p);
            Eigen::VectorXd perp = p - M * fit;
            if (perp.norm() < 1e-6) { ok = false; break; }
            perp *= 0.5 / perp.norm();  // planted residue exactly 0.5
            TFSeries Q(d, e + 2);
            for (size_t i = 0; i < num_basis.size(); ++i) {
                if (perp(static_cast<int>(i)) == 0.0) continue;
                Q.set(deg(num_basis[i]), k, perp(static_cast<int>(i)));
                Q.set(deg(num_basis[i]), k.negated(),
                      perp(static_cast<int>(i)));
            }
            bool threw = false;
            try {
                solve_homological(q, Q, 1e-9);
            } catch (const ObstructionDetected& exc) {
                threw = true;
                min_residue = std::min(min_residue, exc.worst_residue);
            }
            if (!threw) ok = false;
        }
        ok = ok && min_residue >= 1e-3;
        for (int t = 0; t < 20 && ok; ++t) {
            std::mt19937 rng(2100 + t);
            int d = 1 + t % 3;
            QuadraticForm q = identity_form(d);
            TFSeries quot =
                random_zero_average(rng, d, 8, 2, 5, 3, 1.0, 6);
            // Q = v_k * quot_k per mode: multiply by the degree-1 action
            // polynomial <k, I> mode by mode.
            TFSeries Q(d, 9);
            for (const auto& [key, c] : quot.terms()) {
                for (int i = 0; i < d; ++i) {
                    if (key.k.k[i] == 0) continue;
                    std::vector<int> j = key.j.j;
                    j[i] += 1;
                    TermKey nk{deg(j), key.k};
                    Q.set(nk.j, nk.k,
                          Q.coeff(nk) +
                              c * static_cast<double>(key.k.k[i]));
                }
            }
            try {
                HomologySolution sol = solve_homological(q, Q, 1e-9);
                max_pass_residue =
                    std::max(max_pass_residue, sol.worst_residue);
            } catch (const ObstructionDetected&) {
                ok = false;
            }
        }
        ok = ok && max_pass_residue <= 1e-10;
        all_ok &= verdict(
            2, "obstruction detection (20 planted + 20 divisible)", ok,
            fmt("min planted residue %.3e, max divisible residue %.3e",
                min_residue, max_pass_residue));
    }

    // ---- factory suites ---------------------------------------------------
    double worst_instance_s = 0.0;
    {
        std::mt19937 rng(3030);
        for (int t = 0; t < 4; ++t) {
            FactoryInstance inst =
                make_factory_instance(rng, 1 + t % 2, 17, 0.01, 4);
            EngineOptions opts;
            opts.profile = inst.profile;
            auto t0 = Clock::now();
            deep_runs.push_back(run(inst.H, inst.profile.omega, 3, 17, opts));
            worst_instance_s = std::max(worst_instance_s, elapsed_s(t0));
            deep_suite.push_back(std::move(inst));
        }
        std::mt19937 rng2(3131);
        for (int t = 0; t < 20; ++t) {
            FactoryInstance inst =
                make_factory_instance(rng2, 1 + t % 2, 9, 0.005, 2);
            EngineOptions opts;
            opts.profile = inst.profile;
            wide_runs.push_back(run(inst.H, inst.profile.omega, 3, 9, opts));
            wide_suite.push_back(std::move(inst));
        }
    }

    // ---- criterion 3: degree doubling, exact integers ---------------------
    {
        bool ok = true;
        auto check_run = [&](const RunResult& res) {
            for (size_t n = 0; n < res.steps.size(); ++n) {
                const NewtonStepReport& rep = res.steps[n];
                if (rep.m != (1LL << n) + 1) ok = false;
                if (rep.m_next != (1LL << (n + 1)) + 1) ok = false;
                // Normalized head: theta-free through m_{n+1}, nothing above.
                if (!project_nonzero_modes(rep.next.N).empty()) ok = false;
                if (!rep.next.N.empty() &&
                    rep.next.N.highest_degree() >
                        static_cast<int>(rep.m_next))
                    ok = false;
                if (!rep.next.R.empty() &&
                    rep.next.R.lowest_degree() <=
                        static_cast<int>(rep.m_next))
                    ok = false;
            }
        };
        for (const RunResult& r : deep_runs) check_run(r);
        for (const RunResult& r : wide_runs) check_run(r);
        all_ok &= verdict(3,
                          "degree doubling m_n = 2^n + 1 on all 24 factory "
                          "instances (exact)",
                          ok, "");
    }

    // ---- criterion 4: ground-truth recovery -------------------------------
    {
        bool ok = true;
        double worst_rel = 0.0;
        for (size_t i = 0; i < deep_runs.size(); ++i) {
            const std::vector<double>& want = deep_suite[i].profile.b;
            const std::vector<double>& got = deep_runs[i].b;
            if (got.size() < want.size()) { ok = false; continue; }
            for (size_t j = 0; j < want.size(); ++j)
                worst_rel = std::max(
                    worst_rel, std::abs(got[j] - want[j]) / std::abs(want[j]));
        }
        ok = ok && worst_rel <= 1e-8 && worst_instance_s <= 120.0;
        all_ok &= verdict(
            4, "ground-truth b recovery (4 instances, cap 17, 3 steps)", ok,
            fmt("worst rel err %.3e, slowest instance %.1f s", worst_rel,
                worst_instance_s));
    }

    // ---- criterion 5: oracle equivalence ----------------------------------
    {
        bool ok = true;
        double worst = 0.0;
        for (size_t i = 0; i < wide_suite.size(); ++i) {
            OracleResult orc =
                classical_oracle(wide_suite[i].H, wide_suite[i].profile.omega,
                                 9);
            worst = std::max(
                worst, max_coeff_diff(wide_runs[i].normal_form,
                                      orc.normal_form));
        }
        ok = worst <= 1e-8;
        all_ok &= verdict(
            5, "oracle equivalence on 20 factory instances", ok,
            fmt("max normal-form coefficient diff %.3e", worst));
    }

    // ---- criterion 6: symplecticity of every step flow --------------------
    {
        bool ok = true;
        double worst = 0.0;
        for (const RunResult& res : deep_runs)
            for (const NewtonStepReport& rep : res.steps)
                worst = std::max(worst,
                                 symplecticity_defect(rep.phi, 10));
        ok = worst <= 1e-10;
        all_ok &= verdict(
            6, "symplecticity defect of all 12 step flows", ok,
            fmt("max defect %.3e", worst));
    }

    // ---- criterion 7: schedule ledger -------------------------------------
    {
        auto t0 = Clock::now();
        bool ok = true;
        const char* families[] = {"delta0", "rho_floor", "q_product",
                                  "q_power", "delta_tail"};
        for (int d = 1; d <= 6; ++d)
            for (double rho0 : {0.25, 0.5, 1.0}) {
                ConvergenceLedger led =
                    check_convergence_chain(build_schedule(d, rho0, 30));
                if (!led.all_pass) ok = false;
                for (const char* fam : families) {
                    bool seen = false;
                    for (const LedgerRow& row : led.rows)
                        if (row.family == fam) seen = true;
                    if (!seen) ok = false;
                }
            }
        double dt = elapsed_s(t0);
        ok = ok && dt <= 1.0;
        all_ok &= verdict(
            7, "schedule ledger, 18 configurations x horizon 30", ok,
            fmt("%.3f s", dt));
    }

    // ---- criterion 8: majorant recursion ----------------------------------
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::mt19937 rng(8080);
        std::uniform_real_distribution<double> edist(1e-8, 1.0);
        std::uniform_int_distribution<int> ldist(1, 1025);
        for (int t = 0; t < 10000 && ok; ++t) {
            int len = (t < 10 ? 1025 : ldist(rng));
            double eps = edist(rng);
            std::uniform_real_distribution<double> pdist(1e-12, eps);
            std::vector<double> P(len);
            for (double& p : P) p = pdist(rng);
            std::vector<double> S = majorant_recursion(P, eps);
            for (size_t j = 0; j < S.size(); ++j) {
                if (S[j] > 2.0 * eps) ok = false;
                double prev = j == 0 ? 0.0 : S[j - 1];
                if (S[j] > P[j] + prev / 2.0 + 1e-300) ok = false;
            }
        }
        double dt = elapsed_s(t0);
        ok = ok && dt <= 10.0;
        all_ok &= verdict(
            8, "majorant recursion S_j <= 2 eps over 10^4 suites", ok,
            fmt("%.2f s", dt));
    }

    // ---- criteria 9 and 11: compliant run ----------------------------------
    {
        std::mt19937 rng(9090);
        FactoryInstance inst = make_factory_instance(rng, 1, 9, 0.005, 2);
        EngineOptions opts;
        opts.compliant = true;
        // No prescribed profile: the lemma-base prescale rescales the
        // effective b coefficients, so the profile must be rediscovered
        // from the scaled Hamiltonian.
        bool ok9 = true, ok11 = true;
        double worst_c_gap = 0.0, worst_r_ratio = 0.0;
        int checked9 = 0;
        std::string detail9, detail11;
        try {
            RunResult res = run(inst.H, inst.profile.omega, 3, 9, opts);
            // Independent schedule arithmetic: d = 1, rho0 = 1.
            const int kappa = 1 + 6;
            auto delta = [&](int n) { return std::ldexp(1.0, -(kappa + 6) - n); };
            for (size_t n = 0; n < res.steps.size(); ++n) {
                const NewtonStepReport& rep = res.steps[n];
                if (rep.flags.est_g) {
                    ++checked9;
                    if (rep.norm_C > rep.c_bound_formula * (1.0 + 1e-12))
                        ok9 = false;
                    if (rep.c_bound_formula >
                        std::pow(delta(static_cast<int>(n)), kappa))
                        ok9 = false;
                    worst_c_gap = std::max(
                        worst_c_gap,
                        rep.c_bound_formula == 0.0
                            ? 0.0
                            : rep.norm_C / rep.c_bound_formula);
                }
                double budget =
                    std::pow(delta(static_cast<int>(n) + 1), kappa);
                if (rep.norm_R_after > budget) ok11 = false;
                worst_r_ratio =
                    std::max(worst_r_ratio, rep.norm_R_after / budget);
            }
            ok9 = ok9 && checked9 == 3;
            detail9 = fmt("max |C_n|/bound %.3e on 3 steps", worst_c_gap);
            detail11 = fmt("max |R_{n+1}| / delta_{n+1}^kappa %.3e",
                           worst_r_ratio);
        } catch (const std::exception& exc) {
            ok9 = ok11 = false;
            detail9 = detail11 = std::string("run threw: ") + exc.what();
        }
        all_ok &= verdict(9, "C_n bound on compliant steps with |g_j| <= 4^-j",
                          ok9, detail9);

        // ---- criterion 10: norm inequalities (before printing 11) ---------
        {
            bool ok = true;
            double worst_sup = 0.0, worst_sub = 0.0, worst_ratio = 0.0;
            std::mt19937 r10(4040);
            std::uniform_real_distribution<double> idist(-0.5, 0.5);
            std::uniform_real_distribution<double> tdist(0.0, 1.0);
            DomainBox box(0.5, 0.25);
            for (int t = 0; t < 100; ++t) {
                int d = 1 + t % 3;
                TFSeries f = random_zero_average(r10, d, 8, 2, 6, 3, 1.0, 8);
                double nf = majorant_norm(f, box);
                for (int s = 0; s < 20; ++s) {
                    std::vector<double> I(d), th(d);
                    for (double& v : I) v = idist(r10);
                    for (double& v : th) v = tdist(r10);
                    worst_sup = std::max(
                        worst_sup, std::abs(f.evaluate(I, th)) / nf);
                }
                TFSeries g = random_zero_average(r10, d, 8, 2, 6, 3, 1.0, 8);
                double prod = majorant_norm(mul(f, g, 16), box);
                worst_sub = std::max(
                    worst_sub, prod / (nf * majorant_norm(g, box)));
                QuadraticForm q = identity_form(d);
                TFSeries Q = poisson_bracket(q.n0(8), f, 9);
                HomologySolution sol = solve_homological(q, Q, 1e-9);
                worst_ratio = std::max(
                    worst_ratio,
                    homological_norm_ratio(sol.F, Q, box, 0.1, 0.05));
            }
            ok = worst_sup <= 1.0 + 1e-12 && worst_sub <= 1.0 + 1e-12 &&
                 worst_ratio <= 2.0 * kRatioSuiteMax;
            all_ok &= verdict(
                10, "norm inequalities over 100 random instances each", ok,
                fmt("sup/majorant %.6f, submult %.6f", worst_sup, worst_sub) +
                    fmt(", ratio %.6e vs frozen max", worst_ratio));
        }

        all_ok &= verdict(
            11, "compliant contraction |R_{n+1}| <= delta_{n+1}^kappa, n=0..2",
            ok11, detail11);
    }

    std::printf("acceptance: %s\n", all_ok ? "ALL PASS" : "FAILURES");
    return all_ok ? 0 : 1;
}
