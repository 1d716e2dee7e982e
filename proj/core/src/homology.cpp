#include "bnf/homology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bnf {

namespace {

// Monomial exponent vectors of total degree `deg` in `dim` variables, in a
// fixed (lexicographic) order.
void enumerate_monomials(int dim, int deg, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == dim - 1) {
        cur.push_back(deg);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int e = deg; e >= 0; --e) {
        cur.push_back(e);
        enumerate_monomials(dim, deg - e, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> monomials(int dim, int deg) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    enumerate_monomials(dim, deg, cur, out);
    return out;
}

}  // namespace

QuadraticForm::QuadraticForm(Eigen::MatrixXd omega, double nondegeneracy_floor)
    : omega_(std::move(omega)) {
    if (omega_.rows() != omega_.cols() || omega_.rows() < 1)
        throw InvalidArgument("Omega must be a square matrix");
    double sym_defect = (omega_ - omega_.transpose()).cwiseAbs().maxCoeff();
    if (sym_defect > 1e-12)
        throw InvalidArgument("Omega symmetry defect exceeds 1e-12");
    if (std::abs(omega_.determinant()) < nondegeneracy_floor)
        throw InvalidArgument("Omega is degenerate: |det| below the floor");
}

TFSeries QuadraticForm::n0(int degree_cap) const {
    const int d = dim();
    TFSeries out(d, degree_cap);
    WaveVector k0{std::vector<int>(d, 0)};
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (omega_(a, b) == 0.0) continue;
            MultiDegree j{std::vector<int>(d, 0)};
            ++j.j[a];
            ++j.j[b];
            TermKey key{j, k0};
            out.set(j, k0, out.coeff(key) + omega_(a, b));
        }
    return out;
}

ActionPolynomial linear_form(const QuadraticForm& omega, const WaveVector& k) {
    const int d = omega.dim();
    if (static_cast<int>(k.k.size()) != d)
        throw DimensionMismatch("wave vector dimension differs from Omega");
    Eigen::VectorXd kv(d);
    for (int i = 0; i < d; ++i) kv[i] = k.k[i];
    Eigen::VectorXd w = omega.omega() * kv;
    TFSeries out(d, 1);
    for (int i = 0; i < d; ++i) {
        if (w[i] == 0.0) continue;
        MultiDegree j{std::vector<int>(d, 0)};
        j.j[i] = 1;
        out.set(std::move(j), WaveVector{std::vector<int>(d, 0)}, w[i]);
    }
    return ActionPolynomial{std::move(out)};
}

DivisionResult divide_by_linear_form(const TFSeries& p, const TFSeries& v) {
    const int d = p.dim();
    if (v.dim() != d) throw DimensionMismatch("mixed dimensions in division");
    if (v.empty()) throw InvalidArgument("division by the zero linear form");

    // p must be homogeneous; an empty p divides exactly.
    if (p.empty()) return {TFSeries(d, p.degree_cap()), 0.0};
    const int deg_p = p.lowest_degree();
    if (deg_p != p.highest_degree())
        throw InvalidArgument("divide_by_linear_form needs a homogeneous input");

    Eigen::VectorXd lf = Eigen::VectorXd::Zero(d);
    for (const auto& [key, c] : v.terms()) {
        if (!key.k.is_zero() || key.j.total() != 1)
            throw InvalidArgument("divisor is not a linear action form");
        for (int i = 0; i < d; ++i)
            if (key.j.j[i] == 1) lf[i] = c.real();
    }

    if (deg_p == 0) {
        // No degree -1 quotient space; the whole input is residue.
        double r = 0.0;
        for (const auto& [key, c] : p.terms()) r = std::hypot(r, std::abs(c));
        return {TFSeries(d, p.degree_cap()), r};
    }

    const int e = deg_p - 1;
    auto rows = monomials(d, deg_p);
    auto cols = monomials(d, e);
    std::map<std::vector<int>, int> row_index;
    for (std::size_t r = 0; r < rows.size(); ++r) row_index[rows[r]] = static_cast<int>(r);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows.size(), cols.size());
    for (std::size_t cidx = 0; cidx < cols.size(); ++cidx) {
        for (int i = 0; i < d; ++i) {
            if (lf[i] == 0.0) continue;
            std::vector<int> target = cols[cidx];
            ++target[i];
            M(row_index.at(target), cidx) += lf[i];
        }
    }

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows.size());
    for (const auto& [key, c] : p.terms()) rhs[row_index.at(key.j.j)] = c;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::VectorXd q_re = qr.solve(rhs.real());
    Eigen::VectorXd q_im = qr.solve(rhs.imag());
    Eigen::VectorXcd q = q_re + Complex{0.0, 1.0} * q_im;
    double residue = (M * q - rhs).norm();

    TFSeries quotient(d, std::max(e, p.degree_cap()));
    WaveVector k0{std::vector<int>(d, 0)};
    for (std::size_t cidx = 0; cidx < cols.size(); ++cidx) {
        if (q[cidx] != Complex{0.0, 0.0})
            quotient.set(MultiDegree{cols[cidx]}, k0, q[cidx]);
    }
    quotient.prune();
    return {std::move(quotient), residue};
}

HomologySolution solve_homological(const QuadraticForm& omega, const TFSeries& Q,
                                   double tol, SolveMode mode) {
    constexpr double kFourPi = 4.0 * std::numbers::pi;
    const int d = Q.dim();
    if (omega.dim() != d)
        throw DimensionMismatch("Omega dimension differs from Q");

    HomologySolution sol{TFSeries(d, Q.degree_cap()), project_zero_mode(Q), {}, 0.0};

    // Group the k != 0 terms into per-(mode, degree) homogeneous blocks.
    std::map<std::pair<WaveVector, int>, TFSeries> blocks;
    for (const auto& [key, c] : Q.terms()) {
        if (key.k.is_zero()) continue;
        auto bk = std::make_pair(key.k, key.j.total());
        auto it = blocks.find(bk);
        if (it == blocks.end())
            it = blocks.emplace(bk, TFSeries(d, Q.degree_cap())).first;
        it->second.set(key.j, WaveVector{std::vector<int>(d, 0)}, c);
    }

    for (const auto& [bk, block] : blocks) {
        const WaveVector& k = bk.first;
        ActionPolynomial v = linear_form(omega, k);
        DivisionResult div = divide_by_linear_form(block, v.series);
        double& res = sol.residues[k];
        res = std::hypot(res, div.residue_norm);
        sol.worst_residue = std::max(sol.worst_residue, res);
        // F_k = quotient / (4 pi i).
        TFSeries fk = scaled(div.quotient, Complex{0.0, -1.0 / kFourPi});
        for (const auto& [key, c] : fk.terms()) {
            TermKey full{key.j, k};
            sol.F.set(key.j, k, sol.F.coeff(full) + c);
        }
    }
    sol.F.prune();

    if (mode == SolveMode::Strict) {
        // A mild box keeps the Fourier weights from drowning the residue.
        double scale = majorant_norm(Q, DomainBox(0.5, 0.05));
        if (sol.worst_residue > tol * std::max(scale, 1e-300)) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3e", sol.worst_residue);
            throw ObstructionDetected(
                "homological equation has no formal solution: worst residue " +
                    std::string(buf),
                sol.worst_residue);
        }
    }
    return sol;
}

double homological_norm_ratio(const TFSeries& F, const TFSeries& Q,
                              const DomainBox& box, double delta, double gamma) {
    if (!(delta > 0.0) || delta >= box.rho || !(gamma > 0.0) || gamma >= box.sigma)
        throw InvalidArgument("need 0 < delta < rho and 0 < gamma < sigma");
    double qn = majorant_norm(Q, box);
    if (qn == 0.0) throw InvalidArgument("norm ratio needs |Q| > 0");
    DomainBox shrunk(box.rho - delta, box.sigma - gamma);
    return majorant_norm(F, shrunk) * delta * std::pow(gamma, F.dim()) / qn;
}

}  // namespace bnf
