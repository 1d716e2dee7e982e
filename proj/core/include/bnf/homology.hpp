#ifndef BNF_HOMOLOGY_HPP
#define BNF_HOMOLOGY_HPP

#include <map>

#include <Eigen/Dense>

#include "bnf/tf_series.hpp"

namespace bnf {

/// The symmetric nondegenerate matrix defining N0(I) = I^T Omega I.
class QuadraticForm {
  public:
    explicit QuadraticForm(Eigen::MatrixXd omega,
                           double nondegeneracy_floor = 1e-10);

    int dim() const { return static_cast<int>(omega_.rows()); }
    const Eigen::MatrixXd& omega() const { return omega_; }

    /// N0 as a series with the given cap (cap >= 2).
    TFSeries n0(int degree_cap) const;

  private:
    Eigen::MatrixXd omega_;
};

/// The degree-1 action polynomial <Omega k, I>; zero exactly when k = 0.
ActionPolynomial linear_form(const QuadraticForm& omega, const WaveVector& k);

struct DivisionResult {
    TFSeries quotient;
    double residue_norm = 0.0;
};

/// Least-squares division of a homogeneous action polynomial of degree e+1 by
/// a nonzero linear form: the quotient minimizes ||p - v q|| in the
/// coefficient 2-norm over degree-e polynomials. Multiplication by v is
/// injective, so the quotient is unique; the residual norm vanishes exactly
/// when p is divisible by v.
DivisionResult divide_by_linear_form(const TFSeries& p, const TFSeries& v);

struct HomologySolution {
    TFSeries F;         // zero-average: no k = 0 keys
    TFSeries absorbed;  // the k = 0 part of Q, returned whole
    std::map<WaveVector, double> residues;
    double worst_residue = 0.0;
};

enum class SolveMode { Strict, Permissive };

/// Solves {N0, F} = Q mode by mode via F_k = Q_k / (4 pi i <Omega k, I>).
/// The k = 0 block of Q is the kernel of {N0, .} and is returned as
/// `absorbed`. In strict mode any mode whose residue exceeds
/// tol * |Q|_{1/2,1/2} raises ObstructionDetected.
HomologySolution solve_homological(const QuadraticForm& omega, const TFSeries& Q,
                                   double tol = 1e-9,
                                   SolveMode mode = SolveMode::Strict);

/// |F|_{rho-delta,sigma-gamma} * delta * gamma^d / |Q|_{rho,sigma}; an
/// empirical measurement of the solver's tame constant.
double homological_norm_ratio(const TFSeries& F, const TFSeries& Q,
                              const DomainBox& box, double delta, double gamma);

}  // namespace bnf

#endif
