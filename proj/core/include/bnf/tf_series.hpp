#ifndef BNF_TF_SERIES_HPP
#define BNF_TF_SERIES_HPP

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bnf/errors.hpp"

namespace bnf {

using Complex = std::complex<double>;

/// Exponent vector of the actions I^j; the total degree |j|_1 is the degree
/// used for all truncation bookkeeping.
struct MultiDegree {
    std::vector<int> j;

    int total() const;
    auto operator<=>(const MultiDegree&) const = default;
};

/// Fourier mode of the angles, e^{2 pi i <k, theta>}.
struct WaveVector {
    std::vector<int> k;

    int abs1() const;
    bool is_zero() const;
    WaveVector negated() const;
    auto operator<=>(const WaveVector&) const = default;
};

struct TermKey {
    MultiDegree j;
    WaveVector k;
    auto operator<=>(const TermKey&) const = default;
};

/// Polydisc-times-strip domain on which majorant norms are evaluated.
/// The action disc uses the max-norm |I_i| < rho, the angle strip is
/// measured in the l1 norm of the mode vector.
struct DomainBox {
    double rho;
    double sigma;

    DomainBox(double r, double s);
};

/// Sparse truncated Taylor-Fourier series
///   f(I, theta) = sum_{j,k} f_{j,k} I^j e^{2 pi i <k, theta>},
/// truncated so that every stored key has |j|_1 <= degree_cap.
///
/// Values are immutable for all practical purposes: every algebra operation
/// returns a fresh series. Coefficients below 1e-14 relative to the largest
/// coefficient of the same total degree are pruned after each operation, so
/// the graded scale structure of a series survives even when different
/// degrees live many orders of magnitude apart.
class TFSeries {
  public:
    using TermMap = std::map<TermKey, Complex>;

    /// Empty placeholder; any algebra on it trips the dimension checks.
    TFSeries() : dim_(0), degree_cap_(0) {}
    TFSeries(int dim, int degree_cap);

    static TFSeries monomial(int dim, int degree_cap, MultiDegree j,
                             WaveVector k, Complex c);
    /// The coordinate series I_i.
    static TFSeries action_coordinate(int dim, int degree_cap, int i);

    int dim() const { return dim_; }
    int degree_cap() const { return degree_cap_; }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Complex coeff(const TermKey& key) const;
    /// Inserts or overwrites one coefficient. Keys beyond the degree cap are
    /// rejected; exact zeros are dropped.
    void set(MultiDegree j, WaveVector k, Complex c);

    /// Lowest total degree with a stored term, or -1 for the zero series.
    int lowest_degree() const;
    int highest_degree() const;
    double max_abs_coeff() const;

    /// Drops terms small relative to the largest coefficient of their own
    /// total-degree block.
    void prune(double rel_tol = kPruneRelTol);

    /// Pointwise evaluation (used by tests to compare against the majorant).
    Complex evaluate(std::span<const double> I,
                     std::span<const double> theta) const;

    static constexpr double kPruneRelTol = 1e-14;

  private:
    int dim_;
    int degree_cap_;
    TermMap terms_;
};

TFSeries add(const TFSeries& f, const TFSeries& g);
TFSeries sub(const TFSeries& f, const TFSeries& g);
TFSeries scaled(const TFSeries& f, Complex c);
TFSeries negated(const TFSeries& f);

/// Cauchy product; terms with total degree beyond `degree_cap` are discarded.
TFSeries mul(const TFSeries& f, const TFSeries& g, int degree_cap);
TFSeries mul(const TFSeries& f, const TFSeries& g);

TFSeries partial_action(const TFSeries& f, int i);
/// d/d theta_i, i.e. mode k picks up the factor 2 pi i k_i.
TFSeries partial_angle(const TFSeries& f, int i);

/// {g, f} = sum_i (dg/dI_i df/dtheta_i - dg/dtheta_i df/dI_i), truncated to
/// `degree_cap`. Homogeneous inputs of degrees a and b land in degree a+b-1.
TFSeries poisson_bracket(const TFSeries& g, const TFSeries& f, int degree_cap);
TFSeries poisson_bracket(const TFSeries& g, const TFSeries& f);

/// Keeps exactly the terms with lo <= |j|_1 <= hi.
TFSeries project_degrees(const TFSeries& f, int lo, int hi);
/// Keeps the theta-independent (k = 0) part.
TFSeries project_zero_mode(const TFSeries& f);
/// Keeps the k != 0 part.
TFSeries project_nonzero_modes(const TFSeries& f);

/// |f|_{rho,sigma} = sum |f_{j,k}| rho^{|j|_1} e^{2 pi |k|_1 sigma}.
double majorant_norm(const TFSeries& f, const DomainBox& box);

struct SymmetryReport {
    bool ok = true;
    double worst_defect = 0.0;
};

/// Checks coeff(j,-k) == conj(coeff(j,k)) for every stored key. The defect is
/// reported, never repaired.
SymmetryReport check_real_symmetric(const TFSeries& f, double tol);

/// A theta-independent series with real coefficients; carrier for normal
/// forms and the g-multipliers.
struct ActionPolynomial {
    TFSeries series;

    /// Validates k = 0 on every key and |Im c| <= tol * |c|.
    static ActionPolynomial from(TFSeries s, double tol = 1e-12);
};

}  // namespace bnf

#endif
