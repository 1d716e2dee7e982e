#ifndef BNF_LIE_HPP
#define BNF_LIE_HPP

#include <vector>

#include "bnf/tf_series.hpp"

namespace bnf {

/// The time-1 flow of a generator, as a coordinate map
///   Phi(I, theta) = (U(I, theta), theta + v(I, theta)).
/// Angles are stored as the deviation v from the identity, which is periodic
/// in theta and polynomial in I, so it fits the same series carrier.
struct CoordinateMap {
    std::vector<TFSeries> U;  // image actions, one series per coordinate
    std::vector<TFSeries> v;  // angle deviations V_j - theta_j

    static CoordinateMap identity(int dim, int degree_cap);
    int dim() const { return static_cast<int>(U.size()); }
};

/// Pullback H o X_F^1 as the exponential Lie series
///   sum_{m>=0} (1/m!) ad_F^m H,   ad_F H := {H, F},
/// truncated at total degree `degree_cap`. Requires deg_min(F) >= 2, which
/// makes every bracket raise the degree and the series finite.
TFSeries lie_pullback(const TFSeries& H, const TFSeries& F, int degree_cap);

/// Coordinate functions of the time-1 flow of F.
CoordinateMap flow_coordinates(const TFSeries& F, int degree_cap);

/// Substitutes a coordinate map into a series: f o Phi.
TFSeries compose_series(const TFSeries& f, const CoordinateMap& map,
                        int degree_cap);

/// outer o inner as coordinate maps.
CoordinateMap compose_maps(const CoordinateMap& outer,
                           const CoordinateMap& inner, int degree_cap);

/// Campbell-Baker-Dynkin combination through the double-bracket order:
///   G + K + 1/2 {G,K} + 1/12 {G,{G,K}} - 1/12 {K,{G,K}},
/// matching the pullback order exp(ad_K) exp(ad_G).
/// Valid only on degrees where triple brackets exceed the cap.
TFSeries cbd_combine(const TFSeries& G, const TFSeries& K, int degree_cap);

/// Max majorant norm of the canonical-bracket defects {U_i,U_j}, {V_i,V_j}
/// and {U_i,V_j} - delta_ij, restricted to degrees <= exact_cap where the
/// truncated computation is exact.
double symplecticity_defect(const CoordinateMap& map, int exact_cap,
                            const DomainBox& box = DomainBox(0.5, 0.05));

}  // namespace bnf

#endif
