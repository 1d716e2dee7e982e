#include "bnf/lie.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace bnf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_generator(const TFSeries& F) {
    if (!F.empty() && F.lowest_degree() < 2)
        throw InvalidArgument(
            "generator has terms of degree < 2; the Lie series would not "
            "terminate");
}

// Drops the parts of a Lie-series term that are already below the pruning
// threshold of the accumulated sum's degree block — they cannot survive the
// final prune, and cutting them here lets the exponential series stop as
// soon as its tail is numerically irrelevant.
TFSeries prune_against(const TFSeries& term, const TFSeries& acc) {
    std::map<int, double> block_max;
    for (const auto& [key, c] : acc.terms()) {
        double& m = block_max[key.j.total()];
        m = std::max(m, std::abs(c));
    }
    TFSeries out(term.dim(), term.degree_cap());
    for (const auto& [key, c] : term.terms()) {
        auto it = block_max.find(key.j.total());
        if (it != block_max.end() &&
            std::abs(c) < TFSeries::kPruneRelTol * it->second)
            continue;
        out.set(key.j, key.k, c);
    }
    return out;
}

}  // namespace

CoordinateMap CoordinateMap::identity(int dim, int degree_cap) {
    CoordinateMap map;
    for (int i = 0; i < dim; ++i) {
        map.U.push_back(TFSeries::action_coordinate(dim, degree_cap, i));
        map.v.push_back(TFSeries(dim, degree_cap));
    }
    return map;
}

TFSeries lie_pullback(const TFSeries& H, const TFSeries& F, int degree_cap) {
    require_generator(F);
    TFSeries result = project_degrees(H, 0, degree_cap);
    TFSeries term = result;
    for (int m = 1; !term.empty(); ++m) {
        term = scaled(poisson_bracket(term, F, degree_cap), 1.0 / m);
        result = add(result, term);
        term = prune_against(term, result);
    }
    return result;
}

CoordinateMap flow_coordinates(const TFSeries& F, int degree_cap) {
    require_generator(F);
    const int d = F.dim();
    CoordinateMap map;
    for (int i = 0; i < d; ++i) {
        map.U.push_back(lie_pullback(
            TFSeries::action_coordinate(d, degree_cap, i), F, degree_cap));
        // theta_i o X_F^1 = theta_i + sum_{m>=1} (1/m!) ad_F^{m-1} (-dF/dI_i).
        TFSeries term = negated(partial_action(F, i));
        term = project_degrees(term, 0, degree_cap);
        TFSeries dev = term;
        for (int m = 2; !term.empty(); ++m) {
            term = scaled(poisson_bracket(term, F, degree_cap), 1.0 / m);
            dev = add(dev, term);
            term = prune_against(term, dev);
        }
        map.v.push_back(std::move(dev));
    }
    return map;
}

TFSeries compose_series(const TFSeries& f, const CoordinateMap& map,
                        int degree_cap) {
    const int d = f.dim();
    if (map.dim() != d)
        throw DimensionMismatch("map dimension differs from series");

    // Memoized powers of the image actions.
    std::vector<std::vector<TFSeries>> upow(d);
    for (int i = 0; i < d; ++i)
        upow[i].push_back(TFSeries::monomial(
            d, degree_cap, MultiDegree{std::vector<int>(d, 0)},
            WaveVector{std::vector<int>(d, 0)}, 1.0));
    auto power = [&](int i, int p) -> const TFSeries& {
        while (static_cast<int>(upow[i].size()) <= p)
            upow[i].push_back(mul(upow[i].back(), map.U[i], degree_cap));
        return upow[i][p];
    };

    // Memoized angle factors exp(2 pi i <k, v>) per mode.
    std::map<WaveVector, TFSeries> expfac;
    auto angle_factor = [&](const WaveVector& k) -> const TFSeries& {
        auto it = expfac.find(k);
        if (it != expfac.end()) return it->second;
        TFSeries s(d, degree_cap);
        for (int i = 0; i < d; ++i)
            if (k.k[i] != 0)
                s = add(s, scaled(map.v[i], Complex{0.0, kTwoPi * k.k[i]}));
        TFSeries acc = TFSeries::monomial(d, degree_cap,
                                          MultiDegree{std::vector<int>(d, 0)},
                                          WaveVector{std::vector<int>(d, 0)}, 1.0);
        TFSeries term = acc;
        for (int m = 1; !term.empty(); ++m) {
            term = scaled(mul(term, s, degree_cap), 1.0 / m);
            acc = add(acc, term);
        }
        return expfac.emplace(k, std::move(acc)).first->second;
    };

    TFSeries out(d, degree_cap);
    for (const auto& [key, c] : f.terms()) {
        TFSeries piece = TFSeries::monomial(d, degree_cap,
                                            MultiDegree{std::vector<int>(d, 0)},
                                            key.k, c);
        for (int i = 0; i < d; ++i)
            if (key.j.j[i] > 0) piece = mul(piece, power(i, key.j.j[i]), degree_cap);
        if (!key.k.is_zero()) piece = mul(piece, angle_factor(key.k), degree_cap);
        out = add(out, piece);
    }
    return out;
}

CoordinateMap compose_maps(const CoordinateMap& outer,
                           const CoordinateMap& inner, int degree_cap) {
    if (outer.dim() != inner.dim())
        throw DimensionMismatch("composing maps of different dimensions");
    CoordinateMap out;
    for (int i = 0; i < outer.dim(); ++i) {
        out.U.push_back(compose_series(outer.U[i], inner, degree_cap));
        out.v.push_back(
            add(inner.v[i], compose_series(outer.v[i], inner, degree_cap)));
    }
    return out;
}

TFSeries cbd_combine(const TFSeries& G, const TFSeries& K, int degree_cap) {
    require_generator(G);
    require_generator(K);
    TFSeries gk = poisson_bracket(G, K, degree_cap);
    TFSeries out = add(G, K);
    out = add(out, scaled(gk, 0.5));
    out = add(out, scaled(poisson_bracket(G, gk, degree_cap), 1.0 / 12.0));
    out = sub(out, scaled(poisson_bracket(K, gk, degree_cap), 1.0 / 12.0));
    return project_degrees(out, 0, degree_cap);
}

double symplecticity_defect(const CoordinateMap& map, int exact_cap,
                            const DomainBox& box) {
    const int d = map.dim();
    if (d == 0) return 0.0;
    const int cap = map.U[0].degree_cap();
    double worst = 0.0;
    auto measure = [&](const TFSeries& s) {
        worst = std::max(worst,
                         majorant_norm(project_degrees(s, 0, std::min(exact_cap, cap)), box));
    };
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i < j) {
                measure(poisson_bracket(map.U[i], map.U[j], cap));
                // {V_i, V_j} = dv_i/dI_j - dv_j/dI_i + {v_i, v_j}.
                TFSeries vv = sub(partial_action(map.v[i], j),
                                  partial_action(map.v[j], i));
                measure(add(vv, poisson_bracket(map.v[i], map.v[j], cap)));
            }
            // {U_i, V_j} - delta_ij = dU_i/dI_j + {U_i, v_j} - delta_ij.
            TFSeries uv = add(partial_action(map.U[i], j),
                              poisson_bracket(map.U[i], map.v[j], cap));
            if (i == j) {
                TFSeries one = TFSeries::monomial(
                    d, cap, MultiDegree{std::vector<int>(d, 0)},
                    WaveVector{std::vector<int>(d, 0)}, 1.0);
                uv = sub(uv, one);
            }
            measure(uv);
        }
    }
    return worst;
}

}  // namespace bnf
