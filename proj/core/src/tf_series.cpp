#include "bnf/tf_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <tuple>
#include <unordered_map>

namespace bnf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Packed-key fast path for products. Keys are encoded lane-wise into fixed
// integers (8 bits per action exponent, 16 biased bits per wave number) so a
// term product is two integer adds instead of vector arithmetic, and the
// accumulator is a flat hash map. Falls back to the generic path whenever an
// entry is out of packing range.
// ---------------------------------------------------------------------------
constexpr int kPackMaxDim = 8;
constexpr int kPackMaxExp = 127;   // per-entry; sums stay below 255
constexpr int kPackMaxMode = 8191; // per-entry; sums stay in a 16-bit lane
constexpr std::uint32_t kModeBias = 1u << 14;

struct PackKey {
    std::uint64_t jp;
    unsigned __int128 kp;
    bool operator==(const PackKey&) const = default;
};

struct PackKeyHash {
    std::size_t operator()(const PackKey& key) const {
        std::uint64_t h = key.jp * 0x9e3779b97f4a7c15ULL;
        h ^= static_cast<std::uint64_t>(key.kp) * 0xc2b2ae3d27d4eb4fULL;
        h ^= static_cast<std::uint64_t>(key.kp >> 64) * 0x165667b19e3779f9ULL;
        h ^= h >> 29;
        return static_cast<std::size_t>(h);
    }
};

struct PackedTerm {
    PackKey key;
    int deg;
    Complex c;
};

unsigned __int128 mode_bias_vector(int dim) {
    unsigned __int128 bias = 0;
    for (int i = 0; i < dim; ++i)
        bias |= static_cast<unsigned __int128>(kModeBias) << (16 * i);
    return bias;
}

bool pack_series(const TFSeries& f, std::vector<PackedTerm>& out) {
    if (f.dim() > kPackMaxDim) return false;
    out.clear();
    out.reserve(f.size());
    for (const auto& [key, c] : f.terms()) {
        PackedTerm t{{0, 0}, key.j.total(), c};
        for (int i = 0; i < f.dim(); ++i) {
            int e = key.j.j[i];
            int m = key.k.k[i];
            if (e > kPackMaxExp || m > kPackMaxMode || m < -kPackMaxMode)
                return false;
            t.key.jp |= static_cast<std::uint64_t>(e) << (8 * i);
            t.key.kp |= static_cast<unsigned __int128>(
                            static_cast<std::uint32_t>(m) + kModeBias)
                        << (16 * i);
        }
        out.push_back(t);
    }
    return true;
}

TermKey unpack_key(const PackKey& key, int dim) {
    TermKey out{MultiDegree{std::vector<int>(dim)},
                WaveVector{std::vector<int>(dim)}};
    for (int i = 0; i < dim; ++i) {
        out.j.j[i] = static_cast<int>((key.jp >> (8 * i)) & 0xff);
        out.k.k[i] = static_cast<int>((key.kp >> (16 * i)) & 0xffff) -
                     static_cast<int>(kModeBias);
    }
    return out;
}

void require_same_dim(const TFSeries& f, const TFSeries& g) {
    if (f.dim() != g.dim())
        throw DimensionMismatch("series dimensions differ: " +
                                std::to_string(f.dim()) + " vs " +
                                std::to_string(g.dim()));
}
}  // namespace

int MultiDegree::total() const {
    return std::accumulate(j.begin(), j.end(), 0);
}

int WaveVector::abs1() const {
    int s = 0;
    for (int v : k) s += std::abs(v);
    return s;
}

bool WaveVector::is_zero() const {
    return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

WaveVector WaveVector::negated() const {
    WaveVector out = *this;
    for (int& v : out.k) v = -v;
    return out;
}

DomainBox::DomainBox(double r, double s) : rho(r), sigma(s) {
    if (!(r > 0.0) || !(s > 0.0))
        throw InvalidArgument("DomainBox requires rho > 0 and sigma > 0");
}

TFSeries::TFSeries(int dim, int degree_cap) : dim_(dim), degree_cap_(degree_cap) {
    if (dim < 1) throw InvalidArgument("series dimension must be positive");
    if (degree_cap < 0) throw InvalidArgument("degree cap must be non-negative");
}

TFSeries TFSeries::monomial(int dim, int degree_cap, MultiDegree j, WaveVector k,
                            Complex c) {
    TFSeries out(dim, degree_cap);
    out.set(std::move(j), std::move(k), c);
    return out;
}

TFSeries TFSeries::action_coordinate(int dim, int degree_cap, int i) {
    MultiDegree j{std::vector<int>(dim, 0)};
    j.j[i] = 1;
    return monomial(dim, degree_cap, std::move(j),
                    WaveVector{std::vector<int>(dim, 0)}, 1.0);
}

Complex TFSeries::coeff(const TermKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
}

void TFSeries::set(MultiDegree j, WaveVector k, Complex c) {
    if (static_cast<int>(j.j.size()) != dim_ ||
        static_cast<int>(k.k.size()) != dim_)
        throw DimensionMismatch("term key dimension differs from series");
    for (int e : j.j)
        if (e < 0) throw InvalidArgument("negative action exponent");
    if (j.total() > degree_cap_)
        throw InvalidArgument("term beyond the degree cap");
    TermKey key{std::move(j), std::move(k)};
    if (c == Complex{0.0, 0.0})
        terms_.erase(key);
    else
        terms_[std::move(key)] = c;
}

int TFSeries::lowest_degree() const {
    int lo = -1;
    for (const auto& [key, c] : terms_) {
        int d = key.j.total();
        if (lo < 0 || d < lo) lo = d;
    }
    return lo;
}

int TFSeries::highest_degree() const {
    int hi = -1;
    for (const auto& [key, c] : terms_) hi = std::max(hi, key.j.total());
    return hi;
}

double TFSeries::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void TFSeries::prune(double rel_tol) {
    // Thresholds are per total-degree block, so a block many orders of
    // magnitude below the dominant one is pruned against its own scale.
    std::map<int, double> block_max;
    for (const auto& [key, c] : terms_) {
        double& m = block_max[key.j.total()];
        m = std::max(m, std::abs(c));
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        double thresh = rel_tol * block_max[it->first.j.total()];
        if (std::abs(it->second) < thresh || it->second == Complex{0.0, 0.0})
            it = terms_.erase(it);
        else
            ++it;
    }
}

Complex TFSeries::evaluate(std::span<const double> I,
                           std::span<const double> theta) const {
    Complex out{0.0, 0.0};
    for (const auto& [key, c] : terms_) {
        double mono = 1.0;
        for (int i = 0; i < dim_; ++i)
            mono *= std::pow(I[i], key.j.j[i]);
        double phase = 0.0;
        for (int i = 0; i < dim_; ++i) phase += key.k.k[i] * theta[i];
        out += c * mono * std::exp(Complex{0.0, kTwoPi * phase});
    }
    return out;
}

TFSeries add(const TFSeries& f, const TFSeries& g) {
    require_same_dim(f, g);
    TFSeries out(f.dim(), std::max(f.degree_cap(), g.degree_cap()));
    for (const auto& [key, c] : f.terms()) out.set(key.j, key.k, c);
    for (const auto& [key, c] : g.terms()) out.set(key.j, key.k, out.coeff(key) + c);
    out.prune();
    return out;
}

TFSeries sub(const TFSeries& f, const TFSeries& g) { return add(f, negated(g)); }

TFSeries scaled(const TFSeries& f, Complex c) {
    TFSeries out(f.dim(), f.degree_cap());
    if (c == Complex{0.0, 0.0}) return out;
    for (const auto& [key, v] : f.terms()) out.set(key.j, key.k, c * v);
    return out;
}

TFSeries negated(const TFSeries& f) { return scaled(f, -1.0); }

TFSeries mul(const TFSeries& f, const TFSeries& g, int degree_cap) {
    require_same_dim(f, g);
    TFSeries out(f.dim(), degree_cap);
    const int d = f.dim();

    static thread_local std::vector<PackedTerm> fa, gb;
    if (pack_series(f, fa) && pack_series(g, gb)) {
        // Inner operand sorted by degree so the cap prunes the tail early.
        std::sort(gb.begin(), gb.end(),
                  [](const PackedTerm& a, const PackedTerm& b) {
                      return a.deg < b.deg;
                  });
        const unsigned __int128 bias = mode_bias_vector(d);
        std::unordered_map<PackKey, Complex, PackKeyHash> acc;
        acc.reserve(f.size() + g.size());
        for (const PackedTerm& a : fa) {
            for (const PackedTerm& b : gb) {
                if (a.deg + b.deg > degree_cap) break;
                acc[PackKey{a.key.jp + b.key.jp, a.key.kp + b.key.kp - bias}] +=
                    a.c * b.c;
            }
        }
        for (const auto& [pkey, c] : acc) {
            if (c == Complex{0.0, 0.0}) continue;
            TermKey key = unpack_key(pkey, d);
            out.set(std::move(key.j), std::move(key.k), c);
        }
        out.prune();
        return out;
    }

    TFSeries::TermMap acc;
    for (const auto& [kf, cf] : f.terms()) {
        const int df = kf.j.total();
        for (const auto& [kg, cg] : g.terms()) {
            if (df + kg.j.total() > degree_cap) continue;
            TermKey key{kf.j, kf.k};
            for (int i = 0; i < d; ++i) {
                key.j.j[i] += kg.j.j[i];
                key.k.k[i] += kg.k.k[i];
            }
            acc[std::move(key)] += cf * cg;
        }
    }
    for (auto& [key, c] : acc)
        if (c != Complex{0.0, 0.0}) out.set(key.j, key.k, c);
    out.prune();
    return out;
}

TFSeries mul(const TFSeries& f, const TFSeries& g) {
    return mul(f, g, std::max(f.degree_cap(), g.degree_cap()));
}

TFSeries partial_action(const TFSeries& f, int i) {
    TFSeries out(f.dim(), f.degree_cap());
    for (const auto& [key, c] : f.terms()) {
        int e = key.j.j[i];
        if (e == 0) continue;
        MultiDegree j = key.j;
        --j.j[i];
        out.set(std::move(j), key.k, c * static_cast<double>(e));
    }
    return out;
}

TFSeries partial_angle(const TFSeries& f, int i) {
    TFSeries out(f.dim(), f.degree_cap());
    for (const auto& [key, c] : f.terms()) {
        int m = key.k.k[i];
        if (m == 0) continue;
        out.set(key.j, key.k, c * Complex{0.0, kTwoPi * m});
    }
    return out;
}

TFSeries poisson_bracket(const TFSeries& g, const TFSeries& f, int degree_cap) {
    require_same_dim(g, f);
    TFSeries out(g.dim(), degree_cap);
    for (int i = 0; i < g.dim(); ++i) {
        out = add(out, mul(partial_action(g, i), partial_angle(f, i), degree_cap));
        out = sub(out, mul(partial_angle(g, i), partial_action(f, i), degree_cap));
    }
    out.prune();
    return out;
}

TFSeries poisson_bracket(const TFSeries& g, const TFSeries& f) {
    return poisson_bracket(g, f, std::max(g.degree_cap(), f.degree_cap()));
}

TFSeries project_degrees(const TFSeries& f, int lo, int hi) {
    if (lo < 0) throw InvalidArgument("bad degree band");
    TFSeries out(f.dim(), f.degree_cap());
    if (lo > hi) return out;  // empty band: empty projection
    for (const auto& [key, c] : f.terms()) {
        int d = key.j.total();
        if (d >= lo && d <= hi) out.set(key.j, key.k, c);
    }
    return out;
}

TFSeries project_zero_mode(const TFSeries& f) {
    TFSeries out(f.dim(), f.degree_cap());
    for (const auto& [key, c] : f.terms())
        if (key.k.is_zero()) out.set(key.j, key.k, c);
    return out;
}

TFSeries project_nonzero_modes(const TFSeries& f) {
    TFSeries out(f.dim(), f.degree_cap());
    for (const auto& [key, c] : f.terms())
        if (!key.k.is_zero()) out.set(key.j, key.k, c);
    return out;
}

double majorant_norm(const TFSeries& f, const DomainBox& box) {
    double s = 0.0;
    for (const auto& [key, c] : f.terms())
        s += std::abs(c) * std::pow(box.rho, key.j.total()) *
             std::exp(kTwoPi * key.k.abs1() * box.sigma);
    return s;
}

SymmetryReport check_real_symmetric(const TFSeries& f, double tol) {
    SymmetryReport rep;
    for (const auto& [key, c] : f.terms()) {
        Complex mirror = f.coeff(TermKey{key.j, key.k.negated()});
        double defect = std::abs(mirror - std::conj(c));
        rep.worst_defect = std::max(rep.worst_defect, defect);
    }
    rep.ok = rep.worst_defect <= tol;
    return rep;
}

ActionPolynomial ActionPolynomial::from(TFSeries s, double tol) {
    for (const auto& [key, c] : s.terms()) {
        if (!key.k.is_zero())
            throw InvalidArgument("action polynomial has a theta-dependent term");
        if (std::abs(c.imag()) > tol * std::max(1.0, std::abs(c)))
            throw InvalidArgument("action polynomial has a complex coefficient");
    }
    return ActionPolynomial{std::move(s)};
}

}  // namespace bnf
