#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gtube/metric.hpp"

// Seeded random inputs for identity checks: small Gaussian rationals, so exact and
// floating runs see the same data.
namespace gtube::sampling {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(eng_); }

    // Small Gaussian rational, real when `complex` is false.
    template <class S>
    S scalar(bool complex = true) {
        const S re = ratio<S>(integer(-4, 4), integer(1, 3));
        if (!complex || coin()) return re;
        return re + imag_unit<S>() * ratio<S>(integer(-4, 4), integer(1, 3));
    }

private:
    std::mt19937_64 eng_;
};

template <class S>
Poly<S> random_poly(Rng& rng, int vars, int max_degree, int terms, bool complex = true) {
    std::vector<std::pair<std::vector<int>, S>> t;
    for (int k = 0; k < terms; ++k) {
        std::vector<int> e(vars, 0);
        const int d = rng.integer(0, max_degree);
        for (int m = 0; m < d; ++m) ++e[rng.integer(0, vars - 1)];
        t.emplace_back(e, rng.scalar<S>(complex));
    }
    return Poly<S>::from_terms(vars, t);
}

template <class S>
TensorField<S> random_field(Rng& rng, int n, int arity, Valued valued, int max_degree = 2, int terms = 2,
                            double density = 0.7, bool complex = true) {
    auto f = zero_field<S>(n, arity, valued, n);
    for (std::size_t o = 0; o < f.size(); ++o)
        if (rng.coin(density)) f[o] = random_poly<S>(rng, n, max_degree, terms, complex);
    return f;
}

template <class S>
TensorField<S> random_symmetric_field(Rng& rng, int n, int arity, Valued valued, int max_degree = 2, int terms = 2,
                                      bool complex = true) {
    auto f = random_field<S>(rng, n, arity, valued, max_degree, terms, 0.6, complex);
    return arity >= 2 ? sym(f, slot_range(1, arity)) : f;
}

template <class S>
Connection<S> random_torsion_free(Rng& rng, int n, int max_degree = 2, int terms = 2, bool complex = true) {
    return Connection<S>(sym(random_field<S>(rng, n, 2, Valued::vector, max_degree, terms, 0.6, complex), {1, 2}));
}

template <class S>
PointTensor<S> random_point_tensor(Rng& rng, int n, int arity, Valued valued, bool complex = true) {
    PointTensor<S> t(n, arity, valued, S{});
    for (std::size_t o = 0; o < t.size(); ++o) t[o] = rng.scalar<S>(complex);
    return t;
}

// g = Pᵀ C P with C constant symmetric positive definite and P a product of `factors`
// unipotent matrices 𝕀 + a(x) E_{rs}, r ≠ s, a linear. det g is constant, so g⁻¹ is an
// exact polynomial.
template <class S>
Metric<S> random_metric(Rng& rng, int n, int factors = 3, int linear_terms = 2) {
    using M = std::vector<std::vector<Poly<S>>>;
    auto identity = [n] {
        M m(n, std::vector<Poly<S>>(n, Poly<S>(n)));
        for (int i = 0; i < n; ++i) m[i][i] = Poly<S>::constant(n, ratio<S>(1));
        return m;
    };
    auto mul = [n](const M& a, const M& b) {
        M r(n, std::vector<Poly<S>>(n, Poly<S>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (!a[i][k].is_zero() && !b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
        return r;
    };
    M C = identity();
    for (int i = 0; i < n; ++i) {
        C[i][i] = Poly<S>::constant(n, ratio<S>(rng.integer(2 * n, 3 * n)));
        for (int j = 0; j < i; ++j) C[i][j] = C[j][i] = Poly<S>::constant(n, ratio<S>(rng.integer(-1, 1)));
    }
    M P = identity();
    int last_r = -1, last_s = -1;
    for (int f = 0; f < (n > 1 ? factors : 0); ++f) {
        // Consecutive factors use different positions so they do not merge into one.
        int r, s;
        do {
            r = rng.integer(0, n - 1);
            s = rng.integer(0, n - 2);
            if (s >= r) ++s;
        } while (r == last_r && s == last_s);
        last_r = r, last_s = s;
        M U = identity();
        for (int k = 0; k < linear_terms; ++k)
            U[r][s] += Poly<S>::variable(n, rng.integer(0, n - 1)) * ratio<S>(rng.integer(-3, 3), rng.integer(1, 2));
        P = mul(P, U);
    }
    M Pt(n, std::vector<Poly<S>>(n, Poly<S>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Pt[i][j] = P[j][i];
    const M G = mul(mul(Pt, C), P);
    auto g = zero_field<S>(n, 2, Valued::scalar, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.at(0, {i, j}) = G[i][j];
    return Metric<S>(std::move(g));
}

template <class S>
std::vector<S> random_point(Rng& rng, int n, double half_width = 0.5) {
    std::vector<S> p(n);
    for (auto& x : p) {
        if constexpr (scalar_traits<S>::exact) x = ratio<S>(rng.integer(-8, 8), 16);
        else x = S(rng.real(-half_width, half_width));
    }
    return p;
}

inline std::vector<double> random_reals(Rng& rng, int n, double half_width = 0.5) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.real(-half_width, half_width);
    return v;
}

}  // namespace gtube::sampling
