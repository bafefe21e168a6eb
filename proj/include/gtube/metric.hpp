#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "gtube/connection.hpp"

namespace gtube {

namespace detail {

template <class S>
using Matrix = std::vector<std::vector<S>>;

// Gauss-Jordan inverse over the scalar field; exact for qcomplex.
template <class S>
Matrix<S> invert(Matrix<S> m) {
    const int n = static_cast<int>(m.size());
    Matrix<S> inv(n, std::vector<S>(n, S{}));
    for (int i = 0; i < n; ++i) inv[i][i] = ratio<S>(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        double best = 0;
        for (int r = c; r < n; ++r) {
            const double mag = magnitude(m[r][c]);
            if (scalar_traits<S>::is_zero(m[r][c])) continue;
            if (piv < 0 || (!scalar_traits<S>::exact && mag > best)) {
                piv = r;
                best = mag;
                if (scalar_traits<S>::exact) break;
            }
        }
        if (piv < 0) throw singular_error("matrix is singular", 0.0);
        std::swap(m[c], m[piv]);
        std::swap(inv[c], inv[piv]);
        const S p = m[c][c];
        for (int k = 0; k < n; ++k) {
            m[c][k] = m[c][k] / p;
            inv[c][k] = inv[c][k] / p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || scalar_traits<S>::is_zero(m[r][c])) continue;
            const S f = m[r][c];
            for (int k = 0; k < n; ++k) {
                m[r][k] -= f * m[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

// Laplace expansion along the first listed row; fine for n ≤ 5.
template <class S>
Poly<S> minor_det(const Matrix<Poly<S>>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    if (rows.size() == 1) return m[rows[0]][cols[0]];
    Poly<S> acc(m[0][0].dim());
    const std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& e = m[rows[0]][cols[c]];
        if (e.is_zero()) continue;
        std::vector<int> sub_cols;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (k != c) sub_cols.push_back(cols[k]);
        const auto d = e * minor_det(m, sub_rows, sub_cols);
        if (c % 2 == 0) acc += d;
        else acc -= d;
    }
    return acc;
}

}  // namespace detail

// Polynomial Riemannian metric g_{ij}(x) on a chart around the origin.
template <class S>
class Metric {
public:
    explicit Metric(TensorField<S> g) : g_(std::move(g)) {
        if (g_.vector_valued() || g_.arity() != 2) throw rejected_input("metric must be a scalar-valued 2-slot field");
        const int n = g_.dim();
        if (field_vars(g_) != n) throw rejected_input("metric components must be polynomials in the chart variables");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto& e = g_.at(0, {i, j});
                if (!e.imag_part().is_zero())
                    throw rejected_input("metric component (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                         ") is not real");
                if (j < i && !(e == g_.at(0, {j, i})))
                    throw rejected_input("metric is not symmetric at (" + std::to_string(j + 1) + "," +
                                         std::to_string(i + 1) + ")");
            }
        // Leading principal minors of g(0) are positive iff all elimination pivots are.
        auto m = origin_matrix();
        for (int c = 0; c < n; ++c) {
            if (scalar_traits<S>::real_sign(m[c][c]) <= 0)
                throw rejected_input("metric is not positive definite at the origin (leading minor " +
                                     std::to_string(c + 1) + ")");
            for (int r = c + 1; r < n; ++r) {
                const S f = m[r][c] / m[c][c];
                for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            }
        }
    }

    int dim() const { return g_.dim(); }
    const TensorField<S>& field() const { return g_; }
    const Poly<S>& operator()(int i, int j) const { return g_.at(0, {i, j}); }

    detail::Matrix<S> origin_matrix() const {
        const int n = dim();
        detail::Matrix<S> m(n, std::vector<S>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[i][j] = (*this)(i, j).constant_term();
        return m;
    }

    static Metric euclidean(int n) {
        auto g = zero_field<S>(n, 2, Valued::scalar, n);
        for (int i = 0; i < n; ++i) g.at(0, {i, i}) = Poly<S>::constant(n, ratio<S>(1));
        return Metric(std::move(g));
    }

private:
    TensorField<S> g_;
};

template <class S>
Poly<S> metric_determinant(const Metric<S>& g) {
    const int n = g.dim();
    detail::Matrix<Poly<S>> m(n, std::vector<Poly<S>>(n, Poly<S>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = g(i, j);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return detail::minor_det(m, all, all);
}

template <class S>
struct InverseMetric {
    TensorField<S> inv;       // g^{ij} as a scalar 2-slot field
    bool exact;               // true when det g is constant and the adjugate formula applies
    int truncation_degree;    // Neumann truncation degree, or -1 when exact
};

inline constexpr int default_inverse_degree(int K) { return 2 * K + 4; }

// g⁻¹ as a polynomial: the adjugate when det g is a nonzero constant, otherwise the
// Neumann series Σ_m (−g(0)⁻¹E)^m g(0)⁻¹ with E = g − g(0), truncated at `degree`.
template <class S>
InverseMetric<S> inverse_metric(const Metric<S>& g, int degree = default_inverse_degree(5)) {
    const int n = g.dim();
    const auto det = metric_determinant(g);
    auto inv = zero_field<S>(n, 2, Valued::scalar, n);
    if (det.total_degree() == 0) {
        const S d = det.constant_term();
        detail::Matrix<Poly<S>> m(n, std::vector<Poly<S>>(n, Poly<S>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[i][j] = g(i, j);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (n == 1) {
                    inv.at(0, {i, j}) = Poly<S>::constant(n, ratio<S>(1) / d);
                    continue;
                }
                std::vector<int> rows, cols;
                for (int k = 0; k < n; ++k) {
                    if (k != j) rows.push_back(k);
                    if (k != i) cols.push_back(k);
                }
                auto c = detail::minor_det(m, rows, cols) * (ratio<S>((i + j) % 2 ? -1 : 1) / d);
                inv.at(0, {i, j}) = std::move(c);
            }
        return {std::move(inv), true, -1};
    }
    if (degree < 0) throw rejected_input("inverse_metric: truncation degree must be non-negative");
    const auto g0inv = detail::invert(g.origin_matrix());
    // L = −g(0)⁻¹ E, polynomial with no constant term.
    detail::Matrix<Poly<S>> L(n, std::vector<Poly<S>>(n, Poly<S>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Poly<S> acc(n);
            for (int k = 0; k < n; ++k) {
                auto e = g(k, j) - Poly<S>::constant(n, g(k, j).constant_term());
                if (!e.is_zero()) acc -= e * g0inv[i][k];
            }
            L[i][j] = std::move(acc);
        }
    detail::Matrix<Poly<S>> term(n, std::vector<Poly<S>>(n, Poly<S>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) term[i][j] = Poly<S>::constant(n, g0inv[i][j]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv.at(0, {i, j}) = term[i][j];
    for (int m = 1; m <= degree; ++m) {
        detail::Matrix<Poly<S>> next(n, std::vector<Poly<S>>(n, Poly<S>(n)));
        bool any = false;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Poly<S> acc(n);
                for (int k = 0; k < n; ++k)
                    if (!L[i][k].is_zero() && !term[k][j].is_zero()) acc += L[i][k] * term[k][j];
                next[i][j] = acc.truncated(degree);
                any = any || !next[i][j].is_zero();
            }
        term = std::move(next);
        if (!any) break;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) inv.at(0, {i, j}) += term[i][j];
    }
    return {std::move(inv), false, degree};
}

// Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}); truncated at `degree` unless g⁻¹ is exact.
template <class S>
Connection<S> levi_civita(const Metric<S>& g, const InverseMetric<S>& ginv) {
    const int n = g.dim();
    std::vector<TensorField<S>> dg;
    for (int l = 0; l < n; ++l) dg.push_back(partial(g.field(), l));
    auto gamma = zero_field<S>(n, 2, Valued::vector, n);
    const S half = ratio<S>(1, 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<Poly<S>> koszul(n, Poly<S>(n));
            for (int l = 0; l < n; ++l)
                koszul[l] = (dg[i].at(0, {j, l}) + dg[j].at(0, {i, l}) - dg[l].at(0, {i, j})) * half;
            for (int k = 0; k < n; ++k) {
                Poly<S> acc(n);
                for (int l = 0; l < n; ++l) {
                    const auto& u = ginv.inv.at(0, {k, l});
                    if (!u.is_zero() && !koszul[l].is_zero()) acc += u * koszul[l];
                }
                if (!ginv.exact) acc = acc.truncated(ginv.truncation_degree);
                gamma.at(k, {i, j}) = acc;
                gamma.at(k, {j, i}) = std::move(acc);
            }
        }
    return Connection<S>(std::move(gamma));
}

template <class S>
Connection<S> levi_civita(const Metric<S>& g, int degree = default_inverse_degree(5)) {
    return levi_civita(g, inverse_metric(g, degree));
}

// (∇g)_{i,j,k}: vanishes for the Levi-Civita connection.
template <class S>
TensorField<S> metric_compatibility(const Connection<S>& conn, const Metric<S>& g) {
    return covariant_derivative(conn, g.field());
}

// g_{pk} = δ_{pk} + Σ_{j,l} c_{pkjl} x_j x_l with c symmetrized in (p,k) and (j,l);
// default c_{pkjl} = (p+k)(j+l) with 1-based indices. `coeffs` is row-major [p][k][j][l].
template <class S>
Metric<S> quadratic_example_metric(int n, const std::optional<std::vector<S>>& coeffs = std::nullopt) {
    if (n < 2) throw rejected_input("quadratic_example_metric: dimension must be at least 2");
    const std::size_t nn = static_cast<std::size_t>(n);
    if (coeffs && coeffs->size() != nn * nn * nn * nn)
        throw rejected_input("quadratic_example_metric: coefficient table must have n^4 entries");
    auto c = [&](int p, int k, int j, int l) -> S {
        if (!coeffs) return ratio<S>((p + k + 2) * (j + l + 2));
        return (*coeffs)[((p * nn + k) * nn + j) * nn + l];
    };
    auto g = zero_field<S>(n, 2, Valued::scalar, n);
    const S quarter = ratio<S>(1, 4);
    for (int p = 0; p < n; ++p)
        for (int k = 0; k < n; ++k) {
            Poly<S> acc = Poly<S>::constant(n, ratio<S>(p == k ? 1 : 0));
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const S s = (c(p, k, j, l) + c(k, p, j, l) + c(p, k, l, j) + c(k, p, l, j)) * quarter;
                    if (scalar_traits<S>::is_zero(s)) continue;
                    std::vector<int> e(n, 0);
                    ++e[j];
                    ++e[l];
                    acc += Poly<S>::monomial(n, e, s);
                }
            g.at(0, {p, k}) = std::move(acc);
        }
    return Metric<S>(std::move(g));
}

// result(l_1..l_p) = t(l_j, l_k, remaining slots in order); j < k, 1-based.
template <class E>
Tensor<E> move_to_front(const Tensor<E>& t, int j, int k) {
    const int p = t.arity();
    if (j < 1 || k <= j || k > p) throw rejected_input("move_to_front: need 1 <= j < k <= arity");
    std::vector<int> order{j - 1, k - 1};
    for (int m = 0; m < p; ++m)
        if (m != j - 1 && m != k - 1) order.push_back(m);
    return permute_slots(t, order);
}

// ρ(j,k,l,h,r) = R̃(j,k, R(l,h,r)) with R̃ = Sym_{2,3}R.
template <class E>
Tensor<E> rho_tensor(const Tensor<E>& R) {
    return prod_dot(sym(R, {2, 3}), R);
}

// Σ_{1≤j≤3, 4≤k≤5} ρ(j,k).
template <class E>
Tensor<E> theta_tensor(const Tensor<E>& rho) {
    Tensor<E> acc(rho.dim(), 5, Valued::vector, rho.zero());
    for (int j = 1; j <= 3; ++j)
        for (int k = 4; k <= 5; ++k) acc += move_to_front(rho, j, k);
    return acc;
}

template <class S>
struct RhoTheta {
    PointTensor<S> R;      // curvature at the origin, R(j,k,l)^p
    PointTensor<S> rho;
    PointTensor<S> theta;
    bool theta_vanishes;
};

// Origin values only need Γ through degree one, so a short inverse expansion suffices.
template <class S>
RhoTheta<S> rho_theta_obstruction(const Metric<S>& g) {
    const auto conn = levi_civita(g, 2);
    const std::vector<S> origin(g.dim(), S{});
    auto R = evaluate(curvature(conn), std::span<const S>(origin));
    auto rho = rho_tensor(R);
    auto theta = theta_tensor(rho);
    const bool vanishes = theta.is_zero();
    return {std::move(R), std::move(rho), std::move(theta), vanishes};
}

// Forms on the tangent-bundle chart use variables (x_1..x_n, v_1..v_n).

// θ^g = Σ_{i,j} g_{ij}(x) v_j dx_i.
template <class S>
TensorField<S> canonical_one_form(const Metric<S>& g) {
    const int n = g.dim();
    auto th = zero_field<S>(2 * n, 1, Valued::scalar, 2 * n);
    for (int i = 0; i < n; ++i) {
        Poly<S> acc(2 * n);
        for (int j = 0; j < n; ++j) {
            const auto e = g(i, j).embedded(2 * n, 0);
            if (!e.is_zero()) acc += e * Poly<S>::variable(2 * n, n + j);
        }
        th.at(0, {i}) = std::move(acc);
    }
    return th;
}

// (∂ω)(i, J) = ∂_i ω(J).
template <class S>
TensorField<S> leading_partial(const TensorField<S>& w) {
    const int n = w.dim();
    if (field_vars(w) != n) throw rejected_input("leading_partial: variables must match the form dimension");
    TensorField<S> r(n, w.arity() + 1, w.valued(), w.zero());
    std::vector<int> idx;
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        const std::vector<int> J(idx.begin() + 1, idx.end());
        r[off] = w.at(a, J).partial(idx[0]);
    }
    return r;
}

// Exterior derivative of an alternating scalar form: dω = Alt(∂ω)/p!.
template <class S>
TensorField<S> exterior_derivative(const TensorField<S>& w) {
    if (w.vector_valued()) throw rejected_input("exterior_derivative: form must be scalar-valued");
    const int p = w.arity();
    auto d = leading_partial(w);
    if (p == 0) return d;
    return alt(d, slot_range(1, p + 1)) * ratio<S>(1, factorial(p));
}

// Ω^g = −dθ^g.
template <class S>
TensorField<S> symplectic_form(const Metric<S>& g) {
    return -exterior_derivative(canonical_one_form(g));
}

struct TangentPoint {
    std::vector<double> x;
    std::vector<double> v;

    TangentPoint(std::vector<double> base, std::vector<double> fiber) : x(std::move(base)), v(std::move(fiber)) {
        if (x.size() != v.size()) throw rejected_input("TangentPoint: base and fiber lengths differ");
        for (double c : x)
            if (!std::isfinite(c)) throw rejected_input("TangentPoint: non-finite base coordinate");
        for (double c : v)
            if (!std::isfinite(c)) throw rejected_input("TangentPoint: non-finite fiber coordinate");
    }
    int dim() const { return static_cast<int>(x.size()); }
    std::vector<double> stacked() const {
        auto s = x;
        s.insert(s.end(), v.begin(), v.end());
        return s;
    }
};

namespace detail {

inline double eval_real(const Poly<cfloat>& p, const std::vector<double>& x) {
    const std::vector<cfloat> pt(x.begin(), x.end());
    return p.evaluate(pt).real();
}

template <class S>
Poly<cfloat> to_float_poly(const Poly<S>& p) {
    std::vector<std::pair<std::vector<int>, cfloat>> t;
    for (const auto& term : p.terms()) t.emplace_back(p.exponents(term), scalar_traits<S>::to_cfloat(term.coef));
    return Poly<cfloat>::from_terms(p.dim(), t);
}

}  // namespace detail

// Floating evaluation of g, its inverse and its Christoffel symbols at chart points,
// using a pointwise matrix inverse (no series truncation).
class NumericMetric {
public:
    template <class S>
    explicit NumericMetric(const Metric<S>& g) : n_(g.dim()) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                const auto p = detail::to_float_poly(g(i, j));
                g_.push_back(p);
                for (int l = 0; l < n_; ++l) dg_.push_back(p.partial(l));
            }
    }

    int dim() const { return n_; }

    Eigen::MatrixXd matrix(const std::vector<double>& x) const {
        Eigen::MatrixXd m(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m(i, j) = detail::eval_real(g_[i * n_ + j], x);
        return m;
    }

    // Γ^a_{ij}(x) in the layout [a][i][j].
    std::vector<double> christoffel(const std::vector<double>& x) const {
        const auto m = matrix(x);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (!lu.isInvertible()) throw singular_error("metric is singular at the requested point", m.determinant());
        const Eigen::MatrixXd inv = lu.inverse();
        std::vector<double> d(static_cast<std::size_t>(n_) * n_ * n_);
        for (std::size_t o = 0; o < d.size(); ++o) d[o] = detail::eval_real(dg_[o], x);
        auto dg = [&](int i, int j, int l) { return d[(static_cast<std::size_t>(i) * n_ + j) * n_ + l]; };
        std::vector<double> G(d.size(), 0.0);
        for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    double acc = 0;
                    for (int l = 0; l < n_; ++l) acc += inv(k, l) * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
                    G[(static_cast<std::size_t>(k) * n_ + i) * n_ + j] = 0.5 * acc;
                }
        return G;
    }

    double inner(const std::vector<double>& x, const std::vector<double>& u, const std::vector<double>& w) const {
        const auto m = matrix(x);
        double acc = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) acc += m(i, j) * u[i] * w[j];
        return acc;
    }

private:
    int n_;
    std::vector<Poly<cfloat>> g_;   // [i][j]
    std::vector<Poly<cfloat>> dg_;  // [i][j][l] = ∂_l g_{ij}
};

// Γ_x(u, w)^a = Σ Γ^a_{ij} u^i w^j from a [a][i][j] table.
inline std::vector<double> contract_christoffel(const std::vector<double>& G, const std::vector<double>& u,
                                                const std::vector<double>& w) {
    const int n = static_cast<int>(u.size());
    std::vector<double> r(n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) {
            if (u[i] == 0.0) continue;
            for (int j = 0; j < n; ++j) r[a] += G[(static_cast<std::size_t>(a) * n + i) * n + j] * u[i] * w[j];
        }
    return r;
}

// K(ẋ, v̇) = v̇ + Γ_x(ẋ, v).
inline std::vector<double> connector(const NumericMetric& g, const TangentPoint& pt, const std::vector<double>& xdot,
                                     const std::vector<double>& vdot) {
    const int n = g.dim();
    if (pt.dim() != n || static_cast<int>(xdot.size()) != n || static_cast<int>(vdot.size()) != n)
        throw rejected_input("connector: dimension mismatch");
    auto r = contract_christoffel(g.christoffel(pt.x), xdot, pt.v);
    for (int a = 0; a < n; ++a) r[a] += vdot[a];
    return r;
}

// Ω and θ of a metric evaluated at chart points of the tangent bundle.
class NumericForms {
public:
    template <class S>
    explicit NumericForms(const Metric<S>& g) : n_(g.dim()) {
        const auto th = canonical_one_form(g);
        const auto om = symplectic_form(g);
        for (std::size_t o = 0; o < th.size(); ++o) theta_.push_back(detail::to_float_poly(th[o]));
        for (std::size_t o = 0; o < om.size(); ++o) omega_.push_back(detail::to_float_poly(om[o]));
    }

    Eigen::MatrixXd omega(const TangentPoint& pt) const {
        const auto s = pt.stacked();
        const int m = 2 * n_;
        Eigen::MatrixXd r(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) r(a, b) = detail::eval_real(omega_[a * m + b], s);
        return r;
    }
    Eigen::VectorXd theta(const TangentPoint& pt) const {
        const auto s = pt.stacked();
        Eigen::VectorXd r(2 * n_);
        for (int a = 0; a < 2 * n_; ++a) r(a) = detail::eval_real(theta_[a], s);
        return r;
    }

private:
    int n_;
    std::vector<Poly<cfloat>> theta_;
    std::vector<Poly<cfloat>> omega_;
};

// Ω(ξ1, ξ2) − [g(dπξ1, Kξ2) − g(dπξ2, Kξ1)], with ξ = (ẋ, v̇) stacked.
inline double verify_symplectic_connector(const NumericMetric& g, const NumericForms& forms, const TangentPoint& pt,
                                          const std::vector<double>& xi1, const std::vector<double>& xi2) {
    const int n = g.dim();
    if (static_cast<int>(xi1.size()) != 2 * n || static_cast<int>(xi2.size()) != 2 * n)
        throw rejected_input("verify_symplectic_connector: tangent vectors need 2n entries");
    const Eigen::Map<const Eigen::VectorXd> a(xi1.data(), 2 * n), b(xi2.data(), 2 * n);
    const double lhs = a.dot(forms.omega(pt) * b);
    auto split = [n](const std::vector<double>& xi) {
        return std::pair{std::vector<double>(xi.begin(), xi.begin() + n), std::vector<double>(xi.begin() + n, xi.end())};
    };
    const auto [x1, v1] = split(xi1);
    const auto [x2, v2] = split(xi2);
    const double rhs = g.inner(pt.x, x1, connector(g, pt, x2, v2)) - g.inner(pt.x, x2, connector(g, pt, x1, v1));
    return std::abs(lhs - rhs);
}

template <class S>
double verify_symplectic_connector(const Metric<S>& g, const TangentPoint& pt, const std::vector<double>& xi1,
                                   const std::vector<double>& xi2) {
    return verify_symplectic_connector(NumericMetric(g), NumericForms(g), pt, xi1, xi2);
}

// ζ(x, v) = (v, −Γ_x(v, v)) as polynomial components in the 2n chart variables.
template <class S>
std::vector<Poly<S>> geodesic_vector_field(const Connection<S>& conn) {
    const int n = conn.dim();
    std::vector<Poly<S>> z;
    for (int a = 0; a < n; ++a) z.push_back(Poly<S>::variable(2 * n, n + a));
    for (int a = 0; a < n; ++a) {
        Poly<S> acc(2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto& G = conn.gamma().at(a, {i, j});
                if (G.is_zero()) continue;
                acc -= G.embedded(2 * n, 0) * Poly<S>::variable(2 * n, n + i) * Poly<S>::variable(2 * n, n + j);
            }
        z.push_back(std::move(acc));
    }
    return z;
}

// RK4 integration of ẋ = v, v̇ = −Γ_x(v, v) for any provider of real Christoffel tables.
template <class Christoffel>
std::vector<TangentPoint> integrate_geodesic(const Christoffel& gamma_at, const TangentPoint& start, double T, double h) {
    if (!(h > 0)) throw rejected_input("geodesic_flow: step must be positive");
    const int n = start.dim();
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(T) / h - 1e-9)));
    const double dt = T / steps;
    using State = std::vector<double>;
    auto rhs = [&](const State& s) {
        const State x(s.begin(), s.begin() + n), v(s.begin() + n, s.end());
        const auto acc = contract_christoffel(gamma_at(x), v, v);
        State d(2 * n);
        for (int a = 0; a < n; ++a) {
            d[a] = v[a];
            d[n + a] = -acc[a];
        }
        return d;
    };
    auto axpy = [](const State& y, double c, const State& k) {
        State r(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] + c * k[i];
        return r;
    };
    std::vector<TangentPoint> out{start};
    State s = start.stacked();
    for (int st = 0; st < steps; ++st) {
        const auto k1 = rhs(s);
        const auto k2 = rhs(axpy(s, dt / 2, k1));
        const auto k3 = rhs(axpy(s, dt / 2, k2));
        const auto k4 = rhs(axpy(s, dt, k3));
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        for (double c : s)
            if (!std::isfinite(c)) throw std::runtime_error("geodesic_flow: integration diverged");
        out.emplace_back(State(s.begin(), s.begin() + n), State(s.begin() + n, s.end()));
    }
    return out;
}

inline std::vector<TangentPoint> geodesic_flow(const NumericMetric& g, const TangentPoint& start, double T,
                                               double h = 1e-3) {
    return integrate_geodesic([&g](const std::vector<double>& x) { return g.christoffel(x); }, start, T, h);
}

template <class S>
std::vector<TangentPoint> geodesic_flow(const Metric<S>& g, const TangentPoint& start, double T, double h = 1e-3) {
    return geodesic_flow(NumericMetric(g), start, T, h);
}

inline double energy(const NumericMetric& g, const TangentPoint& pt) { return g.inner(pt.x, pt.v, pt.v); }

// Solves ι_Ξ Ω = θ^g and returns max |Ξ − (0, −v)|.
inline double reeb_check(const NumericForms& forms, const TangentPoint& pt) {
    const int n = pt.dim();
    const Eigen::MatrixXd om = forms.omega(pt);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(om.transpose());
    if (!lu.isInvertible()) throw singular_error("symplectic form is degenerate at the requested point", om.determinant());
    const Eigen::VectorXd xi = lu.solve(forms.theta(pt));
    double r = 0;
    for (int a = 0; a < n; ++a) {
        r = std::max(r, std::abs(xi(a)));
        r = std::max(r, std::abs(xi(n + a) + pt.v[a]));
    }
    return r;
}

template <class S>
double reeb_check(const Metric<S>& g, const TangentPoint& pt) {
    return reeb_check(NumericForms(g), pt);
}

}  // namespace gtube
