#pragma once

#include <cmath>
#include <vector>

#include "gtube/tensor_ops.hpp"

namespace gtube {

// Linear connection on the tangent bundle of a coordinate chart, ∇_{e_i} e_j = Γ^a_{ij} e_a.
template <class S>
class Connection {
public:
    explicit Connection(TensorField<S> gamma) : gamma_(std::move(gamma)) {
        if (!gamma_.vector_valued() || gamma_.arity() != 2)
            throw rejected_input("connection coefficients must be a vector-valued 2-slot field");
        torsion_free_ = symmetry_defect(gamma_, {1, 2}, false) == 0.0;
    }

    static Connection flat(int n) { return Connection(zero_field<S>(n, 2, Valued::vector, n)); }

    const TensorField<S>& gamma() const { return gamma_; }
    int dim() const { return gamma_.dim(); }
    int vars() const { return field_vars(gamma_); }
    bool torsion_free() const { return torsion_free_; }

private:
    TensorField<S> gamma_;
    bool torsion_free_ = false;
};

// ∇θ with the derivative slot first:
// (∇θ)^a_{i,J} = ∂_i θ^a_J + Γ^a_{ib} θ^b_J − Σ_m Γ^b_{i j_m} θ^a_{J[j_m→b]}.
template <class S>
TensorField<S> covariant_derivative(const Connection<S>& conn, const TensorField<S>& theta) {
    const int n = conn.dim();
    if (theta.dim() != n || field_vars(theta) != conn.vars())
        throw rejected_input("covariant_derivative: dimension mismatch");
    const auto& G = conn.gamma();
    const int p = theta.arity();
    std::vector<TensorField<S>> d;
    d.reserve(n);
    for (int i = 0; i < n; ++i) d.push_back(partial(theta, i));
    TensorField<S> r(n, p + 1, theta.valued(), theta.zero());
    std::vector<int> idx, J(p), K(p);
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        const int i = idx[0];
        std::copy(idx.begin() + 1, idx.end(), J.begin());
        Poly<S> acc = d[i].at(a, J);
        if (theta.vector_valued()) {
            for (int b = 0; b < n; ++b) {
                const auto& g = G.at(a, {i, b});
                if (g.is_zero()) continue;
                const auto& t = theta.at(b, J);
                if (!t.is_zero()) acc += g * t;
            }
        }
        for (int m = 0; m < p; ++m) {
            K = J;
            for (int b = 0; b < n; ++b) {
                const auto& g = G.at(b, {i, J[m]});
                if (g.is_zero()) continue;
                K[m] = b;
                const auto& t = theta.at(a, K);
                if (!t.is_zero()) acc -= g * t;
            }
        }
        r[off] = std::move(acc);
    }
    return r;
}

template <class S>
TensorField<S> torsion(const Connection<S>& conn) {
    return alt(conn.gamma(), {1, 2});
}

// R^a_{ijb} = ∂_iΓ^a_{jb} − ∂_jΓ^a_{ib} + Γ^a_{ic}Γ^c_{jb} − Γ^a_{jc}Γ^c_{ib}, stored as R(i,j,b)^a.
template <class S>
TensorField<S> curvature(const Connection<S>& conn) {
    const int n = conn.dim();
    const auto& G = conn.gamma();
    TensorField<S> r(n, 3, Valued::vector, G.zero());
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int b = 0; b < n; ++b) {
                    if (i == j) continue;
                    Poly<S> acc = G.at(a, {j, b}).partial(i) - G.at(a, {i, b}).partial(j);
                    for (int c = 0; c < n; ++c) {
                        const auto& x = G.at(a, {i, c});
                        const auto& y = G.at(c, {j, b});
                        if (!x.is_zero() && !y.is_zero()) acc += x * y;
                        const auto& u = G.at(a, {j, c});
                        const auto& v = G.at(c, {i, b});
                        if (!u.is_zero() && !v.is_zero()) acc -= u * v;
                    }
                    r.at(a, {i, j, b}) = std::move(acc);
                }
    return r;
}

template <class S>
TensorField<S> second_cov(const Connection<S>& conn, const TensorField<S>& theta) {
    return covariant_derivative(conn, covariant_derivative(conn, theta));
}

template <class S>
struct Residual {
    TensorField<S> tensor;
    double norm;
};

// Alt_2 ∇²θ − R.θ, which vanishes for torsion-free connections.
template <class S>
Residual<S> verify_curv_operator(const Connection<S>& conn, const TensorField<S>& theta) {
    auto res = alt(second_cov(conn, theta), {1, 2}) - r_dot(curvature(conn), theta);
    const double nrm = res.norm();
    return {std::move(res), nrm};
}

// d₁A(ξ1, ξ2, μ) = ∇_{ξ1}A(ξ2, μ) − ∇_{ξ2}A(ξ1, μ).
template <class S>
TensorField<S> d1(const Connection<S>& conn, const TensorField<S>& A) {
    if (A.arity() < 1) throw rejected_input("d1: argument needs at least one slot");
    return alt(covariant_derivative(conn, A), {1, 2});
}

template <class S>
TensorField<S> d1_power(const Connection<S>& conn, TensorField<S> A, int times) {
    for (int m = 0; m < times; ++m) A = d1(conn, A);
    return A;
}

// Γ' = Γ + S₁.
template <class S>
Connection<S> deform(const Connection<S>& conn, const TensorField<S>& S1) {
    if (!S1.vector_valued() || S1.arity() != 2 || S1.dim() != conn.dim())
        throw rejected_input("deform: S1 must be a vector-valued 2-slot field of matching dimension");
    return Connection<S>(conn.gamma() + S1);
}

// Smooth path in the chart with exact velocity: polynomial pieces of unit duration
// (a single piece covers any time for polynomial paths).
class CurvePath {
public:
    // coeffs[i][m] is the t^m coefficient of coordinate i.
    static CurvePath polynomial(std::vector<std::vector<double>> coeffs) {
        if (coeffs.empty()) throw rejected_input("CurvePath: empty coordinate list");
        CurvePath c;
        c.pieces_.push_back(std::move(coeffs));
        c.polyline_ = false;
        return c;
    }
    static CurvePath line(const std::vector<double>& x0, const std::vector<double>& v) {
        if (x0.size() != v.size()) throw rejected_input("CurvePath: point/velocity length mismatch");
        std::vector<std::vector<double>> c(x0.size());
        for (std::size_t i = 0; i < x0.size(); ++i) c[i] = {x0[i], v[i]};
        return polynomial(std::move(c));
    }
    // Straight legs between consecutive vertices, each traversed in unit time.
    static CurvePath polyline(const std::vector<std::vector<double>>& vertices) {
        if (vertices.size() < 2) throw rejected_input("CurvePath: polyline needs two vertices");
        CurvePath c;
        c.polyline_ = true;
        for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
            if (vertices[k].size() != vertices[0].size()) throw rejected_input("CurvePath: vertex length mismatch");
            std::vector<std::vector<double>> leg(vertices[k].size());
            for (std::size_t i = 0; i < leg.size(); ++i) leg[i] = {vertices[k][i], vertices[k + 1][i] - vertices[k][i]};
            c.pieces_.push_back(std::move(leg));
        }
        return c;
    }

    int dim() const { return static_cast<int>(pieces_.front().size()); }
    bool is_polyline() const { return polyline_; }
    int piece_count() const { return static_cast<int>(pieces_.size()); }
    // Leg k of a polyline as a path on its own, parametrised from 0.
    CurvePath piece(int k) const {
        if (k < 0 || k >= piece_count()) throw rejected_input("CurvePath: piece index out of range");
        return polynomial(pieces_[k]);
    }

    std::vector<double> position(double t) const { return eval(t, false); }
    std::vector<double> velocity(double t) const { return eval(t, true); }

private:
    std::vector<std::vector<std::vector<double>>> pieces_;
    bool polyline_ = false;

    std::vector<double> eval(double t, bool deriv) const {
        std::size_t k = 0;
        double s = t;
        if (polyline_) {
            const double fl = std::floor(t);
            const auto last = static_cast<double>(pieces_.size() - 1);
            const double kk = std::clamp(fl, 0.0, last);
            k = static_cast<std::size_t>(kk);
            s = t - kk;
        }
        const auto& pc = pieces_[k];
        std::vector<double> out(pc.size(), 0.0);
        for (std::size_t i = 0; i < pc.size(); ++i) {
            double acc = 0;
            for (std::size_t m = pc[i].size(); m-- > 0;) {
                if (deriv) {
                    if (m == 0) break;
                    acc = acc * s + static_cast<double>(m) * pc[i][m];
                } else {
                    acc = acc * s + pc[i][m];
                }
            }
            out[i] = acc;
        }
        return out;
    }
};

template <class S>
TensorField<cfloat> to_float_field(const TensorField<S>& f) {
    return map_components(f, [](const Poly<S>& p) {
        std::vector<std::pair<std::vector<int>, cfloat>> terms;
        for (const auto& t : p.terms()) terms.emplace_back(p.exponents(t), scalar_traits<S>::to_cfloat(t.coef));
        return Poly<cfloat>::from_terms(p.dim(), terms);
    });
}

// Floating-point evaluation of Christoffel symbols at chart points.
class NumericConnection {
public:
    template <class S>
    explicit NumericConnection(const Connection<S>& conn)
        : n_(conn.dim()), gamma_(to_float_field(conn.gamma())) {}

    int dim() const { return n_; }

    // Γ^a_{ij}(x) in the layout [a][i][j].
    std::vector<cfloat> at(const std::vector<double>& x) const {
        std::vector<cfloat> pt(x.begin(), x.end());
        std::vector<cfloat> out(gamma_.size());
        for (std::size_t o = 0; o < gamma_.size(); ++o) out[o] = gamma_[o].evaluate(pt);
        return out;
    }

private:
    int n_;
    TensorField<cfloat> gamma_;
};

namespace detail {

// f' = −Γ(x(t))(ẋ(t), f), classical RK4 with N uniform steps from 0 to t.
inline std::vector<cfloat> transport_rk4(const NumericConnection& nc, const CurvePath& path, std::vector<cfloat> f,
                                         double t, double h) {
    const int n = nc.dim();
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / h - 1e-9)));
    const double dt = t / steps;
    auto rhs = [&](double s, const std::vector<cfloat>& y) {
        const auto x = path.position(s);
        const auto v = path.velocity(s);
        const auto G = nc.at(x);
        std::vector<cfloat> out(n, 0.0);
        for (int a = 0; a < n; ++a)
            for (int j = 0; j < n; ++j) {
                if (v[j] == 0.0) continue;
                for (int b = 0; b < n; ++b) out[a] -= G[(static_cast<std::size_t>(a) * n + j) * n + b] * v[j] * y[b];
            }
        return out;
    };
    auto axpy = [n](const std::vector<cfloat>& y, double c, const std::vector<cfloat>& k) {
        std::vector<cfloat> r(n);
        for (int a = 0; a < n; ++a) r[a] = y[a] + c * k[a];
        return r;
    };
    for (int st = 0; st < steps; ++st) {
        const double s = st * dt;
        const auto k1 = rhs(s, f);
        const auto k2 = rhs(s + dt / 2, axpy(f, dt / 2, k1));
        const auto k3 = rhs(s + dt / 2, axpy(f, dt / 2, k2));
        const auto k4 = rhs(s + dt, axpy(f, dt, k3));
        for (int a = 0; a < n; ++a) f[a] += dt / 6 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    return f;
}

}  // namespace detail

template <class S>
std::vector<cfloat> parallel_transport(const Connection<S>& conn, const CurvePath& path,
                                       const std::vector<cfloat>& eta0, double t, double h = 1e-3) {
    if (!(h > 0)) throw rejected_input("parallel_transport: step must be positive");
    if (path.dim() != conn.dim() || static_cast<int>(eta0.size()) != conn.dim())
        throw rejected_input("parallel_transport: dimension mismatch");
    const NumericConnection nc(conn);
    if (!path.is_polyline()) return detail::transport_rk4(nc, path, eta0, t, h);
    // Legs are integrated separately so no step straddles a corner.
    if (t < 0) throw rejected_input("parallel_transport: polyline paths run forward in time");
    auto f = eta0;
    for (int k = 0; k < path.piece_count() && t > 0; ++k) {
        const double leg = k + 1 == path.piece_count() ? t : std::min(1.0, t);
        f = detail::transport_rk4(nc, path.piece(k), std::move(f), leg, h);
        t -= leg;
    }
    return f;
}

// (loop(h) η − η)/h² for the coordinate loop: +e_j, +e_i, −e_j, −e_i (each of length h).
template <class S>
std::vector<cfloat> holonomy_curvature(const Connection<S>& conn, int i, int j, const std::vector<double>& x,
                                       const std::vector<cfloat>& eta, double h, double step = 1e-3) {
    const int n = conn.dim();
    if (i == j) throw rejected_input("holonomy_curvature: directions must differ");
    if (i < 0 || j < 0 || i >= n || j >= n) throw rejected_input("holonomy_curvature: direction out of range");
    if (!(h > 0)) throw rejected_input("holonomy_curvature: h must be positive");
    const NumericConnection nc(conn);
    auto f = eta;
    auto p = x;
    const int dirs[4] = {j, i, j, i};
    const double sg[4] = {1, 1, -1, -1};
    for (int leg = 0; leg < 4; ++leg) {
        std::vector<double> v(n, 0.0);
        v[dirs[leg]] = sg[leg];
        const auto path = CurvePath::line(p, v);
        f = detail::transport_rk4(nc, path, f, h, std::min(step, h));
        p[dirs[leg]] += sg[leg] * h;
    }
    std::vector<cfloat> out(n);
    for (int a = 0; a < n; ++a) out[a] = (f[a] - eta[a]) / (h * h);
    return out;
}

}  // namespace gtube
