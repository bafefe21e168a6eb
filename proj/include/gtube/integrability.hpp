#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gtube/jets.hpp"

namespace gtube {

// Truncated complex section S_η ξ = Σ_{k≤K} S_k(ξ, η^k) over a base connection ∇,
// with Γ := Re S and B := Im S.
template <class S>
class TotallyRealStructure {
public:
    TotallyRealStructure(Connection<S> base, std::vector<TensorField<S>> jets)
        : base_(std::move(base)), S_(std::move(jets)) {
        const int n = base_.dim();
        if (S_.empty()) throw rejected_input("structure needs at least S_0");
        const auto expected = identity_field<S>(n, base_.vars()) * imag_unit<S>();
        if (!S_[0].same_shape(expected) || relative_defect(S_[0], expected) > identity_tolerance<S>())
            throw rejected_input("S_0 must equal i times the identity (Gamma = 0, B = identity on the zero section)");
        const double tol = scalar_traits<S>::exact ? 0.0 : 1e-12;
        for (std::size_t k = 1; k < S_.size(); ++k) {
            const auto& s = S_[k];
            if (!s.vector_valued() || s.arity() != static_cast<int>(k) + 1 || s.dim() != n)
                throw rejected_input("S_" + std::to_string(k) + " must be vector-valued with " + std::to_string(k + 1) +
                                     " slots");
            if (k >= 2 && !is_symmetric(s, slot_range(2, static_cast<int>(k) + 1), tol))
                throw rejected_input("S_" + std::to_string(k) + " is not symmetric in its last " + std::to_string(k) +
                                     " slots");
        }
        for (const auto& s : S_) float_S_.push_back(to_float_field(s));
        float_gamma_ = to_float_field(base_.gamma());
    }

    static TotallyRealStructure from_jets(const JetSequence<S>& jets) {
        std::vector<TensorField<S>> s;
        for (int k = 0; k <= jets.order(); ++k) s.push_back(jets.S_k(k));
        return TotallyRealStructure(jets.base(), std::move(s));
    }

    int order() const { return static_cast<int>(S_.size()) - 1; }
    int dim() const { return base_.dim(); }
    const Connection<S>& base() const { return base_; }
    const TensorField<S>& S_k(int k) const { return S_.at(k); }
    const std::vector<TensorField<S>>& jets() const { return S_; }
    const std::vector<TensorField<cfloat>>& float_jets() const { return float_S_; }
    const TensorField<cfloat>& float_gamma() const { return float_gamma_; }

private:
    Connection<S> base_;
    std::vector<TensorField<S>> S_;
    std::vector<TensorField<cfloat>> float_S_;
    TensorField<cfloat> float_gamma_ = zero_field<cfloat>(1, 0, Valued::scalar, 0);
};

namespace detail {

// Polynomials in one scaling variable t, standing for the fiber point tη.
template <class T>
using TPoly = Poly<T>;

template <class T>
TPoly<T> t_mono(const T& c, int deg) {
    const std::vector<int> e{deg};
    return TPoly<T>::monomial(1, e, c);
}

template <class T>
using TMatrix = std::vector<std::vector<TPoly<T>>>;

template <class T>
TMatrix<T> t_matrix(int n) {
    return TMatrix<T>(n, std::vector<TPoly<T>>(n, TPoly<T>(1)));
}

// Values at a base point x of a truncated fiber series Σ_k t^k X_k(·, η^k), with its
// x-derivatives and fiber derivative, as matrices of t-polynomials.
template <class T>
struct FiberSeries {
    int n = 0;
    TMatrix<T> mat;                 // [a][b]: X(e_b)^a
    std::vector<TMatrix<T>> dx;     // [i][a][b]: ∂_i X(e_b)^a
    std::vector<TMatrix<T>> dfib;   // [c][a][b]: (D X(e_c)) e_b, component a

    FiberSeries(const std::vector<TensorField<T>>& fields, const std::vector<T>& x, const std::vector<T>& eta)
        : n(static_cast<int>(eta.size())), mat(t_matrix<T>(n)) {
        for (int i = 0; i < n; ++i) dx.push_back(t_matrix<T>(n));
        for (int c = 0; c < n; ++c) dfib.push_back(t_matrix<T>(n));
        const std::span<const T> px(x);
        for (std::size_t k = 0; k < fields.size(); ++k) {
            const int kk = static_cast<int>(k);
            const auto val = evaluate(fields[k], px);
            add(mat, contract_trailing(val, kk, eta), kk);
            for (int i = 0; i < n; ++i) add(dx[i], contract_trailing(evaluate(partial(fields[k], i), px), kk, eta), kk);
            if (k >= 1) {
                // k X_k(b, c, η^{k−1}) t^{k−1}
                const auto d = contract_trailing(val, kk - 1, eta);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c) {
                            const T& v = d.at(a, {b, c});
                            if (!scalar_traits<T>::is_zero(v)) dfib[c][a][b] += t_mono<T>(v * ratio<T>(kk), kk - 1);
                        }
            }
        }
    }

    static void add(TMatrix<T>& m, const PointTensor<T>& e, int deg) {
        const int n = e.dim();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const T& v = e.at(a, {b});
                if (!scalar_traits<T>::is_zero(v)) m[a][b] += t_mono<T>(v, deg);
            }
    }

    // X applied to a t-polynomial vector.
    std::vector<TPoly<T>> apply(const std::vector<TPoly<T>>& w) const {
        std::vector<TPoly<T>> r(n, TPoly<T>(1));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (!mat[a][b].is_zero() && !w[b].is_zero()) r[a] += mat[a][b] * w[b];
        return r;
    }
    // (D X(v)) e_b for a t-polynomial vector v.
    std::vector<TPoly<T>> fiber_derivative_column(const std::vector<TPoly<T>>& v, int b) const {
        std::vector<TPoly<T>> r(n, TPoly<T>(1));
        for (int c = 0; c < n; ++c) {
            if (v[c].is_zero()) continue;
            for (int a = 0; a < n; ++a)
                if (!dfib[c][a][b].is_zero()) r[a] += dfib[c][a][b] * v[c];
        }
        return r;
    }
};

// Pointwise data of the base connection at x.
template <class T>
struct BasePoint {
    PointTensor<T> gamma;    // Γ^a_{ij}(x)
    PointTensor<T> torsion;  // τ^a_{ij}(x)
    PointTensor<T> R;        // R(i,j,b)^a at x
};

template <class T>
using TForm = Tensor<TPoly<T>>;  // vector-valued 2-form with t-polynomial components

template <class T>
TForm<T> t_form(int n) {
    return TForm<T>(n, 2, Valued::vector, TPoly<T>(1));
}

template <class T>
std::vector<TPoly<T>> unit_column(int n, int j) {
    std::vector<TPoly<T>> e(n, TPoly<T>(1));
    e[j] = TPoly<T>::constant(1, ratio<T>(1));
    return e;
}

// (∇^{End,π}_{Hξ1} X)ξ2 − (∇^{End,π}_{Hξ2} X)ξ1 with Hξ = (ξ, −Γ_x(ξ, tη)).
template <class T>
TForm<T> lift_term(const FiberSeries<T>& X, const BasePoint<T>& bp, const std::vector<T>& eta) {
    const int n = X.n;
    auto r = t_form<T>(n);
    auto column = [&](int i, int j) {
        // ∂_i X e_j − DX(Γ(e_i, tη)) e_j + Γ(e_i, X e_j) − X Γ(e_i, e_j)
        std::vector<TPoly<T>> out(n, TPoly<T>(1));
        std::vector<TPoly<T>> g_eta(n, TPoly<T>(1));
        for (int c = 0; c < n; ++c) {
            T acc{};
            for (int b = 0; b < n; ++b) acc += bp.gamma.at(c, {i, b}) * eta[b];
            if (!scalar_traits<T>::is_zero(acc)) g_eta[c] = t_mono<T>(acc, 1);
        }
        const auto dX = X.fiber_derivative_column(g_eta, j);
        std::vector<TPoly<T>> col(n, TPoly<T>(1));
        for (int a = 0; a < n; ++a) col[a] = X.mat[a][j];
        std::vector<TPoly<T>> gij(n, TPoly<T>(1));
        for (int b = 0; b < n; ++b) gij[b] = TPoly<T>::constant(1, bp.gamma.at(b, {i, j}));
        const auto Xg = X.apply(gij);
        for (int a = 0; a < n; ++a) {
            out[a] = X.dx[i][a][j] - dX[a] - Xg[a];
            for (int b = 0; b < n; ++b) {
                const T& g = bp.gamma.at(a, {i, b});
                if (!scalar_traits<T>::is_zero(g) && !col[b].is_zero()) out[a] += col[b] * g;
            }
        }
        return out;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto c = column(i, j);
            for (int a = 0; a < n; ++a) r.at(a, {i, j}) += c[a];
            for (int a = 0; a < n; ++a) r.at(a, {j, i}) -= c[a];
        }
    return r;
}

// (Y ¬ DX)(ξ1, ξ2) = DX(Yξ1)ξ2 − DX(Yξ2)ξ1.
template <class T>
TForm<T> hook_term(const FiberSeries<T>& X, const FiberSeries<T>& Y) {
    const int n = X.n;
    auto r = t_form<T>(n);
    for (int i = 0; i < n; ++i) {
        const auto yi = Y.apply(unit_column<T>(n, i));
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto c = X.fiber_derivative_column(yi, j);
            for (int a = 0; a < n; ++a) {
                r.at(a, {i, j}) += c[a];
                r.at(a, {j, i}) -= c[a];
            }
        }
    }
    return r;
}

// X τ(ξ1, ξ2).
template <class T>
TForm<T> torsion_term(const FiberSeries<T>& X, const BasePoint<T>& bp) {
    const int n = X.n;
    auto r = t_form<T>(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<TPoly<T>> tau(n, TPoly<T>(1));
            for (int b = 0; b < n; ++b) tau[b] = TPoly<T>::constant(1, bp.torsion.at(b, {i, j}));
            const auto c = X.apply(tau);
            for (int a = 0; a < n; ++a) r.at(a, {i, j}) = c[a];
        }
    return r;
}

// R(ξ1, ξ2) tη.
template <class T>
TForm<T> curvature_term(const BasePoint<T>& bp, const std::vector<T>& eta) {
    const int n = bp.R.dim();
    auto r = t_form<T>(n);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                T acc{};
                for (int b = 0; b < n; ++b) acc += bp.R.at(a, {i, j, b}) * eta[b];
                if (!scalar_traits<T>::is_zero(acc)) r.at(a, {i, j}) = t_mono<T>(acc, 1);
            }
    return r;
}

template <class T>
PointTensor<T> graded_part(const TForm<T>& f, int d) {
    const std::vector<int> e{d};
    return map_components(f, [&](const TPoly<T>& p) { return p.coefficient(e); });
}

template <class T>
int t_degree(const TForm<T>& f) {
    int d = -1;
    for (std::size_t o = 0; o < f.size(); ++o) d = std::max(d, f[o].total_degree());
    return d;
}

template <class S>
BasePoint<S> base_point(const Connection<S>& conn, const std::vector<S>& x) {
    const std::span<const S> px(x);
    return {evaluate(conn.gamma(), px), evaluate(torsion(conn), px), evaluate(curvature(conn), px)};
}

template <class S>
std::vector<TensorField<S>> real_parts(const std::vector<TensorField<S>>& f) {
    std::vector<TensorField<S>> r;
    for (const auto& t : f) r.push_back(map_components(t, [](const Poly<S>& p) { return p.real_part(); }));
    return r;
}

template <class S>
std::vector<TensorField<S>> imag_parts(const std::vector<TensorField<S>>& f) {
    std::vector<TensorField<S>> r;
    for (const auto& t : f) r.push_back(map_components(t, [](const Poly<S>& p) { return p.imag_part(); }));
    return r;
}

}  // namespace detail

// S_η at base point x: the endomorphism ξ ↦ Σ_k S_k(ξ, η^k).
template <class S>
PointTensor<S> section_value(const TotallyRealStructure<S>& st, const std::vector<S>& x, const std::vector<S>& eta) {
    const int n = st.dim();
    PointTensor<S> r(n, 1, Valued::vector, S{});
    for (int k = 0; k <= st.order(); ++k) r += contract_trailing(evaluate(st.S_k(k), std::span<const S>(x)), k, eta);
    return r;
}

// D_η𝒮(v) := d/dt S_{η+tv} at t = 0, as an endomorphism at x.
template <class S>
PointTensor<S> fiber_derivative(const TotallyRealStructure<S>& st, const std::vector<S>& x, const std::vector<S>& eta,
                                const std::vector<S>& v) {
    const int n = st.dim();
    PointTensor<S> r(n, 1, Valued::vector, S{});
    for (int k = 1; k <= st.order(); ++k) {
        auto val = evaluate(st.S_k(k), std::span<const S>(x));
        auto d = contract_slot(contract_trailing(val, k - 1, eta), 2, v);
        r += d * ratio<S>(k);
    }
    return r;
}

template <class S>
struct MainResidual {
    std::vector<PointTensor<S>> graded;  // fiber degrees 0..K, each a vector-valued 2-form value
    int evaluated_through;               // K; higher degrees are not evaluated
    double norm;                         // max over evaluated degrees
    double dropped_floor;                // largest component among the dropped degrees > K
};

template <class S>
struct ResidualParts {
    detail::TForm<S> total;
    detail::TForm<S> real_system;  // lift(Γ) − hook(Γ,Γ) + hook(B,B) + tors(Γ) + Rη
    detail::TForm<S> imag_system;  // lift(B) − hook(Γ,B) − hook(B,Γ) + tors(B)
};

// H∇ ¬ (∇^{End,π}S)_η − S_η ¬ D_ηS + S_η τ + R·η at (x, tη), as t-polynomials;
// also the independently assembled real and imaginary systems.
template <class S>
ResidualParts<S> residual_parts(const TotallyRealStructure<S>& st, const std::vector<S>& x, const std::vector<S>& eta,
                                bool split = true) {
    const int n = st.dim();
    if (static_cast<int>(x.size()) != n || static_cast<int>(eta.size()) != n)
        throw rejected_input("main_residual: point dimension mismatch");
    const auto bp = detail::base_point(st.base(), x);
    const detail::FiberSeries<S> full(st.jets(), x, eta);
    auto total = detail::lift_term(full, bp, eta) - detail::hook_term(full, full) + detail::torsion_term(full, bp) +
                 detail::curvature_term(bp, eta);
    if (!split) return {std::move(total), detail::t_form<S>(n), detail::t_form<S>(n)};
    const detail::FiberSeries<S> G(detail::real_parts(st.jets()), x, eta);
    const detail::FiberSeries<S> B(detail::imag_parts(st.jets()), x, eta);
    auto re = detail::lift_term(G, bp, eta) - detail::hook_term(G, G) + detail::hook_term(B, B) +
              detail::torsion_term(G, bp) + detail::curvature_term(bp, eta);
    auto im = detail::lift_term(B, bp, eta) - detail::hook_term(G, B) - detail::hook_term(B, G) +
              detail::torsion_term(B, bp);
    return {std::move(total), std::move(re), std::move(im)};
}

template <class S>
MainResidual<S> main_residual(const TotallyRealStructure<S>& st, const std::vector<S>& x, const std::vector<S>& eta) {
    const auto parts = residual_parts(st, x, eta, false);
    const int K = st.order();
    MainResidual<S> r{{}, K, 0.0, 0.0};
    for (int d = 0; d <= K; ++d) {
        r.graded.push_back(detail::graded_part(parts.total, d));
        r.norm = std::max(r.norm, r.graded.back().norm());
    }
    for (int d = K + 1; d <= detail::t_degree(parts.total); ++d)
        r.dropped_floor = std::max(r.dropped_floor, detail::graded_part(parts.total, d).norm());
    return r;
}

namespace detail {

// The summands of the degree-k equation, before summation.
template <class S>
std::vector<TensorField<S>> per_degree_terms(const TotallyRealStructure<S>& st, const Connection<S>& conn, int k) {
    const int K = st.order();
    const int n = st.dim();
    const S i = imag_unit<S>();
    auto Sk = [&](int m) {
        if (m <= K) return st.S_k(m);
        return zero_field<S>(n, m + 1, Valued::vector, st.base().vars());
    };
    if (k == 0) return {alt(Sk(1), {1, 2})};
    if (k == 1) return {curvature(conn), alt(Sk(2), {1, 2}) * (i * ratio<S>(2))};
    const auto slots = slot_range(3, k + 2);
    std::vector<TensorField<S>> terms{sym(d1(conn, Sk(k)), slots),
                                      sym(alt(Sk(k + 1), {1, 2}), slots) * (i * ratio<S>(k + 1))};
    for (int p = 2; p <= k - 1; ++p) terms.push_back(sym(wedge1(Sk(p), Sk(k - p + 1)), slots) * ratio<S>(p));
    return terms;
}

template <class S>
Connection<S> checked_deformation(const TotallyRealStructure<S>& st) {
    if (!st.base().torsion_free()) throw rejected_input("per_degree_system: base connection has torsion");
    return deform(st.base(), st.order() >= 1 ? st.S_k(1) : zero_field<S>(st.dim(), 2, Valued::vector, st.base().vars()));
}

}  // namespace detail

// Degree 0: Alt₂S₁; degree 1: R^{∇^{S₁}} + 2i Alt₂S₂; degree k ≥ 2:
// Sym_{3..k+2}[d₁S_k + Σ_{p=2}^{k−1} p S_p ∧₁ S_{k−p+1} + i(k+1) Alt₂S_{k+1}], for k < K.
template <class S>
std::vector<TensorField<S>> per_degree_system(const TotallyRealStructure<S>& st) {
    const auto conn = detail::checked_deformation(st);
    std::vector<TensorField<S>> out;
    for (int k = 0; k <= st.order() - 1; ++k) {
        auto terms = detail::per_degree_terms(st, conn, k);
        auto sum = terms.front();
        for (std::size_t m = 1; m < terms.size(); ++m) sum += terms[m];
        out.push_back(std::move(sum));
    }
    return out;
}

// Summands of each degree's equation, k = 0..K−1, for scale-aware comparisons.
template <class S>
std::vector<std::vector<TensorField<S>>> per_degree_summands(const TotallyRealStructure<S>& st) {
    const auto conn = detail::checked_deformation(st);
    std::vector<std::vector<TensorField<S>>> out;
    for (int k = 0; k <= st.order() - 1; ++k) out.push_back(detail::per_degree_terms(st, conn, k));
    return out;
}

// The degree-K equation with S_{K+1} = 0: Sym_{3..K+2}[d₁S_K + Σ_{p=2}^{K−1} p S_p ∧₁ S_{K−p+1}] (K ≥ 2).
template <class S>
TensorField<S> truncation_defect(const TotallyRealStructure<S>& st) {
    const int K = st.order();
    if (K < 2) throw rejected_input("truncation_defect: order must be at least 2");
    const auto conn = deform(st.base(), st.S_k(1));
    auto br = d1(conn, st.S_k(K));
    for (int p = 2; p <= K - 1; ++p) br += wedge1(st.S_k(p), st.S_k(K - p + 1)) * ratio<S>(p);
    return sym(br, slot_range(3, K + 2));
}

// Value of a per-degree equation at (x, η): trailing k slots contracted with η.
template <class S>
PointTensor<S> degree_value(const TensorField<S>& eq, int k, const std::vector<S>& x, const std::vector<S>& eta) {
    return contract_trailing(evaluate(eq, std::span<const S>(x)), k, eta);
}

// Weight w_k with main_k = w_k · (degree-k equation)(η^k): i for k = 0, 1/k! otherwise.
template <class S>
S degree_weight(int k) {
    if (k == 0) return imag_unit<S>();
    return ratio<S>(1, factorial(k));
}

namespace detail {

struct FloatSection {
    Eigen::MatrixXcd S;     // S_η at x
    Eigen::MatrixXd gamma;  // Γ^∇_x(·, η)
};

template <class S>
FloatSection float_section(const TotallyRealStructure<S>& st, const TangentPoint& pt) {
    const int n = st.dim();
    if (pt.dim() != n) throw rejected_input("structure evaluation: point dimension mismatch");
    const std::vector<cfloat> x(pt.x.begin(), pt.x.end()), eta(pt.v.begin(), pt.v.end());
    FloatSection fs{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
    for (int k = 0; k <= st.order(); ++k) {
        const auto v = contract_trailing(evaluate(st.float_jets()[k], std::span<const cfloat>(x)), k, eta);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) fs.S(a, b) += v.at(a, {b});
    }
    const auto G = evaluate(st.float_gamma(), std::span<const cfloat>(x));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < n; ++b) fs.gamma(a, i) += (G.at(a, {i, b}) * eta[b]).real();
    return fs;
}

}  // namespace detail

// J_{A,η} = −α B⁻¹ T⁻¹(𝕀 − α dπ) + T B dπ on chart vectors (ẋ, v̇), with
// α ξ = (ξ, −Γ^∇_x(ξ, η) − Γ_η ξ).
template <class S>
Eigen::MatrixXd eval_J(const TotallyRealStructure<S>& st, const TangentPoint& pt) {
    const int n = st.dim();
    const auto fs = detail::float_section(st, pt);
    const Eigen::MatrixXd Gs = fs.S.real(), B = fs.S.imag();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) throw singular_error("B is singular at the requested point", std::abs(B.determinant()));
    const Eigen::MatrixXd Binv = lu.inverse();
    // α = [𝕀; −(Γ^∇ + Γ_S)], T⁻¹(𝕀 − α dπ) = [Γ^∇ + Γ_S, 𝕀]
    const Eigen::MatrixXd L = fs.gamma + Gs;
    Eigen::MatrixXd alpha(2 * n, n);
    alpha << Eigen::MatrixXd::Identity(n, n), -L;
    Eigen::MatrixXd vert(n, 2 * n);
    vert << L, Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd TBdpi = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    TBdpi.bottomLeftCorner(n, n) = B;
    return -alpha * Binv * vert + TBdpi;
}

// α_η v as a chart vector.
template <class S>
Eigen::VectorXd eval_alpha(const TotallyRealStructure<S>& st, const TangentPoint& pt, const Eigen::VectorXd& v) {
    const int n = st.dim();
    const auto fs = detail::float_section(st, pt);
    Eigen::VectorXd r(2 * n);
    r.head(n) = v;
    r.tail(n) = -(fs.gamma + fs.S.real()) * v;
    return r;
}

template <class S>
Eigen::MatrixXd eval_B(const TotallyRealStructure<S>& st, const TangentPoint& pt) {
    return detail::float_section(st, pt).S.imag();
}

struct HolomorphyResult {
    double B_residual;      // |B_η η − η|
    double alpha_residual;  // |H_η η − α_η η| = |Γ_η η|
    std::vector<double> per_degree;  // |S_k(η^{k+1})|, k = 0..K (k = 0 entry is |iη − iη| = 0)
};

template <class S>
HolomorphyResult holomorphy_check(const TotallyRealStructure<S>& st, const TangentPoint& pt) {
    const int n = st.dim();
    const std::vector<cfloat> x(pt.x.begin(), pt.x.end()), eta(pt.v.begin(), pt.v.end());
    HolomorphyResult r{0, 0, {}};
    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k <= st.order(); ++k) {
        const auto v = contract_trailing(evaluate(st.float_jets()[k], std::span<const cfloat>(x)), k + 1, eta);
        double m = 0;
        for (int a = 0; a < n; ++a) {
            total(a) += v.at(a, {});
            if (k > 0) m = std::max(m, std::abs(v.at(a, {})));
        }
        r.per_degree.push_back(m);
    }
    for (int a = 0; a < n; ++a) {
        r.B_residual = std::max(r.B_residual, std::abs(total(a).imag() - pt.v[a]));
        r.alpha_residual = std::max(r.alpha_residual, std::abs(total(a).real()));
    }
    return r;
}

// ψ_η(t + is) = sΦ_t(η): max |J(dψ(∂_t)) − dψ(∂_s)| at t₀ + is₀, with
// dψ(∂_t) = H_p Φ_{t₀}(η), dψ(∂_s) = T_p Φ_{t₀}(η), p = s₀Φ_{t₀}(η).
template <class S>
double psi_CR_residual(const TotallyRealStructure<S>& st, const NumericMetric& g, const TangentPoint& start, double t0,
                       double s0, double h = 1e-3) {
    const int n = st.dim();
    const auto traj = t0 == 0.0 ? std::vector<TangentPoint>{start} : geodesic_flow(g, start, t0, h);
    const auto& phi = traj.back();
    std::vector<double> w(n);
    for (int a = 0; a < n; ++a) w[a] = s0 * phi.v[a];
    const TangentPoint p(phi.x, w);
    const auto J = eval_J(st, p);
    const auto fs = detail::float_section(st, p);
    const Eigen::Map<const Eigen::VectorXd> v(phi.v.data(), n);
    Eigen::VectorXd dt(2 * n), ds = Eigen::VectorXd::Zero(2 * n);
    dt.head(n) = v;
    dt.tail(n) = -fs.gamma * v;
    ds.tail(n) = v;
    return (J * dt - ds).cwiseAbs().maxCoeff();
}

}  // namespace gtube
