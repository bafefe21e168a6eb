#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gtube/metric.hpp"

namespace gtube {

// Points {−½ + m/(L−1)}^n of the evaluation box, or the origin when L = 1.
template <class S>
std::vector<std::vector<S>> lattice_points(int n, int per_axis) {
    if (per_axis < 1) throw rejected_input("lattice must have at least one point per axis");
    std::vector<S> axis;
    if (per_axis == 1) axis.push_back(S{});
    for (int m = 0; per_axis > 1 && m < per_axis; ++m) axis.push_back(ratio<S>(2 * m - (per_axis - 1), 2 * (per_axis - 1)));
    std::vector<std::vector<S>> pts;
    std::vector<int> idx(n, 0);
    while (true) {
        std::vector<S> p(n);
        for (int i = 0; i < n; ++i) p[i] = axis[idx[i]];
        pts.push_back(std::move(p));
        int m = n - 1;
        while (m >= 0 && ++idx[m] == per_axis) idx[m--] = 0;
        if (m < 0) break;
    }
    return pts;
}

// max over components of |f(point)|.
template <class S>
double value_norm(const TensorField<S>& f, std::span<const S> point) {
    double m = 0;
    for (std::size_t o = 0; o < f.size(); ++o)
        if (!f[o].is_zero()) m = std::max(m, magnitude(f[o].evaluate(point)));
    return m;
}

template <class S>
double lattice_norm(const TensorField<S>& f, int per_axis) {
    double m = 0;
    for (const auto& p : lattice_points<S>(field_vars(f), per_axis)) m = std::max(m, value_norm(f, std::span<const S>(p)));
    return m;
}

template <class S>
struct ObstructionEntry {
    int k;
    TensorField<S> tensor;
    double origin_norm;
    double lattice_norm;
    bool vanishes_identically;

    bool passes(double tol) const { return vanishes_identically || std::max(origin_norm, lattice_norm) <= tol; }
};

template <class S>
ObstructionEntry<S> make_obstruction_entry(int k, TensorField<S> t, int lattice = 3) {
    const std::vector<S> origin(field_vars(t), S{});
    const double o = value_norm(t, std::span<const S>(origin));
    const double l = lattice_norm(t, lattice);
    const bool z = t.is_zero();
    return {k, std::move(t), o, l, z};
}

// Fiberwise jets S_k, β_k, θ_k of a complex structure built from a torsion-free ∇,
// a symmetric S₁ and symmetric free terms σ_k (zero unless supplied).
template <class S>
class JetSequence {
public:
    JetSequence(Connection<S> base, TensorField<S> S1, std::map<int, TensorField<S>> sigma, int K, int max_degree = -1)
        : K_(K),
          max_degree_(max_degree),
          base_(std::move(base)),
          S1_(std::move(S1)),
          deformed_(Connection<S>::flat(base_.dim())),
          zero_(zero_field<S>(base_.dim(), 0, Valued::vector, base_.vars())) {
        const int n = base_.dim();
        const double tol = scalar_traits<S>::exact ? 0.0 : 1e-12;
        if (K < 1) throw rejected_input("jet order K must be at least 1");
        if (!base_.torsion_free()) throw rejected_input("base connection has torsion");
        if (!S1_.vector_valued() || S1_.arity() != 2 || S1_.dim() != n)
            throw rejected_input("S1 must be a vector-valued 2-slot field");
        if (!is_symmetric(S1_, {1, 2}, tol)) throw rejected_input("S1 is not symmetric");
        for (auto& [k, s] : sigma) {
            if (k < 2 || k > K) throw rejected_input("sigma_" + std::to_string(k) + " outside 2..K");
            if (!s.vector_valued() || s.arity() != k + 1 || s.dim() != n)
                throw rejected_input("sigma_" + std::to_string(k) + " must be vector-valued with " +
                                     std::to_string(k + 1) + " slots");
            if (!is_symmetric(s, slot_range(1, k + 1), tol))
                throw rejected_input("sigma_" + std::to_string(k) + " is not totally symmetric");
        }
        sigma_ = std::move(sigma);
        deformed_ = deform(base_, S1_);
        R_ = cut(curvature(deformed_));
        nablaR2_ = cut(perm2(covariant_derivative(deformed_, R_)));
        build();
    }

    int order() const { return K_; }
    int dim() const { return base_.dim(); }
    int max_degree() const { return max_degree_; }
    const Connection<S>& base() const { return base_; }
    const Connection<S>& deformed() const { return deformed_; }
    const TensorField<S>& S1() const { return S1_; }
    const TensorField<S>& curvature_field() const { return R_; }
    // perm2(∇^{S₁}R^{∇^{S₁}})
    const TensorField<S>& nabla_R2() const { return nablaR2_; }
    bool has_sigma(int k) const { return sigma_.count(k) > 0; }

    // σ_k, the zero field of the right shape when not supplied.
    TensorField<S> sigma(int k) const {
        auto it = sigma_.find(k);
        if (it != sigma_.end()) return it->second;
        return zero_field<S>(dim(), k + 1, Valued::vector, base_.vars());
    }
    const TensorField<S>& S_k(int k) const {
        if (k < 0 || k > K_) throw rejected_input("S_k: k outside 0..K");
        return S_[k];
    }
    const TensorField<S>& beta(int k) const {
        if (k < 1 || k > K_ - 1) throw rejected_input("beta_k: k outside 1..K-1");
        return beta_[k];
    }
    const TensorField<S>& theta(int k) const {
        if (k < 3 || k > K_ - 1) throw rejected_input("theta_k: k outside 3..K-1");
        return theta_[k];
    }
    const std::vector<ObstructionEntry<S>>& obstructions() const { return obstructions_; }

    // (i d₁)^m applied to A, truncated when a degree cap is set.
    TensorField<S> i_d1_power(TensorField<S> A, int m) const {
        for (int j = 0; j < m; ++j) A = cut(d1(deformed_, A) * imag_unit<S>());
        return A;
    }
    TensorField<S> cut(TensorField<S> t) const { return max_degree_ < 0 ? t : truncated(t, max_degree_); }

private:
    int K_;
    int max_degree_;
    Connection<S> base_;
    TensorField<S> S1_;
    std::map<int, TensorField<S>> sigma_;
    Connection<S> deformed_;
    TensorField<S> zero_;
    TensorField<S> R_ = zero_;
    TensorField<S> nablaR2_ = zero_;
    std::vector<TensorField<S>> S_;
    std::vector<TensorField<S>> beta_;
    std::vector<TensorField<S>> theta_;
    std::vector<ObstructionEntry<S>> obstructions_;

    // Σ_{r=3}^{k} (r+1)! Σ_{p=2}^{r−1} (i d₁)^{k−r}(p S_p ∧₁ S_{r−p+1})
    TensorField<S> wedge_sum(int k) const {
        std::optional<TensorField<S>> acc;
        for (int r = 3; r <= k; ++r) {
            std::optional<TensorField<S>> inner;
            for (int p = 2; p <= r - 1; ++p) {
                auto w = wedge1(S_[p], S_[r - p + 1]) * ratio<S>(p);
                inner = inner ? *inner + w : w;
            }
            auto term = i_d1_power(cut(*inner), k - r) * ratio<S>(factorial(r + 1));
            acc = acc ? *acc + term : term;
        }
        return *acc;
    }

    void build() {
        const S i = imag_unit<S>();
        const int n = dim();
        S_.assign(K_ + 1, zero_);
        beta_.assign(std::max(K_, 1), zero_);
        theta_.assign(std::max(K_, 1), zero_);
        S_[0] = identity_field<S>(n, base_.vars()) * i;
        S_[1] = S1_;
        for (int k = 1; k <= K_ - 1; ++k) {
            if (k == 1) {
                beta_[1] = R_;
            } else if (k == 2) {
                beta_[2] = nablaR2_ * (i * ratio<S>(-1, 3));
            } else {
                auto th = i_d1_power(nablaR2_, k - 2) * (i * ratio<S>(-2));
                for (int r = 2; r <= k - 2; ++r)
                    th += i_d1_power(cut(r_dot(R_, sigma(r))), k - r - 1) *
                          (i * ratio<S>(factorial(r + 2), r + 1));
                th += wedge_sum(k);
                theta_[k] = cut(std::move(th));
                beta_[k] = cut(r_dot(R_, sigma(k - 1)) * (i * ratio<S>(1, k)) +
                               sym(theta_[k], slot_range(3, k + 2)) * ratio<S>(1, factorial(k + 1) * factorial(k)));
            }
            // S_{k+1} = i/(k+1) ∇σ_k + i/(k+2)! Sym_{2..k+2} β_k + σ_{k+1}
            const int m = k + 1;
            auto s = sym(beta_[k], slot_range(2, m + 1)) * (i * ratio<S>(1, factorial(m + 1))) + sigma(m);
            if (m - 1 >= 2 && has_sigma(m - 1)) s += covariant_derivative(deformed_, sigma(m - 1)) * (i * ratio<S>(1, m));
            S_[m] = cut(std::move(s));
        }
        for (int k = 2; k + 1 <= K_ - 1; ++k) obstructions_.push_back(make_obstruction_entry(k, circ(beta_[k + 1])));
    }
};

template <class S>
JetSequence<S> build_jets(const Connection<S>& base, const TensorField<S>& S1,
                          const std::map<int, TensorField<S>>& sigma, int K, int max_degree = -1) {
    return JetSequence<S>(base, S1, sigma, K, max_degree);
}

// β_k from the recursion
// β_k = i/k d₁∇σ_{k−1} + i/(k+1)! d₁ Sym_{2..k+1} β_{k−1} + 1/k! Sym_{3..k+2} Σ_{p=2}^{k−1} p S_p ∧₁ S_{k−p+1},
// started at β₂ = −(i/3)(∇R)₂ and using the sequence's S_p.
template <class S>
TensorField<S> beta_recursive(const JetSequence<S>& jets, int k) {
    if (k < 2 || k > jets.order() - 1) throw rejected_input("beta_recursive: k outside 2..K-1");
    const S i = imag_unit<S>();
    const auto& conn = jets.deformed();
    auto beta = jets.nabla_R2() * (i * ratio<S>(-1, 3));
    for (int m = 3; m <= k; ++m) {
        auto next = d1(conn, sym(beta, slot_range(2, m + 1))) * (i * ratio<S>(1, factorial(m + 1)));
        if (jets.has_sigma(m - 1))
            next += d1(conn, covariant_derivative(conn, jets.sigma(m - 1))) * (i * ratio<S>(1, m));
        std::optional<TensorField<S>> w;
        for (int p = 2; p <= m - 1; ++p) {
            auto t = wedge1(jets.S_k(p), jets.S_k(m - p + 1)) * ratio<S>(p);
            w = w ? *w + t : t;
        }
        next += sym(*w, slot_range(3, m + 2)) * ratio<S>(1, factorial(m));
        beta = jets.cut(std::move(next));
    }
    return beta;
}

// Circ β_{k+1}, evaluated symbolically, at the origin and on the lattice.
template <class S>
ObstructionEntry<S> obstruction(const JetSequence<S>& jets, int k, int lattice = 3) {
    if (k < 1 || k + 1 > jets.order() - 1) throw rejected_input("obstruction: need 1 <= k and k+1 <= K-1");
    return make_obstruction_entry(k, circ(jets.beta(k + 1)), lattice);
}

template <class S>
struct RiemannianJets {
    JetSequence<S> jets;
    std::vector<TensorField<S>> Theta;  // Θ_k for 2 ≤ k ≤ K (lower entries unused)
    std::vector<TensorField<S>> S_theta;  // S_k from the Θ_k, 2 ≤ k ≤ K
    int inverse_degree;                 // −1 when g⁻¹ is an exact polynomial
    double consistency_defect;          // max ‖S_k(Θ) − S_k(jets)‖
};

// S₁ = 0, σ = 0 over the Levi-Civita connection; Θ₂ = 2R,
// Θ_k = −2i(i d₁)^{k−3}(∇R)₂ + Σ_{r=3}^{k−1}(r+1)! Σ_{p=2}^{r−1}(i d₁)^{k−1−r}(p S_p ∧₁ S_{r−p+1}),
// S_k = i/((k+1)!k!) Sym_{2..k+1} Θ_k.
template <class S>
RiemannianJets<S> riemannian_jets(const Metric<S>& g, int K, int inverse_degree = -2, int max_degree = -1) {
    if (K < 2) throw rejected_input("riemannian_jets: K must be at least 2");
    const int deg = inverse_degree == -2 ? default_inverse_degree(K) : inverse_degree;
    const auto ginv = inverse_metric(g, deg);
    auto conn = levi_civita(g, ginv);
    const int n = g.dim();
    auto jets = build_jets(conn, zero_field<S>(n, 2, Valued::vector, n), {}, K, max_degree);
    const S i = imag_unit<S>();
    const auto zero = zero_field<S>(n, 0, Valued::vector, n);
    std::vector<TensorField<S>> Theta(K + 1, zero), Sk(K + 1, zero);
    double defect = 0;
    for (int k = 2; k <= K; ++k) {
        if (k == 2) {
            Theta[2] = jets.curvature_field() * ratio<S>(2);
        } else {
            auto th = jets.i_d1_power(jets.nabla_R2(), k - 3) * (i * ratio<S>(-2));
            for (int r = 3; r <= k - 1; ++r) {
                std::optional<TensorField<S>> inner;
                for (int p = 2; p <= r - 1; ++p) {
                    auto w = wedge1(Sk[p], Sk[r - p + 1]) * ratio<S>(p);
                    inner = inner ? *inner + w : w;
                }
                th += jets.i_d1_power(jets.cut(*inner), k - 1 - r) * ratio<S>(factorial(r + 1));
            }
            Theta[k] = jets.cut(std::move(th));
        }
        Sk[k] = jets.cut(sym(Theta[k], slot_range(2, k + 1)) * (i * ratio<S>(1, factorial(k + 1) * factorial(k))));
        defect = std::max(defect, relative_defect(Sk[k], jets.S_k(k)));
    }
    if (defect > identity_tolerance<S>())
        throw std::logic_error("riemannian_jets: S_k from Theta_k disagrees with the general recursion (defect " +
                               std::to_string(defect) + ")");
    return {std::move(jets), std::move(Theta), std::move(Sk), ginv.exact ? -1 : deg, defect};
}

// Circ Sym_{3..k+1} Θ_k, the metric's order-k condition (k ≥ 4).
template <class S>
ObstructionEntry<S> riemannian_obstruction(const RiemannianJets<S>& rj, int k, int lattice = 3) {
    if (k < 4 || k >= static_cast<int>(rj.Theta.size())) throw rejected_input("riemannian_obstruction: k outside 4..K");
    return make_obstruction_entry(k, circ(sym(rj.Theta[k], slot_range(3, k + 1))), lattice);
}

template <class S>
struct FirstObstruction {
    TensorField<S> tensor;         // Circ Sym_{3,4,5}[3 d₁(∇R)₂ − 2 R̃ ∧₁ R̃]
    TensorField<S> curvature_sum;  // Σ_{1≤j≤3, 4≤p≤5} R^{(j,p)}
    double norm;
    double origin_norm;
    double identity_residual;      // ‖tensor − 6·curvature_sum‖ over the reliable degrees
    double sum_norm;               // ‖curvature_sum‖ over the reliable degrees
    int reliable_degree;           // −1: every coefficient is exact; else coefficients of degree ≤ this
};

// With max_degree = D ≥ 3, every intermediate field is cut at degree D, which keeps
// the coefficients of degree ≤ D − 3 of the result exact (three derivatives of Γ at most).
template <class S>
FirstObstruction<S> first_riemann_obstruction(const Connection<S>& conn, int max_degree = -1) {
    if (!conn.torsion_free()) throw rejected_input("first_riemann_obstruction: connection has torsion");
    if (max_degree >= 0 && max_degree < 3) throw rejected_input("first_riemann_obstruction: max_degree must be >= 3");
    auto cut = [&](TensorField<S> t) { return max_degree < 0 ? t : truncated(t, max_degree); };
    const Connection<S> c(cut(conn.gamma()));
    const auto R = cut(curvature(c));
    const auto Rt = sym(R, {2, 3});
    const auto nR2 = cut(perm2(covariant_derivative(c, R)));
    const auto bracket = cut(d1(c, nR2)) * ratio<S>(3) - cut(wedge1(Rt, Rt)) * ratio<S>(2);
    auto F = circ(sym(bracket, {3, 4, 5}));
    auto sum = cut(theta_tensor(rho_tensor(R)));
    const int reliable = max_degree < 0 ? -1 : max_degree - 3;
    auto reliable_part = [&](const TensorField<S>& t) { return reliable < 0 ? t : truncated(t, reliable); };
    const std::vector<S> origin(conn.vars(), S{});
    const double on = value_norm(F, std::span<const S>(origin));
    const double res = reliable_part(F - sum * ratio<S>(6)).norm();
    const double nrm = reliable_part(F).norm(), sn = reliable_part(sum).norm();
    return {std::move(F), std::move(sum), nrm, on, res, sn, reliable};
}

template <class S>
FirstObstruction<S> first_riemann_obstruction(const Metric<S>& g, int inverse_degree = default_inverse_degree(2),
                                              int max_degree = -1) {
    return first_riemann_obstruction(levi_civita(g, inverse_degree), max_degree);
}

}  // namespace gtube
