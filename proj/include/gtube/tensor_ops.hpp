#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gtube/tensor.hpp"

namespace gtube {

namespace detail {

inline std::vector<int> to_zero_based(const std::vector<int>& slots, int arity, const char* op) {
    std::vector<int> z;
    std::set<int> seen;
    for (int s : slots) {
        if (s < 1 || s > arity)
            throw rejected_input(std::string(op) + ": slot " + std::to_string(s) + " out of range 1.." +
                                 std::to_string(arity));
        if (!seen.insert(s).second) throw rejected_input(std::string(op) + ": repeated slot " + std::to_string(s));
        z.push_back(s - 1);
    }
    return z;
}

inline int parity(const std::vector<int>& perm) {
    int inv = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inv;
    return inv % 2 ? -1 : 1;
}

struct WeightedOrder {
    std::vector<int> order;  // result(i_0..) = source(i_{order[0]}, ..)
    int sign;
};

// Sum over slot reorderings: result(i) = sum_w sign_w * source(i_{order_w[0]}, .., i_{order_w[p-1]}).
template <class E>
Tensor<E> reorder_sum(const Tensor<E>& t, const std::vector<WeightedOrder>& orders) {
    const int p = t.arity();
    const int n = t.dim();
    Tensor<E> r(n, p, t.valued(), t.zero());
    std::vector<std::size_t> stride(p);
    std::size_t s = 1;
    for (int m = p - 1; m >= 0; --m) {
        stride[m] = s;
        s *= static_cast<std::size_t>(n);
    }
    std::vector<int> idx;
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        const std::size_t base = t.vector_valued() ? static_cast<std::size_t>(a) * t.block() : 0;
        E acc = t.zero();
        for (const auto& w : orders) {
            std::size_t src = base;
            for (int m = 0; m < p; ++m) src += static_cast<std::size_t>(idx[w.order[m]]) * stride[m];
            const E& v = t[src];
            if (element_traits<E>::is_zero(v)) continue;
            if (w.sign > 0) acc += v;
            else acc -= v;
        }
        r[off] = std::move(acc);
    }
    return r;
}

inline std::vector<WeightedOrder> slot_permutations(int arity, const std::vector<int>& zslots, bool signed_sum) {
    std::vector<int> perm(zslots.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<WeightedOrder> out;
    do {
        std::vector<int> order(arity);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t j = 0; j < zslots.size(); ++j) order[zslots[j]] = zslots[perm[j]];
        out.push_back({order, signed_sum ? parity(perm) : 1});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace detail

// result(v_1..v_p) = t(v_{order[0]+1}, .., v_{order[p-1]+1}); order is 0-based.
template <class E>
Tensor<E> permute_slots(const Tensor<E>& t, const std::vector<int>& order) {
    if (static_cast<int>(order.size()) != t.arity()) throw rejected_input("permute_slots: order length != arity");
    std::vector<int> check = order;
    std::sort(check.begin(), check.end());
    for (int i = 0; i < t.arity(); ++i)
        if (check[i] != i) throw rejected_input("permute_slots: not a permutation");
    return detail::reorder_sum(t, {{order, 1}});
}

// Un-normalized symmetrization over the listed (1-based) slots.
template <class E>
Tensor<E> sym(const Tensor<E>& t, const std::vector<int>& slots) {
    const auto z = detail::to_zero_based(slots, t.arity(), "sym");
    if (z.size() <= 1) return t;
    return detail::reorder_sum(t, detail::slot_permutations(t.arity(), z, false));
}

// Un-normalized alternation over the listed (1-based) slots.
template <class E>
Tensor<E> alt(const Tensor<E>& t, const std::vector<int>& slots) {
    const auto z = detail::to_zero_based(slots, t.arity(), "alt");
    if (z.size() <= 1) return t;
    return detail::reorder_sum(t, detail::slot_permutations(t.arity(), z, true));
}

// Slots first..last, 1-based inclusive; empty when last < first.
inline std::vector<int> slot_range(int first, int last) {
    std::vector<int> s;
    for (int i = first; i <= last; ++i) s.push_back(i);
    return s;
}

// t(v1,v2,v3,..) + t(v2,v3,v1,..) + t(v3,v1,v2,..)
template <class E>
Tensor<E> circ(const Tensor<E>& t) {
    const int p = t.arity();
    if (p < 3) throw rejected_input("circ: arity must be at least 3");
    std::vector<int> id(p);
    std::iota(id.begin(), id.end(), 0);
    auto o2 = id, o3 = id;
    o2[0] = 1, o2[1] = 2, o2[2] = 0;
    o3[0] = 2, o3[1] = 0, o3[2] = 1;
    return detail::reorder_sum(t, {{id, 1}, {o2, 1}, {o3, 1}});
}

// Cyclic sum over three consecutive slots starting at `first` (1-based).
template <class E>
Tensor<E> circ_at(const Tensor<E>& t, int first) {
    const int p = t.arity();
    if (first < 1 || first + 2 > p) throw rejected_input("circ_at: slots out of range");
    std::vector<int> id(p);
    std::iota(id.begin(), id.end(), 0);
    const int f = first - 1;
    auto o2 = id, o3 = id;
    o2[f] = f + 1, o2[f + 1] = f + 2, o2[f + 2] = f;
    o3[f] = f + 2, o3[f + 1] = f, o3[f + 2] = f + 1;
    return detail::reorder_sum(t, {{id, 1}, {o2, 1}, {o3, 1}});
}

// Swaps the first two slots.
template <class E>
Tensor<E> perm2(const Tensor<E>& t) {
    if (t.arity() < 2) throw rejected_input("perm2: arity must be at least 2");
    std::vector<int> order(t.arity());
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[0], order[1]);
    return detail::reorder_sum(t, {{order, 1}});
}

// Size of t - (signed) t∘(swap of two slots), maximised over adjacent swaps of `slots`.
template <class E>
double symmetry_defect(const Tensor<E>& t, const std::vector<int>& slots, bool anti) {
    const auto z = detail::to_zero_based(slots, t.arity(), "symmetry check");
    double worst = 0;
    for (std::size_t j = 0; j + 1 < z.size(); ++j) {
        std::vector<int> order(t.arity());
        std::iota(order.begin(), order.end(), 0);
        std::swap(order[z[j]], order[z[j + 1]]);
        const auto swapped = detail::reorder_sum(t, {{order, 1}});
        const auto d = anti ? (t + swapped) : (t - swapped);
        worst = std::max(worst, d.norm());
    }
    return worst;
}

template <class E>
bool is_symmetric(const Tensor<E>& t, const std::vector<int>& slots, double tol = 0.0) {
    return symmetry_defect(t, slots, false) <= tol * std::max(1.0, t.norm());
}

template <class E>
bool is_antisymmetric(const Tensor<E>& t, const std::vector<int>& slots, double tol = 0.0) {
    return symmetry_defect(t, slots, true) <= tol * std::max(1.0, t.norm());
}

template <class E>
void Tensor<E>::declare(SlotSymmetry s) {
    const double tol = scalar_traits<scalar_of<E>>::exact ? 0.0 : 1e-12;
    if (s.anti ? !is_antisymmetric(*this, s.slots, tol) : !is_symmetric(*this, s.slots, tol))
        throw rejected_input(std::string("declared ") + (s.anti ? "antisymmetry" : "symmetry") +
                             " does not hold");
    declared_.push_back(std::move(s));
}

// (A . θ)(u, v) = A(u) θ(v): A is End-valued with p form slots, θ vector-valued with q slots.
template <class E>
Tensor<E> prod_dot(const Tensor<E>& A, const Tensor<E>& theta) {
    if (!A.vector_valued() || A.arity() < 1) throw rejected_input("prod_dot: A must be End-valued");
    if (!theta.vector_valued()) throw rejected_input("prod_dot: theta must be vector-valued");
    if (A.dim() != theta.dim()) throw rejected_input("prod_dot: dimension mismatch");
    const int n = A.dim();
    const int p = A.arity() - 1, q = theta.arity();
    Tensor<E> r(n, p + q, Valued::vector, A.zero());
    std::vector<int> idx, ai(p + 1), ti(q);
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        std::copy(idx.begin(), idx.begin() + p, ai.begin());
        std::copy(idx.begin() + p, idx.end(), ti.begin());
        E acc = A.zero();
        for (int b = 0; b < n; ++b) {
            ai[p] = b;
            const E& x = A.at(a, ai);
            if (element_traits<E>::is_zero(x)) continue;
            const E& y = theta.at(b, ti);
            if (element_traits<E>::is_zero(y)) continue;
            acc += x * y;
        }
        r[off] = std::move(acc);
    }
    return r;
}

// (A ¬ θ)(u, v) = Σ_j θ(v_1, .., A(u) v_j, .., v_q); θ may be scalar- or vector-valued.
template <class E>
Tensor<E> prod_contract(const Tensor<E>& A, const Tensor<E>& theta) {
    if (!A.vector_valued() || A.arity() < 1) throw rejected_input("prod_contract: A must be End-valued");
    if (A.dim() != theta.dim()) throw rejected_input("prod_contract: dimension mismatch");
    const int n = A.dim();
    const int p = A.arity() - 1, q = theta.arity();
    Tensor<E> r(n, p + q, theta.valued(), A.zero());
    std::vector<int> idx, ai(p + 1), ti(q);
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        std::copy(idx.begin(), idx.begin() + p, ai.begin());
        E acc = A.zero();
        for (int j = 0; j < q; ++j) {
            std::copy(idx.begin() + p, idx.end(), ti.begin());
            ai[p] = idx[p + j];
            for (int b = 0; b < n; ++b) {
                const E& x = A.at(b, ai);
                if (element_traits<E>::is_zero(x)) continue;
                ti[j] = b;
                const E& y = theta.at(a, ti);
                if (element_traits<E>::is_zero(y)) continue;
                acc += y * x;
            }
        }
        r[off] = std::move(acc);
    }
    return r;
}

// R.θ = R·θ − R¬θ; the dot term is absent for scalar-valued θ.
template <class E>
Tensor<E> r_dot(const Tensor<E>& R, const Tensor<E>& theta) {
    if (!theta.vector_valued()) return -prod_contract(R, theta);
    return prod_dot(R, theta) - prod_contract(R, theta);
}

// (A ∧₁ B)(ξ1, ξ2, η, μ) = A(ξ1, B(ξ2, η), μ) − A(ξ2, B(ξ1, η), μ).
template <class E>
Tensor<E> wedge1(const Tensor<E>& A, const Tensor<E>& B) {
    if (!A.vector_valued() || !B.vector_valued()) throw rejected_input("wedge1: both factors must be vector-valued");
    if (A.arity() < 2) throw rejected_input("wedge1: first factor needs at least two slots");
    if (B.arity() < 1) throw rejected_input("wedge1: second factor needs at least one slot");
    if (A.dim() != B.dim()) throw rejected_input("wedge1: dimension mismatch");
    const int n = A.dim();
    const int k = A.arity() - 1, l = B.arity() - 1;
    Tensor<E> r(n, k + l + 1, Valued::vector, A.zero());
    std::vector<int> idx, ai(k + 1), bi(l + 1);
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        // idx = (i1, i2, J[l], M[k-1])
        for (int m = 0; m < k - 1; ++m) ai[2 + m] = idx[2 + l + m];
        for (int m = 0; m < l; ++m) bi[1 + m] = idx[2 + m];
        E acc = A.zero();
        for (int sgn = 0; sgn < 2; ++sgn) {
            ai[0] = idx[sgn == 0 ? 0 : 1];
            bi[0] = idx[sgn == 0 ? 1 : 0];
            for (int b = 0; b < n; ++b) {
                ai[1] = b;
                const E& x = A.at(a, ai);
                if (element_traits<E>::is_zero(x)) continue;
                const E& y = B.at(b, bi);
                if (element_traits<E>::is_zero(y)) continue;
                if (sgn == 0) acc += x * y;
                else acc -= x * y;
            }
        }
        r[off] = std::move(acc);
    }
    return r;
}

// Contracts one (1-based) slot with a vector; the arity drops by one.
template <class E, class V>
Tensor<E> contract_slot(const Tensor<E>& t, int slot, const std::vector<V>& v) {
    if (slot < 1 || slot > t.arity()) throw rejected_input("contract_slot: slot out of range");
    if (static_cast<int>(v.size()) != t.dim()) throw rejected_input("contract_slot: vector length mismatch");
    const int n = t.dim();
    Tensor<E> r(n, t.arity() - 1, t.valued(), t.zero());
    std::vector<int> idx, ti(t.arity());
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        for (int m = 0, s = 0; m < t.arity(); ++m)
            if (m != slot - 1) ti[m] = idx[s++];
        E acc = t.zero();
        for (int b = 0; b < n; ++b) {
            ti[slot - 1] = b;
            const E& x = t.at(a, ti);
            if (element_traits<E>::is_zero(x)) continue;
            acc += x * v[b];
        }
        r[off] = std::move(acc);
    }
    return r;
}

// Contracts the trailing `count` slots with the same vector η.
template <class E, class V>
Tensor<E> contract_trailing(Tensor<E> t, int count, const std::vector<V>& eta) {
    for (int c = 0; c < count; ++c) t = contract_slot(t, t.arity(), eta);
    return t;
}

// Preimage under Alt_2 of β ∈ Λ² ⊗ S^{p-1}: α = C_p Sym_{2..p+1} β with C_p = p/(p+1)!.
template <class E>
Tensor<E> alt2_preimage(const Tensor<E>& beta) {
    using S = scalar_of<E>;
    const int ar = beta.arity();
    if (ar < 3) throw rejected_input("alt2_preimage: arity must be at least 3");
    const int p = ar - 1;
    const double tol = scalar_traits<S>::exact ? 0.0 : 1e-12;
    if (!is_antisymmetric(beta, {1, 2}, tol)) throw rejected_input("alt2_preimage: not antisymmetric in slots 1,2");
    if (ar > 3 && !is_symmetric(beta, slot_range(3, ar), tol))
        throw rejected_input("alt2_preimage: not symmetric in slots 3.." + std::to_string(ar));
    const auto c = circ(beta);
    const double res = c.norm();
    if (res > tol * std::max(1.0, beta.norm())) throw obstruction_error("alt2_preimage: Circ beta does not vanish", res);
    return sym(beta, slot_range(2, p + 1)) * ratio<S>(p, factorial(p + 1));
}

// Particular solution S = −2 Sym_{2,3,4}(perm2 ρ) of Alt_2[8 Sym_{3,4} ρ − S] = 0.
template <class E>
Tensor<E> altsym_curvature_solve(const Tensor<E>& rho) {
    using S = scalar_of<E>;
    if (rho.arity() != 4) throw rejected_input("altsym_curvature_solve: rho must have four slots");
    const double tol = (scalar_traits<S>::exact ? 0.0 : 1e-12) * std::max(1.0, rho.norm());
    if (circ(rho).norm() > tol) throw rejected_input("altsym_curvature_solve: cyclic sum over slots 1-3 is nonzero");
    if (circ_at(rho, 2).norm() > tol)
        throw rejected_input("altsym_curvature_solve: cyclic sum over slots 2-4 is nonzero");
    if (symmetry_defect(rho, {2, 3}, true) > tol)
        throw rejected_input("altsym_curvature_solve: not antisymmetric in slots 2,3");
    return sym(perm2(rho), {2, 3, 4}) * ratio<S>(-2);
}

}  // namespace gtube
