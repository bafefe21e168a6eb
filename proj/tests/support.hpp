#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "gtube/gtube.hpp"
#include "gtube/sampling.hpp"

namespace gtube::testing {

using namespace gtube::sampling;

// Reference multivariate polynomial: exponent tuple -> coefficient, no packing, no hashing.
template <class S>
using NaivePoly = std::map<std::vector<int>, S>;

template <class S>
NaivePoly<S> naive(const Poly<S>& p) {
    NaivePoly<S> r;
    for (const auto& t : p.terms()) r[p.exponents(t)] = t.coef;
    return r;
}

template <class S>
NaivePoly<S> naive_mul(const NaivePoly<S>& a, const NaivePoly<S>& b) {
    NaivePoly<S> r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            auto e = ea;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            r[e] += ca * cb;
        }
    std::erase_if(r, [](const auto& kv) { return scalar_traits<S>::is_zero(kv.second); });
    return r;
}

// Iterates over all index tuples of length `len` in {0..n-1}.
template <class F>
void for_each_index(int n, int len, F f) {
    std::vector<int> idx(len, 0);
    while (true) {
        f(idx);
        int m = len - 1;
        while (m >= 0 && ++idx[m] == n) idx[m--] = 0;
        if (m < 0) break;
    }
}

// Exact rank of a family of tensors viewed as flat vectors (Gaussian elimination).
inline int exact_rank(const std::vector<PointTensor<qcomplex>>& family) {
    std::vector<std::vector<qcomplex>> rows;
    for (const auto& t : family) rows.push_back(t.data());
    int rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
        auto pivot = std::find_if(rows.begin() + rank, rows.end(), [c](const auto& r) { return !r[c].is_zero(); });
        if (pivot == rows.end()) continue;
        std::iter_swap(rows.begin() + rank, pivot);
        const auto& p = rows[rank];
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][c].is_zero()) continue;
            const qcomplex f = rows[r][c] / p[c];
            for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * p[k];
        }
        ++rank;
    }
    return rank;
}

// Nondecreasing index tuples of length `len` in {0..n-1}.
inline std::vector<std::vector<int>> multisets(int n, int len) {
    std::vector<std::vector<int>> out;
    for_each_index(n, len, [&](const std::vector<int>& idx) {
        if (std::is_sorted(idx.begin(), idx.end())) out.push_back(idx);
    });
    return out;
}

// Unit tensor with a single component equal to one.
template <class S>
PointTensor<S> unit_tensor(int n, Valued valued, int a, const std::vector<int>& idx) {
    PointTensor<S> t(n, static_cast<int>(idx.size()), valued, S{});
    t.at(a, idx) = ratio<S>(1);
    return t;
}

// Unit covector monomial dx^{i1} ⊗ … ⊗ dx^{ip}.
inline PointTensor<qcomplex> dx(int n, std::vector<int> idx) { return unit_tensor<qcomplex>(n, Valued::scalar, 0, idx); }

// Basis of V*⊗S^pV*: Sym over the trailing p slots of unit tensors.
inline std::vector<PointTensor<qcomplex>> basis_vsp(int n, int p) {
    std::vector<PointTensor<qcomplex>> out;
    for (int i = 0; i < n; ++i)
        for (auto J : multisets(n, p)) {
            J.insert(J.begin(), i);
            out.push_back(sym(dx(n, J), slot_range(2, p + 1)));
        }
    return out;
}

// Basis of Λ²V*⊗S^{p-1}V*.
inline std::vector<PointTensor<qcomplex>> basis_lambda2(int n, int p) {
    std::vector<PointTensor<qcomplex>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (auto J : multisets(n, p - 1)) {
                J.insert(J.begin(), {i, j});
                out.push_back(sym(alt(dx(n, J), {1, 2}), slot_range(3, p + 1)));
            }
    return out;
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <class S>
std::vector<PointTensor<S>> evaluate_at(const TensorField<S>& f, const std::vector<std::vector<S>>& points) {
    std::vector<PointTensor<S>> out;
    for (const auto& p : points) out.push_back(evaluate(f, std::span<const S>(p)));
    return out;
}

// Σ over all orderings of the (1-based, contiguous) slots first..last, by brute force.
template <class S>
TensorField<S> oracle_sym(const TensorField<S>& t, int first, int last) {
    TensorField<S> r(t.dim(), t.arity(), t.valued(), t.zero());
    std::vector<int> perm(last - first + 1);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> idx, src;
    int a = 0;
    for (std::size_t off = 0; off < r.size(); ++off) {
        r.decode(off, a, idx);
        auto p = perm;
        Poly<S> acc = t.zero();
        do {
            src = idx;
            for (std::size_t m = 0; m < p.size(); ++m) src[first - 1 + m] = idx[first - 1 + p[m]];
            acc += t.at(a, src);
        } while (std::next_permutation(p.begin(), p.end()));
        r[off] = std::move(acc);
    }
    return r;
}

// A(η, …, η) for a vector-valued point tensor.
template <class S>
std::vector<S> on_diagonal(PointTensor<S> t, const std::vector<S>& eta) {
    while (t.arity() > 0) t = contract_slot(t, 1, eta);
    std::vector<S> v(t.dim());
    for (int a = 0; a < t.dim(); ++a) v[a] = t.at(a, {});
    return v;
}

}  // namespace gtube::testing
