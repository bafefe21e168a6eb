#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "gtube/errors.hpp"
#include "gtube/poly.hpp"
#include "gtube/scalar.hpp"

namespace gtube {

enum class Valued { scalar, vector };

// Element helpers shared by scalar and polynomial components.
template <class E>
struct element_traits {
    using scalar = E;
    static bool is_zero(const E& e) { return scalar_traits<E>::is_zero(e); }
    static double norm(const E& e) { return magnitude(e); }
};

template <class S>
struct element_traits<Poly<S>> {
    using scalar = S;
    static bool is_zero(const Poly<S>& e) { return e.is_zero(); }
    static double norm(const Poly<S>& e) { return e.max_abs_coefficient(); }
};

template <class E>
using scalar_of = typename element_traits<E>::scalar;

struct SlotSymmetry {
    std::vector<int> slots;  // 1-based
    bool anti = false;
};

// Dense multilinear form on an n-dimensional space with `arity` covariant slots and an optional
// vector output. Components are addressed by (a; i_1..i_p), all indices 0-based, with the output
// index most significant. Endomorphism-valued forms keep the operator argument in the last slot.
template <class E>
class Tensor {
public:
    using element_type = E;

    Tensor(int n, int arity, Valued valued, E zero = E{}) : n_(n), arity_(arity), valued_(valued), zero_(std::move(zero)) {
        if (n < 1) throw rejected_input("tensor dimension must be positive");
        if (arity < 0) throw rejected_input("negative arity");
        block_ = 1;
        for (int i = 0; i < arity; ++i) block_ *= static_cast<std::size_t>(n);
        data_.assign(block_ * (valued == Valued::vector ? n : 1), zero_);
    }

    int dim() const { return n_; }
    int arity() const { return arity_; }
    Valued valued() const { return valued_; }
    bool vector_valued() const { return valued_ == Valued::vector; }
    std::size_t size() const { return data_.size(); }
    std::size_t block() const { return block_; }
    const E& zero() const { return zero_; }

    E& operator[](std::size_t off) { return data_[off]; }
    const E& operator[](std::size_t off) const { return data_[off]; }
    std::vector<E>& data() { return data_; }
    const std::vector<E>& data() const { return data_; }

    std::size_t offset(int a, std::span<const int> idx) const {
        if (static_cast<int>(idx.size()) != arity_) throw rejected_input("index tuple length does not match arity");
        std::size_t off = 0;
        for (int i : idx) {
            if (i < 0 || i >= n_) throw rejected_input("component index out of range");
            off = off * n_ + static_cast<std::size_t>(i);
        }
        if (vector_valued()) {
            if (a < 0 || a >= n_) throw rejected_input("output index out of range");
            off += static_cast<std::size_t>(a) * block_;
        }
        return off;
    }
    E& at(int a, std::initializer_list<int> idx) { return data_[offset(a, std::span(idx.begin(), idx.size()))]; }
    const E& at(int a, std::initializer_list<int> idx) const {
        return data_[offset(a, std::span(idx.begin(), idx.size()))];
    }
    E& at(int a, std::span<const int> idx) { return data_[offset(a, idx)]; }
    const E& at(int a, std::span<const int> idx) const { return data_[offset(a, idx)]; }

    // Splits an offset into output index and slot indices.
    void decode(std::size_t off, int& a, std::vector<int>& idx) const {
        idx.resize(arity_);
        a = vector_valued() ? static_cast<int>(off / block_) : 0;
        std::size_t r = off % block_;
        for (int m = arity_ - 1; m >= 0; --m) {
            idx[m] = static_cast<int>(r % n_);
            r /= n_;
        }
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const E& e) { return element_traits<E>::is_zero(e); });
    }

    // Largest component size (max |coefficient| for polynomial components).
    double norm() const {
        double m = 0;
        for (const auto& e : data_) m = std::max(m, element_traits<E>::norm(e));
        return m;
    }

    bool same_shape(const Tensor& o) const {
        return n_ == o.n_ && arity_ == o.arity_ && valued_ == o.valued_;
    }
    void require_same_shape(const Tensor& o, const char* op) const {
        if (!same_shape(o))
            throw rejected_input(std::string(op) + ": shape mismatch (" + shape_string() + " vs " + o.shape_string() +
                                 ")");
    }
    std::string shape_string() const {
        return "n=" + std::to_string(n_) + ",arity=" + std::to_string(arity_) +
               (vector_valued() ? ",vector" : ",scalar");
    }

    // Records a symmetry after checking it holds; throws otherwise.
    void declare(SlotSymmetry s);
    const std::vector<SlotSymmetry>& declared() const { return declared_; }

    Tensor& operator+=(const Tensor& o) {
        require_same_shape(o, "+");
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (!element_traits<E>::is_zero(o.data_[i])) data_[i] += o.data_[i];
        declared_.clear();
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        require_same_shape(o, "-");
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (!element_traits<E>::is_zero(o.data_[i])) data_[i] -= o.data_[i];
        declared_.clear();
        return *this;
    }
    Tensor& operator*=(const scalar_of<E>& c) {
        for (auto& e : data_)
            if (!element_traits<E>::is_zero(e)) e *= c;
        return *this;
    }

    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator-(Tensor a) {
        for (auto& e : a.data_) e = -e;
        return a;
    }
    friend Tensor operator*(Tensor a, const scalar_of<E>& c) { return a *= c; }
    friend Tensor operator*(const scalar_of<E>& c, Tensor a) { return a *= c; }
    friend bool operator==(const Tensor& a, const Tensor& b) { return a.same_shape(b) && a.data_ == b.data_; }

private:
    int n_;
    int arity_;
    Valued valued_;
    E zero_;
    std::size_t block_ = 1;
    std::vector<E> data_;
    std::vector<SlotSymmetry> declared_;
};

template <class S>
using PointTensor = Tensor<S>;

template <class S>
using TensorField = Tensor<Poly<S>>;

template <class S>
TensorField<S> zero_field(int n, int arity, Valued valued, int vars) {
    return TensorField<S>(n, arity, valued, Poly<S>(vars));
}

// Number of base variables of a field's components.
template <class S>
int field_vars(const TensorField<S>& f) {
    return f.zero().dim();
}

template <class E>
Tensor<E> identity_endomorphism(int n, const E& zero, const E& one) {
    Tensor<E> t(n, 1, Valued::vector, zero);
    for (int a = 0; a < n; ++a) t.at(a, {a}) = one;
    return t;
}

template <class S>
TensorField<S> identity_field(int n, int vars) {
    return identity_endomorphism<Poly<S>>(n, Poly<S>(vars), Poly<S>::constant(vars, ratio<S>(1)));
}

template <class S>
PointTensor<S> identity_point(int n) {
    return identity_endomorphism<S>(n, S{}, ratio<S>(1));
}

// Applies f to every component, producing a tensor of the same shape.
template <class E, class F>
auto map_components(const Tensor<E>& t, F f) -> Tensor<decltype(f(t.zero()))> {
    using R = decltype(f(t.zero()));
    Tensor<R> r(t.dim(), t.arity(), t.valued(), f(t.zero()));
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = f(t[i]);
    return r;
}

template <class S>
PointTensor<S> evaluate(const TensorField<S>& f, std::span<const S> point) {
    return map_components(f, [&](const Poly<S>& p) { return p.evaluate(point); });
}

template <class S>
TensorField<S> partial(const TensorField<S>& f, int var) {
    return map_components(f, [&](const Poly<S>& p) { return p.partial(var); });
}

template <class S>
TensorField<S> constant_field(const PointTensor<S>& t, int vars) {
    return map_components(t, [&](const S& c) { return Poly<S>::constant(vars, c); });
}

template <class S>
TensorField<S> truncated(const TensorField<S>& f, int max_degree) {
    return map_components(f, [&](const Poly<S>& p) { return p.truncated(max_degree); });
}

template <class S>
PointTensor<cfloat> to_cfloat(const PointTensor<S>& t) {
    return map_components(t, [](const S& z) { return scalar_traits<S>::to_cfloat(z); });
}

// max |a - b| scaled by max(1, |a|, |b|).
template <class E>
double relative_defect(const Tensor<E>& a, const Tensor<E>& b) {
    a.require_same_shape(b, "relative_defect");
    const double d = (a - b).norm();
    return d / std::max({1.0, a.norm(), b.norm()});
}

// Largest coefficient size in each total degree over all components.
template <class S>
std::vector<double> degree_profile(const TensorField<S>& f) {
    std::vector<double> out;
    for (std::size_t o = 0; o < f.size(); ++o) {
        const auto d = f[o].degree_scales();
        if (d.size() > out.size()) out.resize(d.size(), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) out[i] = std::max(out[i], d[i]);
    }
    return out;
}

// max over total degrees d ≤ cap (all when cap < 0) of |residual|_d / max(1, scale_d), where
// scale_d is the largest degree-d coefficient among the balanced quantities.
template <class S>
double graded_relative(const TensorField<S>& residual, const std::vector<TensorField<S>>& parts, int cap = -1) {
    const auto r = degree_profile(residual);
    std::vector<double> scale(r.size(), 0.0);
    for (const auto& p : parts) {
        const auto q = degree_profile(p);
        for (std::size_t d = 0; d < std::min(q.size(), scale.size()); ++d) scale[d] = std::max(scale[d], q[d]);
    }
    double worst = 0;
    for (std::size_t d = 0; d < r.size() && (cap < 0 || static_cast<int>(d) <= cap); ++d)
        worst = std::max(worst, r[d] / std::max(1.0, scale[d]));
    return worst;
}

// Default acceptance threshold for identities: exact arithmetic demands zero.
template <class S>
constexpr double identity_tolerance() {
    return scalar_traits<S>::exact ? 0.0 : 1e-9;
}

}  // namespace gtube
