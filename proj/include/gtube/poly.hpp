#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gtube/errors.hpp"
#include "gtube/scalar.hpp"

namespace gtube {

namespace detail {

// Exponent vectors packed into one 64-bit word; each variable gets `width` bits,
// the top bit of every field is a guard that flags overflow after addition.
struct MonomialCodec {
    int dim;
    int width;
    std::uint64_t field_mask;
    std::uint64_t guard_mask;

    explicit MonomialCodec(int d) : dim(d), width(d == 0 ? 64 : std::min(16, 64 / d)), field_mask(0), guard_mask(0) {
        if (d > 0) {
            field_mask = (std::uint64_t{1} << width) - 1;
            for (int i = 0; i < d; ++i) guard_mask |= std::uint64_t{1} << (width * i + width - 1);
        }
    }
    int max_exponent() const { return dim == 0 ? 0 : static_cast<int>((field_mask >> 1)); }
    std::uint64_t unit(int i) const { return std::uint64_t{1} << (width * i); }
    int exponent(std::uint64_t key, int i) const { return static_cast<int>((key >> (width * i)) & field_mask); }
    int total_degree(std::uint64_t key) const {
        int s = 0;
        for (int i = 0; i < dim; ++i) s += exponent(key, i);
        return s;
    }
    std::uint64_t encode(std::span<const int> exps) const {
        if (static_cast<int>(exps.size()) != dim)
            throw rejected_input("exponent tuple has length " + std::to_string(exps.size()) + ", expected " +
                                 std::to_string(dim));
        std::uint64_t key = 0;
        for (int i = 0; i < dim; ++i) {
            if (exps[i] < 0) throw rejected_input("negative exponent");
            if (exps[i] > max_exponent()) throw rejected_input("exponent exceeds packed range");
            key |= static_cast<std::uint64_t>(exps[i]) << (width * i);
        }
        return key;
    }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t s = a + b;
        if (s & guard_mask) throw std::overflow_error("polynomial exponent overflow");
        return s;
    }
};

}  // namespace detail

// Multivariate polynomial in x_0..x_{dim-1} with scalar coefficients S,
// kept in canonical form: terms sorted by packed exponent, no negligible coefficients.
template <class S>
class Poly {
public:
    using scalar_type = S;
    struct Term {
        std::uint64_t key;
        S coef;
    };

    explicit Poly(int dim = 0) : dim_(dim) {
        if (dim < 0) throw rejected_input("negative polynomial dimension");
    }

    static Poly constant(int dim, const S& c) {
        Poly p(dim);
        if (!scalar_traits<S>::is_zero(c)) p.terms_.push_back({0, c});
        return p;
    }
    static Poly variable(int dim, int i) {
        Poly p(dim);
        p.check_var(i);
        p.terms_.push_back({p.codec().unit(i), ratio<S>(1)});
        return p;
    }
    static Poly monomial(int dim, std::span<const int> exps, const S& c) {
        Poly p(dim);
        if (!scalar_traits<S>::is_zero(c)) p.terms_.push_back({p.codec().encode(exps), c});
        return p;
    }
    static Poly from_terms(int dim, const std::vector<std::pair<std::vector<int>, S>>& terms) {
        Poly p(dim);
        const detail::MonomialCodec cd(dim);
        std::unordered_map<std::uint64_t, std::size_t> where;
        for (const auto& [e, c] : terms) {
            const auto key = cd.encode(e);
            auto [it, fresh] = where.try_emplace(key, p.terms_.size());
            if (fresh) p.terms_.push_back({key, c});
            else p.terms_[it->second].coef += c;
        }
        p.normalize();
        return p;
    }

    int dim() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    std::vector<int> exponents(const Term& t) const {
        const auto cd = codec();
        std::vector<int> e(dim_);
        for (int i = 0; i < dim_; ++i) e[i] = cd.exponent(t.key, i);
        return e;
    }
    int total_degree() const {
        const auto cd = codec();
        int d = -1;
        for (const auto& t : terms_) d = std::max(d, cd.total_degree(t.key));
        return d;
    }
    S coefficient(std::span<const int> exps) const {
        const auto key = codec().encode(exps);
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const Term& t, std::uint64_t k) { return t.key < k; });
        if (it != terms_.end() && it->key == key) return it->coef;
        return S{};
    }
    S constant_term() const {
        if (!terms_.empty() && terms_.front().key == 0) return terms_.front().coef;
        return S{};
    }
    double max_abs_coefficient() const {
        double m = 0;
        for (const auto& t : terms_) m = std::max(m, magnitude(t.coef));
        return m;
    }

    Poly& operator+=(const Poly& o) { return *this = merge(*this, o, false); }
    Poly& operator-=(const Poly& o) { return *this = merge(*this, o, true); }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    Poly& operator*=(const S& c) {
        if (scalar_traits<S>::is_zero(c)) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_) t.coef *= c;
        normalize();
        return *this;
    }

    friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
    friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }
    friend Poly operator-(Poly a) {
        for (auto& t : a.terms_) t.coef = -t.coef;
        return a;
    }
    friend Poly operator*(Poly a, const S& c) { return a *= c; }
    friend Poly operator*(const S& c, Poly a) { return a *= c; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        same_dim(a, b);
        Poly r(a.dim_);
        if (a.is_zero() || b.is_zero()) return r;
        if (a.terms_.size() == 1 && a.terms_[0].key == 0) return b * a.terms_[0].coef;
        if (b.terms_.size() == 1 && b.terms_[0].key == 0) return a * b.terms_[0].coef;
        const auto cd = a.codec();
        std::unordered_map<std::uint64_t, std::uint32_t> where;
        where.reserve(a.size() * b.size() / 2 + 8);
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                const auto key = cd.add(ta.key, tb.key);
                auto [it, fresh] = where.try_emplace(key, static_cast<std::uint32_t>(r.terms_.size()));
                if (fresh) r.terms_.push_back({key, S{}});
                add_product(r.terms_[it->second].coef, ta.coef, tb.coef);
            }
        }
        r.normalize();
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.dim_ != b.dim_ || a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].key != b.terms_[i].key || !(a.terms_[i].coef == b.terms_[i].coef)) return false;
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly partial(int i) const {
        check_var(i);
        const auto cd = codec();
        Poly r(dim_);
        for (const auto& t : terms_) {
            const int e = cd.exponent(t.key, i);
            if (e == 0) continue;
            r.terms_.push_back({t.key - cd.unit(i), t.coef * ratio<S>(e)});
        }
        r.normalize();
        return r;
    }

    S evaluate(std::span<const S> point) const {
        if (static_cast<int>(point.size()) != dim_)
            throw rejected_input("evaluation point has length " + std::to_string(point.size()) + ", expected " +
                                 std::to_string(dim_));
        const auto cd = codec();
        // Power tables per variable, then one product per term.
        std::vector<std::vector<S>> pw(dim_);
        std::vector<int> maxe(dim_, 0);
        for (const auto& t : terms_)
            for (int i = 0; i < dim_; ++i) maxe[i] = std::max(maxe[i], cd.exponent(t.key, i));
        for (int i = 0; i < dim_; ++i) {
            pw[i].resize(maxe[i] + 1);
            pw[i][0] = ratio<S>(1);
            for (int e = 1; e <= maxe[i]; ++e) pw[i][e] = pw[i][e - 1] * point[i];
        }
        S acc{};
        for (const auto& t : terms_) {
            S m = t.coef;
            for (int i = 0; i < dim_; ++i) {
                const int e = cd.exponent(t.key, i);
                if (e) m *= pw[i][e];
            }
            acc += m;
        }
        return acc;
    }

    // Drops every term of total degree above max_degree.
    Poly truncated(int max_degree) const {
        const auto cd = codec();
        Poly r(dim_);
        for (const auto& t : terms_)
            if (cd.total_degree(t.key) <= max_degree) r.terms_.push_back(t);
        return r;
    }

    // Homogeneous part of degree d in the variables [first, first + count).
    Poly graded_part(int first, int count, int d) const {
        const auto cd = codec();
        Poly r(dim_);
        for (const auto& t : terms_) {
            int s = 0;
            for (int i = first; i < first + count; ++i) s += cd.exponent(t.key, i);
            if (s == d) r.terms_.push_back(t);
        }
        return r;
    }

    // Same polynomial viewed in new_dim variables, variable i renamed to i + offset.
    Poly embedded(int new_dim, int offset) const {
        if (offset < 0 || offset + dim_ > new_dim) throw rejected_input("embedding does not fit");
        const auto from = codec();
        const detail::MonomialCodec to(new_dim);
        Poly r(new_dim);
        std::vector<int> e(new_dim, 0);
        for (const auto& t : terms_) {
            std::fill(e.begin(), e.end(), 0);
            for (int i = 0; i < dim_; ++i) e[i + offset] = from.exponent(t.key, i);
            r.terms_.push_back({to.encode(e), t.coef});
        }
        r.sort_terms();
        return r;
    }

    Poly real_part() const { return map_coefficients(scalar_traits<S>::real_part); }
    Poly imag_part() const { return map_coefficients(scalar_traits<S>::imag_part); }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& t : terms_) {
            if (!s.empty()) s += " + ";
            s += scalar_traits<S>::to_string(t.coef);
            const auto e = exponents(t);
            for (int i = 0; i < dim_; ++i)
                if (e[i]) s += "*x" + std::to_string(i + 1) + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
        }
        return s;
    }

    // Largest coefficient size per total degree. Floating noise is judged against terms of the
    // same degree so that large high-order coefficients of a truncated series cannot erase
    // the low-order ones.
    std::vector<double> degree_scales() const {
        std::vector<double> s;
        const auto cd = codec();
        for (const auto& t : terms_) {
            const auto d = static_cast<std::size_t>(cd.total_degree(t.key));
            if (d >= s.size()) s.resize(d + 1, 0.0);
            s[d] = std::max(s[d], magnitude(t.coef));
        }
        return s;
    }


private:
    int dim_;
    std::vector<Term> terms_;

    detail::MonomialCodec codec() const { return detail::MonomialCodec(dim_); }

    void check_var(int i) const {
        if (i < 0 || i >= dim_)
            throw rejected_input("variable index " + std::to_string(i) + " out of range for dim " +
                                 std::to_string(dim_));
    }
    static void same_dim(const Poly& a, const Poly& b) {
        if (a.dim_ != b.dim_)
            throw rejected_input("polynomial dimension mismatch: " + std::to_string(a.dim_) + " vs " +
                                 std::to_string(b.dim_));
    }

    template <class F>
    Poly map_coefficients(F f) const {
        Poly r(dim_);
        for (const auto& t : terms_) r.terms_.push_back({t.key, f(t.coef)});
        r.normalize();
        return r;
    }

    void sort_terms() {
        std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.key < y.key; });
    }

    void normalize() {
        sort_terms();
        drop_negligible(scalar_traits<S>::exact ? std::vector<double>{} : degree_scales());
    }

    void drop_negligible(const std::vector<double>& scales) {
        const auto cd = codec();
        std::erase_if(terms_, [&](const Term& t) {
            if (scalar_traits<S>::is_zero(t.coef)) return true;
            if constexpr (scalar_traits<S>::exact) return false;
            const auto d = static_cast<std::size_t>(cd.total_degree(t.key));
            return scalar_traits<S>::negligible(t.coef, d < scales.size() ? scales[d] : 0.0);
        });
    }

    static Poly merge(const Poly& a, const Poly& b, bool subtract) {
        same_dim(a, b);
        Poly r(a.dim_);
        r.terms_.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].key < b.terms_[j].key)) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || b.terms_[j].key < a.terms_[i].key) {
                r.terms_.push_back({b.terms_[j].key, subtract ? S(-b.terms_[j].coef) : b.terms_[j].coef});
                ++j;
            } else {
                S c = a.terms_[i].coef;
                if (subtract) c -= b.terms_[j].coef;
                else c += b.terms_[j].coef;
                r.terms_.push_back({a.terms_[i].key, std::move(c)});
                ++i;
                ++j;
            }
        }
        std::vector<double> scales;
        if constexpr (!scalar_traits<S>::exact) {
            scales = a.degree_scales();
            const auto sb = b.degree_scales();
            if (sb.size() > scales.size()) scales.resize(sb.size(), 0.0);
            for (std::size_t d = 0; d < sb.size(); ++d) scales[d] = std::max(scales[d], sb[d]);
        }
        r.drop_negligible(scales);
        return r;
    }
};

}  // namespace gtube
