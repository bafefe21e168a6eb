#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>

#include "gtube/errors.hpp"

namespace gtube {

using cfloat = std::complex<double>;

// Gaussian rational a + b i with a, b exact rationals.
class qcomplex {
public:
    qcomplex() = default;
    qcomplex(long v) : re_(v) {}  // NOLINT(google-explicit-constructor): integer literals
    qcomplex(int v) : re_(v) {}   // NOLINT(google-explicit-constructor)
    qcomplex(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }
    explicit qcomplex(mpq_class re) : re_(std::move(re)) { re_.canonicalize(); }

    const mpq_class& real() const { return re_; }
    const mpq_class& imag() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    qcomplex& operator+=(const qcomplex& o) {
        if (sgn(o.re_) != 0) re_ += o.re_;
        if (sgn(o.im_) != 0) im_ += o.im_;
        return *this;
    }
    qcomplex& operator-=(const qcomplex& o) {
        if (sgn(o.re_) != 0) re_ -= o.re_;
        if (sgn(o.im_) != 0) im_ -= o.im_;
        return *this;
    }
    qcomplex& operator*=(const qcomplex& o) {
        *this = *this * o;
        return *this;
    }
    qcomplex& operator/=(const qcomplex& o) {
        *this = *this / o;
        return *this;
    }

    // this += a * b without building a temporary qcomplex.
    void add_product(const qcomplex& a, const qcomplex& b) {
        thread_local mpq_class t;
        const bool ai = sgn(a.im_) != 0, bi = sgn(b.im_) != 0;
        const bool ar = sgn(a.re_) != 0, br = sgn(b.re_) != 0;
        if (ar && br) { mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), b.re_.get_mpq_t()); re_ += t; }
        if (ai && bi) { mpq_mul(t.get_mpq_t(), a.im_.get_mpq_t(), b.im_.get_mpq_t()); re_ -= t; }
        if (ar && bi) { mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), b.im_.get_mpq_t()); im_ += t; }
        if (ai && br) { mpq_mul(t.get_mpq_t(), a.im_.get_mpq_t(), b.re_.get_mpq_t()); im_ += t; }
    }

    friend qcomplex operator+(qcomplex a, const qcomplex& b) { return a += b; }
    friend qcomplex operator-(qcomplex a, const qcomplex& b) { return a -= b; }
    friend qcomplex operator-(const qcomplex& a) { return qcomplex(mpq_class(-a.re_), mpq_class(-a.im_)); }
    friend qcomplex operator*(const qcomplex& a, const qcomplex& b) {
        qcomplex r;
        r.add_product(a, b);
        return r;
    }
    friend qcomplex operator/(const qcomplex& a, const qcomplex& b) {
        if (b.is_zero()) throw rejected_input("division by zero");
        if (b.is_real()) return qcomplex(mpq_class(a.re_ / b.re_), mpq_class(a.im_ / b.re_));
        const mpq_class den = b.re_ * b.re_ + b.im_ * b.im_;
        return qcomplex(mpq_class((a.re_ * b.re_ + a.im_ * b.im_) / den),
                        mpq_class((a.im_ * b.re_ - a.re_ * b.im_) / den));
    }
    friend bool operator==(const qcomplex& a, const qcomplex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const qcomplex& a, const qcomplex& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const qcomplex& z) {
        if (sgn(z.im_) == 0) return os << z.re_.get_str();
        return os << "(" << z.re_.get_str() << (sgn(z.im_) < 0 ? "-" : "+") << mpq_class(abs(z.im_)).get_str()
                  << "i)";
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

inline mpq_class parse_rational(std::string text) {
    if (!text.empty() && text.front() == '+') text.erase(0, 1);
    if (text.empty()) throw rejected_input("empty number");
    if (text.find_first_of(".eE") != std::string::npos) {
        std::size_t used = 0;
        double d = 0;
        try {
            d = std::stod(text, &used);
        } catch (const std::exception&) {
            throw rejected_input("not a number: '" + text + "'");
        }
        if (used != text.size() || !std::isfinite(d)) throw rejected_input("not a number: '" + text + "'");
        // Decimal literals are read exactly: 0.1 becomes 1/10, not the nearest double.
        const auto e = text.find_first_of("eE");
        const std::string mant = text.substr(0, e);
        long exp10 = e == std::string::npos ? 0 : std::stol(text.substr(e + 1));
        std::string digits;
        long frac = 0;
        bool seen_dot = false;
        for (char c : mant) {
            if (c == '.') {
                seen_dot = true;
            } else {
                digits += c;
                if (seen_dot && c >= '0' && c <= '9') ++frac;
            }
        }
        mpq_class q(mpz_class(digits, 10));
        exp10 -= frac;
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
        if (exp10 < 0) q /= p10; else q *= p10;
        q.canonicalize();
        return q;
    }
    mpq_class q;
    if (q.set_str(text, 10) != 0 || (text.find('/') != std::string::npos && q.get_den() == 0))
        throw rejected_input("not a rational number: '" + text + "'");
    q.canonicalize();
    return q;
}

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<cfloat> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    static cfloat ratio(long long p, long long q) { return {static_cast<double>(p) / static_cast<double>(q), 0.0}; }
    static cfloat imag_unit() { return {0.0, 1.0}; }
    static cfloat from_cfloat(cfloat z) { return z; }
    static cfloat from_text(const std::string& re, const std::string& im) {
        return {parse_rational(re).get_d(), parse_rational(im).get_d()};
    }
    static cfloat to_cfloat(const cfloat& z) { return z; }
    static double magnitude(const cfloat& z) { return std::abs(z); }
    static bool is_zero(const cfloat& z) { return z.real() == 0.0 && z.imag() == 0.0; }
    static bool negligible(const cfloat& z, double scale) { return is_zero(z) || std::abs(z) < 1e-14 * scale; }
    static cfloat real_part(const cfloat& z) { return {z.real(), 0.0}; }
    static cfloat imag_part(const cfloat& z) { return {z.imag(), 0.0}; }
    static bool is_real(const cfloat& z) { return z.imag() == 0.0; }
    static int real_sign(const cfloat& z) { return z.real() > 0 ? 1 : (z.real() < 0 ? -1 : 0); }
    static std::string to_string(const cfloat& z) {
        std::ostringstream os;
        os.precision(17);
        if (z.imag() == 0.0) os << z.real();
        else os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
        return os.str();
    }
};

template <>
struct scalar_traits<qcomplex> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
    static qcomplex ratio(long long p, long long q) {
        mpq_class r(mpz_class(std::to_string(p)), mpz_class(std::to_string(q)));
        r.canonicalize();
        return qcomplex(r);
    }
    static qcomplex imag_unit() { return {mpq_class(0), mpq_class(1)}; }
    static qcomplex from_cfloat(cfloat z) { return {mpq_class(z.real()), mpq_class(z.imag())}; }
    static qcomplex from_text(const std::string& re, const std::string& im) {
        return {parse_rational(re), parse_rational(im)};
    }
    static cfloat to_cfloat(const qcomplex& z) { return {z.real().get_d(), z.imag().get_d()}; }
    static double magnitude(const qcomplex& z) { return std::abs(to_cfloat(z)); }
    static bool is_zero(const qcomplex& z) { return z.is_zero(); }
    static bool negligible(const qcomplex& z, double) { return z.is_zero(); }
    static qcomplex real_part(const qcomplex& z) { return qcomplex(z.real()); }
    static qcomplex imag_part(const qcomplex& z) { return qcomplex(z.imag()); }
    static bool is_real(const qcomplex& z) { return z.is_real(); }
    static int real_sign(const qcomplex& z) { return sgn(z.real()); }
    static std::string to_string(const qcomplex& z) {
        std::ostringstream os;
        os << z;
        return os.str();
    }
};

template <class S>
S ratio(long long p, long long q = 1) {
    return scalar_traits<S>::ratio(p, q);
}

template <class S>
S imag_unit() {
    return scalar_traits<S>::imag_unit();
}

template <class S>
cfloat to_cfloat(const S& z) {
    return scalar_traits<S>::to_cfloat(z);
}

template <class S>
double magnitude(const S& z) {
    return scalar_traits<S>::magnitude(z);
}

// acc += a * b, specialised for exact scalars to avoid temporaries.
inline void add_product(cfloat& acc, const cfloat& a, const cfloat& b) { acc += a * b; }
inline void add_product(qcomplex& acc, const qcomplex& a, const qcomplex& b) { acc.add_product(a, b); }

inline long long factorial(int k) {
    long long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace gtube
