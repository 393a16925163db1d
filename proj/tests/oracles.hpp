// Test-only reference implementations, independent of the library's
// computation paths. MPFR provides correctly rounded big-float arithmetic.
#pragma once

#include "cgvariants/preconditioner.hpp"
#include "cgvariants/sparse_matrix.hpp"
#include "cgvariants/types.hpp"

#include <mpfr.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oracle {

inline constexpr mpfr_prec_t kPrec = 512;

/// <x,y> with every product exact at this precision and the sum correctly
/// rounded by mpfr_sum, then rounded once to double.
inline double exact_dot(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<mpfr_t> terms(n);
    std::vector<mpfr_ptr> ptrs(n);
    for (std::size_t i = 0; i < n; ++i) {
        mpfr_init2(terms[i], kPrec);
        mpfr_set_d(terms[i], x[i], MPFR_RNDN);
        mpfr_mul_d(terms[i], terms[i], y[i], MPFR_RNDN); // exact: 53+53 bits
        ptrs[i] = terms[i];
    }
    mpfr_t sum;
    mpfr_init2(sum, kPrec);
    mpfr_sum(sum, ptrs.data(), static_cast<unsigned long>(n), MPFR_RNDN);
    const double out = mpfr_get_d(sum, MPFR_RNDN);
    mpfr_clear(sum);
    for (std::size_t i = 0; i < n; ++i) mpfr_clear(terms[i]);
    return out;
}

/// fl( <x,y> / <u,v> ) with both inner products exact.
inline double exact_dot_ratio(std::span<const double> x, std::span<const double> y,
                              std::span<const double> u, std::span<const double> v) {
    auto big_dot = [](std::span<const double> a, std::span<const double> b, mpfr_t out) {
        const std::size_t n = a.size();
        std::vector<mpfr_t> terms(n);
        std::vector<mpfr_ptr> ptrs(n);
        for (std::size_t i = 0; i < n; ++i) {
            mpfr_init2(terms[i], kPrec);
            mpfr_set_d(terms[i], a[i], MPFR_RNDN);
            mpfr_mul_d(terms[i], terms[i], b[i], MPFR_RNDN);
            ptrs[i] = terms[i];
        }
        mpfr_sum(out, ptrs.data(), static_cast<unsigned long>(n), MPFR_RNDN);
        for (std::size_t i = 0; i < n; ++i) mpfr_clear(terms[i]);
    };
    mpfr_t num, den;
    mpfr_init2(num, kPrec);
    mpfr_init2(den, kPrec);
    big_dot(x, y, num);
    big_dot(u, v, den);
    mpfr_div(num, num, den, MPFR_RNDN);
    const double out = mpfr_get_d(num, MPFR_RNDN);
    mpfr_clear(num);
    mpfr_clear(den);
    return out;
}

/// Dense row-major mirror of a sparse matrix whose product adds the nonzero
/// terms in the same left-to-right order as the CSR kernel.
struct DenseMatrix {
    cgv::Index n = 0;
    std::vector<double> a;

    static DenseMatrix from_sparse(const cgv::SparseMatrix& s) {
        DenseMatrix d;
        d.n = s.n;
        d.a.assign(static_cast<std::size_t>(s.n) * s.n, 0.0);
        for (cgv::Index i = 0; i < s.n; ++i)
            for (cgv::Index k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k)
                d.a[static_cast<std::size_t>(i) * s.n + s.col_idx[k]] = s.values[k];
        return d;
    }

    cgv::DenseVector multiply(const cgv::DenseVector& x) const {
        cgv::DenseVector y(static_cast<std::size_t>(n), 0.0);
        for (cgv::Index i = 0; i < n; ++i) {
            double sum = 0.0;
            for (cgv::Index j = 0; j < n; ++j) {
                const double v = a[static_cast<std::size_t>(i) * n + j];
                if (v != 0.0) sum += v * x[j];
            }
            y[i] = sum;
        }
        return y;
    }
};

/// Vanilla preconditioned CG carried out entirely in kPrec-bit arithmetic.
class HighPrecCg {
public:
    HighPrecCg(const cgv::SparseMatrix& a, const cgv::Preconditioner& m,
               const cgv::DenseVector& b, const cgv::DenseVector& x0)
        : n_(static_cast<std::size_t>(a.n)), a_(&a), m_(&m) {
        mpfr_init2(nu_, kPrec);
        mpfr_init2(mu_, kPrec);
        mpfr_init2(alpha_, kPrec);
        x_ = make(n_);
        r_ = make(n_);
        rt_ = make(n_);
        p_ = make(n_);
        s_ = make(n_);
        for (std::size_t i = 0; i < n_; ++i) mpfr_set_d(x_[i], x0[i], MPFR_RNDN);
        matvec(x_, r_);
        for (std::size_t i = 0; i < n_; ++i) mpfr_d_sub(r_[i], b[i], r_[i], MPFR_RNDN);
        precond(r_, rt_);
        big_dot(rt_, r_, nu_);
        for (std::size_t i = 0; i < n_; ++i) mpfr_set(p_[i], rt_[i], MPFR_RNDN);
        matvec(p_, s_);
        big_dot(p_, s_, mu_);
        mpfr_div(alpha_, nu_, mu_, MPFR_RNDN);
    }

    ~HighPrecCg() {
        release(x_);
        release(r_);
        release(rt_);
        release(p_);
        release(s_);
        mpfr_clear(nu_);
        mpfr_clear(mu_);
        mpfr_clear(alpha_);
    }

    HighPrecCg(const HighPrecCg&) = delete;
    HighPrecCg& operator=(const HighPrecCg&) = delete;

    void step() {
        mpfr_t t, nu_next, beta;
        mpfr_init2(t, kPrec);
        mpfr_init2(nu_next, kPrec);
        mpfr_init2(beta, kPrec);
        for (std::size_t i = 0; i < n_; ++i) {
            mpfr_mul(t, alpha_, p_[i], MPFR_RNDN);
            mpfr_add(x_[i], x_[i], t, MPFR_RNDN);
            mpfr_mul(t, alpha_, s_[i], MPFR_RNDN);
            mpfr_sub(r_[i], r_[i], t, MPFR_RNDN);
        }
        precond(r_, rt_);
        big_dot(rt_, r_, nu_next);
        mpfr_div(beta, nu_next, nu_, MPFR_RNDN);
        mpfr_set(nu_, nu_next, MPFR_RNDN);
        for (std::size_t i = 0; i < n_; ++i) {
            mpfr_mul(t, beta, p_[i], MPFR_RNDN);
            mpfr_add(p_[i], rt_[i], t, MPFR_RNDN);
        }
        matvec(p_, s_);
        big_dot(p_, s_, mu_);
        mpfr_div(alpha_, nu_, mu_, MPFR_RNDN);
        mpfr_clear(t);
        mpfr_clear(nu_next);
        mpfr_clear(beta);
    }

    cgv::DenseVector x() const { return snapshot(x_); }
    cgv::DenseVector r() const { return snapshot(r_); }
    double alpha() const { return mpfr_get_d(alpha_, MPFR_RNDN); }

    /// ||x* - x||_A in big-float arithmetic
    double error_a_norm(const cgv::DenseVector& x_star) const {
        std::vector<mpfr_t> e = make(n_);
        std::vector<mpfr_t> ae = make(n_);
        for (std::size_t i = 0; i < n_; ++i) mpfr_d_sub(e[i], x_star[i], x_[i], MPFR_RNDN);
        matvec(e, ae);
        mpfr_t q;
        mpfr_init2(q, kPrec);
        big_dot(e, ae, q);
        mpfr_sqrt(q, q, MPFR_RNDN);
        const double out = mpfr_get_d(q, MPFR_RNDN);
        mpfr_clear(q);
        release(e);
        release(ae);
        return out;
    }

private:
    using Vec = std::vector<mpfr_t>;

    static Vec make(std::size_t n) {
        Vec v(n);
        for (auto& e : v) mpfr_init2(e, kPrec);
        return v;
    }
    static void release(Vec& v) {
        for (auto& e : v) mpfr_clear(e);
        v.clear();
    }

    void big_dot(const Vec& a, const Vec& b, mpfr_t out) const {
        mpfr_t t;
        mpfr_init2(t, kPrec);
        mpfr_set_zero(out, 1);
        for (std::size_t i = 0; i < n_; ++i) {
            mpfr_mul(t, a[i], b[i], MPFR_RNDN);
            mpfr_add(out, out, t, MPFR_RNDN);
        }
        mpfr_clear(t);
    }

    void matvec(const Vec& in, Vec& out) const {
        mpfr_t t;
        mpfr_init2(t, kPrec);
        for (cgv::Index i = 0; i < a_->n; ++i) {
            mpfr_set_zero(out[i], 1);
            for (cgv::Index k = a_->row_ptr[i]; k < a_->row_ptr[i + 1]; ++k) {
                mpfr_mul_d(t, in[a_->col_idx[k]], a_->values[k], MPFR_RNDN);
                mpfr_add(out[i], out[i], t, MPFR_RNDN);
            }
        }
        mpfr_clear(t);
    }

    void precond(const Vec& in, Vec& out) const {
        if (m_->is_identity()) {
            for (std::size_t i = 0; i < n_; ++i) mpfr_set(out[i], in[i], MPFR_RNDN);
            return;
        }
        for (std::size_t i = 0; i < n_; ++i)
            mpfr_mul_d(out[i], in[i], m_->inv_diag[i], MPFR_RNDN);
    }

    cgv::DenseVector snapshot(const Vec& v) const {
        cgv::DenseVector out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = mpfr_get_d(v[i], MPFR_RNDN);
        return out;
    }

    std::size_t n_;
    const cgv::SparseMatrix* a_;
    const cgv::Preconditioner* m_;
    Vec x_, r_, rt_, p_, s_;
    mpfr_t nu_, mu_, alpha_;
};

/// Deterministic random SPD matrix with condition number kappa: QR of a
/// seeded Gaussian matrix gives the eigenvectors, the spectrum is log-spaced
/// in [1/kappa, 1], and the assembly mirrors the upper triangle.
cgv::SparseMatrix random_spd(cgv::Index n, double kappa, std::uint64_t seed);

} // namespace oracle
