#pragma once

#include <cstdint>
#include <vector>

#include "util.hpp"

namespace fastzip {

// Shamir-style Reed-Solomon code used as a robust secret sharing scheme.
// A secret block is the constant term of a random polynomial of degree d-1;
// the n shares are its evaluations at x = 1..n. Up to e = floor((n-d)/2)
// corrupted shares are corrected by Berlekamp-Welch decoding.

enum class EccError { InvalidCode, DecodeFailure };

template <class F>
std::vector<typename F::Elem> poly_eval_points(const F& f,
                                               const std::vector<typename F::Elem>& coeffs,
                                               int n) {
    std::vector<typename F::Elem> out(n);
    for (int i = 0; i < n; i++) {
        typename F::Elem x = f.from_u64(uint64_t(i) + 1);
        typename F::Elem acc = f.zero();
        for (int j = int(coeffs.size()) - 1; j >= 0; j--)
            acc = f.add(f.mul(acc, x), coeffs[j]);
        out[i] = acc;
    }
    return out;
}

// coeffs[0] = secret block, coeffs[1..d-1] random
template <class F, class R>
Expected<std::vector<typename F::Elem>, EccError> ecc_encode(const F& f,
                                                             const typename F::Elem& secret,
                                                             int n, int d, R& rng) {
    if (d < 1 || d > n) return EccError::InvalidCode;
    std::vector<typename F::Elem> coeffs(d);
    coeffs[0] = secret;
    for (int j = 1; j < d; j++) coeffs[j] = f.random(rng);
    return poly_eval_points(f, coeffs, n);
}

// Polynomial long division a / b; returns quotient, sets ok=false when the
// remainder is nonzero. Leading coefficient of b must be nonzero.
template <class F>
std::vector<typename F::Elem> poly_divide_exact(const F& f,
                                                std::vector<typename F::Elem> a,
                                                const std::vector<typename F::Elem>& b,
                                                bool& ok) {
    int db = int(b.size()) - 1;
    while (db > 0 && f.is_zero(b[db])) db--;
    int da = int(a.size()) - 1;
    while (da > 0 && f.is_zero(a[da])) da--;
    ok = true;
    if (da < db) {
        for (const auto& c : a)
            if (!f.is_zero(c)) { ok = false; break; }
        return {f.zero()};
    }
    std::vector<typename F::Elem> q(da - db + 1, f.zero());
    typename F::Elem lead_inv = f.inv(b[db]);
    for (int k = da - db; k >= 0; k--) {
        typename F::Elem c = f.mul(a[k + db], lead_inv);
        q[k] = c;
        if (f.is_zero(c)) continue;
        for (int j = 0; j <= db; j++)
            a[k + j] = f.sub(a[k + j], f.mul(c, b[j]));
    }
    for (int j = 0; j < db; j++)
        if (!f.is_zero(a[j])) { ok = false; break; }
    return q;
}

// Berlekamp-Welch. received[i] is the share at x = i+1. Returns the message
// polynomial coefficients (size d) when at most e shares are wrong.
template <class F>
Expected<std::vector<typename F::Elem>, EccError> ecc_decode(
    const F& f, const std::vector<typename F::Elem>& received, int d) {
    using Elem = typename F::Elem;
    const int n = int(received.size());
    if (d < 1 || d > n) return EccError::DecodeFailure;
    const int e = (n - d) / 2;
    const int qlen = d + e;         // Q has degree <= d-1+e
    const int cols = e + qlen;      // unknowns: E_0..E_{e-1}, Q_0..Q_{d+e-1}

    // rows: Q(x_i) - r_i * (x_i^e + sum_{j<e} E_j x_i^j) = 0
    std::vector<std::vector<Elem>> m(n, std::vector<Elem>(cols + 1, f.zero()));
    for (int i = 0; i < n; i++) {
        Elem x = f.from_u64(uint64_t(i) + 1);
        Elem xp = f.one();
        for (int j = 0; j < e; j++) {
            m[i][j] = f.neg(f.mul(received[i], xp));
            xp = f.mul(xp, x);
        }
        // xp == x^e here
        m[i][cols] = f.mul(received[i], xp);
        xp = f.one();
        for (int j = 0; j < qlen; j++) {
            m[i][e + j] = xp;
            xp = f.mul(xp, x);
        }
    }

    // forward elimination on an n x (cols+1) system, n >= cols
    std::vector<int> pivot_of_col(cols, -1);
    int row = 0;
    for (int col = 0; col < cols && row < n; col++) {
        int pr = -1;
        for (int i = row; i < n; i++)
            if (!f.is_zero(m[i][col])) { pr = i; break; }
        if (pr < 0) continue;
        std::swap(m[row], m[pr]);
        Elem piv_inv = f.inv(m[row][col]);
        for (int j = col; j <= cols; j++) m[row][j] = f.mul(m[row][j], piv_inv);
        for (int i = row + 1; i < n; i++) {
            if (f.is_zero(m[i][col])) continue;
            Elem c = m[i][col];
            for (int j = col; j <= cols; j++)
                m[i][j] = f.sub(m[i][j], f.mul(c, m[row][j]));
        }
        pivot_of_col[col] = row;
        row++;
    }
    for (int i = row; i < n; i++)
        if (!f.is_zero(m[i][cols])) return EccError::DecodeFailure;

    std::vector<Elem> sol(cols, f.zero());  // free variables fixed to zero
    for (int col = cols - 1; col >= 0; col--) {
        int pr = pivot_of_col[col];
        if (pr < 0) continue;
        Elem acc = m[pr][cols];
        for (int j = col + 1; j < cols; j++)
            if (!f.is_zero(sol[j])) acc = f.sub(acc, f.mul(m[pr][j], sol[j]));
        sol[col] = acc;
    }

    std::vector<Elem> epoly(e + 1);
    for (int j = 0; j < e; j++) epoly[j] = sol[j];
    epoly[e] = f.one();
    std::vector<Elem> qpoly(qlen);
    for (int j = 0; j < qlen; j++) qpoly[j] = sol[e + j];

    bool exact = false;
    std::vector<Elem> p = poly_divide_exact(f, qpoly, epoly, exact);
    if (!exact) return EccError::DecodeFailure;
    for (size_t j = d; j < p.size(); j++)
        if (!f.is_zero(p[j])) return EccError::DecodeFailure;
    p.resize(d, f.zero());

    std::vector<Elem> cand = p;
    auto reenc = poly_eval_points(f, cand, n);
    int dist = 0;
    for (int i = 0; i < n; i++)
        if (!(reenc[i] == received[i])) dist++;
    if (dist > e) return EccError::DecodeFailure;
    return cand;
}

}  // namespace fastzip
