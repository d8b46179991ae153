#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffcf/laurent.hpp"
#include "ffcf/poly.hpp"
#include "ffcf/rational.hpp"

namespace ffcf {

/// Partial quotients b_0, b_1, ... of a continued fraction over F_q[X].
/// deg b_j >= 1 for j >= 1. Only the first `certified` entries are
/// guaranteed to be quotients of the source value.
struct CFExpansion {
    FieldSpec field;
    std::vector<Poly> b;
    std::size_t certified = 0;
    bool terminated = false;
    std::string source;

    std::size_t size() const noexcept { return b.size(); }
    /// deg b_j for the certified prefix (entry 0 is deg b_0, -1 when b_0 = 0).
    std::vector<std::int64_t> degrees() const;
    /// `[b0;b1,b2,...]` over the certified prefix.
    std::string str() const;
};

/// s_n / t_n, the n-th convergent.
struct Convergent {
    std::size_t n = 0;
    Poly s;
    Poly t;
};

/// Euclid on P/Q; terminates with every quotient certified.
CFExpansion cf_expand_rational(const Poly& p, const Poly& q);

/// Emits b_0 .. b_{max_n}. Values with a rational backing expand exactly.
/// Otherwise the known window is expanded and b_n is certified while
/// 2 deg t_n < horizon (the perturbation stays inside the convergent-test radius
/// 1/|t_n|^2); expansion stops after the first uncertified quotient.
CFExpansion cf_expand(const LaurentNumber& alpha, std::size_t max_n);

/// Reference route: alpha_0 = alpha, b_n = floor(alpha_n),
/// alpha_{n+1} = (alpha_n - b_n)^{-1} in window arithmetic. Quadratic per
/// step, so meant for cross-checking `cf_expand` on small inputs.
CFExpansion cf_expand_complete_quotients(const LaurentNumber& alpha, std::size_t max_n);

/// pre followed by period repeated, n quotients in total.
CFExpansion cf_periodic(const std::vector<Poly>& pre, const std::vector<Poly>& period, std::size_t n);

/// Convergents over the certified prefix, seeded with s_{-1}=1, s_{-2}=0,
/// t_{-1}=0, t_{-2}=1.
std::vector<Convergent> convergents(const CFExpansion& cf);

/// Value of the (possibly infinite) continued fraction with `precision`
/// coefficients counted from its valuation. Uses the deepest convergent
/// s_M/t_M: |alpha - s_M/t_M| <= q^{-(2 deg t_M + 1)}. Terminated input
/// gives an exact backed value; otherwise the result is an unbacked window.
LaurentNumber approx_from_cf(const CFExpansion& cf, std::int64_t precision);

/// Per-index results of the exact continued fraction identities.
struct IdentityRow {
    std::size_t n = 0;
    bool recurrence = true;               // s_n = b_n s_{n-1} + s_{n-2}, same for t
    std::optional<bool> determinant;      // s_{n+1} t_n - s_n t_{n+1} = (-1)^n
    bool degree_sum = true;               // deg t_n = sum_{j<=n} deg b_j
    std::optional<bool> error_by_quotient;     // |alpha - s_n/t_n| = 1/(|b_{n+1}| |t_n|^2)
    std::optional<bool> error_by_denominators; // |alpha - s_n/t_n| = 1/(|t_{n+1}| |t_n|)
    bool convergent_test = true;          // |alpha - s_n/t_n| < 1/|t_n|^2
    bool coprime = true;

    bool all() const noexcept;
};

struct IdentityReport {
    std::vector<IdentityRow> rows;
    bool all_pass = true;
};

IdentityReport verify_identities(const CFExpansion& cf, const LaurentNumber& alpha);

/// |alpha - s/t| < 1/|t|^2, decided in exponent arithmetic.
bool is_convergent(const LaurentNumber& alpha, const Poly& s, const Poly& t);

/// Finite-depth surrogates for the mean degree and the large-quotient
/// frequency. "shifted" counts use deg b_{j+1} (j in [1, n]); "proof"
/// counts use deg b_j. "literal" thresholds deg >= D (|b| >= 1/delta with
/// delta = q^-D); "strict" thresholds deg >= D + 1 (|b| > 1/delta). The
/// running values at n are paired with min/max over k in [ceil(n/2), n].
struct CFStats {
    std::int64_t n = 0;
    std::int64_t threshold = 0;                 // D
    std::vector<std::int64_t> degree_sums;      // S_0 .. S_{n+1}, S_k = sum_{j=1}^k deg b_j
    Rational alpha_hat, alpha_minus, alpha_plus;
    std::int64_t count_literal = 0, count_strict = 0;
    std::int64_t count_literal_proof = 0, count_strict_proof = 0;
    Rational freq_literal, freq_strict;
    Rational e_hat_literal, f_hat_literal;
    Rational e_hat_strict, f_hat_strict;
};

/// Statistics at depth n (default: the deepest n with b_{n+1} certified).
CFStats cf_stats(const CFExpansion& cf, std::int64_t threshold, std::optional<std::int64_t> n = std::nullopt);

/// Parses `cf:[b0;b1,b2,...]` and `cfper:[pre|period]` (pre and period are
/// `;`/`,`-separated polynomial lists; `cfper:[b0;b1|p1,p2]` is accepted).
/// `n` bounds the unrolled length of periodic literals.
CFExpansion parse_cf(const FieldSpec& field, std::string_view text, std::size_t n);

}  // namespace ffcf
