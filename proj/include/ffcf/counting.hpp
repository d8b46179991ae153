#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffcf/contfrac.hpp"
#include "ffcf/laurent.hpp"
#include "ffcf/rational.hpp"

namespace ffcf {

/// Q(x, y) = (a x + b y)(c x + d y) with bc - ad = 1; alpha = -b/a, beta = ac.
class IsotropicForm {
public:
    /// Checks a != 0 and bc - ad = 1 to the available precision.
    static IsotropicForm make(LaurentNumber a, LaurentNumber b, LaurentNumber c, LaurentNumber d);
    /// The form (1, -alpha, 0, -1), i.e. Q(x, y) = (x - alpha y)(-y).
    static IsotropicForm from_alpha(const LaurentNumber& alpha);

    const LaurentNumber& a() const noexcept { return a_; }
    const LaurentNumber& b() const noexcept { return b_; }
    const LaurentNumber& c() const noexcept { return c_; }
    const LaurentNumber& d() const noexcept { return d_; }
    const LaurentNumber& alpha() const noexcept { return alpha_; }
    const LaurentNumber& beta() const noexcept { return beta_; }
    const FieldSpec& field() const noexcept { return a_.field(); }

    /// alpha is not known to be rational. Finite data cannot prove
    /// irrationality, so this only records that alpha has no exact form.
    bool irrational_assumed() const noexcept { return irrational_; }

    /// (c, d, -a, -b): same |Q|, determinant restored, and the roles of the
    /// two linear factors exchanged.
    IsotropicForm swapped() const;

private:
    IsotropicForm(LaurentNumber a, LaurentNumber b, LaurentNumber c, LaurentNumber d);

    LaurentNumber a_, b_, c_, d_, alpha_, beta_;
    bool irrational_ = false;
};

/// delta = q^m, k = q^{e_k}, rho = q^R together with the sandwich integers
/// q^{m0} <= delta < q^{m0+1}, q^{m0'} <= sqrt(delta) < q^{m0'+1},
/// q^{m0'+t} <= k < q^{m0'+t+1}, q^{m0'+t+i} <= rho < q^{m0'+t+i+1}.
struct Thresholds {
    std::int64_t m = -1;
    std::int64_t e_k = 1;
    std::int64_t R = 0;

    static Thresholds make(std::int64_t m, std::int64_t e_k, std::int64_t R);

    std::int64_t m0() const noexcept { return m; }
    std::int64_t m0p() const noexcept { return m >= 0 ? m / 2 : -((-m + 1) / 2); }
    std::int64_t t() const noexcept { return e_k - m0p(); }
    std::int64_t i() const noexcept { return R - e_k; }
    Thresholds with_R(std::int64_t r) const { return make(m, e_k, r); }
};

/// Both evaluations of |Q(s, t)|.
struct QValue {
    AbsExp direct;         // |a s + b t| |c s + d t|
    AbsExp factorized;     // |t alpha - s| |t + beta (t alpha - s)|
    bool agree() const noexcept { return direct == factorized; }
};

QValue q_eval(const IsotropicForm& form, const Poly& s, const Poly& t);

/// eta(H(rho)) = i q^{m0+1} (q-1) together with the bounds
/// (log_q rho - m0' - t - 1)(q-1) q^{m0+1} < eta <= (log_q rho - m0' - t)(q-1) q^{m0+1}.
struct MeasureReport {
    Rational value;
    Rational sandwich_low;
    Rational sandwich_high;
};

MeasureReport measure_H(const Thresholds& th, const FieldSpec& field);

/// Haar measure of {(x, y) : 0 < |xy| < delta, ||(x,y)|| <= q^R, |y| > q^{e_k}}
/// summed over absolute-value shells, using mu(|x| <= q^r) = q^{r+1}.
/// `delta` is any positive rational below 1.
Rational measure_A_shells(std::uint64_t q, const Rational& delta, std::int64_t e_k, std::int64_t R);

/// Shell sum for a delta strictly inside the sandwich interval
/// (q^{m0}, q^{m0+1}), where the region depends only on the sandwich
/// integers. Should agree with `measure_H`.
Rational measure_H_oracle(const Thresholds& th, const FieldSpec& field);

/// Shell sum at delta = q^m exactly; the strict |xy| < q^m excludes the
/// shell |xy| = q^m, so this is measure_H / q.
Rational measure_H_boundary(const Thresholds& th, const FieldSpec& field);

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// #G(rho): primitive (s, t) with 0 < |Q(s,t)| < delta, max(deg s, deg t) <= R,
/// |cs + dt| > k, by exhaustive enumeration (q^{2(R+1)} pairs, checked
/// against `budget`). Work is split by t across `threads` workers (0 = auto).
std::int64_t count_G_bruteforce(const IsotropicForm& form, const Thresholds& th,
                                std::uint64_t budget = kDefaultBudget, unsigned threads = 0);

/// #I(rho): as #G(rho) with the cutoff on |as + bt| instead.
std::int64_t count_I_bruteforce(const IsotropicForm& form, const Thresholds& th,
                                std::uint64_t budget = kDefaultBudget, unsigned threads = 0);

/// #G'(rho) = (q-1) #{j >= 1 : deg t_j <= R, deg b_{j+1} >= -m + 1}. Each
/// counted convergent contributes its orbit {(u s_j, u t_j) : u in F_q^*}.
/// For a terminated expansion the last convergent (t alpha - s = 0) counts
/// when deg t <= R.
std::int64_t count_Gprime(const CFExpansion& cf, const Thresholds& th);

struct CountReport {
    std::int64_t n = 0;                      // depth; rho = |t_n|
    std::int64_t R = 0;
    std::optional<std::int64_t> countG;      // brute force, when run
    std::int64_t countGprime = 0;
    Rational measureH;
    Rational ratio;
    Rational predicted_low;                  // c e_hat / alpha_plus
    Rational predicted_high;                 // c f_hat / alpha_minus
    CFStats stats_used;

    bool in_band() const { return predicted_low <= ratio && ratio <= predicted_high; }
};

/// One row per depth n in [1, depth] with R = deg t_n > e_k. The band uses
/// the strict threshold (deg >= -m + 1) matching G' membership, and the
/// constant c = q^{-(m0+1)}. Terminated (rational) expansions are rejected
/// unless `allow_rational`.
std::vector<CountReport> theorem_report(const CFExpansion& cf, const Thresholds& th, std::int64_t depth,
                                        bool allow_rational = false);

/// Parses `q^<signed int>` and returns the exponent.
std::int64_t parse_q_power(std::string_view text);

}  // namespace ffcf
