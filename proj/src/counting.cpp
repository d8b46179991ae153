#include "ffcf/counting.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "contfrac_detail.hpp"

namespace ffcf {

IsotropicForm::IsotropicForm(LaurentNumber a, LaurentNumber b, LaurentNumber c, LaurentNumber d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), alpha_(a_.field()), beta_(a_.field()) {}

IsotropicForm IsotropicForm::make(LaurentNumber a, LaurentNumber b, LaurentNumber c, LaurentNumber d) {
    require_same_field(a.field(), b.field());
    require_same_field(a.field(), c.field());
    require_same_field(a.field(), d.field());
    if (a.is_zero()) throw Error(ErrorCode::ZeroLeadingCoefficient, "a = 0 leaves alpha = -b/a undefined");
    const LaurentNumber one = LaurentNumber::from_poly(Poly::constant(a.field(), 1));
    try {
        const LaurentNumber det = b * c - a * d - one;
        if (!det.is_zero())
            throw Error(ErrorCode::DeterminantViolation, "bc - ad - 1 = " + det.str());
    } catch (const Error& e) {
        // Cancellation of every known coefficient means the determinant
        // holds to the available precision.
        if (e.code() != ErrorCode::PrecisionExhausted) throw;
    }
    IsotropicForm f(std::move(a), std::move(b), std::move(c), std::move(d));
    f.alpha_ = -(f.b_ / f.a_);
    f.beta_ = f.a_ * f.c_;
    f.irrational_ = !f.alpha_.exact_tail() && !f.alpha_.backing();
    return f;
}

IsotropicForm IsotropicForm::from_alpha(const LaurentNumber& alpha) {
    const auto& F = alpha.field();
    return make(LaurentNumber::from_poly(Poly::constant(F, 1)), -alpha, LaurentNumber(F),
                LaurentNumber::from_poly(Poly::constant(F, F.neg(1))));
}

IsotropicForm IsotropicForm::swapped() const { return make(c_, d_, -a_, -b_); }

Thresholds Thresholds::make(std::int64_t m, std::int64_t e_k, std::int64_t R) {
    if (m > -1) throw Error(ErrorCode::InvalidArgument, "delta = q^m needs m <= -1 (0 < delta < 1)");
    if (e_k < 1) throw Error(ErrorCode::InvalidArgument, "k = q^e_k needs e_k >= 1 (k > 1)");
    return Thresholds{m, e_k, R};
}

QValue q_eval(const IsotropicForm& form, const Poly& s, const Poly& t) {
    const LaurentNumber S = LaurentNumber::from_poly(s);
    const LaurentNumber T = LaurentNumber::from_poly(t);
    QValue v;
    if (s.is_zero() && t.is_zero()) return v;
    const LaurentNumber l1 = form.a() * S + form.b() * T;
    const LaurentNumber l2 = form.c() * S + form.d() * T;
    v.direct = l1.abs() + l2.abs();
    const LaurentNumber w = form.alpha() * T - S;
    const LaurentNumber f2 = T + form.beta() * w;
    v.factorized = w.abs() + f2.abs();
    return v;
}

MeasureReport measure_H(const Thresholds& th, const FieldSpec& field) {
    if (th.i() < 1) throw Error(ErrorCode::EmptyRegion, "rho <= k leaves H(rho) empty (i = " + std::to_string(th.i()) + ")");
    const std::uint64_t q = field.q();
    const Rational unit = q_power(q, th.m0() + 1) * Rational(q - 1);
    const std::int64_t log_rho = th.R;
    return {Rational(th.i()) * unit, Rational(log_rho - th.m0p() - th.t() - 1) * unit,
            Rational(log_rho - th.m0p() - th.t()) * unit};
}

Rational measure_A_shells(std::uint64_t q, const Rational& delta, std::int64_t e_k, std::int64_t R) {
    if (delta <= 0 || delta >= 1) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
    // Largest e with q^e < delta.
    std::int64_t e = -1;
    while (!(q_power(q, e) < delta)) --e;
    Rational total = 0;
    for (std::int64_t dy = e_k + 1; dy <= R; ++dy) {
        const Rational shell_y = q_power(q, dy + 1) - q_power(q, dy);  // mu(|y| = q^dy)
        const std::int64_t dx_max = std::min(e - dy, R);                // |x| q^dy < delta, |x| <= rho
        total += q_power(q, dx_max + 1) * shell_y;                      // mu(|x| <= q^dx_max)
    }
    return total;
}

Rational measure_H_oracle(const Thresholds& th, const FieldSpec& field) {
    if (th.i() < 1) throw Error(ErrorCode::EmptyRegion, "rho <= k leaves H(rho) empty");
    const std::uint64_t q = field.q();
    const Rational delta = (q_power(q, th.m0()) + q_power(q, th.m0() + 1)) / 2;
    return measure_A_shells(q, delta, th.e_k, th.R);
}

Rational measure_H_boundary(const Thresholds& th, const FieldSpec& field) {
    if (th.i() < 1) throw Error(ErrorCode::EmptyRegion, "rho <= k leaves H(rho) empty");
    return measure_A_shells(field.q(), q_power(field.q(), th.m), th.e_k, th.R);
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Coefficients of (Laurent) x (poly) on the index range [lo, lo + c.size());
// indices below `limit` are known, everything is known when `exact`.
struct Win {
    std::int64_t lo = 0;
    std::int64_t limit = kInf;
    bool exact = true;
    std::vector<Elem> c;

    Elem at(std::int64_t j) const noexcept {
        const std::int64_t off = j - lo;
        return off >= 0 && off < std::ssize(c) ? c[static_cast<std::size_t>(off)] : 0;
    }
    std::int64_t end() const noexcept { return lo + std::ssize(c); }
};

Win times_poly(const LaurentNumber& a, const Poly& s) {
    Win w;
    if (a.is_zero() || s.is_zero()) return w;
    const auto& F = a.field();
    const std::int64_t ds = s.deg();
    const std::int64_t nu = a.valuation();
    const std::int64_t K = a.known();
    w.exact = a.exact_tail();
    w.lo = nu - ds;
    const std::int64_t hi = nu + K;  // exclusive end of a's window (and horizon if inexact)
    w.limit = w.exact ? kInf : hi - ds;
    const std::int64_t len = w.exact ? K + ds : K;
    w.c.assign(static_cast<std::size_t>(len), 0);
    for (std::int64_t idx = 0; idx < len; ++idx) {
        const std::int64_t j = w.lo + idx;
        Elem acc = 0;
        for (std::int64_t k = 0; k <= ds; ++k) {
            const Elem sk = s.coeff(static_cast<std::size_t>(k));
            if (sk == 0) continue;
            const std::int64_t ai = j + k;
            if (ai < nu || ai >= hi) continue;
            acc = F.add(acc, F.mul(sk, a.window()[static_cast<std::size_t>(ai - nu)]));
        }
        w.c[static_cast<std::size_t>(idx)] = acc;
    }
    return w;
}

struct SumAbs {
    bool resolved = true;
    AbsExp exp;              // when resolved
    std::int64_t below = 0;  // otherwise |sum| <= q^below
};

SumAbs abs_of_sum(const FieldSpec& F, const Win& u, const Win& v) {
    SumAbs r;
    const bool ue = u.c.empty(), ve = v.c.empty();
    if (ue && ve) {
        if (u.exact && v.exact) return r;  // exact zero
    }
    const std::int64_t lo = std::min(ue ? kInf : u.lo, ve ? kInf : v.lo);
    const std::int64_t limit = std::min(u.limit, v.limit);
    const std::int64_t end = std::min(limit, std::max(ue ? -kInf : u.end(), ve ? -kInf : v.end()));
    for (std::int64_t j = lo; j < end; ++j) {
        const Elem c = F.add(u.at(j), v.at(j));
        if (c != 0) {
            r.exp = AbsExp(-j);
            return r;
        }
    }
    if (limit >= kInf) return r;  // both exact, the sum vanishes
    r.resolved = false;
    r.below = -limit;
    return r;
}

std::int64_t count_pairs(const IsotropicForm& form, const Thresholds& th, std::uint64_t budget, unsigned threads,
                         bool cutoff_on_first) {
    const auto& F = form.field();
    if (th.R < 0) return 0;
    const std::uint64_t q = F.q();
    std::uint64_t pairs = 1;
    for (std::int64_t k = 0; k < 2 * (th.R + 1); ++k) {
        pairs *= q;
        if (pairs > budget)
            throw Error(ErrorCode::BudgetExceeded, "q^{2(R+1)} pairs exceed the budget of " + std::to_string(budget));
    }
    const auto polys = all_polys(F, th.R);
    const std::size_t np = polys.size();
    std::vector<Win> A(np), B(np), C(np), D(np);
    for (std::size_t i = 0; i < np; ++i) {
        A[i] = times_poly(form.a(), polys[i]);
        B[i] = times_poly(form.b(), polys[i]);
        C[i] = times_poly(form.c(), polys[i]);
        D[i] = times_poly(form.d(), polys[i]);
    }

    // Window arithmetic cannot see an exact zero; the rational backings can.
    const auto& fa = form.a().backing();
    const auto& fb = form.b().backing();
    const auto& fc = form.c().backing();
    const auto& fd = form.d().backing();
    auto lift = [&](const LaurentNumber& v, const std::optional<RationalFunction>& r) -> std::optional<RationalFunction> {
        if (v.is_zero()) return RationalFunction::make(Poly(F), Poly::constant(F, 1));
        return r;
    };
    const auto ra = lift(form.a(), fa), rb = lift(form.b(), fb), rc = lift(form.c(), fc), rd = lift(form.d(), fd);
    auto vanishes = [&](bool first, const Poly& s, const Poly& t) {
        const auto& x = first ? ra : rc;
        const auto& y = first ? rb : rd;
        if (!x || !y) return false;
        const Poly one = Poly::constant(F, 1);
        return (*x * RationalFunction::make(s, one) + *y * RationalFunction::make(t, one)).is_zero();
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, np));
    std::vector<std::int64_t> partial(threads, 0);
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::atomic<bool> stop{false};

    auto worker = [&](unsigned w) {
        try {
            std::int64_t count = 0;
            for (std::size_t ti = w; ti < np && !stop; ti += threads) {
                for (std::size_t si = 0; si < np; ++si) {
                    if (si == 0 && ti == 0) continue;
                    // `cut` carries the |.| > k condition, `other` the small factor.
                    const bool first_is_cut = cutoff_on_first;
                    const SumAbs cut = first_is_cut ? abs_of_sum(F, A[si], B[ti]) : abs_of_sum(F, C[si], D[ti]);
                    if (cut.resolved) {
                        if (cut.exp.is_neg_inf() || !(cut.exp > AbsExp(th.e_k))) continue;
                    } else {
                        if (cut.below <= th.e_k) continue;  // |.| <= q^below <= k
                        if (vanishes(first_is_cut, polys[si], polys[ti])) continue;
                        throw Error(ErrorCode::PrecisionExhausted, "cannot decide the |.| > k cutoff");
                    }
                    const SumAbs other = first_is_cut ? abs_of_sum(F, C[si], D[ti]) : abs_of_sum(F, A[si], B[ti]);
                    if (!other.resolved) {
                        if (vanishes(!first_is_cut, polys[si], polys[ti])) continue;  // Q(s,t) = 0
                        throw Error(ErrorCode::PrecisionExhausted,
                                    "cannot resolve |Q(s,t)| for s=" + polys[si].str() + ", t=" + polys[ti].str());
                    }
                    if (other.exp.is_neg_inf()) continue;  // Q(s,t) = 0
                    if (!(cut.exp + other.exp < AbsExp(th.m))) continue;
                    if (!coprime(polys[si], polys[ti])) continue;
                    ++count;
                }
            }
            partial[w] = count;
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            stop = true;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& th_ : pool) th_.join();
    if (failure) std::rethrow_exception(failure);
    std::int64_t total = 0;
    for (auto c : partial) total += c;
    return total;
}

bool refinable(const LaurentNumber& x) { return x.exact_tail() || x.backing().has_value(); }

std::int64_t count_with_refinement(const IsotropicForm& form, const Thresholds& th, std::uint64_t budget,
                                   unsigned threads, bool cutoff_on_first) {
    IsotropicForm f = form;
    for (int attempt = 0;; ++attempt) {
        try {
            return count_pairs(f, th, budget, threads, cutoff_on_first);
        } catch (const Error& e) {
            const bool all_refinable = refinable(f.a()) && refinable(f.b()) && refinable(f.c()) && refinable(f.d());
            if (e.code() != ErrorCode::PrecisionExhausted || !all_refinable || attempt >= 8) throw;
            auto up = [](const LaurentNumber& x) { return x.refined(2 * x.known() + 8); };
            f = IsotropicForm::make(up(f.a()), up(f.b()), up(f.c()), up(f.d()));
        }
    }
}

}  // namespace

std::int64_t count_G_bruteforce(const IsotropicForm& form, const Thresholds& th, std::uint64_t budget,
                                unsigned threads) {
    return count_with_refinement(form, th, budget, threads, false);
}

std::int64_t count_I_bruteforce(const IsotropicForm& form, const Thresholds& th, std::uint64_t budget,
                                unsigned threads) {
    return count_with_refinement(form, th, budget, threads, true);
}

std::int64_t count_Gprime(const CFExpansion& cf, const Thresholds& th) {
    const auto deg = cf.degrees();
    const std::int64_t L = static_cast<std::int64_t>(deg.size());
    const std::int64_t need = -th.m + 1;
    const bool complete = cf.terminated && cf.certified == cf.b.size();
    std::int64_t deg_t = 0, hits = 0;
    for (std::int64_t j = 1; j < L; ++j) {
        deg_t += deg[static_cast<std::size_t>(j)];
        if (deg_t > th.R) return hits * (cf.field.q() - 1);
        if (j + 1 < L) {
            if (deg[static_cast<std::size_t>(j + 1)] >= need) ++hits;
        } else if (complete) {
            ++hits;  // t_j alpha - s_j = 0
        }
    }
    if (complete) return hits * (cf.field.q() - 1);
    throw Error(ErrorCode::TooShallow, "certified quotients end before deg t_j exceeds R = " + std::to_string(th.R));
}

std::vector<CountReport> theorem_report(const CFExpansion& cf, const Thresholds& th, std::int64_t depth,
                                        bool allow_rational) {
    if (cf.terminated && !allow_rational)
        throw Error(ErrorCode::RationalInput, "alpha is rational; rerun with allow_rational for diagnostics");
    const auto deg = cf.degrees();
    const std::int64_t n_max = static_cast<std::int64_t>(deg.size()) - 2;
    if (depth > n_max)
        throw Error(ErrorCode::TooShallow, "depth " + std::to_string(depth) + " needs b_" + std::to_string(depth + 1) +
                                               " certified, have " + std::to_string(deg.size()) + " quotients");
    const std::uint64_t q = cf.field.q();
    const std::int64_t D = -th.m;
    const auto prefix = detail::stats_prefix(deg, D);
    const Rational c = q_power(q, -(th.m0() + 1));
    std::vector<CountReport> rows;
    for (std::int64_t n = 1; n <= depth; ++n) {
        const std::int64_t R = prefix.sum[static_cast<std::size_t>(n)];
        if (R - th.e_k < 1) continue;
        CountReport row;
        row.n = n;
        row.R = R;
        row.stats_used = detail::stats_at(prefix, n, D, false);
        row.countGprime = static_cast<std::int64_t>(q - 1) * row.stats_used.count_strict;
        row.measureH = measure_H(th.with_R(R), cf.field).value;
        row.ratio = Rational(row.countGprime) / row.measureH;
        row.predicted_low = c * row.stats_used.e_hat_strict / row.stats_used.alpha_plus;
        row.predicted_high = c * row.stats_used.f_hat_strict / row.stats_used.alpha_minus;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::int64_t parse_q_power(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (text.substr(pos, 2) != "q^") throw ParseError(pos, "expected 'q^<integer>'");
    pos += 2;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) neg = text[pos++] == '-';
    const std::size_t digits = pos;
    std::int64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos++] - '0');
        if (v > 1'000'000'000) throw ParseError(digits, "exponent too large");
    }
    if (pos == digits) throw ParseError(pos, "expected an integer exponent");
    if (pos != text.size()) throw ParseError(pos, "trailing characters");
    return neg ? -v : v;
}

}  // namespace ffcf
