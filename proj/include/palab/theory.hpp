#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "palab/errors.hpp"
#include "palab/pa_function.hpp"

namespace palab {

// Limit theory of the branching-process embedding:
//
//   rho(lambda) = sum_{l>=1} t_l,   t_l = prod_{k<=l} f(k) / (lambda + f(k)),
//
// the Malthusian parameter lambda* with rho(lambda*) = 1, and the limiting
// degree law p_k = t_{k-1} lambda* / (lambda* + f(k)), whose upper tail
// telescopes to p_{>k} = t_k.

struct TailRemainder {
    double bound = std::numeric_limits<double>::infinity();
    bool exact = false;  // `bound` is the remainder itself, not just an upper bound
};

/// Remainder sum_{l>L} t_l given t_L, from the certificate of f.
/// Throws DivergenceError when the certificate cannot bound the tail at
/// this lambda (affine certificate with lambda <= scale).
inline TailRemainder rho_remainder(const PAFunction& f, double lambda, std::uint64_t L,
                                   double t_L) {
    const auto exact_from = f.exact_tail_start();
    const bool exact = exact_from && L >= *exact_from;
    const double x = static_cast<double>(L);
    return std::visit(
        [&](const auto& c) -> TailRemainder {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AffineCert>) {
                // Shifted affine series: sum_{m>=1} prod_{j<=m} g/(mu+g) = (1+L+delta)/(mu-1).
                const double mu = lambda / c.scale;
                if (!(mu > 1.0))
                    throw DivergenceError("affine certificate diverges at lambda = " +
                                          std::to_string(lambda));
                return {t_L * (1.0 + x + c.delta) / (mu - 1.0), exact};
            } else if constexpr (std::is_same_v<T, BoundedCert>) {
                // Geometric tail with ratio M / (lambda + M).
                return {t_L * c.bound / lambda, exact};
            } else {
                // log(1+y) >= y/(1+y) turns the product into exp(-sum h(k)) with
                // h(k) >= a (k+delta)^-beta for k > L; integral comparison and an
                // incomplete-gamma bound give the closed form below (valid when z > s).
                const double base = x + 1.0 + c.delta;
                const double a = lambda / (c.c + lambda * std::pow(base, -c.beta));
                const double s = c.beta / (1.0 - c.beta);
                const double z = a / (1.0 - c.beta) * std::pow(base, 1.0 - c.beta);
                if (!(z > s)) return {std::numeric_limits<double>::infinity(), false};
                return {t_L * std::pow(base, c.beta) / a * z / (z - s), false};
            }
        },
        f.certificate());
}

struct RhoValue {
    double value = 0.0;
    double error_bound = 0.0;  // certified truncation error
    std::uint64_t terms = 0;
};

inline constexpr std::uint64_t kDefaultMaxTerms = 10'000'000;

/// rho(lambda) truncated once the certified remainder falls below
/// rel_tol * partial sum. With an exactly certified tail the remainder is
/// added in closed form; otherwise the midpoint of [0, bound] is added and
/// half the bound reported as error.
inline RhoValue rho(const PAFunction& f, double lambda, double rel_tol = 1e-14,
                    std::uint64_t max_terms = kDefaultMaxTerms) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw NumericError("rho needs a positive finite lambda");
    const auto exact_from = f.exact_tail_start();
    double t = 1.0;
    double partial = 0.0;
    for (std::uint64_t L = 0;; ++L) {
        if (L > 0) {
            const TailRemainder rem = rho_remainder(f, lambda, L, t);
            if (rem.exact) {
                if (rem.bound <= rel_tol * partial || L >= *exact_from + 64)
                    return {partial + rem.bound, 0.0, L};
            } else if (rem.bound <= rel_tol * partial) {
                return {partial + 0.5 * rem.bound, 0.5 * rem.bound, L};
            }
        } else {
            // Surfaces divergence before any summation.
            (void)rho_remainder(f, lambda, 0, 1.0);
        }
        if (L >= max_terms)
            throw HorizonError("rho needed more than " + std::to_string(max_terms) + " terms");
        const double fk = f(static_cast<Degree>(L + 1));
        t *= fk / (lambda + fk);
        partial += t;
    }
}

struct SolveOptions {
    double tol = 1e-12;          // on |rho(lambda*) - 1|
    double rho_rel_tol = 1e-14;  // truncation target for each rho evaluation
    double tail_tol = 1e-12;     // horizon K is the first k with p_{>k} < tail_tol
    Degree min_horizon = 1;
    Degree max_horizon = 10'000'000;
    int bracket_budget = 200;
};

struct MalthusianSolution {
    double lambda_star = 0.0;
    double rho_at_root = 0.0;
    double truncation_error = 0.0;
    Degree K = 0;
    // Indexed by degree k = 1..K; element 0 is unused.
    std::vector<double> p;
    std::vector<double> p_tail;  // p_{>k}
    std::vector<double> r;       // f(k) / lambda*
    // sum_{k>K} f(k) p_k = lambda* * sum_{l>K} t_l, and its certified error.
    double weighted_tail = 0.0;
    double weighted_tail_error = 0.0;
};

namespace detail {

// rho(lambda) - 1 with divergence mapped to +inf.
inline double rho_excess(const PAFunction& f, double lambda, double rel_tol) {
    try {
        return rho(f, lambda, rel_tol).value - 1.0;
    } catch (const DivergenceError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace detail

/// Solves rho(lambda*) = 1 by bracket expansion from lambda = f(1) and
/// bisection, then fills the limiting degree law up to a horizon K where the
/// remaining mass p_{>K} is below tail_tol.
inline MalthusianSolution solve_malthusian(const PAFunction& f, const SolveOptions& opt = {}) {
    double lo = f(1);
    double hi = lo;
    int budget = opt.bracket_budget;
    while (detail::rho_excess(f, hi, opt.rho_rel_tol) >= 0.0) {
        if (--budget < 0) throw NoMalthusianError("rho stays >= 1 for every bracketed lambda");
        lo = hi;
        hi *= 2.0;
    }
    budget = opt.bracket_budget;
    while (lo == hi || detail::rho_excess(f, lo, opt.rho_rel_tol) <= 0.0) {
        if (--budget < 0) throw NoMalthusianError("rho stays <= 1 for every bracketed lambda");
        hi = lo;
        lo *= 0.5;
    }
    for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi;
         ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::rho_excess(f, mid, opt.rho_rel_tol) > 0.0)
            lo = mid;
        else
            hi = mid;
    }

    MalthusianSolution sol;
    sol.lambda_star = 0.5 * (lo + hi);
    const double lambda = sol.lambda_star;
    RhoValue at_root;
    try {
        at_root = rho(f, lambda, opt.rho_rel_tol);
    } catch (const DivergenceError&) {
        throw NoMalthusianError("bisection converged onto the divergence boundary of rho");
    }
    sol.rho_at_root = at_root.value;
    sol.truncation_error = at_root.error_bound;
    if (std::abs(at_root.value - 1.0) > opt.tol + at_root.error_bound)
        throw NoMalthusianError("rho does not cross 1 (rho = " + std::to_string(at_root.value) +
                                " at the bracket limit)");

    // p_1 = lambda/(lambda+f(1)), p_{k+1} = p_k f(k)/(lambda+f(k+1)); t_k = prod f/(lambda+f).
    std::vector<double> t{1.0};
    sol.p = {0.0};
    sol.r = {0.0};
    double f_prev = 0.0;
    for (Degree k = 1;; ++k) {
        const double fk = f(k);
        sol.p.push_back(k == 1 ? lambda / (lambda + fk) : sol.p.back() * f_prev / (lambda + fk));
        sol.r.push_back(fk / lambda);
        t.push_back(t.back() * fk / (lambda + fk));
        f_prev = fk;
        if (k >= opt.min_horizon && t.back() < opt.tail_tol) break;
        if (k >= opt.max_horizon)
            throw HorizonError("limiting law needs more than " +
                               std::to_string(opt.max_horizon) + " degrees");
    }
    sol.K = static_cast<Degree>(sol.p.size() - 1);

    // Tail masses by backward summation, closed at K by p_{>K} = t_K.
    sol.p_tail.assign(sol.K + 1, 0.0);
    sol.p_tail[sol.K] = t[sol.K];
    for (Degree k = sol.K; k > 1; --k) sol.p_tail[k - 1] = sol.p_tail[k] + sol.p[k];

    const TailRemainder rem = rho_remainder(f, lambda, sol.K, t[sol.K]);
    if (rem.exact) {
        sol.weighted_tail = lambda * rem.bound;
    } else if (std::isfinite(rem.bound)) {
        sol.weighted_tail = 0.5 * lambda * rem.bound;
        sol.weighted_tail_error = 0.5 * lambda * rem.bound;
    } else {
        // Bound not yet valid at K: sum explicitly until it is.
        double tl = t[sol.K];
        double sum = 0.0;
        for (std::uint64_t l = sol.K;; ++l) {
            const TailRemainder r = rho_remainder(f, lambda, l, tl);
            if (std::isfinite(r.bound) && (r.bound <= 1e-16 * sum || r.bound == 0.0 ||
                                           l > sol.K + kDefaultMaxTerms)) {
                sol.weighted_tail = lambda * (sum + 0.5 * r.bound);
                sol.weighted_tail_error = 0.5 * lambda * r.bound;
                break;
            }
            const double fl = f(static_cast<Degree>(l + 1));
            tl *= fl / (lambda + fl);
            sum += tl;
        }
    }
    return sol;
}

/// r_k = f(k) / lambda*.
inline double true_r(const PAFunction& f, const MalthusianSolution& sol, Degree k) {
    return f(k) / sol.lambda_star;
}

struct IdentityReport {
    double max_rel_deviation = 0.0;   // max_k |r_k - p_{>k}/p_k| / r_k
    Degree worst_k = 0;
    std::vector<Degree> violations;   // degrees breaking the 1e-8 relative bound
    double mass_error = 0.0;          // |sum_{k<=K} p_k + p_{>K} - 1|
    double weighted_sum = 0.0;        // sum_{k<=K} f(k) p_k + certified tail
    double weighted_rel_error = 0.0;  // |weighted_sum - lambda*| / lambda*
    double rel_tol = 1e-8;

    bool ok() const noexcept {
        return violations.empty() && mass_error <= 1e-10 && weighted_rel_error <= rel_tol;
    }
};

/// Checks r_k = f(k)/lambda* against p_{>k}/p_k for k <= K, closure of the
/// probability mass, and sum_k f(k) p_k = lambda*. r_k is recomputed from
/// sol.lambda_star so a perturbed lambda* shows up as a violation.
inline IdentityReport identity_check(const PAFunction& f, const MalthusianSolution& sol,
                                     double rel_tol = 1e-8) {
    IdentityReport rep;
    rep.rel_tol = rel_tol;
    double mass = 0.0;
    double weighted = 0.0;
    for (Degree k = 1; k <= sol.K; ++k) {
        const double rk = f(k) / sol.lambda_star;
        const double dev = std::abs(rk - sol.p_tail[k] / sol.p[k]) / rk;
        if (dev > rep.max_rel_deviation) {
            rep.max_rel_deviation = dev;
            rep.worst_k = k;
        }
        if (!(dev <= rel_tol)) rep.violations.push_back(k);
        mass += sol.p[k];
        weighted += f(k) * sol.p[k];
    }
    rep.mass_error = std::abs(mass + (sol.K ? sol.p_tail[sol.K] : 0.0) - 1.0);
    rep.weighted_sum = weighted + sol.weighted_tail;
    rep.weighted_rel_error =
        std::max(0.0, std::abs(rep.weighted_sum - sol.lambda_star) - sol.weighted_tail_error) /
        sol.lambda_star;
    return rep;
}

}  // namespace palab
