#include "regwatch/exponents.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace regwatch {

namespace {

long long checked(__int128 v) {
    if (v > std::numeric_limits<long long>::max() ||
        v < std::numeric_limits<long long>::min()) {
        throw std::overflow_error("rational arithmetic overflow");
    }
    return static_cast<long long>(v);
}

Rational normalized(__int128 num, __int128 den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    Rational r;
    r.num = checked(num / a);
    r.den = checked(den / a);
    return r;
}

void require_finite(Rational a, Rational b) {
    if (a.is_infinite() || b.is_infinite()) {
        throw std::domain_error("operation undefined for infinite exponent");
    }
}

} // namespace

Rational Rational::of(long long num, long long den) {
    return normalized(num, den);
}

Rational Rational::infinity() {
    Rational r;
    r.num = 1;
    r.den = 0;
    return r;
}

double Rational::value() const {
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(num) / static_cast<double>(den);
}

std::string Rational::str() const {
    if (is_infinite()) return "inf";
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::reciprocal() const {
    if (is_infinite()) return of(0);
    if (num == 0) return infinity();
    if (num < 0) throw std::domain_error("reciprocal of negative exponent");
    return normalized(den, num);
}

Rational operator+(Rational a, Rational b) {
    if (a.is_infinite() || b.is_infinite()) return Rational::infinity();
    return normalized(static_cast<__int128>(a.num) * b.den +
                          static_cast<__int128>(b.num) * a.den,
                      static_cast<__int128>(a.den) * b.den);
}

Rational operator-(Rational a, Rational b) {
    if (b.is_infinite()) throw std::domain_error("subtraction of infinity");
    if (a.is_infinite()) return Rational::infinity();
    return normalized(static_cast<__int128>(a.num) * b.den -
                          static_cast<__int128>(b.num) * a.den,
                      static_cast<__int128>(a.den) * b.den);
}

Rational operator*(Rational a, Rational b) {
    if (a.is_infinite() || b.is_infinite()) {
        Rational fin = a.is_infinite() ? b : a;
        if (!fin.is_infinite() && fin.num <= 0) {
            throw std::domain_error("infinity times non-positive value");
        }
        return Rational::infinity();
    }
    return normalized(static_cast<__int128>(a.num) * b.num,
                      static_cast<__int128>(a.den) * b.den);
}

Rational operator/(Rational a, Rational b) {
    if (b.is_infinite()) {
        if (a.is_infinite()) throw std::domain_error("infinity over infinity");
        return Rational::of(0);
    }
    if (b.num == 0) {
        if (a.num <= 0 && !a.is_infinite()) {
            throw std::domain_error("division by zero");
        }
        return Rational::infinity();
    }
    if (a.is_infinite()) {
        if (b.num < 0) throw std::domain_error("infinity over negative value");
        return Rational::infinity();
    }
    return normalized(static_cast<__int128>(a.num) * b.den,
                      static_cast<__int128>(a.den) * b.num);
}

bool operator==(Rational a, Rational b) {
    return a.num == b.num && a.den == b.den;
}

bool operator!=(Rational a, Rational b) { return !(a == b); }

bool operator<(Rational a, Rational b) {
    if (a.is_infinite()) return false;
    if (b.is_infinite()) return true;
    return static_cast<__int128>(a.num) * b.den <
           static_cast<__int128>(b.num) * a.den;
}

bool operator<=(Rational a, Rational b) { return a < b || a == b; }
bool operator>(Rational a, Rational b) { return b < a; }
bool operator>=(Rational a, Rational b) { return b <= a; }

Rational rational_approx(double x, long long max_den) {
    if (std::isnan(x)) throw std::invalid_argument("rational_approx of NaN");
    if (std::isinf(x)) {
        if (x < 0) throw std::invalid_argument("negative infinite exponent");
        return Rational::infinity();
    }
    const bool negative = x < 0;
    double rest = std::abs(x);
    long long p0 = 1, q0 = 0;
    long long p1 = static_cast<long long>(std::floor(rest));
    long long q1 = 1;
    rest -= std::floor(rest);
    for (int iter = 0; iter < 64 && rest > 1e-15; ++iter) {
        rest = 1.0 / rest;
        const double digit = std::floor(rest);
        if (digit > static_cast<double>(max_den)) break;
        const long long a = static_cast<long long>(digit);
        const long long p2 = checked(static_cast<__int128>(a) * p1 + p0);
        const long long q2 = checked(static_cast<__int128>(a) * q1 + q0);
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        rest -= digit;
    }
    return Rational::of(negative ? -p1 : p1, q1);
}

const char* criterion_form_name(CriterionForm form) {
    switch (form) {
        case CriterionForm::kappa_beta_smallness: return "kappa_beta_smallness";
        case CriterionForm::kappa_beta_mixed: return "kappa_beta_mixed";
        case CriterionForm::kappa_smallness: return "kappa_smallness";
        case CriterionForm::kappa_mixed: return "kappa_mixed";
        case CriterionForm::eta_mixed: return "eta_mixed";
        case CriterionForm::weighted_smallness: return "weighted_smallness";
    }
    throw std::logic_error("unknown criterion form");
}

namespace {

const Rational one = Rational::of(1);
const Rational two = Rational::of(2);
const Rational three = Rational::of(3);

Admissibility reject(const std::string& detail) { return {false, detail}; }

Admissibility check_beta(Rational beta) {
    if (beta < one || beta > two) {
        return reject("beta = " + beta.str() + " outside [1, 2]");
    }
    return {true, ""};
}

// 3/gamma + 2/alpha <= bound with gamma in (gamma_min, inf] (or [gamma_min,
// inf] when closed_low) and alpha in [2, inf].
Admissibility check_mixed(Rational gamma, Rational alpha, Rational bound,
                          Rational gamma_min, bool closed_low) {
    if (gamma < gamma_min || (!closed_low && gamma == gamma_min)) {
        return reject("gamma = " + gamma.str() + " outside " +
                      (closed_low ? "[" : "(") + gamma_min.str() + ", inf]");
    }
    if (alpha < two) {
        return reject("alpha = " + alpha.str() + " outside [2, inf]");
    }
    const Rational budget =
        three * gamma.reciprocal() + two * alpha.reciprocal();
    if (budget > bound) {
        return reject("3/gamma + 2/alpha = " + budget.str() + " exceeds " +
                      bound.str());
    }
    return {true, "3/gamma + 2/alpha = " + budget.str() + " <= " + bound.str()};
}

Admissibility check_pinned(Rational gamma, Rational alpha,
                           Rational gamma_target) {
    if (gamma != gamma_target) {
        return reject("gamma = " + gamma.str() + ", smallness form requires " +
                      gamma_target.str());
    }
    if (!alpha.is_infinite()) {
        return reject("alpha = " + alpha.str() +
                      ", smallness form requires inf");
    }
    return {true, "(gamma, alpha) = (" + gamma_target.str() + ", inf)"};
}

} // namespace

Admissibility check_exponents(const AdmissibleExponents& spec) {
    switch (spec.form) {
        case CriterionForm::kappa_beta_smallness: {
            Admissibility b = check_beta(spec.parameter);
            if (!b.admissible) return b;
            return check_pinned(spec.gamma, spec.alpha, three);
        }
        case CriterionForm::kappa_beta_mixed: {
            Admissibility b = check_beta(spec.parameter);
            if (!b.admissible) return b;
            return check_mixed(spec.gamma, spec.alpha, one, three, false);
        }
        case CriterionForm::kappa_smallness:
            return check_pinned(spec.gamma, spec.alpha, three);
        case CriterionForm::kappa_mixed:
            return check_mixed(spec.gamma, spec.alpha, one, three, false);
        case CriterionForm::eta_mixed:
            return check_mixed(spec.gamma, spec.alpha, two, two, true);
        case CriterionForm::weighted_smallness: {
            if (spec.parameter <= Rational::of(0)) {
                return reject("weight b = " + spec.parameter.str() +
                              " must be positive");
            }
            return check_pinned(spec.gamma, spec.alpha,
                                three / spec.parameter);
        }
    }
    throw std::logic_error("unknown criterion form");
}

PqPair pq_exponents(Rational gamma, Rational beta) {
    if (beta < one || beta > two) {
        throw std::invalid_argument("beta = " + beta.str() + " outside [1, 2]");
    }
    if (gamma <= three) {
        throw std::invalid_argument("gamma = " + gamma.str() +
                                    " outside (3, inf]");
    }
    const Rational six = Rational::of(6);
    const Rational s = one - gamma.reciprocal();
    // Work with u = 1/p; the q constraint translates to u in
    // [s - (3+beta)/6, s - (1+beta)/6].
    Rational lo = (three - beta) / six;
    Rational hi = (Rational::of(5) - beta) / six;
    const Rational lo_q = s - (three + beta) / six;
    const Rational hi_q = s - (one + beta) / six;
    if (lo_q > lo) lo = lo_q;
    if (hi_q < hi) hi = hi_q;
    if (lo > hi) {
        throw std::invalid_argument("no feasible pair for gamma = " +
                                    gamma.str() + ", beta = " + beta.str());
    }
    Rational u = s / two;
    if (u < lo) u = lo;
    if (u > hi) u = hi;
    return {u.reciprocal(), (s - u).reciprocal()};
}

PqPair pq_exponents(double gamma, double beta) {
    return pq_exponents(rational_approx(gamma), rational_approx(beta));
}

namespace {

PowerPair validated_pair(Rational low, Rational high, const char* what) {
    if (low + high != Rational::of(1)) {
        throw std::logic_error("convexity powers do not sum to one");
    }
    if (low < Rational::of(0) || high < Rational::of(0)) {
        throw std::invalid_argument(std::string(what) +
                                    " exponent outside the convex range");
    }
    return {low, high};
}

} // namespace

PowerPair vorticity_powers(Rational p, Rational beta) {
    Admissibility b = check_beta(beta);
    if (!b.admissible) throw std::invalid_argument(b.detail);
    const Rational half = Rational::of(1, 2);
    const Rational low = three * p.reciprocal() + beta * half - three * half;
    const Rational high = Rational::of(5, 2) - three * p.reciprocal() -
                          beta * half;
    return validated_pair(low, high, "vorticity");
}

PowerPair fractional_powers(Rational q, Rational beta) {
    Admissibility b = check_beta(beta);
    if (!b.admissible) throw std::invalid_argument(b.detail);
    const Rational half = Rational::of(1, 2);
    const Rational low = three * q.reciprocal() - beta * half - half;
    const Rational high = Rational::of(3, 2) - three * q.reciprocal() +
                          beta * half;
    return validated_pair(low, high, "fractional");
}

PowerPair gradient_powers(Rational gamma) {
    if (gamma < three) {
        throw std::invalid_argument("gamma = " + gamma.str() +
                                    " outside [3, inf]");
    }
    const Rational high = three * gamma.reciprocal();
    return validated_pair(one - high, high, "gradient");
}

Rational young_time_exponent(Rational gamma) {
    if (gamma <= three) {
        throw std::invalid_argument("gamma = " + gamma.str() +
                                    " outside (3, inf]");
    }
    if (gamma.is_infinite()) return two;
    return two * gamma / (gamma - three);
}

} // namespace regwatch
