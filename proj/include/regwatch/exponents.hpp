#pragma once

#include <string>

namespace regwatch {

// Exact arithmetic for exponent bookkeeping. den == 0 with num == 1 encodes
// +infinity (the L^inf exponent); every finite value is normalized with a
// positive denominator.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational of(long long num, long long den = 1);
    static Rational infinity();

    bool is_infinite() const { return den == 0; }
    double value() const;
    std::string str() const;

    // 1/inf == 0 and 1/0 == inf, matching exponent duality conventions.
    Rational reciprocal() const;
};

Rational operator+(Rational a, Rational b);
Rational operator-(Rational a, Rational b);
Rational operator*(Rational a, Rational b);
Rational operator/(Rational a, Rational b);
bool operator==(Rational a, Rational b);
bool operator!=(Rational a, Rational b);
bool operator<(Rational a, Rational b);
bool operator<=(Rational a, Rational b);
bool operator>(Rational a, Rational b);
bool operator>=(Rational a, Rational b);

// Best rational approximation by continued fractions; exact for the dyadic
// and small-denominator values used in configs. Infinite input maps to
// Rational::infinity().
Rational rational_approx(double x, long long max_den = 1000000);

// Hypothesis shapes whose exponent ranges differ. The "smallness" forms pin
// (gamma, alpha) to a single admissible point; the "mixed" forms accept a
// region of the (gamma, alpha) plane.
enum class CriterionForm {
    kappa_beta_smallness, // kappa_beta in L^{3,inf}, beta in [1,2]
    kappa_beta_mixed,     // kappa_beta in L^{gamma,alpha}, 3/g + 2/a <= 1
    kappa_smallness,      // kappa in L^{3,inf} on a cylinder
    kappa_mixed,          // kappa in L^{gamma,alpha}, 3/g + 2/a <= 1
    eta_mixed,            // eta in L^{gamma,alpha}, 3/g + 2/a <= 2
    weighted_smallness,   // |v|^b form in L^{3/b,inf}, b > 0
};

const char* criterion_form_name(CriterionForm form);

struct AdmissibleExponents {
    CriterionForm form = CriterionForm::kappa_beta_mixed;
    Rational gamma = Rational::of(3);
    Rational alpha = Rational::infinity();
    // beta for the kappa_beta forms, the weight b for weighted_smallness,
    // ignored otherwise.
    Rational parameter = Rational::of(1);
};

struct Admissibility {
    bool admissible = false;
    std::string detail;
};

Admissibility check_exponents(const AdmissibleExponents& spec);

// Conjugate pair for the three-factor Hoelder split: 1/p + 1/q = (g-1)/g with
// p in [6/(5-b), 6/(3-b)] and q in [6/(3+b), 6/(1+b)]. Picks p == q when the
// symmetric choice is feasible, otherwise the nearest feasible point.
struct PqPair {
    Rational p;
    Rational q;
};

PqPair pq_exponents(Rational gamma, Rational beta);
PqPair pq_exponents(double gamma, double beta);

// Exponent pairs (power on ||Lambda^{b/2}v||, power on ||grad Lambda^{b/2}v||)
// for the convexity inequalities; each pair sums to exactly 1.
struct PowerPair {
    Rational low;
    Rational high;
};

PowerPair vorticity_powers(Rational p, Rational beta);
PowerPair fractional_powers(Rational q, Rational beta);
// (power on ||grad u||_2, power on ||Delta u||_2) for the L^{2g/(g-2)}
// gradient bound; requires gamma >= 3.
PowerPair gradient_powers(Rational gamma);

// Time exponent 2g/(g-3) that saturates 3/g + 2/a = 1; infinity maps to 2.
Rational young_time_exponent(Rational gamma);

} // namespace regwatch
