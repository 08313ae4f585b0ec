#include "specmix/math_util.hpp"

#include <cmath>
#include <stdexcept>

namespace specmix {

namespace {
// Lanczos coefficients, g = 7, 9 terms.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
constexpr double kPi = 3.1415926535897932384626433832795;
}  // namespace

double gamma_real(double x) {
    if (x < 0.5) {
        // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1-x)).
        return kPi / (std::sin(kPi * x) * gamma_real(1.0 - x));
    }
    x -= 1.0;
    double a = kLanczos[0];
    double t = x + kLanczosG + 0.5;
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    return kSqrt2Pi * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

std::complex<double> gamma_complex(std::complex<double> z) {
    if (z.real() < 0.5) {
        return kPi / (std::sin(kPi * z) * gamma_complex(1.0 - z));
    }
    z -= 1.0;
    std::complex<double> a = kLanczos[0];
    std::complex<double> t = z + (kLanczosG + 0.5);
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + static_cast<double>(i));
    return kSqrt2Pi * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double reg_lower_gamma(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("reg_lower_gamma domain");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Series: P(a,x) = x^a e^{-x} / Gamma(a) * sum x^n / (a(a+1)...(a+n)).
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 1000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction (Lentz) for Q(a,x); P = 1 - Q.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

double chi_square_tail(int d, double t) {
    return 1.0 - reg_lower_gamma(0.5 * d, 0.5 * t);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / 1.4142135623730950488016887242097);
}

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, fa, m, fm, lm, flm);
    double right = simpson(f, m, fm, b, fb, rm, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(f, a, fa, b, fb, m, fm);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace specmix
