#include "zastava/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace zastava
{

namespace
{

constexpr double kPi = std::numbers::pi;
const Complex kImagUnit{0.0, 1.0};

std::string format_complex(Complex z)
{
    std::ostringstream out;
    out << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
    return out.str();
}

// theta'/theta on the reduced argument x (no lattice correction):
//   pi*cot(pi x) + 2*pi*i * sum_{n>=1} [ v/(1-v) - u/(1-u) ],
// with u = q^n e^{2 pi i x}, v = q^n e^{-2 pi i x}. Follows from the product form
// term by term.
Complex theta_log_deriv_reduced(Complex x, const ModularParam& mp)
{
    const Complex e_plus = std::exp(2.0 * kPi * kImagUnit * x);
    const Complex e_minus = std::exp(-2.0 * kPi * kImagUnit * x);
    Complex u = mp.q * e_plus;
    Complex v = mp.q * e_minus;
    Complex sum{0.0, 0.0};
    for (int n = 1; n <= mp.series_terms; ++n) {
        sum += v / (1.0 - v) - u / (1.0 - u);
        u *= mp.q;
        v *= mp.q;
    }
    const Complex cot = std::cos(kPi * x) / std::sin(kPi * x);
    return kPi * cot + 2.0 * kPi * kImagUnit * sum;
}

// d/dx of theta_log_deriv_reduced: -pi^2/sin^2(pi x) + 4*pi^2 sum [ u/(1-u)^2 + v/(1-v)^2 ].
Complex theta_log_deriv_prime_reduced(Complex x, const ModularParam& mp)
{
    const Complex e_plus = std::exp(2.0 * kPi * kImagUnit * x);
    const Complex e_minus = std::exp(-2.0 * kPi * kImagUnit * x);
    Complex u = mp.q * e_plus;
    Complex v = mp.q * e_minus;
    Complex sum{0.0, 0.0};
    for (int n = 1; n <= mp.series_terms; ++n) {
        const Complex du = 1.0 - u;
        const Complex dv = 1.0 - v;
        sum += u / (du * du) + v / (dv * dv);
        u *= mp.q;
        v *= mp.q;
    }
    const Complex s = std::sin(kPi * x);
    return -kPi * kPi / (s * s) + 4.0 * kPi * kPi * sum;
}

void require_off_lattice(const LatticeReducedPoint& red, ErrorCode code, const char* op)
{
    if (std::abs(red.w_reduced) < kPoleThreshold) {
        std::ostringstream out;
        out << op << ": argument reduces to " << format_complex(red.w_reduced)
            << ", within " << kPoleThreshold << " of a lattice point";
        throw Error(code, out.str());
    }
}

} // namespace

ModularParam make_modular_param(Complex tau, double tol)
{
    if (!(tau.imag() > 0.0)) {
        throw Error(ErrorCode::ValidationError,
                    "make_modular_param: Im(tau) must be positive, got tau = " + format_complex(tau));
    }
    if (!(tol > 0.0) || !(tol < 1.0)) {
        std::ostringstream out;
        out << "make_modular_param: truncation tolerance must lie in (0,1), got " << tol;
        throw Error(ErrorCode::ValidationError, out.str());
    }
    ModularParam mp;
    mp.tau = tau;
    mp.q = std::exp(2.0 * kPi * kImagUnit * tau);
    mp.tol = tol;
    // |q|^terms < tol, floor of 20 terms; +5 headroom for prefactors.
    const double abs_q = std::exp(-2.0 * kPi * tau.imag());
    int terms = 20;
    if (abs_q > 1e-300) {
        const double needed = std::log(tol) / std::log(abs_q);
        terms = std::max(20, static_cast<int>(std::ceil(needed)) + 5);
    }
    mp.series_terms = terms;
    return mp;
}

LatticeReducedPoint reduce_modulo_lattice(Complex w, const ModularParam& mp)
{
    // Coordinates of w in the (1, tau) basis; round each to the nearest integer
    // so s, t land in [-1/2, 1/2).
    const double t = w.imag() / mp.tau.imag();
    const double s = w.real() - t * mp.tau.real();
    const long m = static_cast<long>(std::floor(s + 0.5));
    const long n = static_cast<long>(std::floor(t + 0.5));
    LatticeReducedPoint red;
    red.m = m;
    red.n = n;
    red.w_reduced = w - Complex(static_cast<double>(m), 0.0) - static_cast<double>(n) * mp.tau;
    return red;
}

double lattice_distance(Complex w, const ModularParam& mp)
{
    const LatticeReducedPoint red = reduce_modulo_lattice(w, mp);
    // Basis rounding is not the Euclidean nearest point for skew tau; checking
    // the 3x3 block of neighboring translates is.
    double best = std::abs(red.w_reduced);
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            const Complex lambda = Complex(static_cast<double>(m), 0.0)
                                   + static_cast<double>(n) * mp.tau;
            best = std::min(best, std::abs(red.w_reduced - lambda));
        }
    }
    return best;
}

Complex theta(Complex w, const ModularParam& mp)
{
    const LatticeReducedPoint red = reduce_modulo_lattice(w, mp);
    const Complex x = red.w_reduced;

    // Product form at the reduced argument. q^{1/8} is taken as e^{i pi tau / 4},
    // single-valued in tau.
    const Complex q8 = std::exp(kImagUnit * kPi * mp.tau / 4.0);
    Complex value = 2.0 * q8 * std::sin(kPi * x);
    const Complex e_plus = std::exp(2.0 * kPi * kImagUnit * x);
    const Complex e_minus = std::exp(-2.0 * kPi * kImagUnit * x);
    Complex qn = mp.q;
    for (int n = 1; n <= mp.series_terms; ++n) {
        value *= (1.0 - qn) * (1.0 - qn * e_plus) * (1.0 - qn * e_minus);
        qn *= mp.q;
    }

    // theta(x + m + n*tau) = (-1)^{m+n} e^{-i pi n^2 tau - 2 pi i n x} theta(x).
    const double n_d = static_cast<double>(red.n);
    Complex factor = std::exp(-kImagUnit * kPi * n_d * n_d * mp.tau
                              - 2.0 * kPi * kImagUnit * n_d * x);
    if ((red.m + red.n) % 2 != 0) {
        factor = -factor;
    }
    return factor * value;
}

Complex theta_log_deriv(Complex w, const ModularParam& mp)
{
    const LatticeReducedPoint red = reduce_modulo_lattice(w, mp);
    require_off_lattice(red, ErrorCode::PoleAtLatticePoint, "theta_log_deriv");
    // theta'/theta(x + m + n*tau) = theta'/theta(x) - 2*pi*i*n.
    return theta_log_deriv_reduced(red.w_reduced, mp)
           - 2.0 * kPi * kImagUnit * static_cast<double>(red.n);
}

QuasiPeriods quasi_periods(const ModularParam& mp)
{
    // eta1 = pi^2/3 - 8 pi^2 sum_{n>=1} q^n/(1-q^n)^2. This is the w-linear
    // normalization constant making zeta(w) - 1/w = O(w^3), equivalently
    // -theta'''(0)/(3 theta'(0)) = (pi^2/3) E_2(tau).
    Complex sum{0.0, 0.0};
    Complex qn = mp.q;
    for (int n = 1; n <= mp.series_terms; ++n) {
        const Complex d = 1.0 - qn;
        sum += qn / (d * d);
        qn *= mp.q;
    }
    QuasiPeriods qp;
    qp.eta1 = kPi * kPi / 3.0 - 8.0 * kPi * kPi * sum;
    // Legendre relation eta1*tau - eta2 = 2*pi*i; the sign is pinned against the
    // lattice-sum oracle at tau = i (see the quasi-period unit tests).
    qp.eta2 = qp.eta1 * mp.tau - 2.0 * kPi * kImagUnit;
    return qp;
}

Complex weierstrass_zeta(Complex w, const ModularParam& mp)
{
    const LatticeReducedPoint red = reduce_modulo_lattice(w, mp);
    require_off_lattice(red, ErrorCode::PoleAtLatticePoint, "weierstrass_zeta");
    const QuasiPeriods qp = quasi_periods(mp);
    // zeta(x) = theta'/theta(x) + eta1*x on the cell; quasi-periodicity adds
    // m*eta1 + n*eta2.
    return theta_log_deriv_reduced(red.w_reduced, mp) + qp.eta1 * red.w_reduced
           + static_cast<double>(red.m) * qp.eta1 + static_cast<double>(red.n) * qp.eta2;
}

Complex theta_log_deriv_prime(Complex w, const ModularParam& mp)
{
    const LatticeReducedPoint red = reduce_modulo_lattice(w, mp);
    require_off_lattice(red, ErrorCode::PoleAtLatticePoint, "theta_log_deriv_prime");
    // Fully periodic: the -2*pi*i*n correction differentiates away.
    return theta_log_deriv_prime_reduced(red.w_reduced, mp);
}

Complex weierstrass_p(Complex w, const ModularParam& mp)
{
    const LatticeReducedPoint red = reduce_modulo_lattice(w, mp);
    require_off_lattice(red, ErrorCode::PoleAtLatticePoint, "weierstrass_p");
    const QuasiPeriods qp = quasi_periods(mp);
    // p = -zeta' = -(log theta)'' - eta1.
    return -theta_log_deriv_prime_reduced(red.w_reduced, mp) - qp.eta1;
}

Complex zeta_lattice_oracle(Complex w, const ModularParam& mp, int cutoff)
{
    if (cutoff < 10) {
        std::ostringstream out;
        out << "zeta_lattice_oracle: cutoff must be >= 10, got " << cutoff;
        throw Error(ErrorCode::ValidationError, out.str());
    }
    if (lattice_distance(w, mp) < kPoleThreshold) {
        throw Error(ErrorCode::PoleAtLatticePoint,
                    "zeta_lattice_oracle: w = " + format_complex(w) + " is a lattice point");
    }

    // Each half-ring point l stands for the pair {l, -l}; the pair contribution
    //   [1/(w-l) + 1/l + w/l^2] + [1/(w+l) - 1/l + w/l^2] = 2 w^3 / (l^2 (w^2 - l^2))
    // is used in closed form. This keeps the sum exactly odd in w, cancels the
    // odd-power tails, and avoids the near-cancellation of the raw terms.
    const Complex w2 = w * w;
    const Complex w3 = w2 * w;
    std::vector<Complex> rings(static_cast<std::size_t>(cutoff));
    for (int k = 1; k <= cutoff; ++k) {
        Complex ring{0.0, 0.0};
        const auto add = [&](long m, long n) {
            const Complex lambda = Complex(static_cast<double>(m), 0.0)
                                   + static_cast<double>(n) * mp.tau;
            const Complex lambda2 = lambda * lambda;
            ring += 2.0 * w3 / (lambda2 * (w2 - lambda2));
        };
        for (long m = -k; m <= k; ++m) {
            add(m, k); // top edge, n = k
        }
        for (long n = 1; n < k; ++n) {
            add(k, n);  // right edge
            add(-k, n); // left edge
        }
        add(k, 0); // right half-axis
        rings[static_cast<std::size_t>(k - 1)] = ring;
    }

    // Outermost rings are smallest: accumulate them first.
    Complex total{0.0, 0.0};
    for (int k = cutoff; k >= 1; --k) {
        total += rings[static_cast<std::size_t>(k - 1)];
    }
    return total + 1.0 / w;
}

} // namespace zastava
