#pragma once

#include <complex>

#include "zastava/error.hpp"

namespace zastava
{

using Complex = std::complex<double>;

// Reduced arguments closer to the lattice than this raise PoleAtLatticePoint
// (or ThetaZero at the call sites where a vanishing theta is the failure mode).
inline constexpr double kPoleThreshold = 1e-12;

// Modular parameter tau (Im tau > 0) for the lattice Z + Z*tau, together with
// the nome q = exp(2*pi*i*tau) and the q-series truncation level.
struct ModularParam {
    Complex tau;
    Complex q;
    int series_terms; // number of q-product factors retained
    double tol;       // truncation target the factory solved for
};

// Builds a ModularParam with |q|^series_terms < tol (floor of 20 terms).
// Throws ValidationError unless Im(tau) > 0.
ModularParam make_modular_param(Complex tau, double tol = 1e-12);

// w = w_reduced + m + n*tau with w_reduced = s + t*tau, s,t in [-1/2, 1/2).
struct LatticeReducedPoint {
    Complex w_reduced;
    long m;
    long n;
};

LatticeReducedPoint reduce_modulo_lattice(Complex w, const ModularParam& mp);

// Euclidean distance from w to the nearest point of Z + Z*tau.
double lattice_distance(Complex w, const ModularParam& mp);

// Odd theta function normalized by
//   theta(w) = 2 q^{1/8} sin(pi w) prod_{n>=1} (1-q^n)(1-q^n e^{2pi i w})(1-q^n e^{-2pi i w}),
// so theta(w+1) = -theta(w) and theta(w+tau) = -e^{-pi i tau - 2 pi i w} theta(w).
// Vanishes exactly on the lattice.
Complex theta(Complex w, const ModularParam& mp);

// theta'/theta(w). Quasi-periodicity: theta'/theta(w + m + n*tau) = theta'/theta(w) - 2*pi*i*n.
// Throws PoleAtLatticePoint when the reduced argument is within kPoleThreshold
// of a lattice point.
Complex theta_log_deriv(Complex w, const ModularParam& mp);

// Quasi-periods of the Weierstrass zeta function for periods (1, tau):
//   zeta(w+1) = zeta(w) + eta1,  zeta(w+tau) = zeta(w) + eta2.
// eta1 = -theta'''(0) / (3 theta'(0)) evaluated through the q-series
// (equivalently (pi^2/3) E_2(tau)); eta2 = eta1*tau - 2*pi*i by the Legendre
// relation eta1*tau - eta2 = 2*pi*i, sign fixed against the lattice-sum oracle.
struct QuasiPeriods {
    Complex eta1;
    Complex eta2;
};

QuasiPeriods quasi_periods(const ModularParam& mp);

// Weierstrass zeta: zeta(w) = theta'/theta(w_reduced) + eta1*w_reduced + m*eta1 + n*eta2.
// Odd, with simple poles of residue 1 on the lattice. Throws PoleAtLatticePoint.
Complex weierstrass_zeta(Complex w, const ModularParam& mp);

// Weierstrass p-function, p = -zeta'. Fully periodic, even. Throws PoleAtLatticePoint.
Complex weierstrass_p(Complex w, const ModularParam& mp);

// Derivative of theta'/theta, i.e. (log theta)''(w) = -p(w) - eta1.
// Used for analytic Jacobiator derivatives. Throws PoleAtLatticePoint.
Complex theta_log_deriv_prime(Complex w, const ModularParam& mp);

// Independent slow oracle: truncated symmetrized lattice sum
//   zeta_K(w) = 1/w + sum_{0 < max(|m|,|n|) <= K} [ 1/(w-l) + 1/l + w/l^2 ],  l = m + n*tau.
// Terms are accumulated per square ring with (l, -l) paired, which makes the
// result exactly odd in w and cancels the odd-order tails, leaving O(1/K^2)
// truncation error. Throws PoleAtLatticePoint when w is within kPoleThreshold
// of a lattice point covered by the sum.
Complex zeta_lattice_oracle(Complex w, const ModularParam& mp, int cutoff);

} // namespace zastava
