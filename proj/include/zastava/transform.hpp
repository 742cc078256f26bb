#pragma once

#include <functional>
#include <vector>

#include "zastava/charts.hpp"
#include "zastava/elliptic.hpp"
#include "zastava/quiver.hpp"

namespace zastava
{

// Coordinate change between the reduced log-canonical chart (w, Z) and the
// reduced elliptic chart (w, Y). The theta products attach to the source color
// of each arrow:
//   psi_{i,r} = prod_{arrows h with source i} prod_{t=1..a_head} theta(w_{i,r} - w_{head,t}),
//   Y_{i,r} = Z_{i,r} * (phi_{i,r}/phi_{i,a_i}) * psi_{i,r}/psi_{i,a_i}.
// The same-color gauge factor phi is 1 by default. A custom gauge supplies the
// log-potential and its w-derivatives over full indices r,s in 0..a_i-1; mixed
// partials must be symmetric (d log phi_{i,r} / d w_{i,s} symmetric in r,s),
// which keeps same-color Y-Y brackets zero.
struct TransformSpec {
    Quiver quiver;
    Degree alpha;
    ModularParam mp;
    std::function<Complex(int vi, int r, const std::vector<Complex>& w_full)> log_phi;
    std::function<Complex(int vi, int r, int s, const std::vector<Complex>& w_full)>
        log_phi_deriv;
};

// Theta product over outgoing arrows for marked point r (full index, the derived
// point is r = a_i - 1 in full_w order). Sinks give the empty product 1.
// Throws ThetaZero when any argument lies on the lattice.
Complex psi_factor(const TransformSpec& spec, int vertex, int r, const ReducedChartPoint& p);

// Ratio maps; both fix the w data and transform the fiber ratios.
ReducedChartPoint zastava_from_coulomb(const TransformSpec& spec, const ReducedChartPoint& p);
ReducedChartPoint coulomb_from_zastava(const TransformSpec& spec, const ReducedChartPoint& p);

// J * B * J^T where B is the reduced log-canonical bracket at p (Z ratios) and
// J is the analytic Jacobian of zastava_from_coulomb (theta log-derivatives, no
// finite differences). Row/column labels are those of the elliptic chart.
BracketMatrix pushforward_bracket(const TransformSpec& spec, const ReducedChartPoint& p);

// A four-point configuration (w_{i,r}, w_{i,a_i}, w_{j,s}, w_{j,a_j}) for the
// structure-function degeneration checks.
struct FourTermConfig {
    Complex wi_r, wi_a, wj_s, wj_a;
};

// Alternating combination f(wi_r-wj_s) - f(wi_r-wj_a) - f(wi_a-wj_s) + f(wi_a-wj_a)
// for f = zeta, f = 1/x and f = pi*cot(pi x) respectively. Linear-in-x parts of f
// drop out because the four arguments sum to zero.
Complex zeta_four_term(const FourTermConfig& c, const ModularParam& mp);
Complex rational_four_term(const FourTermConfig& c);
Complex cot_four_term(const FourTermConfig& c);

struct LimitSample {
    double parameter;   // epsilon, or Im tau
    Complex combination; // scaled elliptic combination
    Complex target;      // degenerate combination
    double abs_error;
};

struct LimitReport {
    std::vector<LimitSample> samples;
    // observed order between consecutive epsilons (rational check only):
    // log(err_k/err_{k+1}) / log(eps_k/eps_{k+1}).
    std::vector<double> observed_orders;
};

// eps * zeta-four-term at eps-scaled points versus the rational four-term at the
// base points; the error decays like eps^4 (zeta(x) - 1/x = O(x^3)).
LimitReport rational_limit_check(const FourTermConfig& base, const std::vector<double>& epsilons,
                                 const ModularParam& mp);

// zeta-four-term at tau = i*T for T in the ladder versus the cot-four-term; the
// error decays like |q| = exp(-2 pi T). Samples carry |q| in observed_orders'
// place via the report's samples (parameter = T).
LimitReport trigonometric_limit_check(const FourTermConfig& base,
                                      const std::vector<double>& im_tau_ladder);

// Recover residues of t'(x) = sum_r c_r (zeta(x - w_r) - zeta(x - w_0)) at each
// pole w_r by trapezoid contour quadrature on circles of radius min(delta/2, 0.05).
// The reference point w_0 is chosen deterministically away from all poles. Throws
// ContourTooClose when two poles are closer than twice the radius modulo the
// lattice.
std::vector<Complex> sl2_residue_coordinates(const std::vector<Complex>& poles,
                                             const std::vector<Complex>& pole_data,
                                             const ModularParam& mp, int nodes = 64,
                                             double delta = 0.1);

} // namespace zastava
