#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zastava/elliptic.hpp"
#include "zastava/quiver.hpp"

namespace zastava
{

// The four bracket structures the library cross-verifies.
enum class BracketFamily {
    Rational,       // unreduced rational chart (w, y), w in C, no lattice
    Coulomb,        // unreduced log-canonical chart (w, z)
    CoulombReduced, // reduced log-canonical chart (w_free, Z)
    FoReduced,      // reduced elliptic chart (w_free, Y), zeta structure functions
};

const char* bracket_family_name(BracketFamily family) noexcept;

// Chart point with a_i marked points w_{i,r} and fiber coordinates per color.
// The fiber is named y on rational charts and z on Coulomb charts; the bracket
// builders choose the label. delta is the genericity separation.
struct UnreducedChartPoint {
    Quiver quiver;
    Degree alpha;
    std::vector<std::vector<Complex>> w;     // [vertex][r], r = 0..a_i-1
    std::vector<std::vector<Complex>> fiber; // [vertex][r], nonzero
    double delta = 1e-3;
};

// Reduced chart: per color, a_i - 1 free marked points plus the constrained sum,
// and a_i - 1 fiber ratios. The last marked point is derived:
//   w_{i,a_i} = sum_constraint_i - sum_r w_free_{i,r}.
struct ReducedChartPoint {
    Quiver quiver;
    Degree alpha;
    std::vector<std::vector<Complex>> w_free; // [vertex][r], r = 0..a_i-2
    std::vector<Complex> sum_constraint;      // [vertex]
    std::vector<std::vector<Complex>> ratio;  // [vertex][r], nonzero
    double delta = 1e-3;

    Complex derived_w(int vi) const;
    std::vector<Complex> full_w(int vi) const; // free entries then the derived one
};

// Shape and nondegeneracy checks (DimensionMismatch / ValidationError).
void validate_point(const UnreducedChartPoint& p);
void validate_point(const ReducedChartPoint& p);

// Antisymmetric matrix of coordinate brackets, labels aligned with rows/columns.
struct BracketMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXcd m;
};

// max |m + m^T| / max(1, max |m|); zero for the matrices built here.
double antisymmetry_defect(const BracketMatrix& bm);

// Rational simply-laced bracket on (w, y): {w,w} = 0, {w_{i,r}, y_{j,s}} =
// delta_ij delta_rs y_{j,s}, and for i != j
//   {y_{i,r}, y_{j,s}} = (alpha_i^v, alpha_j^v) y_{i,r} y_{j,s} / (w_{i,r} - w_{j,s}),
// same-color y brackets vanish. Throws CoincidentPoints when a cross-color
// difference has modulus < delta.
BracketMatrix rational_bracket_matrix(const UnreducedChartPoint& p);

// Log-canonical chart: {z_{i,r}, w_{i,r}} = z_{i,r}, all other pairs zero.
BracketMatrix coulomb_bracket_matrix(const UnreducedChartPoint& p);

// Reduction of the log-canonical chart: {Z_{i,r}, w_{i,s}} = Z_{i,r} delta_rs.
BracketMatrix coulomb_reduced_bracket_matrix(const ReducedChartPoint& p);

// Reduced elliptic bracket: {w,w} = 0, {Y_{i,r}, w_{i,s}} = Y_{i,r} delta_rs,
// same-color {Y,Y} = 0, and for adjacent colors
//   {Y_{i,r}, Y_{j,s}} = Y_{i,r} Y_{j,s} [ zeta(w_{i,r}-w_{j,s}) - zeta(w_{i,r}-w_{j,a_j})
//                                        - zeta(w_{i,a_i}-w_{j,s}) + zeta(w_{i,a_i}-w_{j,a_j}) ],
// with the derived points included. Throws CoincidentPoints when any cross-color
// pair of marked points is closer than delta modulo the lattice.
BracketMatrix fo_reduced_bracket_matrix(const ReducedChartPoint& p, const ModularParam& mp);

// Per-color sums of marked points. On a reduced chart the sum is the stored
// constraint by construction.
std::vector<Complex> moment_map(const UnreducedChartPoint& p);
std::vector<Complex> moment_map(const ReducedChartPoint& p);

// Genericity guard shared by the elliptic bracket and the chart transform:
// throws CoincidentPoints when marked points of different colors (derived ones
// included) are closer than p.delta modulo the lattice.
void require_cross_color_separation(const ReducedChartPoint& p, const ModularParam& mp);

// Shared kernel for the rational y-y entry, also used by the A2 local model so
// both sides of the regularity identity evaluate bit-identically:
// pairing * (y1 * y2) / (w1 - w2), with the integer scaling applied to the
// product before the single division.
Complex rational_pair_bracket(int pairing, Complex y1, Complex y2, Complex w1, Complex w2);

// Bracket matrix together with all first derivatives of its entries:
// dpi[d](a,b) = d Pi_{ab} / d x_d, analytic (zeta' = -p for the elliptic family).
struct BracketWithDerivatives {
    BracketMatrix pi;
    std::vector<Eigen::MatrixXcd> dpi;
};

BracketWithDerivatives bracket_with_derivatives(BracketFamily family,
                                                const UnreducedChartPoint& p);
BracketWithDerivatives bracket_with_derivatives(BracketFamily family, const ReducedChartPoint& p,
                                                const ModularParam& mp);

// Jacobi identity defect for coordinates (a, b, c):
//   sum_d [ Pi_ad d_d Pi_bc + Pi_bd d_d Pi_ca + Pi_cd d_d Pi_ab ].
Complex jacobiator_residual(BracketFamily family, const UnreducedChartPoint& p,
                            const std::array<int, 3>& triple);
Complex jacobiator_residual(BracketFamily family, const ReducedChartPoint& p,
                            const ModularParam& mp, const std::array<int, 3>& triple);

// Same defect evaluated from precomputed tables (used when sweeping all triples).
Complex jacobiator_residual(const BracketWithDerivatives& bd, const std::array<int, 3>& triple);

// Coordinate labels of each family, in row/column order of the matrices:
// unreduced charts list w[id,r] for r = 1..a_i then the fibers (y[..] or z[..]);
// reduced charts list w[id,r] for r = 1..a_i-1 then the ratios (Y[..] or Z[..]).
std::vector<std::string> chart_labels(BracketFamily family, const Quiver& quiver,
                                      const Degree& alpha);

} // namespace zastava
