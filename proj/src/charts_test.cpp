#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "zastava/charts.hpp"
#include "zastava/error.hpp"

namespace
{

using zastava::BracketFamily;
using zastava::Complex;
using zastava::Degree;
using zastava::ModularParam;
using zastava::Quiver;
using zastava::ReducedChartPoint;
using zastava::UnreducedChartPoint;

double rel_err(Complex got, Complex want)
{
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

UnreducedChartPoint a2_rational_point()
{
    UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{1, 1}};
    p.w = {{Complex(1.0, 0.0)}, {Complex(0.0, 0.0)}};
    p.fiber = {{Complex(1.0, 0.0)}, {Complex(1.0, 0.0)}};
    return p;
}

// Four zeta values at cutoff K combined with Richardson extrapolation in K so the
// leading 1/K^2 truncation term cancels; good to ~1e-10 on cell-sized arguments.
Complex oracle_zeta(Complex x, const ModularParam& mp)
{
    const Complex coarse = zastava::zeta_lattice_oracle(x, mp, 800);
    const Complex fine = zastava::zeta_lattice_oracle(x, mp, 1600);
    return (4.0 * fine - coarse) / 3.0;
}

ReducedChartPoint perturb_reduced(ReducedChartPoint p, int coord, Complex dh)
{
    int k = coord;
    for (std::size_t vi = 0; vi < p.w_free.size(); ++vi)
        for (std::size_t r = 0; r < p.w_free[vi].size(); ++r)
            if (k-- == 0) {
                p.w_free[vi][r] += dh;
                return p;
            }
    for (std::size_t vi = 0; vi < p.ratio.size(); ++vi)
        for (std::size_t r = 0; r < p.ratio[vi].size(); ++r)
            if (k-- == 0) {
                p.ratio[vi][r] += dh;
                return p;
            }
    FAIL("coordinate index out of range");
    return p;
}

UnreducedChartPoint perturb_unreduced(UnreducedChartPoint p, int coord, Complex dh)
{
    int k = coord;
    for (std::size_t vi = 0; vi < p.w.size(); ++vi)
        for (std::size_t r = 0; r < p.w[vi].size(); ++r)
            if (k-- == 0) {
                p.w[vi][r] += dh;
                return p;
            }
    for (std::size_t vi = 0; vi < p.fiber.size(); ++vi)
        for (std::size_t r = 0; r < p.fiber[vi].size(); ++r)
            if (k-- == 0) {
                p.fiber[vi][r] += dh;
                return p;
            }
    FAIL("coordinate index out of range");
    return p;
}

} // namespace

TEST_CASE("charts: rational bracket entries on A2 match the closed form")
{
    const UnreducedChartPoint p = a2_rational_point();
    const zastava::BracketMatrix bm = zastava::rational_bracket_matrix(p);

    REQUIRE(bm.m.rows() == 4);
    REQUIRE(bm.labels == std::vector<std::string>{"w[1,1]", "w[2,1]", "y[1,1]", "y[2,1]"});

    // {w_{i,1}, y_{i,1}} = y_{i,1}
    CHECK(bm.m(0, 2) == Complex(1.0, 0.0));
    CHECK(bm.m(1, 3) == Complex(1.0, 0.0));
    // {y_i, y_j} = -1 * (1*1) / (1 - 0) = -1
    CHECK(bm.m(2, 3) == Complex(-1.0, 0.0));
    CHECK(bm.m(3, 2) == Complex(1.0, 0.0));
    // w-w block and cross {w, y} entries vanish
    CHECK(bm.m(0, 1) == Complex(0.0, 0.0));
    CHECK(bm.m(0, 3) == Complex(0.0, 0.0));
    CHECK(zastava::antisymmetry_defect(bm) == 0.0);
}

TEST_CASE("charts: rational bracket pairing, same-color zeros, coincidence guard")
{
    UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A3");
    p.alpha = Degree{{2, 1, 1}};
    p.w = {{Complex(0.9, 0.1), Complex(0.9, 0.1)}, {Complex(0.2, -0.3)}, {Complex(-0.6, 0.0)}};
    p.fiber = {{Complex(2.0, 0.0), Complex(0.5, 0.5)}, {Complex(-1.0, 0.2)}, {Complex(3.0, -1.0)}};

    // Same-color repeated w is allowed; only cross-color coincidences are errors.
    const zastava::BracketMatrix bm = zastava::rational_bracket_matrix(p);
    const int total = 4;
    // Same-color y-y entries vanish.
    CHECK(bm.m(total + 0, total + 1) == Complex(0.0, 0.0));
    // Colors 1 and 3 are not adjacent on A3, so their y-y entries vanish.
    CHECK(bm.m(total + 0, total + 3) == Complex(0.0, 0.0));
    // Adjacent pair (1,2): value -(y1 y2)/(w1 - w2).
    const Complex want = zastava::rational_pair_bracket(-1, p.fiber[0][0], p.fiber[1][0],
                                                        p.w[0][0], p.w[1][0]);
    CHECK(bm.m(total + 0, total + 2) == want);

    // Cross-color coincidence (even for non-adjacent colors) is rejected.
    UnreducedChartPoint bad = p;
    bad.w[2][0] = bad.w[0][0] + Complex(1e-5, 0.0);
    CHECK_THROWS_WITH_AS(zastava::rational_bracket_matrix(bad),
                         doctest::Contains("closer than delta"), zastava::Error);
    try {
        zastava::rational_bracket_matrix(bad);
    } catch (const zastava::Error& e) {
        CHECK(e.code() == zastava::ErrorCode::CoincidentPoints);
    }
}

TEST_CASE("charts: point validation rejects malformed data")
{
    UnreducedChartPoint p = a2_rational_point();

    UnreducedChartPoint zero_fiber = p;
    zero_fiber.fiber[0][0] = Complex(0.0, 0.0);
    CHECK_THROWS_AS(zastava::validate_point(zero_fiber), zastava::Error);

    UnreducedChartPoint bad_shape = p;
    bad_shape.w[1].push_back(Complex(0.5, 0.0));
    try {
        zastava::validate_point(bad_shape);
        FAIL("expected DimensionMismatch");
    } catch (const zastava::Error& e) {
        CHECK(e.code() == zastava::ErrorCode::DimensionMismatch);
    }

    UnreducedChartPoint bad_delta = p;
    bad_delta.delta = 0.0;
    CHECK_THROWS_AS(zastava::validate_point(bad_delta), zastava::Error);
}

TEST_CASE("charts: coulomb bracket is log-canonical")
{
    UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{2, 1}};
    p.w = {{Complex(0.4, 0.0), Complex(0.4, 0.0)}, {Complex(0.4, 0.0)}};
    p.fiber = {{Complex(1.5, -0.5), Complex(0.3, 0.0)}, {Complex(-2.0, 1.0)}};

    // No separation requirement at all for the Coulomb chart.
    const zastava::BracketMatrix bm = zastava::coulomb_bracket_matrix(p);
    REQUIRE(bm.m.rows() == 6);
    CHECK(bm.labels[3] == "z[1,1]");
    // {z_{i,r}, w_{i,r}} = z_{i,r}
    CHECK(bm.m(3, 0) == p.fiber[0][0]);
    CHECK(bm.m(4, 1) == p.fiber[0][1]);
    CHECK(bm.m(5, 2) == p.fiber[1][0]);
    // {z_{i,1}, w_{i,2}} = 0 and z-z entries vanish
    CHECK(bm.m(3, 1) == Complex(0.0, 0.0));
    CHECK(bm.m(3, 4) == Complex(0.0, 0.0));
    CHECK(zastava::antisymmetry_defect(bm) == 0.0);
}

TEST_CASE("charts: coulomb reduced bracket matches brute-force Dirac reduction")
{
    // Unreduced A2 point with alpha = (2,2); reduce by hand via the ratio map
    // (w11, w21, Z11, Z21) = (w11, w21, z11/z12, z21/z22) and push the bracket
    // forward through its Jacobian.
    UnreducedChartPoint up;
    up.quiver = zastava::named_quiver("A2");
    up.alpha = Degree{{2, 2}};
    up.w = {{Complex(0.31, 0.0), Complex(-0.17, 0.0)}, {Complex(0.05, 0.0), Complex(0.42, 0.0)}};
    up.fiber = {{Complex(1.3, 0.2), Complex(0.7, -0.1)}, {Complex(-0.4, 0.9), Complex(2.1, 0.0)}};

    const zastava::BracketMatrix big = zastava::coulomb_bracket_matrix(up);

    Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(4, 8);
    jac(0, 0) = 1.0; // w11
    jac(1, 2) = 1.0; // w21
    const Complex z11 = up.fiber[0][0];
    const Complex z12 = up.fiber[0][1];
    const Complex z21 = up.fiber[1][0];
    const Complex z22 = up.fiber[1][1];
    jac(2, 4) = 1.0 / z12;
    jac(2, 5) = -z11 / (z12 * z12);
    jac(3, 6) = 1.0 / z22;
    jac(3, 7) = -z21 / (z22 * z22);
    const Eigen::MatrixXcd pushed = jac * big.m * jac.transpose();

    ReducedChartPoint rp;
    rp.quiver = up.quiver;
    rp.alpha = up.alpha;
    rp.w_free = {{up.w[0][0]}, {up.w[1][0]}};
    rp.sum_constraint = {up.w[0][0] + up.w[0][1], up.w[1][0] + up.w[1][1]};
    rp.ratio = {{z11 / z12}, {z21 / z22}};
    const zastava::BracketMatrix red = zastava::coulomb_reduced_bracket_matrix(rp);
    REQUIRE(red.labels ==
            std::vector<std::string>{"w[1,1]", "w[2,1]", "Z[1,1]", "Z[2,1]"});

    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            CHECK(rel_err(pushed(a, b), red.m(a, b)) < 1e-15);

    // {Z_{i,1}, w_{i,1}} = Z_{i,1} and everything else vanishes.
    CHECK(red.m(2, 0) == rp.ratio[0][0]);
    CHECK(red.m(2, 1) == Complex(0.0, 0.0));
    CHECK(red.m(2, 3) == Complex(0.0, 0.0));
}

TEST_CASE("charts: fo reduced bracket on A1 has only diagonal Y-w entries")
{
    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A1");
    p.alpha = Degree{{3}};
    p.w_free = {{Complex(0.21, 0.05), Complex(-0.33, 0.11)}};
    p.sum_constraint = {Complex(0.1, 0.0)};
    p.ratio = {{Complex(1.7, -0.2), Complex(0.4, 0.6)}};

    const zastava::BracketMatrix bm = zastava::fo_reduced_bracket_matrix(p, mp);
    REQUIRE(bm.m.rows() == 4);
    CHECK(bm.m(2, 0) == p.ratio[0][0]);
    CHECK(bm.m(3, 1) == p.ratio[0][1]);
    CHECK(bm.m(2, 1) == Complex(0.0, 0.0));
    // Same-color Y-Y entries vanish.
    CHECK(bm.m(2, 3) == Complex(0.0, 0.0));
    CHECK(zastava::antisymmetry_defect(bm) == 0.0);
}

TEST_CASE("charts: fo reduced A2 entry matches the lattice-sum oracle composition")
{
    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{2, 2}};
    // Full marked points w_i = (0.31, -0.17), w_j = (0.05, 0.42), all ratios 1.
    p.w_free = {{Complex(0.31, 0.0)}, {Complex(0.05, 0.0)}};
    p.sum_constraint = {Complex(0.14, 0.0), Complex(0.47, 0.0)};
    p.ratio = {{Complex(1.0, 0.0)}, {Complex(1.0, 0.0)}};

    const zastava::BracketMatrix bm = zastava::fo_reduced_bracket_matrix(p, mp);
    REQUIRE(bm.labels == std::vector<std::string>{"w[1,1]", "w[2,1]", "Y[1,1]", "Y[2,1]"});

    const Complex want = oracle_zeta(Complex(0.31 - 0.05, 0.0), mp)    // w_i1 - w_j1
                         - oracle_zeta(Complex(0.31 - 0.42, 0.0), mp)  // w_i1 - w_j2
                         - oracle_zeta(Complex(-0.17 - 0.05, 0.0), mp) // w_i2 - w_j1
                         + oracle_zeta(Complex(-0.17 - 0.42, 0.0), mp); // w_i2 - w_j2
    CHECK(rel_err(bm.m(2, 3), want) < 1e-9);
    // The value is genuinely elliptic: far from the rational combination.
    CHECK(std::abs(bm.m(2, 3)) > 0.1);
}

TEST_CASE("charts: fo reduced symmetric configuration collapses to zero by oddness")
{
    // w_i = (a, -a), w_j = (b, -b): the four zeta arguments come in opposite
    // pairs, so the combination telescopes to zero exactly (zeta is odd).
    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{2, 2}};
    p.w_free = {{Complex(0.31, 0.0)}, {Complex(0.11, 0.0)}};
    p.sum_constraint = {Complex(0.0, 0.0), Complex(0.0, 0.0)};
    p.ratio = {{Complex(2.0, 0.5)}, {Complex(-1.0, 1.5)}};

    const zastava::BracketMatrix bm = zastava::fo_reduced_bracket_matrix(p, mp);
    CHECK(std::abs(bm.m(2, 3)) < 1e-13);
    // Diagonal Y-w entries are untouched by the collapse.
    CHECK(bm.m(2, 0) == p.ratio[0][0]);
}

TEST_CASE("charts: fo reduced rejects collisions modulo the lattice, derived points included")
{
    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{2, 2}};
    p.w_free = {{Complex(0.3, 0.0)}, {Complex(0.0, 0.0)}};
    // Derived point of color 1 is 1.0005 + i, which is 0.0005 away from w_{2,1} = 0
    // modulo the lattice with tau = i.
    p.sum_constraint = {Complex(1.3005, 1.0), Complex(0.4, 0.0)};
    p.ratio = {{Complex(1.0, 0.0)}, {Complex(1.0, 0.0)}};

    try {
        zastava::fo_reduced_bracket_matrix(p, mp);
        FAIL("expected CoincidentPoints");
    } catch (const zastava::Error& e) {
        CHECK(e.code() == zastava::ErrorCode::CoincidentPoints);
    }
}

TEST_CASE("charts: relabeling within a color conjugates the fo matrix exactly")
{
    const ModularParam mp = zastava::make_modular_param(Complex(0.35, 1.2));
    ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{3, 2}};
    p.w_free = {{Complex(0.23, 0.08), Complex(-0.31, 0.17)}, {Complex(0.4, -0.22)}};
    p.sum_constraint = {Complex(0.05, 0.4), Complex(-0.2, 0.1)};
    p.ratio = {{Complex(1.2, -0.7), Complex(0.5, 0.9)}, {Complex(-2.0, 0.3)}};

    ReducedChartPoint swapped = p;
    std::swap(swapped.w_free[0][0], swapped.w_free[0][1]);
    std::swap(swapped.ratio[0][0], swapped.ratio[0][1]);

    const zastava::BracketMatrix bm = zastava::fo_reduced_bracket_matrix(p, mp);
    const zastava::BracketMatrix bs = zastava::fo_reduced_bracket_matrix(swapped, mp);

    // Coordinates (w11 w12 w21 Y11 Y12 Y21) -> swap 0<->1 and 3<->4.
    const std::array<int, 6> perm = {1, 0, 2, 4, 3, 5};
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            CHECK(bs.m(perm[a], perm[b]) == bm.m(a, b));
}

TEST_CASE("charts: fo entries are local to the colors involved")
{
    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.1));
    ReducedChartPoint p3;
    p3.quiver = zastava::named_quiver("A3");
    p3.alpha = Degree{{2, 2, 2}};
    p3.w_free = {{Complex(0.31, 0.02)}, {Complex(0.05, -0.03)}, {Complex(-0.28, 0.12)}};
    p3.sum_constraint = {Complex(0.14, 0.0), Complex(0.47, 0.1), Complex(0.0, -0.3)};
    p3.ratio = {{Complex(1.4, 0.0)}, {Complex(0.8, -0.6)}, {Complex(2.2, 1.0)}};

    const zastava::BracketMatrix b3 = zastava::fo_reduced_bracket_matrix(p3, mp);
    // Coordinates: w11 w21 w31 Y11 Y21 Y31. Colors 1 and 3 are not adjacent.
    CHECK(b3.m(3, 5) == Complex(0.0, 0.0));

    // Restriction to the subquiver on colors {1,2} reproduces the same entries.
    ReducedChartPoint p2;
    p2.quiver = zastava::named_quiver("A2");
    p2.alpha = Degree{{2, 2}};
    p2.w_free = {p3.w_free[0], p3.w_free[1]};
    p2.sum_constraint = {p3.sum_constraint[0], p3.sum_constraint[1]};
    p2.ratio = {p3.ratio[0], p3.ratio[1]};
    const zastava::BracketMatrix b2 = zastava::fo_reduced_bracket_matrix(p2, mp);
    CHECK(b3.m(3, 4) == b2.m(2, 3)); // {Y11, Y21}
    CHECK(b3.m(3, 0) == b2.m(2, 0)); // {Y11, w11}

    // Factorization locality: moving color 3 does not change the (1,2) block.
    ReducedChartPoint moved = p3;
    moved.w_free[2][0] = Complex(0.1, -0.35);
    moved.sum_constraint[2] = Complex(0.6, 0.2);
    moved.ratio[2][0] = Complex(-0.9, 0.1);
    const zastava::BracketMatrix bmv = zastava::fo_reduced_bracket_matrix(moved, mp);
    CHECK(bmv.m(3, 4) == b3.m(3, 4));
    CHECK(bmv.m(3, 0) == b3.m(3, 0));
    CHECK(bmv.m(4, 1) == b3.m(4, 1));
}

TEST_CASE("charts: moment map sums marked points; reduced charts store it")
{
    UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A1");
    p.alpha = Degree{{2}};
    p.w = {{Complex(0.2, 0.0), Complex(0.3, 0.0)}};
    p.fiber = {{Complex(1.0, 0.0), Complex(1.0, 0.0)}};
    const std::vector<Complex> mu = zastava::moment_map(p);
    REQUIRE(mu.size() == 1);
    CHECK(mu[0] == Complex(0.5, 0.0));

    ReducedChartPoint rp;
    rp.quiver = p.quiver;
    rp.alpha = Degree{{3}};
    rp.w_free = {{Complex(0.21, 0.05), Complex(-0.33, 0.11)}};
    rp.sum_constraint = {Complex(0.1, -0.4)};
    rp.ratio = {{Complex(1.0, 0.0), Complex(1.0, 0.0)}};
    CHECK(zastava::moment_map(rp)[0] == rp.sum_constraint[0]);

    // derived_w bookkeeping: the full list sums back to the constraint.
    const std::vector<Complex> full = rp.full_w(0);
    REQUIRE(full.size() == 3);
    Complex sum(0.0, 0.0);
    for (Complex v : full)
        sum += v;
    CHECK(std::abs(sum - rp.sum_constraint[0]) < 1e-15);
}

TEST_CASE("charts: jacobiator vanishes exactly for w-triples and log-canonical families")
{
    // Rational and elliptic families: w-w brackets and their derivatives are
    // identically zero, so those residual summands are exact zeros.
    UnreducedChartPoint up;
    up.quiver = zastava::named_quiver("A3");
    up.alpha = Degree{{1, 1, 1}};
    up.w = {{Complex(1.0, 0.0)}, {Complex(0.3, 0.0)}, {Complex(-0.5, 0.0)}};
    up.fiber = {{Complex(2.0, 0.0)}, {Complex(-1.5, 0.0)}, {Complex(0.8, 0.0)}};
    CHECK(zastava::jacobiator_residual(BracketFamily::Rational, up, {0, 1, 2}) ==
          Complex(0.0, 0.0));

    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    ReducedChartPoint rp;
    rp.quiver = zastava::named_quiver("A2");
    rp.alpha = Degree{{3, 2}};
    rp.w_free = {{Complex(0.23, 0.08), Complex(-0.31, 0.17)}, {Complex(0.4, -0.22)}};
    rp.sum_constraint = {Complex(0.05, 0.4), Complex(-0.2, 0.1)};
    rp.ratio = {{Complex(1.2, -0.7), Complex(0.5, 0.9)}, {Complex(-2.0, 0.3)}};
    CHECK(zastava::jacobiator_residual(BracketFamily::FoReduced, rp, mp, {0, 1, 2}) ==
          Complex(0.0, 0.0));

    // Log-canonical structure constants: every summand of every triple vanishes.
    UnreducedChartPoint cp = up;
    const auto cd = zastava::bracket_with_derivatives(BracketFamily::Coulomb, cp);
    const int n = static_cast<int>(cd.pi.m.rows());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                CHECK(zastava::jacobiator_residual(cd, {a, b, c}) == Complex(0.0, 0.0));

    const auto rd = zastava::bracket_with_derivatives(BracketFamily::CoulombReduced, rp, mp);
    const int m = static_cast<int>(rd.pi.m.rows());
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = b + 1; c < m; ++c)
                CHECK(zastava::jacobiator_residual(rd, {a, b, c}) == Complex(0.0, 0.0));
}

TEST_CASE("charts: rational jacobiator vanishes to rounding on the A3 path")
{
    UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A3");
    p.alpha = Degree{{1, 1, 1}};
    p.w = {{Complex(1.0, 0.2)}, {Complex(0.3, -0.4)}, {Complex(-0.5, 0.1)}};
    p.fiber = {{Complex(2.0, -0.3)}, {Complex(-1.5, 0.6)}, {Complex(0.8, 1.1)}};

    const auto bd = zastava::bracket_with_derivatives(BracketFamily::Rational, p);
    double worst = 0.0;
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            for (int c = b + 1; c < 6; ++c)
                worst = std::max(worst, std::abs(zastava::jacobiator_residual(bd, {a, b, c})));
    CHECK(worst < 1e-10);
}

TEST_CASE("charts: fo jacobiator vanishes to rounding on A2")
{
    const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = Degree{{2, 2}};
    p.w_free = {{Complex(0.31, 0.07)}, {Complex(0.05, -0.12)}};
    p.sum_constraint = {Complex(0.14, -0.21), Complex(0.47, 0.33)};
    p.ratio = {{Complex(1.3, -0.4)}, {Complex(-0.7, 1.1)}};

    const auto bd = zastava::bracket_with_derivatives(BracketFamily::FoReduced, p, mp);
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c)
                worst = std::max(worst, std::abs(zastava::jacobiator_residual(bd, {a, b, c})));
    // Includes the triple (Y11, Y21, w11).
    CHECK(worst < 1e-9);
}

TEST_CASE("charts: analytic derivative tables agree with finite differences")
{
    const double h = 1e-5;

    SUBCASE("rational family")
    {
        UnreducedChartPoint p;
        p.quiver = zastava::named_quiver("A3");
        p.alpha = Degree{{1, 1, 1}};
        p.w = {{Complex(1.0, 0.2)}, {Complex(0.3, -0.4)}, {Complex(-0.5, 0.1)}};
        p.fiber = {{Complex(2.0, -0.3)}, {Complex(-1.5, 0.6)}, {Complex(0.8, 1.1)}};
        const auto bd = zastava::bracket_with_derivatives(BracketFamily::Rational, p);
        for (int k = 0; k < 6; ++k) {
            const auto plus =
                zastava::rational_bracket_matrix(perturb_unreduced(p, k, Complex(h, 0.0)));
            const auto minus =
                zastava::rational_bracket_matrix(perturb_unreduced(p, k, Complex(-h, 0.0)));
            const Eigen::MatrixXcd fd = (plus.m - minus.m) / (2.0 * h);
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    CHECK(std::abs(fd(a, b) - bd.dpi[k](a, b)) < 1e-6);
        }
    }

    SUBCASE("elliptic family with derived-point chain rule")
    {
        const ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
        ReducedChartPoint p;
        p.quiver = zastava::named_quiver("A2");
        p.alpha = Degree{{3, 2}};
        p.w_free = {{Complex(0.23, 0.08), Complex(-0.31, 0.17)}, {Complex(0.4, -0.22)}};
        p.sum_constraint = {Complex(0.05, 0.4), Complex(-0.2, 0.1)};
        p.ratio = {{Complex(1.2, -0.7), Complex(0.5, 0.9)}, {Complex(-2.0, 0.3)}};
        const auto bd = zastava::bracket_with_derivatives(BracketFamily::FoReduced, p, mp);
        for (int k = 0; k < 6; ++k) {
            const auto plus =
                zastava::fo_reduced_bracket_matrix(perturb_reduced(p, k, Complex(h, 0.0)), mp);
            const auto minus =
                zastava::fo_reduced_bracket_matrix(perturb_reduced(p, k, Complex(-h, 0.0)), mp);
            const Eigen::MatrixXcd fd = (plus.m - minus.m) / (2.0 * h);
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    CHECK(std::abs(fd(a, b) - bd.dpi[k](a, b)) < 1e-6);
        }
    }
}

TEST_CASE("charts: labels and family names")
{
    const Quiver q = zastava::named_quiver("A2");
    CHECK(zastava::chart_labels(BracketFamily::Coulomb, q, Degree{{2, 1}}) ==
          std::vector<std::string>{"w[1,1]", "w[1,2]", "w[2,1]", "z[1,1]", "z[1,2]", "z[2,1]"});
    CHECK(zastava::chart_labels(BracketFamily::FoReduced, q, Degree{{2, 1}}) ==
          std::vector<std::string>{"w[1,1]", "Y[1,1]"});
    CHECK(std::string(zastava::bracket_family_name(BracketFamily::FoReduced)) == "fo_reduced");
    CHECK(std::string(zastava::bracket_family_name(BracketFamily::Rational)) == "rational");
}
