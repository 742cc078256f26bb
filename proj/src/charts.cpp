#include "zastava/charts.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "zastava/error.hpp"

namespace zastava
{

namespace
{

std::string format_complex(Complex z)
{
    std::ostringstream out;
    out.precision(17);
    out << "(" << z.real() << ", " << z.imag() << ")";
    return out.str();
}

// Prefix offsets of per-vertex blocks of the given sizes; returns offsets and total.
std::pair<std::vector<int>, int> block_offsets(const std::vector<int>& sizes)
{
    std::vector<int> offsets(sizes.size(), 0);
    int total = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        offsets[i] = total;
        total += sizes[i];
    }
    return {offsets, total};
}

std::vector<int> free_counts(const Degree& alpha)
{
    std::vector<int> counts = alpha.counts;
    for (int& c : counts)
        c -= 1;
    return counts;
}

void check_fiber_nonzero(const std::vector<std::vector<Complex>>& fiber, const char* kind)
{
    for (std::size_t vi = 0; vi < fiber.size(); ++vi)
        for (std::size_t r = 0; r < fiber[vi].size(); ++r)
            if (fiber[vi][r] == Complex(0.0, 0.0)) {
                std::ostringstream msg;
                msg << kind << " coordinate at vertex index " << vi << ", position " << (r + 1)
                    << " vanishes; chart points require nonzero fibers";
                throw Error(ErrorCode::ValidationError, msg.str());
            }
}

void check_block_shape(const std::vector<std::vector<Complex>>& block,
                       const std::vector<int>& expected, const char* kind)
{
    if (block.size() != expected.size()) {
        std::ostringstream msg;
        msg << kind << " has " << block.size() << " vertex blocks, expected " << expected.size();
        throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    for (std::size_t vi = 0; vi < block.size(); ++vi)
        if (static_cast<int>(block[vi].size()) != expected[vi]) {
            std::ostringstream msg;
            msg << kind << " block at vertex index " << vi << " has " << block[vi].size()
                << " entries, expected " << expected[vi];
            throw Error(ErrorCode::DimensionMismatch, msg.str());
        }
}

void check_delta(double delta)
{
    if (!(delta > 0.0))
        throw Error(ErrorCode::ValidationError, "separation delta must be positive");
}

[[noreturn]] void throw_coincident(const std::string& id_i, int r, const std::string& id_j, int s,
                                   Complex diff, double delta, bool modulo_lattice)
{
    std::ostringstream msg;
    msg << "marked points w[" << id_i << "," << (r + 1) << "] and w[" << id_j << "," << (s + 1)
        << "] are closer than delta = " << delta << (modulo_lattice ? " modulo the lattice" : "")
        << "; difference " << format_complex(diff);
    throw Error(ErrorCode::CoincidentPoints, msg.str());
}

// Cross-color separation of plain differences (rational chart, no lattice).
void check_separation_plain(const Quiver& quiver, const std::vector<std::vector<Complex>>& w,
                            double delta)
{
    const int nv = quiver.vertex_count();
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            for (std::size_t r = 0; r < w[i].size(); ++r)
                for (std::size_t s = 0; s < w[j].size(); ++s) {
                    const Complex diff = w[i][r] - w[j][s];
                    if (std::abs(diff) < delta)
                        throw_coincident(quiver.vertices[i], static_cast<int>(r),
                                         quiver.vertices[j], static_cast<int>(s), diff, delta,
                                         false);
                }
}

// Cross-color separation modulo the lattice (elliptic chart, derived points included).
void check_separation_lattice(const Quiver& quiver, const std::vector<std::vector<Complex>>& w,
                              double delta, const ModularParam& mp)
{
    const int nv = quiver.vertex_count();
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            for (std::size_t r = 0; r < w[i].size(); ++r)
                for (std::size_t s = 0; s < w[j].size(); ++s) {
                    const Complex diff = w[i][r] - w[j][s];
                    if (lattice_distance(diff, mp) < delta)
                        throw_coincident(quiver.vertices[i], static_cast<int>(r),
                                         quiver.vertices[j], static_cast<int>(s), diff, delta,
                                         true);
                }
}

void set_antisymmetric(Eigen::MatrixXcd& m, int a, int b, Complex value)
{
    m(a, b) = value;
    m(b, a) = -value;
}

std::vector<std::string> make_labels(const Quiver& quiver, const std::vector<int>& sizes,
                                     char fiber_symbol)
{
    std::vector<std::string> labels;
    for (std::size_t vi = 0; vi < sizes.size(); ++vi)
        for (int r = 0; r < sizes[vi]; ++r)
            labels.push_back("w[" + quiver.vertices[vi] + "," + std::to_string(r + 1) + "]");
    for (std::size_t vi = 0; vi < sizes.size(); ++vi)
        for (int r = 0; r < sizes[vi]; ++r)
            labels.push_back(std::string(1, fiber_symbol) + "[" + quiver.vertices[vi] + "," +
                             std::to_string(r + 1) + "]");
    return labels;
}

} // namespace

const char* bracket_family_name(BracketFamily family) noexcept
{
    switch (family) {
    case BracketFamily::Rational: return "rational";
    case BracketFamily::Coulomb: return "coulomb";
    case BracketFamily::CoulombReduced: return "coulomb_reduced";
    case BracketFamily::FoReduced: return "fo_reduced";
    }
    return "unknown";
}

Complex ReducedChartPoint::derived_w(int vi) const
{
    Complex sum(0.0, 0.0);
    for (Complex v : w_free[vi])
        sum += v;
    return sum_constraint[vi] - sum;
}

std::vector<Complex> ReducedChartPoint::full_w(int vi) const
{
    std::vector<Complex> out = w_free[vi];
    out.push_back(derived_w(vi));
    return out;
}

void validate_point(const UnreducedChartPoint& p)
{
    validate_degree(p.quiver, p.alpha);
    check_block_shape(p.w, p.alpha.counts, "marked point data");
    check_block_shape(p.fiber, p.alpha.counts, "fiber data");
    check_fiber_nonzero(p.fiber, "fiber");
    check_delta(p.delta);
}

void validate_point(const ReducedChartPoint& p)
{
    validate_degree(p.quiver, p.alpha);
    const std::vector<int> frees = free_counts(p.alpha);
    check_block_shape(p.w_free, frees, "free marked point data");
    check_block_shape(p.ratio, frees, "fiber ratio data");
    if (static_cast<int>(p.sum_constraint.size()) != p.quiver.vertex_count())
        throw Error(ErrorCode::DimensionMismatch,
                    "sum constraint must have one entry per vertex");
    check_fiber_nonzero(p.ratio, "fiber ratio");
    check_delta(p.delta);
}

double antisymmetry_defect(const BracketMatrix& bm)
{
    if (bm.m.rows() == 0)
        return 0.0;
    const double scale = std::max(1.0, bm.m.cwiseAbs().maxCoeff());
    return (bm.m + bm.m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Complex rational_pair_bracket(int pairing, Complex y1, Complex y2, Complex w1, Complex w2)
{
    return static_cast<double>(pairing) * (y1 * y2) / (w1 - w2);
}

std::vector<std::string> chart_labels(BracketFamily family, const Quiver& quiver,
                                      const Degree& alpha)
{
    validate_degree(quiver, alpha);
    switch (family) {
    case BracketFamily::Rational: return make_labels(quiver, alpha.counts, 'y');
    case BracketFamily::Coulomb: return make_labels(quiver, alpha.counts, 'z');
    case BracketFamily::CoulombReduced: return make_labels(quiver, free_counts(alpha), 'Z');
    case BracketFamily::FoReduced: return make_labels(quiver, free_counts(alpha), 'Y');
    }
    throw Error(ErrorCode::ValidationError, "unknown bracket family");
}

BracketMatrix rational_bracket_matrix(const UnreducedChartPoint& p)
{
    validate_point(p);
    check_separation_plain(p.quiver, p.w, p.delta);

    const auto [offsets, total] = block_offsets(p.alpha.counts);
    const int n = 2 * total;
    BracketMatrix bm;
    bm.labels = make_labels(p.quiver, p.alpha.counts, 'y');
    bm.m = Eigen::MatrixXcd::Zero(n, n);

    const int nv = p.quiver.vertex_count();
    // {w_{i,r}, y_{i,r}} = y_{i,r}
    for (int vi = 0; vi < nv; ++vi)
        for (int r = 0; r < p.alpha.counts[vi]; ++r) {
            const int iw = offsets[vi] + r;
            set_antisymmetric(bm.m, iw, total + iw, p.fiber[vi][r]);
        }
    // Cross-color y-y entries, Cartan pairing -1 exactly when adjacent.
    for (int vi = 0; vi < nv; ++vi)
        for (int vj = vi + 1; vj < nv; ++vj) {
            const int pairing = cartan_pairing(p.quiver, vi, vj);
            if (pairing == 0)
                continue;
            for (int r = 0; r < p.alpha.counts[vi]; ++r)
                for (int s = 0; s < p.alpha.counts[vj]; ++s) {
                    const Complex value = rational_pair_bracket(
                        pairing, p.fiber[vi][r], p.fiber[vj][s], p.w[vi][r], p.w[vj][s]);
                    set_antisymmetric(bm.m, total + offsets[vi] + r, total + offsets[vj] + s,
                                      value);
                }
        }
    return bm;
}

BracketMatrix coulomb_bracket_matrix(const UnreducedChartPoint& p)
{
    validate_point(p);

    const auto [offsets, total] = block_offsets(p.alpha.counts);
    const int n = 2 * total;
    BracketMatrix bm;
    bm.labels = make_labels(p.quiver, p.alpha.counts, 'z');
    bm.m = Eigen::MatrixXcd::Zero(n, n);

    for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
        for (int r = 0; r < p.alpha.counts[vi]; ++r) {
            const int iw = offsets[vi] + r;
            // {z_{i,r}, w_{i,r}} = z_{i,r}
            set_antisymmetric(bm.m, total + iw, iw, p.fiber[vi][r]);
        }
    return bm;
}

BracketMatrix coulomb_reduced_bracket_matrix(const ReducedChartPoint& p)
{
    validate_point(p);

    const auto [offsets, total] = block_offsets(free_counts(p.alpha));
    const int n = 2 * total;
    BracketMatrix bm;
    bm.labels = make_labels(p.quiver, free_counts(p.alpha), 'Z');
    bm.m = Eigen::MatrixXcd::Zero(n, n);

    for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
        for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r) {
            const int iw = offsets[vi] + r;
            // {Z_{i,r}, w_{i,r}} = Z_{i,r}
            set_antisymmetric(bm.m, total + iw, iw, p.ratio[vi][r]);
        }
    return bm;
}

namespace
{

// The four zeta arguments of the reduced elliptic entry for free indices (i,r), (j,s):
// x1 = w_{i,r} - w_{j,s},  x2 = w_{i,a_i} - w_{j,s},
// x3 = w_{i,r} - w_{j,a_j}, x4 = w_{i,a_i} - w_{j,a_j}.
struct FourPoint {
    Complex x1, x2, x3, x4;
};

FourPoint four_point(const std::vector<Complex>& wi, const std::vector<Complex>& wj, int r, int s)
{
    const Complex last_i = wi.back();
    const Complex last_j = wj.back();
    return {wi[r] - wj[s], last_i - wj[s], wi[r] - last_j, last_i - last_j};
}

Complex four_term_zeta(const FourPoint& x, const ModularParam& mp)
{
    return weierstrass_zeta(x.x1, mp) - weierstrass_zeta(x.x3, mp) - weierstrass_zeta(x.x2, mp) +
           weierstrass_zeta(x.x4, mp);
}

} // namespace

void require_cross_color_separation(const ReducedChartPoint& p, const ModularParam& mp)
{
    validate_point(p);
    std::vector<std::vector<Complex>> full(p.quiver.vertex_count());
    for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
        full[vi] = p.full_w(vi);
    check_separation_lattice(p.quiver, full, p.delta, mp);
}

BracketMatrix fo_reduced_bracket_matrix(const ReducedChartPoint& p, const ModularParam& mp)
{
    validate_point(p);

    const int nv = p.quiver.vertex_count();
    std::vector<std::vector<Complex>> full(nv);
    for (int vi = 0; vi < nv; ++vi)
        full[vi] = p.full_w(vi);
    check_separation_lattice(p.quiver, full, p.delta, mp);

    const auto [offsets, total] = block_offsets(free_counts(p.alpha));
    const int n = 2 * total;
    BracketMatrix bm;
    bm.labels = make_labels(p.quiver, free_counts(p.alpha), 'Y');
    bm.m = Eigen::MatrixXcd::Zero(n, n);

    for (int vi = 0; vi < nv; ++vi)
        for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r) {
            const int iw = offsets[vi] + r;
            // {Y_{i,r}, w_{i,r}} = Y_{i,r}
            set_antisymmetric(bm.m, total + iw, iw, p.ratio[vi][r]);
        }

    for (int vi = 0; vi < nv; ++vi)
        for (int vj = vi + 1; vj < nv; ++vj) {
            if (!p.quiver.adjacent(vi, vj))
                continue;
            for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r)
                for (int s = 0; s + 1 < p.alpha.counts[vj]; ++s) {
                    const FourPoint x = four_point(full[vi], full[vj], r, s);
                    const Complex value =
                        p.ratio[vi][r] * p.ratio[vj][s] * four_term_zeta(x, mp);
                    set_antisymmetric(bm.m, total + offsets[vi] + r, total + offsets[vj] + s,
                                      value);
                }
        }
    return bm;
}

std::vector<Complex> moment_map(const UnreducedChartPoint& p)
{
    validate_point(p);
    std::vector<Complex> out(p.quiver.vertex_count(), Complex(0.0, 0.0));
    for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
        for (Complex v : p.w[vi])
            out[vi] += v;
    return out;
}

std::vector<Complex> moment_map(const ReducedChartPoint& p)
{
    validate_point(p);
    // The derived point is defined as sum_constraint minus the free sum, so the
    // per-color sum is the stored constraint by construction.
    return p.sum_constraint;
}

BracketWithDerivatives bracket_with_derivatives(BracketFamily family, const UnreducedChartPoint& p)
{
    BracketWithDerivatives bd;
    switch (family) {
    case BracketFamily::Rational: {
        bd.pi = rational_bracket_matrix(p);
        const auto [offsets, total] = block_offsets(p.alpha.counts);
        const int n = 2 * total;
        bd.dpi.assign(n, Eigen::MatrixXcd::Zero(n, n));
        const int nv = p.quiver.vertex_count();
        for (int vi = 0; vi < nv; ++vi)
            for (int r = 0; r < p.alpha.counts[vi]; ++r) {
                const int iw = offsets[vi] + r;
                // d{w,y}/dy = 1
                set_antisymmetric(bd.dpi[total + iw], iw, total + iw, Complex(1.0, 0.0));
            }
        for (int vi = 0; vi < nv; ++vi)
            for (int vj = vi + 1; vj < nv; ++vj) {
                const int pairing = cartan_pairing(p.quiver, vi, vj);
                if (pairing == 0)
                    continue;
                for (int r = 0; r < p.alpha.counts[vi]; ++r)
                    for (int s = 0; s < p.alpha.counts[vj]; ++s) {
                        const int a = total + offsets[vi] + r;
                        const int b = total + offsets[vj] + s;
                        const Complex diff = p.w[vi][r] - p.w[vj][s];
                        const Complex scaled =
                            static_cast<double>(pairing) * (p.fiber[vi][r] * p.fiber[vj][s]);
                        const Complex value = scaled / diff;
                        // d/dw terms carry -1/diff^2 with opposite signs on the
                        // two marked points.
                        set_antisymmetric(bd.dpi[offsets[vi] + r], a, b,
                                          -scaled / (diff * diff));
                        set_antisymmetric(bd.dpi[offsets[vj] + s], a, b,
                                          scaled / (diff * diff));
                        // d/dy terms divide out one fiber factor.
                        set_antisymmetric(bd.dpi[a], a, b, value / p.fiber[vi][r]);
                        set_antisymmetric(bd.dpi[b], a, b, value / p.fiber[vj][s]);
                    }
            }
        return bd;
    }
    case BracketFamily::Coulomb: {
        bd.pi = coulomb_bracket_matrix(p);
        const auto [offsets, total] = block_offsets(p.alpha.counts);
        const int n = 2 * total;
        bd.dpi.assign(n, Eigen::MatrixXcd::Zero(n, n));
        for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
            for (int r = 0; r < p.alpha.counts[vi]; ++r) {
                const int iw = offsets[vi] + r;
                set_antisymmetric(bd.dpi[total + iw], total + iw, iw, Complex(1.0, 0.0));
            }
        return bd;
    }
    default:
        throw Error(ErrorCode::ValidationError,
                    std::string("bracket family ") + bracket_family_name(family) +
                        " is not defined on an unreduced chart");
    }
}

BracketWithDerivatives bracket_with_derivatives(BracketFamily family, const ReducedChartPoint& p,
                                                const ModularParam& mp)
{
    BracketWithDerivatives bd;
    switch (family) {
    case BracketFamily::CoulombReduced: {
        bd.pi = coulomb_reduced_bracket_matrix(p);
        const auto [offsets, total] = block_offsets(free_counts(p.alpha));
        const int n = 2 * total;
        bd.dpi.assign(n, Eigen::MatrixXcd::Zero(n, n));
        for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
            for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r) {
                const int iw = offsets[vi] + r;
                set_antisymmetric(bd.dpi[total + iw], total + iw, iw, Complex(1.0, 0.0));
            }
        return bd;
    }
    case BracketFamily::FoReduced: {
        bd.pi = fo_reduced_bracket_matrix(p, mp);
        const int nv = p.quiver.vertex_count();
        std::vector<std::vector<Complex>> full(nv);
        for (int vi = 0; vi < nv; ++vi)
            full[vi] = p.full_w(vi);

        const auto [offsets, total] = block_offsets(free_counts(p.alpha));
        const int n = 2 * total;
        bd.dpi.assign(n, Eigen::MatrixXcd::Zero(n, n));

        for (int vi = 0; vi < nv; ++vi)
            for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r) {
                const int iw = offsets[vi] + r;
                set_antisymmetric(bd.dpi[total + iw], total + iw, iw, Complex(1.0, 0.0));
            }

        for (int vi = 0; vi < nv; ++vi)
            for (int vj = vi + 1; vj < nv; ++vj) {
                if (!p.quiver.adjacent(vi, vj))
                    continue;
                for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r)
                    for (int s = 0; s + 1 < p.alpha.counts[vj]; ++s) {
                        const int a = total + offsets[vi] + r;
                        const int b = total + offsets[vj] + s;
                        const FourPoint x = four_point(full[vi], full[vj], r, s);
                        const Complex combo = four_term_zeta(x, mp);
                        const Complex yy = p.ratio[vi][r] * p.ratio[vj][s];

                        set_antisymmetric(bd.dpi[a], a, b, p.ratio[vj][s] * combo);
                        set_antisymmetric(bd.dpi[b], a, b, p.ratio[vi][r] * combo);

                        // zeta' = -p; the derived points contribute through the
                        // chain rule d w_{i,a_i} / d w_{i,t} = -1 for every free t.
                        const Complex p1 = weierstrass_p(x.x1, mp);
                        const Complex p2 = weierstrass_p(x.x2, mp);
                        const Complex p3 = weierstrass_p(x.x3, mp);
                        const Complex p4 = weierstrass_p(x.x4, mp);
                        for (int t = 0; t + 1 < p.alpha.counts[vi]; ++t) {
                            Complex d = p4 - p2;
                            if (t == r)
                                d += p3 - p1;
                            set_antisymmetric(bd.dpi[offsets[vi] + t], a, b, yy * d);
                        }
                        for (int t = 0; t + 1 < p.alpha.counts[vj]; ++t) {
                            Complex d = p3 - p4;
                            if (t == s)
                                d += p1 - p2;
                            set_antisymmetric(bd.dpi[offsets[vj] + t], a, b, yy * d);
                        }
                    }
            }
        return bd;
    }
    default:
        throw Error(ErrorCode::ValidationError,
                    std::string("bracket family ") + bracket_family_name(family) +
                        " is not defined on a reduced chart");
    }
}

Complex jacobiator_residual(const BracketWithDerivatives& bd, const std::array<int, 3>& triple)
{
    const int n = static_cast<int>(bd.pi.m.rows());
    const int a = triple[0];
    const int b = triple[1];
    const int c = triple[2];
    if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n)
        throw Error(ErrorCode::DimensionMismatch, "jacobiator triple index out of range");
    Complex sum(0.0, 0.0);
    for (int d = 0; d < n; ++d)
        sum += bd.pi.m(a, d) * bd.dpi[d](b, c) + bd.pi.m(b, d) * bd.dpi[d](c, a) +
               bd.pi.m(c, d) * bd.dpi[d](a, b);
    return sum;
}

Complex jacobiator_residual(BracketFamily family, const UnreducedChartPoint& p,
                            const std::array<int, 3>& triple)
{
    return jacobiator_residual(bracket_with_derivatives(family, p), triple);
}

Complex jacobiator_residual(BracketFamily family, const ReducedChartPoint& p,
                            const ModularParam& mp, const std::array<int, 3>& triple)
{
    return jacobiator_residual(bracket_with_derivatives(family, p, mp), triple);
}

} // namespace zastava
