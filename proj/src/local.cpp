#include "zastava/local.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zastava/charts.hpp"
#include "zastava/error.hpp"

namespace zastava
{

namespace
{

void check_degree_shapes(const Degree& a, const Degree& b, const char* op)
{
    if (a.counts.size() != b.counts.size()) {
        std::ostringstream msg;
        msg << op << ": degree vectors have different lengths (" << a.counts.size() << " vs "
            << b.counts.size() << ")";
        throw Error(ErrorCode::DegreeMismatch, msg.str());
    }
    for (int v : a.counts)
        if (v < 0)
            throw Error(ErrorCode::DegreeMismatch, std::string(op) + ": negative degree entry");
    for (int v : b.counts)
        if (v < 0)
            throw Error(ErrorCode::DegreeMismatch, std::string(op) + ": negative degree entry");
}

void check_quiver_degree(const Quiver& quiver, const Degree& d, const char* op)
{
    if (static_cast<int>(d.counts.size()) != quiver.vertex_count()) {
        std::ostringstream msg;
        msg << op << ": degree length " << d.counts.size() << " does not match "
            << quiver.vertex_count() << " vertices";
        throw Error(ErrorCode::DegreeMismatch, msg.str());
    }
    for (int v : d.counts)
        if (v < 0)
            throw Error(ErrorCode::DegreeMismatch, std::string(op) + ": negative degree entry");
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        throw Error(ErrorCode::DegreeOverflow, "rank product overflows 64 bits");
    return out;
}

// Exact C(n, k) in 64 bits; multiply-then-divide stays integral at each step.
std::uint64_t binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int j = 1; j <= k; ++j) {
        result = checked_mul(result, static_cast<std::uint64_t>(n - k + j));
        result /= static_cast<std::uint64_t>(j);
    }
    return result;
}

} // namespace

std::vector<PointCluster> cluster_configuration(const Configuration& config)
{
    check_quiver_degree(config.quiver, config.alpha, "cluster_configuration");
    if (static_cast<int>(config.points.size()) != config.quiver.vertex_count())
        throw Error(ErrorCode::DimensionMismatch,
                    "cluster_configuration: one point block per vertex required");
    for (int vi = 0; vi < config.quiver.vertex_count(); ++vi)
        if (static_cast<int>(config.points[vi].size()) != config.alpha.counts[vi])
            throw Error(ErrorCode::DimensionMismatch,
                        "cluster_configuration: point block size does not match the degree");
    if (!(config.delta > 0.0))
        throw Error(ErrorCode::ValidationError, "clustering threshold must be positive");

    std::vector<std::pair<int, int>> flat;
    std::vector<Complex> values;
    for (int vi = 0; vi < config.quiver.vertex_count(); ++vi)
        for (int r = 0; r < config.alpha.counts[vi]; ++r) {
            flat.emplace_back(vi, r);
            values.push_back(config.points[vi][r]);
        }

    // Union-find gives the transitive closure of the within-delta relation.
    std::vector<int> parent(flat.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t a = 0; a < flat.size(); ++a)
        for (std::size_t b = a + 1; b < flat.size(); ++b)
            if (std::abs(values[a] - values[b]) < config.delta)
                parent[find(static_cast<int>(b))] = find(static_cast<int>(a));

    std::vector<PointCluster> clusters;
    std::vector<int> cluster_of(flat.size(), -1);
    for (std::size_t k = 0; k < flat.size(); ++k) {
        const int root = find(static_cast<int>(k));
        if (cluster_of[root] < 0) {
            cluster_of[root] = static_cast<int>(clusters.size());
            clusters.push_back({});
        }
        PointCluster& cl = clusters[cluster_of[root]];
        cl.members.push_back(flat[k]);
        cl.centroid += values[k];
    }
    for (PointCluster& cl : clusters)
        cl.centroid /= static_cast<double>(cl.members.size());
    return clusters;
}

std::uint64_t mirkovic_summand_rank(const Degree& alpha, const Degree& beta)
{
    check_degree_shapes(alpha, beta, "mirkovic_summand_rank");
    for (std::size_t i = 0; i < alpha.counts.size(); ++i)
        if (beta.counts[i] > alpha.counts[i]) {
            std::ostringstream msg;
            msg << "mirkovic_summand_rank: beta exceeds alpha at vertex position " << i;
            throw Error(ErrorCode::DegreeOverflow, msg.str());
        }
    std::uint64_t rank = 1;
    for (std::size_t i = 0; i < alpha.counts.size(); ++i)
        rank = checked_mul(rank, binomial(alpha.counts[i], beta.counts[i]));
    return rank;
}

std::uint64_t mirkovic_total_rank(const Degree& alpha)
{
    std::uint64_t total = 0;
    for (const Degree& beta : enumerate_subdegrees(alpha)) {
        const std::uint64_t rank = mirkovic_summand_rank(alpha, beta);
        if (total > UINT64_MAX - rank)
            throw Error(ErrorCode::DegreeOverflow, "total rank overflows 64 bits");
        total += rank;
    }
    return total;
}

long coulomb_twist_degree(const Quiver& quiver, const Degree& beta, const Degree& gamma)
{
    check_quiver_degree(quiver, beta, "coulomb_twist_degree");
    check_quiver_degree(quiver, gamma, "coulomb_twist_degree");
    long degree = 0;
    for (const Arrow& h : quiver.arrows)
        degree += static_cast<long>(beta.counts[h.source]) * gamma.counts[h.target];
    return degree;
}

long mirkovic_twist_degree(const Quiver& quiver, const Degree& beta, const Degree& gamma)
{
    check_quiver_degree(quiver, beta, "mirkovic_twist_degree");
    check_quiver_degree(quiver, gamma, "mirkovic_twist_degree");
    long degree = 0;
    for (std::size_t i = 0; i < beta.counts.size(); ++i) {
        const long b = beta.counts[i];
        degree += b * (b - 1) + b * static_cast<long>(gamma.counts[i]);
    }
    for (const Arrow& h : quiver.arrows)
        degree -= static_cast<long>(beta.counts[h.source]) * beta.counts[h.target];
    return degree;
}

SegreVector segre_embed(const std::vector<Complex>& values)
{
    const int n = static_cast<int>(values.size());
    if (n > 24)
        throw Error(ErrorCode::DegreeOverflow,
                    "segre_embed: refusing to build more than 2^24 subset entries");
    SegreVector v;
    v.count = n;
    v.entries.assign(std::size_t(1) << n, Complex(0.0, 0.0));
    v.entries[0] = Complex(1.0, 0.0);
    for (std::size_t mask = 1; mask < v.entries.size(); ++mask) {
        // Peel the highest set bit so entry(mask) is the ascending-order product.
        const int high = 63 - __builtin_clzll(mask);
        v.entries[mask] = v.entries[mask ^ (std::size_t(1) << high)] * values[high];
    }
    return v;
}

double segre_residual(const SegreVector& v)
{
    if (v.count < 0 || v.entries.size() != (std::size_t(1) << v.count))
        throw Error(ErrorCode::DimensionMismatch,
                    "segre_residual: entry count must be 2^count");
    if (v.entries.empty() || v.entries[0] != Complex(1.0, 0.0))
        throw Error(ErrorCode::ValidationError,
                    "segre_residual: the empty-subset entry must be 1");

    double worst = 0.0;
    const std::size_t size = v.entries.size();
    for (std::size_t mask = 0; mask < size; ++mask) {
        // Multiplicativity against the singleton entries, ascending order.
        Complex prod(1.0, 0.0);
        for (int k = 0; k < v.count; ++k)
            if (mask & (std::size_t(1) << k))
                prod *= v.entries[std::size_t(1) << k];
        worst = std::max(worst, std::abs(v.entries[mask] - prod));
        // 2x2 exchange relations on top of this subset.
        for (int a = 0; a < v.count; ++a) {
            if (mask & (std::size_t(1) << a))
                continue;
            for (int b = a + 1; b < v.count; ++b) {
                if (mask & (std::size_t(1) << b))
                    continue;
                const std::size_t ma = mask | (std::size_t(1) << a);
                const std::size_t mb = mask | (std::size_t(1) << b);
                const std::size_t mab = ma | mb;
                worst = std::max(worst, std::abs(v.entries[ma] * v.entries[mb] -
                                                 v.entries[mask] * v.entries[mab]));
            }
        }
    }
    return worst;
}

namespace
{

// Division via the textbook conjugate formula; unlike the library's scaled
// algorithm it maps bitwise-equal operands to exactly 1 + 0i, which is what the
// regularity certificate reports.
Complex conjugate_div(Complex a, Complex b)
{
    const double den = b.real() * b.real() + b.imag() * b.imag();
    return Complex((a.real() * b.real() + a.imag() * b.imag()) / den,
                   (a.imag() * b.real() - a.real() * b.imag()) / den);
}

} // namespace

A2LocalModel a2_local_model(Complex w1, Complex w2, Complex y_i, Complex y_j, double delta)
{
    if (y_i == Complex(0.0, 0.0) || y_j == Complex(0.0, 0.0))
        throw Error(ErrorCode::ValidationError, "a2_local_model: fiber coordinates must be nonzero");
    const Complex diff = w1 - w2;
    if (diff == Complex(0.0, 0.0))
        throw Error(ErrorCode::DiagonalPoint, "a2_local_model: marked points coincide exactly");

    const Complex product = y_i * y_j;
    if (std::abs(diff) < delta) {
        // Refuse only when the chart solve would leave double range.
        const double log_mag = std::log(std::abs(product)) - std::log(std::abs(diff));
        if (log_mag > 700.0)
            throw Error(ErrorCode::DiagonalPoint,
                        "a2_local_model: chart coordinate overflows near the diagonal");
    }

    A2LocalModel out;
    out.y_ij = product / diff;
    // {y_i, y_j} for adjacent simply laced colors, pairing -1; the same kernel
    // the bracket matrices use, so the certificate reflects the library values.
    const Complex bracket = rational_pair_bracket(-1, y_i, y_j, w1, w2);
    const Complex extension = -1.0 * out.y_ij;
    out.bracket_regularity = conjugate_div(bracket, extension);
    return out;
}

} // namespace zastava
