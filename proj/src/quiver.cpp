#include "zastava/quiver.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace zastava
{

namespace
{

// Classifies a connected tree given by adjacency lists as an ADE diagram.
// A_n: no vertex of degree >= 3. D/E: exactly one degree-3 vertex whose three
// leg lengths (p <= q <= r) are (1,1,*) for D, (1,2,2|3|4) for E6/E7/E8.
bool is_ade_tree(const std::vector<std::vector<int>>& adj)
{
    const int n = static_cast<int>(adj.size());
    int branch = -1;
    for (int v = 0; v < n; ++v) {
        const std::size_t d = adj[v].size();
        if (d > 3) {
            return false;
        }
        if (d == 3) {
            if (branch >= 0) {
                return false; // two branch points
            }
            branch = v;
        }
    }
    if (branch < 0) {
        return true; // path: type A
    }
    std::vector<int> legs;
    for (const int start : adj[branch]) {
        int len = 1;
        int prev = branch;
        int cur = start;
        while (adj[cur].size() == 2) {
            const int next = (adj[cur][0] == prev) ? adj[cur][1] : adj[cur][0];
            prev = cur;
            cur = next;
            ++len;
        }
        legs.push_back(len);
    }
    std::sort(legs.begin(), legs.end());
    if (legs[0] != 1) {
        return false;
    }
    if (legs[1] == 1) {
        return true; // D_n
    }
    return legs[1] == 2 && legs[2] >= 2 && legs[2] <= 4; // E6, E7, E8
}

} // namespace

int Quiver::index_of(const std::string& id) const
{
    for (int k = 0; k < vertex_count(); ++k) {
        if (vertices[static_cast<std::size_t>(k)] == id) {
            return k;
        }
    }
    throw Error(ErrorCode::UnknownVertex, "vertex '" + id + "' is not in the quiver");
}

bool Quiver::adjacent(int vi, int vj) const
{
    for (const Arrow& h : arrows) {
        if ((h.source == vi && h.target == vj) || (h.source == vj && h.target == vi)) {
            return true;
        }
    }
    return false;
}

Quiver make_quiver(std::vector<std::string> vertices,
                   std::vector<std::pair<std::string, std::string>> arrows, bool permissive)
{
    if (vertices.empty()) {
        throw Error(ErrorCode::ValidationError, "quiver needs at least one vertex");
    }
    {
        std::set<std::string> seen;
        for (const std::string& v : vertices) {
            if (!seen.insert(v).second) {
                throw Error(ErrorCode::ValidationError, "duplicate vertex id '" + v + "'");
            }
        }
    }

    Quiver q;
    q.vertices = std::move(vertices);
    q.permissive = permissive;

    std::set<std::pair<int, int>> undirected;
    for (const auto& [src, dst] : arrows) {
        Arrow h{q.index_of(src), q.index_of(dst)};
        if (h.source == h.target) {
            throw Error(ErrorCode::ValidationError, "loop at vertex '" + src + "' is not allowed");
        }
        const auto key = std::minmax(h.source, h.target);
        if (!undirected.insert({key.first, key.second}).second) {
            throw Error(ErrorCode::ValidationError,
                        "more than one arrow between '" + src + "' and '" + dst + "'");
        }
        q.arrows.push_back(h);
    }

    if (!permissive) {
        const int n = q.vertex_count();
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const Arrow& h : q.arrows) {
            adj[static_cast<std::size_t>(h.source)].push_back(h.target);
            adj[static_cast<std::size_t>(h.target)].push_back(h.source);
        }
        // Connected tree: n-1 edges and everything reachable from vertex 0.
        if (static_cast<int>(q.arrows.size()) != n - 1) {
            throw Error(ErrorCode::ValidationError,
                        "strict mode requires a connected ADE diagram (edge count is not n-1)");
        }
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const int u : adj[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    ++reached;
                    stack.push_back(u);
                }
            }
        }
        if (reached != n) {
            throw Error(ErrorCode::ValidationError, "strict mode requires a connected diagram");
        }
        if (!is_ade_tree(adj)) {
            throw Error(ErrorCode::ValidationError, "strict mode requires an ADE diagram");
        }
    }
    return q;
}

Quiver named_quiver(const std::string& name)
{
    if (name.size() < 2 || name.size() > 2) {
        throw Error(ErrorCode::ValidationError, "unknown quiver name '" + name + "'");
    }
    const char family = name[0];
    const int n = name[1] - '0';

    std::vector<std::pair<int, int>> edges; // undirected {lo, hi} pairs by label
    bool ok = false;
    if (family == 'A' && n >= 1 && n <= 8) {
        ok = true;
        for (int i = 1; i < n; ++i) {
            edges.push_back({i, i + 1});
        }
    } else if (family == 'D' && n >= 4 && n <= 8) {
        ok = true;
        for (int i = 1; i < n - 2; ++i) {
            edges.push_back({i, i + 1});
        }
        edges.push_back({n - 2, n - 1});
        edges.push_back({n - 2, n});
    } else if (family == 'E' && n >= 6 && n <= 8) {
        ok = true;
        edges.push_back({1, 3});
        edges.push_back({2, 4});
        for (int i = 3; i < n; ++i) {
            edges.push_back({i, i + 1});
        }
    }
    if (!ok) {
        throw Error(ErrorCode::ValidationError, "unknown quiver name '" + name + "'");
    }

    std::vector<std::string> vertices;
    for (int i = 1; i <= n; ++i) {
        vertices.push_back(std::to_string(i));
    }
    // Default orientation: higher Bourbaki label -> lower.
    std::vector<std::pair<std::string, std::string>> arrows;
    for (const auto& [lo, hi] : edges) {
        arrows.push_back({std::to_string(std::max(lo, hi)), std::to_string(std::min(lo, hi))});
    }
    return make_quiver(std::move(vertices), std::move(arrows), false);
}

int cartan_pairing(const Quiver& q, int vi, int vj)
{
    const int n = q.vertex_count();
    if (vi < 0 || vi >= n || vj < 0 || vj >= n) {
        throw Error(ErrorCode::UnknownVertex, "vertex index out of range");
    }
    if (vi == vj) {
        return 2;
    }
    return q.adjacent(vi, vj) ? -1 : 0;
}

int cartan_pairing(const Quiver& q, const std::string& i, const std::string& j)
{
    return cartan_pairing(q, q.index_of(i), q.index_of(j));
}

int Degree::total() const
{
    int t = 0;
    for (const int c : counts) {
        t += c;
    }
    return t;
}

bool Degree::admissible() const
{
    if (counts.empty()) {
        return false;
    }
    return std::all_of(counts.begin(), counts.end(), [](int c) { return c >= 1; });
}

void validate_degree(const Quiver& q, const Degree& deg)
{
    if (static_cast<int>(deg.counts.size()) != q.vertex_count()) {
        std::ostringstream out;
        out << "degree has " << deg.counts.size() << " entries for a quiver with "
            << q.vertex_count() << " vertices";
        throw Error(ErrorCode::DegreeMismatch, out.str());
    }
    for (const int c : deg.counts) {
        if (c < 0) {
            throw Error(ErrorCode::ValidationError, "degree entries must be non-negative");
        }
    }
}

bool subdegree_leq(const Degree& sub, const Degree& deg)
{
    if (sub.counts.size() != deg.counts.size()) {
        throw Error(ErrorCode::DegreeMismatch, "comparing degrees over different vertex sets");
    }
    for (std::size_t k = 0; k < sub.counts.size(); ++k) {
        if (sub.counts[k] > deg.counts[k]) {
            return false;
        }
    }
    return true;
}

std::vector<Degree> enumerate_subdegrees(const Degree& alpha)
{
    for (const int a : alpha.counts) {
        if (a < 0) {
            throw Error(ErrorCode::ValidationError, "degree entries must be non-negative");
        }
    }
    std::vector<Degree> out;
    Degree beta;
    beta.counts.assign(alpha.counts.size(), 0);
    while (true) {
        out.push_back(beta);
        // Mixed-radix increment, rightmost digit fastest: ascending lex order.
        int pos = static_cast<int>(alpha.counts.size()) - 1;
        while (pos >= 0) {
            if (beta.counts[static_cast<std::size_t>(pos)]
                < alpha.counts[static_cast<std::size_t>(pos)]) {
                ++beta.counts[static_cast<std::size_t>(pos)];
                break;
            }
            beta.counts[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) {
            return out;
        }
    }
}

} // namespace zastava
