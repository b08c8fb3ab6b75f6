#include "wb/simplicial.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace wb {

namespace {

std::string tuple_str(const std::vector<int>& s) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

}  // namespace

int SimplicialComplex::index_of(const std::vector<int>& s) const {
    int d = static_cast<int>(s.size()) - 1;
    if (d < 0 || d > dim()) return -1;
    const auto& list = simplices[static_cast<size_t>(d)];
    auto it = std::lower_bound(list.begin(), list.end(), s);
    if (it == list.end() || *it != s) return -1;
    return static_cast<int>(it - list.begin());
}

Int SimplicialComplex::euler() const {
    Int chi = 0;
    for (int d = 0; d <= dim(); ++d) {
        Int c = static_cast<long>(count(d));
        chi += (d % 2 == 0) ? c : -c;
    }
    return chi;
}

SimplicialComplex make_simplicial(size_t nvertices,
                                  std::vector<std::vector<int>> facets) {
    std::set<std::vector<int>> seen;
    for (auto& f : facets) {
        if (f.empty()) throw Error("simplicial: empty facet");
        std::sort(f.begin(), f.end());
        for (size_t i = 0; i < f.size(); ++i) {
            if (f[i] < 0 || static_cast<size_t>(f[i]) >= nvertices)
                throw Error("simplicial: vertex out of range in facet " +
                            tuple_str(f));
            if (i && f[i] == f[i - 1])
                throw Error("simplicial: repeated vertex in facet " +
                            tuple_str(f));
        }
        seen.insert(f);
    }
    SimplicialComplex k;
    k.nvertices = nvertices;
    k.facets.assign(seen.begin(), seen.end());

    // Closure: every nonempty subset of every facet.
    std::vector<std::set<std::vector<int>>> by_dim;
    for (const auto& f : k.facets) {
        size_t n = f.size();
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<int> s;
            for (size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) s.push_back(f[i]);
            size_t d = s.size() - 1;
            if (by_dim.size() <= d) by_dim.resize(d + 1);
            by_dim[d].insert(std::move(s));
        }
    }
    for (auto& level : by_dim)
        k.simplices.emplace_back(level.begin(), level.end());
    return k;
}

bool is_subcomplex(const SimplicialComplex& k, const SimplicialComplex& l) {
    if (l.nvertices > k.nvertices) return false;
    for (int d = 0; d <= l.dim(); ++d)
        for (const auto& s : l.simplices[static_cast<size_t>(d)])
            if (!k.has_simplex(s)) return false;
    return true;
}

namespace {

// Signed incidence matrix of the coboundary C^d -> C^{d+1}: for each
// (d+1)-simplex t, the face dropping vertex position i contributes (-1)^i.
FgMorphism coboundary(const SimplicialComplex& k, int d) {
    FgAbGroup dom = FgAbGroup::free(static_cast<int>(k.count(d)));
    FgAbGroup cod = FgAbGroup::free(static_cast<int>(k.count(d + 1)));
    IntMatrix m(cod.ngens(), dom.ngens());
    const auto& tops = k.simplices[static_cast<size_t>(d + 1)];
    for (size_t r = 0; r < tops.size(); ++r) {
        const auto& t = tops[r];
        std::vector<int> face(t.size() - 1);
        for (size_t i = 0; i < t.size(); ++i) {
            size_t w = 0;
            for (size_t j = 0; j < t.size(); ++j)
                if (j != i) face[w++] = t[j];
            int c = k.index_of(face);
            m(static_cast<int>(r), c) += (i % 2 == 0) ? 1 : -1;
        }
    }
    return FgMorphism(dom, cod, m);
}

}  // namespace

CochainComplex cochain_of(const SimplicialComplex& k) {
    std::vector<FgAbGroup> groups;
    std::vector<FgMorphism> deltas;
    for (int d = 0; d <= k.dim(); ++d) {
        groups.push_back(FgAbGroup::free(static_cast<int>(k.count(d))));
        if (d < k.dim()) deltas.push_back(coboundary(k, d));
    }
    if (groups.empty()) groups.push_back(FgAbGroup::zero());
    CochainComplex c = make_complex(0, std::move(groups), std::move(deltas));
    ComplexReport rep = validate(c);
    if (!rep.ok) throw Error("simplicial cochains: " + rep.message);
    return c;
}

CochainComplex cochain_of_pair(const SimplicialComplex& k,
                               const SimplicialComplex& l) {
    if (!is_subcomplex(k, l))
        throw InvalidSubcomplex(
            "cochain_of_pair: second complex is not a subcomplex of the "
            "first");
    // Relative cochains are the kernel of the restriction: free on the
    // simplices of k outside l, with the corresponding incidence submatrix.
    std::vector<std::vector<int>> keep;  // keep[d]: kept column indices
    for (int d = 0; d <= k.dim(); ++d) {
        std::vector<int> cols;
        const auto& list = k.simplices[static_cast<size_t>(d)];
        for (size_t i = 0; i < list.size(); ++i)
            if (!l.has_simplex(list[i])) cols.push_back(static_cast<int>(i));
        keep.push_back(std::move(cols));
    }
    std::vector<FgAbGroup> groups;
    std::vector<FgMorphism> deltas;
    for (int d = 0; d <= k.dim(); ++d) {
        groups.push_back(
            FgAbGroup::free(static_cast<int>(keep[static_cast<size_t>(d)].size())));
        if (d == k.dim()) break;
        FgMorphism full = coboundary(k, d);
        const auto& rows = keep[static_cast<size_t>(d) + 1];
        const auto& cols = keep[static_cast<size_t>(d)];
        IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < cols.size(); ++c)
                m(static_cast<int>(r), static_cast<int>(c)) =
                    full.mat(rows[r], cols[c]);
        deltas.emplace_back(groups[static_cast<size_t>(d)],
                            FgAbGroup::free(static_cast<int>(rows.size())), m);
    }
    // Codomain of the last delta was built before its group entry; fix shape
    // by rebuilding via make_complex, which checks it.
    if (groups.empty()) groups.push_back(FgAbGroup::zero());
    CochainComplex c = make_complex(0, std::move(groups), std::move(deltas));
    ComplexReport rep = validate(c);
    if (!rep.ok) throw Error("relative cochains: " + rep.message);
    return c;
}

CochainMap cochain_map_of(const SimplicialMap& f) {
    if (f.vertex_map.size() != f.src.nvertices)
        throw NotSimplicial("vertex assignment has wrong length");
    for (int v : f.vertex_map)
        if (v < 0 || static_cast<size_t>(v) >= f.dst.nvertices)
            throw NotSimplicial("vertex assignment out of range");
    // Every simplex must land on a simplex of the target.
    for (int d = 0; d <= f.src.dim(); ++d)
        for (const auto& s : f.src.simplices[static_cast<size_t>(d)]) {
            std::set<int> img;
            for (int v : s) img.insert(f.vertex_map[static_cast<size_t>(v)]);
            std::vector<int> t(img.begin(), img.end());
            if (!f.dst.has_simplex(t))
                throw NotSimplicial("image of simplex " + tuple_str(s) +
                                    " is not a simplex of the target");
        }

    CochainComplex cs = cochain_of(f.src);
    CochainComplex cd = cochain_of(f.dst);
    std::vector<FgMorphism> comps;
    for (int d = 0; d <= f.src.dim(); ++d) {
        FgAbGroup dom = cd.group(d);
        FgAbGroup cod = cs.group(d);
        IntMatrix m(cod.ngens(), dom.ngens());
        const auto& list = f.src.simplices[static_cast<size_t>(d)];
        for (size_t r = 0; r < list.size(); ++r) {
            std::vector<int> img;
            for (int v : list[r]) img.push_back(f.vertex_map[static_cast<size_t>(v)]);
            // Degenerate images contribute zero.
            std::set<int> dist(img.begin(), img.end());
            if (dist.size() != img.size()) continue;
            // Sign of the permutation sorting the image tuple.
            int sign = 1;
            std::vector<int> w = img;
            for (size_t i = 0; i + 1 < w.size(); ++i)
                for (size_t j = 0; j + 1 < w.size() - i; ++j)
                    if (w[j] > w[j + 1]) {
                        std::swap(w[j], w[j + 1]);
                        sign = -sign;
                    }
            int c = f.dst.index_of(w);
            m(static_cast<int>(r), c) += sign;
        }
        comps.emplace_back(dom, cod, m);
    }
    return make_cochain_map(cd, cs, 0, std::move(comps));
}

SimplicialComplex simplicial_point() { return make_simplicial(1, {{0}}); }

SimplicialComplex simplicial_circle(int n) {
    if (n < 3) throw Error("simplicial_circle: need at least 3 vertices");
    std::vector<std::vector<int>> facets;
    for (int i = 0; i < n; ++i) facets.push_back({i, (i + 1) % n});
    return make_simplicial(static_cast<size_t>(n), std::move(facets));
}

SimplicialComplex simplicial_disk() { return make_simplicial(3, {{0, 1, 2}}); }

SimplicialComplex simplicial_projective_plane() {
    return make_simplicial(6, {{0, 1, 4},
                               {0, 1, 5},
                               {0, 2, 3},
                               {0, 2, 5},
                               {0, 3, 4},
                               {1, 2, 3},
                               {1, 2, 4},
                               {1, 3, 5},
                               {2, 4, 5},
                               {3, 4, 5}});
}

}  // namespace wb
