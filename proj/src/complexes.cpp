#include "wb/complexes.hpp"

namespace wb {

FgAbGroup CochainComplex::group(int n) const {
    return in_range(n) ? groups[static_cast<size_t>(n - lo)]
                       : FgAbGroup::zero();
}

FgMorphism CochainComplex::differential(int n) const {
    if (in_range(n) && n < hi()) return deltas[static_cast<size_t>(n - lo)];
    return FgMorphism::zero(group(n), group(n + 1));
}

CochainComplex make_complex(int lo, std::vector<FgAbGroup> groups,
                            std::vector<FgMorphism> deltas) {
    size_t want = groups.empty() ? 0 : groups.size() - 1;
    if (deltas.size() != want)
        throw Error("make_complex: expected " + std::to_string(want) +
                    " differentials, got " + std::to_string(deltas.size()));
    for (size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k].dom == groups[k]) || !(deltas[k].cod == groups[k + 1]))
            throw Error("make_complex: differential at degree " +
                        std::to_string(lo + static_cast<int>(k)) +
                        " does not match the adjacent groups");
    }
    CochainComplex c;
    c.lo = lo;
    c.groups = std::move(groups);
    c.deltas = std::move(deltas);
    return c;
}

CochainComplex shift(const CochainComplex& c, int k) {
    CochainComplex s = c;
    s.lo += k;
    return s;
}

ComplexReport validate(const CochainComplex& c) {
    ComplexReport r;
    if (c.empty()) return r;
    for (int n = c.lo; n + 1 < c.hi(); ++n) {
        if (!compose(c.differential(n + 1), c.differential(n)).is_zero()) {
            r.ok = false;
            r.degree = n;
            r.message = "d(n+1) . d(n) != 0 at degree n = " + std::to_string(n);
            return r;
        }
    }
    return r;
}

Int euler_characteristic(const CochainComplex& c) {
    Int chi = 0;
    for (int n = c.lo; !c.empty() && n <= c.hi(); ++n) {
        Int r(c.group(n).rank);
        chi += (n % 2 == 0) ? r : -r;
    }
    return chi;
}

std::vector<Int> CohomologyData::class_of(const std::vector<Int>& x) const {
    for (const Int& v : delta_.apply(x))
        if (v != 0) throw Error("class_of: the element is not a cocycle");
    auto zc = solve_preimage_fg(j, delta_.dom.reduce(x));
    if (!zc) throw Error("class_of: failed to express a cocycle in Z");
    return p.apply(*zc);
}

CohomologyData cohomology(const CochainComplex& c, int n) {
    CohomologyData out;
    out.n = n;
    FgMorphism dn = c.differential(n);
    FgMorphism dprev = c.differential(n - 1);
    FgMorphism dnext = c.differential(n + 1);

    // Z = ker d(n) with inclusion j.
    FgSubgroupResult zres = kernel_fg(dn);
    out.z = zres.group;
    out.j = zres.map;

    // B = im d(n-1), included in C^n; factor it through Z to get i, and
    // factor d(n-1) through B to get the surjection delta'.
    FgSubgroupResult bres = image_fg(dprev);
    out.b = bres.group;
    {
        IntMatrix im(out.z.ngens(), out.b.ngens());
        for (size_t k = 0; k < out.b.ngens(); ++k) {
            auto pre = solve_preimage_fg(out.j, bres.map.mat.col(k));
            if (!pre)
                throw Error("cohomology: boundaries do not lie in cocycles "
                            "(is the complex valid?)");
            im.set_col(k, *pre);
        }
        out.i = FgMorphism(out.b, out.z, std::move(im));
    }
    {
        IntMatrix dp(out.b.ngens(), dprev.dom.ngens());
        for (size_t k = 0; k < dprev.dom.ngens(); ++k) {
            auto pre = solve_preimage_fg(bres.map, dprev.mat.col(k));
            if (!pre) throw Error("cohomology: image factorization failed");
            dp.set_col(k, *pre);
        }
        out.delta_prime = FgMorphism(dprev.dom, out.b, std::move(dp));
    }

    // H = Z / B via the cokernel of i.
    FgCokernelResult hres = cokernel_fg(out.i);
    out.h = hres.group;
    out.p = hres.map;
    out.reps = out.j.mat * hres.section;

    // q : C^{n+1} ->> C^{n+1} / B^{n+1}.
    FgSubgroupResult bnext = image_fg(dn);
    FgCokernelResult qres = cokernel_fg(bnext.map);
    out.coker_next = qres.group;
    out.q = qres.map;
    out.q_section = qres.section;

    out.delta_ = dn;
    return out;
}

FgMorphism CochainMap::component(int n) const {
    int k = n - lo;
    if (k >= 0 && k < static_cast<int>(comps.size()))
        return comps[static_cast<size_t>(k)];
    return FgMorphism::zero(src.group(n), dst.group(n));
}

CochainMap make_cochain_map(CochainComplex src, CochainComplex dst, int lo,
                            std::vector<FgMorphism> comps) {
    CochainMap f;
    f.src = std::move(src);
    f.dst = std::move(dst);
    f.lo = lo;
    f.comps = std::move(comps);
    for (size_t k = 0; k < f.comps.size(); ++k) {
        int n = lo + static_cast<int>(k);
        if (!(f.comps[k].dom == f.src.group(n)) ||
            !(f.comps[k].cod == f.dst.group(n)))
            throw Error("make_cochain_map: component at degree " +
                        std::to_string(n) + " has wrong domain or codomain");
    }
    int a = f.src.empty() ? 0 : f.src.lo;
    int b = f.src.empty() ? -1 : f.src.hi();
    if (!f.dst.empty()) {
        a = f.src.empty() ? f.dst.lo : std::min(a, f.dst.lo);
        b = f.src.empty() ? f.dst.hi() : std::max(b, f.dst.hi());
    }
    for (int n = a - 1; n <= b; ++n) {
        FgMorphism lhs = compose(f.dst.differential(n), f.component(n));
        FgMorphism rhs = compose(f.component(n + 1), f.src.differential(n));
        if (!lhs.equals(rhs))
            throw Error("make_cochain_map: square at degree " +
                        std::to_string(n) +
                        " does not commute with the differentials");
    }
    return f;
}

CochainMap identity_cochain_map(const CochainComplex& c) {
    std::vector<FgMorphism> comps;
    for (size_t k = 0; k < c.groups.size(); ++k)
        comps.push_back(FgMorphism::identity(c.groups[k]));
    return make_cochain_map(c, c, c.lo, std::move(comps));
}

CochainMap compose(const CochainMap& g, const CochainMap& f) {
    int lo = std::min(f.lo, g.lo);
    int hi = std::max(f.lo + static_cast<int>(f.comps.size()),
                      g.lo + static_cast<int>(g.comps.size()));
    std::vector<FgMorphism> comps;
    for (int n = lo; n < hi; ++n)
        comps.push_back(compose(g.component(n), f.component(n)));
    return make_cochain_map(f.src, g.dst, lo, std::move(comps));
}

FgMorphism induced_on_cohomology(const CochainMap& f,
                                 const CohomologyData& src_h,
                                 const CohomologyData& dst_h) {
    int n = src_h.n;
    FgMorphism fn = f.component(n);
    IntMatrix m(dst_h.h.ngens(), src_h.h.ngens());
    for (size_t k = 0; k < src_h.h.ngens(); ++k)
        m.set_col(k, dst_h.class_of(fn.apply(src_h.reps.col(k))));
    return FgMorphism(src_h.h, dst_h.h, std::move(m));
}

FgMorphism induced_on_cohomology(const CochainMap& f, int n) {
    return induced_on_cohomology(f, cohomology(f.src, n),
                                 cohomology(f.dst, n));
}

const CochainComplex& TowerOfComplexes::complex_at(size_t k) const {
    if (k < prefix.size()) return prefix[k];
    if (tail) return *tail;
    throw Error("tower level out of range");
}

CochainMap TowerOfComplexes::bond(size_t k) const {
    if (k < prefix_maps.size()) return prefix_maps[k];
    if (tail_map) return *tail_map;
    throw Error("tower bonding map out of range");
}

namespace {
bool same_complex(const CochainComplex& a, const CochainComplex& b) {
    if (a.lo != b.lo || a.groups.size() != b.groups.size()) return false;
    for (size_t k = 0; k < a.groups.size(); ++k)
        if (!(a.groups[k] == b.groups[k])) return false;
    for (size_t k = 0; k < a.deltas.size(); ++k)
        if (!a.deltas[k].equals(b.deltas[k])) return false;
    return true;
}
}  // namespace

void validate_tower(const TowerOfComplexes& t) {
    size_t want = t.prefix.empty() ? 0 : t.prefix.size() - 1;
    if (t.tail && !t.prefix.empty()) want = t.prefix.size();
    if (t.prefix_maps.size() != want)
        throw Error("tower: expected " + std::to_string(want) +
                    " prefix bonding maps, got " +
                    std::to_string(t.prefix_maps.size()));
    if (t.tail.has_value() != t.tail_map.has_value())
        throw Error("tower: tail complex and tail self-map must come together");
    for (size_t k = 0; k < t.prefix_maps.size(); ++k) {
        const CochainComplex& s = t.prefix[k];
        const CochainComplex& d =
            (k + 1 < t.prefix.size()) ? t.prefix[k + 1] : *t.tail;
        if (!same_complex(t.prefix_maps[k].src, s) ||
            !same_complex(t.prefix_maps[k].dst, d))
            throw Error("tower: bonding map " + std::to_string(k) +
                        " does not match the adjacent complexes");
    }
    if (t.tail_map &&
        (!same_complex(t.tail_map->src, *t.tail) ||
         !same_complex(t.tail_map->dst, *t.tail)))
        throw Error("tower: tail self-map must go from the tail complex to "
                    "itself");
    if (!t.tail && t.prefix.empty()) throw Error("tower: empty");
}

CochainComplex colimit(const TowerOfComplexes& t) {
    validate_tower(t);
    if (!t.tail) return t.prefix.back();
    const CochainComplex& a = *t.tail;
    for (int n = a.lo; !a.empty() && n <= a.hi(); ++n) {
        if (!is_isomorphism_fg(t.tail_map->component(n)))
            throw NotFinitelyGeneratedColimit(n);
    }
    return a;
}

}  // namespace wb
