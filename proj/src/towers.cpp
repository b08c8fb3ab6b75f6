#include "wb/towers.hpp"

#include <boost/multiprecision/miller_rabin.hpp>
#include <algorithm>
#include <cstdlib>

namespace wb {

namespace {

FgMorphism fg_power(const FgMorphism& m, int k) {
    if (m.dom.ngens() != m.cod.ngens() || !(m.dom == m.cod))
        throw Error("fg_power: not an endomorphism");
    FgMorphism r = FgMorphism::identity(m.dom);
    for (int i = 0; i < k; ++i) r = compose(m, r);
    return r;
}

QZMorphism qz_power(const QZMorphism& m, int k) {
    if (!(m.dom == m.cod)) throw Error("qz_power: not an endomorphism");
    QZMorphism r = QZMorphism::identity(m.dom);
    for (int i = 0; i < k; ++i) r = compose(m, r);
    return r;
}

// Does every column of `gens` (elements of a.cod... of `amb`) lie in the
// image of f?  Columns are read as elements of f.cod.
bool columns_in_image(const FgMorphism& f, const IntMatrix& gens) {
    for (size_t j = 0; j < gens.cols(); ++j)
        if (!solve_preimage_fg(f, f.cod.reduce(gens.col(j)))) return false;
    return true;
}

bool image_contained(const FgMorphism& small, const FgMorphism& big) {
    return columns_in_image(big, small.mat);
}

// Restriction of the endomorphism m to the subgroup given by the inclusion
// incl : S -> A; requires m(S) <= S.
FgMorphism restrict_endo(const FgMorphism& incl, const FgMorphism& m) {
    const FgAbGroup& s = incl.dom;
    IntMatrix mat(s.ngens(), s.ngens());
    for (size_t j = 0; j < s.ngens(); ++j) {
        std::vector<Int> v = m.apply(incl.mat.col(j));
        auto pre = solve_preimage_fg(incl, v);
        if (!pre) throw Error("restrict_endo: subgroup not invariant");
        mat.set_col(j, *pre);
    }
    return FgMorphism(s, s, std::move(mat));
}

// The torsion part of a canonical-form group, with its inclusion.
FgMorphism torsion_inclusion(const FgAbGroup& a) {
    FgAbGroup t(0, a.torsion);
    IntMatrix mat(a.ngens(), t.ngens());
    for (size_t j = 0; j < t.ngens(); ++j) mat(a.rank + j, j) = 1;
    return FgMorphism(t, a, std::move(mat));
}

// Torsion-by-torsion block of an endomorphism of a canonical-form group
// (images of torsion generators have zero free coordinates).
FgMorphism torsion_block(const FgMorphism& m) {
    const FgAbGroup& a = m.dom;
    FgAbGroup t(0, a.torsion);
    IntMatrix mat(t.ngens(), t.ngens());
    for (size_t j = 0; j < t.ngens(); ++j)
        for (size_t i = 0; i < t.ngens(); ++i)
            mat(i, j) = m.mat(a.rank + i, a.rank + j);
    return FgMorphism(t, t, std::move(mat));
}

// Free-by-free block, as an endomorphism of Z^rank (the induced map on the
// quotient by the torsion part).
FgMorphism free_block(const FgMorphism& m) {
    const FgAbGroup& a = m.dom;
    FgAbGroup f = FgAbGroup::free(a.rank);
    IntMatrix mat(a.rank, a.rank);
    for (size_t j = 0; j < a.rank; ++j)
        for (size_t i = 0; i < a.rank; ++i) mat(i, j) = m.mat(i, j);
    return FgMorphism(f, f, std::move(mat));
}

// Image-chain stabilization bound: rank + bits of the torsion order + slack.
// Strict descents in the torsion part are bounded by the bit length of the
// torsion order; rank descents by the rank; one extra comparison closes the
// free part when its per-step index is 1.
int stabilization_bound(const FgAbGroup& a) {
    Int tor = 1;
    for (const Int& d : a.torsion) tor *= d;
    int bits = 0;
    while (tor > 1) {
        tor >>= 1;
        ++bits;
    }
    return static_cast<int>(a.rank) + bits + 2;
}

std::vector<Int> prime_factors(Int q) {
    std::vector<Int> ps;
    for (Int p = 2; p * p <= q && p < 1000000; ++p) {
        if (q % p == 0) {
            ps.push_back(p);
            while (q % p == 0) q /= p;
        }
    }
    if (q > 1) {
        if (boost::multiprecision::miller_rabin_test(q, 32)) ps.push_back(q);
        // a large composite remainder simply yields fewer candidates
    }
    return ps;
}

bool nilpotent_mod_p(const IntMatrix& m, const Int& p) {
    size_t n = m.rows();
    IntMatrix acc = m;
    auto reduce = [&](IntMatrix& x) {
        for (size_t i = 0; i < x.rows(); ++i)
            for (size_t j = 0; j < x.cols(); ++j) {
                x(i, j) %= p;
                if (x(i, j) < 0) x(i, j) += p;
            }
    };
    reduce(acc);
    for (size_t k = 1; k < n; ++k) {
        if (acc.is_zero()) return true;
        acc = acc * m;
        reduce(acc);
    }
    return acc.is_zero();
}

// Analysis of the periodic tail (A, m): either the image chain im(m^k)
// stabilizes within the bound, or the stable free part strictly descends
// with a constant index > 1.
struct TailAnalysis {
    bool stabilized = false;
    int depth = 0;               // stabilization depth, or the bound
    FgSubgroupResult stable;     // im(m^depth) when stabilized
    FgMorphism m_on_stable;      // restriction (an automorphism)
    // non-stabilized data
    Int index_factor = 0;        // per-step index on the stable free part
    FgMorphism free_stable_incl; // L -> Z^rank
    FgMorphism m_on_free_stable; // endomorphism of L
};

TailAnalysis analyze_tail(const FgAbGroup& a, const FgMorphism& m) {
    TailAnalysis r;
    int bound = stabilization_bound(a);
    FgMorphism mk = FgMorphism::identity(a);
    for (int k = 0; k <= bound; ++k) {
        FgMorphism mk1 = compose(m, mk);
        if (image_contained(mk, mk1)) {
            r.stabilized = true;
            r.depth = k;
            r.stable = image_fg(mk);
            r.m_on_stable = restrict_endo(r.stable.map, m);
            if (!is_isomorphism_fg(r.m_on_stable))
                throw Error("analyze_tail: stable restriction must be an "
                            "automorphism");
            return r;
        }
        mk = mk1;
    }
    // Rank and torsion parts have both settled by now; the free part must be
    // descending with a constant index |det| > 1.
    r.depth = bound;
    FgMorphism mbar = free_block(m);
    FgSubgroupResult lat = image_fg(fg_power(mbar, static_cast<int>(a.rank)));
    r.free_stable_incl = lat.map;
    r.m_on_free_stable = restrict_endo(lat.map, mbar);
    auto ord = cokernel_fg(r.m_on_free_stable).group.order();
    if (!ord || *ord <= 1)
        throw Error("analyze_tail: non-stabilized chain with unit index");
    r.index_factor = *ord;
    return r;
}

int effective_depth(int stored, int param) {
    if (param > 0) return param;
    if (stored > 0) return stored;
    return default_truncation_depth();
}

FgMorphism add_fg(const FgMorphism& f, const FgMorphism& g) {
    return FgMorphism(f.dom, f.cod, f.mat + g.mat);
}

}  // namespace

int default_truncation_depth() {
    if (const char* s = std::getenv("WORKBENCH_TRUNCATE")) {
        int d = std::atoi(s);
        if (d >= 1) return d;
    }
    return 6;
}

FgAbGroup TowerOfGroups::at(size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (tail) return *tail;
    throw Error("tower: index beyond a finite tower");
}

FgMorphism TowerOfGroups::bond(size_t i) const {
    if (i + 1 <= prefix_maps.size() && i + 1 <= prefix.size())
        return prefix_maps[i];
    if (tail && tail_map) return *tail_map;
    throw Error("tower: bond index out of range");
}

FgMorphism TowerOfGroups::bond_down(size_t j, size_t i) const {
    if (i > j) throw Error("tower: bond_down needs i <= j");
    FgMorphism r = FgMorphism::identity(at(j));
    for (size_t k = j; k-- > i;) r = compose(bond(k), r);
    return r;
}

TowerOfGroups TowerOfGroups::constant(const FgAbGroup& g) {
    TowerOfGroups t;
    t.prefix = {g};
    t.prefix_maps = {FgMorphism::identity(g)};
    t.tail = g;
    t.tail_map = FgMorphism::identity(g);
    return t;
}

TowerOfGroups TowerOfGroups::periodic(const FgAbGroup& g,
                                      const FgMorphism& m) {
    if (!(m.dom == g) || !(m.cod == g))
        throw Error("tower: periodic tail map must be an endomorphism");
    TowerOfGroups t;
    t.prefix = {g};
    t.prefix_maps = {m};
    t.tail = g;
    t.tail_map = m;
    return t;
}

void validate_tower_groups(const TowerOfGroups& t) {
    if (t.prefix.empty() && !t.tail) throw Error("tower: empty");
    size_t want = t.prefix.empty()
                      ? 0
                      : t.prefix.size() - 1 + (t.tail ? 1 : 0);
    if (t.prefix_maps.size() != want)
        throw Error("tower: wrong number of bonding maps");
    if (t.tail && !t.tail_map) throw Error("tower: tail without a self-map");
    for (size_t i = 0; i < t.prefix_maps.size(); ++i) {
        if (!(t.prefix_maps[i].cod == t.prefix[i]))
            throw Error("tower: bond codomain mismatch");
        FgAbGroup dom =
            i + 1 < t.prefix.size() ? t.prefix[i + 1] : *t.tail;
        if (!(t.prefix_maps[i].dom == dom))
            throw Error("tower: bond domain mismatch");
    }
    if (t.tail_map &&
        (!(t.tail_map->dom == *t.tail) || !(t.tail_map->cod == *t.tail)))
        throw Error("tower: tail self-map shape mismatch");
}

LimResult lim_tower(const TowerOfGroups& t) {
    validate_tower_groups(t);
    LimResult r;
    size_t np = t.prefix.size();
    if (!t.tail) {
        size_t top = np - 1;
        r.group = t.prefix[top];
        r.truncated = r.group;
        for (size_t i = 0; i < np; ++i)
            r.projections.push_back(t.bond_down(top, i));
        return r;
    }
    int td = effective_depth(t.truncation_depth, 0);
    r.truncated = t.at(static_cast<size_t>(td));
    TailAnalysis ta = analyze_tail(*t.tail, *t.tail_map);
    auto fill_projections = [&](const FgMorphism& into_tail_copy) {
        // into_tail_copy : lim -> at(np) (the first tail copy)
        for (size_t i = 0; i < np; ++i)
            r.projections.push_back(
                compose(t.bond_down(np, i), into_tail_copy));
        r.projections.push_back(into_tail_copy);
    };
    if (ta.stabilized) {
        r.group = ta.stable.group;
        r.stabilization_depth = ta.depth;
        fill_projections(ta.stable.map);
        return r;
    }
    // The image chain strictly descends forever.  If the stable free part is
    // nilpotent modulo some prime dividing the index, it contributes nothing
    // and the limit is carried by the torsion sub-tower alone.
    r.stabilization_depth = ta.depth;
    bool free_part_vanishes = false;
    for (const Int& p : prime_factors(ta.index_factor))
        if (nilpotent_mod_p(ta.m_on_free_stable.mat, p)) {
            free_part_vanishes = true;
            break;
        }
    if (free_part_vanishes) {
        FgMorphism incl_t = torsion_inclusion(*t.tail);
        FgMorphism mt = torsion_block(*t.tail_map);
        TailAnalysis tt = analyze_tail(incl_t.dom, mt);
        if (!tt.stabilized)
            throw Error("lim_tower: finite sub-tower failed to stabilize");
        r.group = tt.stable.group;
        r.stabilization_depth = std::max(ta.depth, tt.depth);
        fill_projections(compose(incl_t, tt.stable.map));
        return r;
    }
    // Cannot certify the value; report the truncated tower's top instead.
    r.complete = false;
    size_t ell = std::max<size_t>(static_cast<size_t>(td), np);
    r.group = t.at(ell);
    for (size_t i = 0; i <= np; ++i)
        r.projections.push_back(t.bond_down(ell, i));
    return r;
}

std::string to_string(Lim1Verdict v) {
    switch (v) {
        case Lim1Verdict::Zero: return "Zero";
        case Lim1Verdict::Nonzero: return "Nonzero";
        default: return "Unknown";
    }
}

Lim1Certificate lim1_tower(const TowerOfGroups& t) {
    validate_tower_groups(t);
    Lim1Certificate c;
    if (!t.tail) {
        c.verdict = Lim1Verdict::Zero;
        c.note = "finite tower: images are eventually constant";
        return c;
    }
    TailAnalysis ta = analyze_tail(*t.tail, *t.tail_map);
    if (ta.stabilized) {
        c.verdict = Lim1Verdict::Zero;
        c.depth = ta.depth;
        c.stable_image = ta.stable.map.mat;
        c.note = "Mittag-Leffler: tail images stabilize";
        return c;
    }
    c.verdict = Lim1Verdict::Nonzero;
    c.depth = ta.depth;
    c.image_at_depth = image_fg(fg_power(*t.tail_map, ta.depth)).map.mat;
    c.image_at_next = image_fg(fg_power(*t.tail_map, ta.depth + 1)).map.mat;
    c.index_factor = ta.index_factor;
    c.note = "tail images strictly descend with constant index; "
             "Mittag-Leffler fails";
    return c;
}

bool recheck_certificate(const TowerOfGroups& t, const Lim1Certificate& c) {
    validate_tower_groups(t);
    if (!t.tail) return c.verdict == Lim1Verdict::Zero;
    const FgAbGroup& a = *t.tail;
    const FgMorphism& m = *t.tail_map;
    auto span_morphism = [&](const IntMatrix& gens) {
        return FgMorphism(FgAbGroup::free(gens.cols()), a, gens);
    };
    auto same_subgroup = [&](const FgMorphism& f, const FgMorphism& g) {
        return image_contained(f, g) && image_contained(g, f);
    };
    if (c.verdict == Lim1Verdict::Zero) {
        FgMorphism mk = fg_power(m, c.depth);
        FgMorphism mk1 = compose(m, mk);
        if (!image_contained(mk, mk1)) return false;       // stabilized
        return same_subgroup(span_morphism(c.stable_image), mk);
    }
    if (c.verdict == Lim1Verdict::Nonzero) {
        FgMorphism mk = fg_power(m, c.depth);
        FgMorphism mk1 = compose(m, mk);
        FgMorphism xd = span_morphism(c.image_at_depth);
        FgMorphism xn = span_morphism(c.image_at_next);
        if (!same_subgroup(xd, mk) || !same_subgroup(xn, mk1)) return false;
        if (image_contained(mk, mk1)) return false;        // strict descent
        // Constant-index argument: the restriction of m to im(m^depth) has a
        // finite cokernel of the stated order > 1, and the ranks agree, so
        // every later step drops by the same index.
        FgSubgroupResult img = image_fg(mk);
        FgSubgroupResult img1 = image_fg(mk1);
        if (img.group.rank != img1.group.rank) return false;
        FgMorphism mrest = restrict_endo(img.map, m);
        auto ord = cokernel_fg(mrest).group.order();
        return ord && *ord == c.index_factor && c.index_factor > 1;
    }
    return false;
}

FgAbGroup lim_pullback_oracle(const TowerOfGroups& t, int depth) {
    validate_tower_groups(t);
    size_t d = static_cast<size_t>(std::max(depth, 0));
    if (!t.tail) d = std::min(d, t.prefix.size() - 1);
    std::vector<FgAbGroup> all, heads;
    for (size_t i = 0; i <= d; ++i) all.push_back(t.at(i));
    for (size_t i = 0; i < d; ++i) heads.push_back(t.at(i));
    if (heads.empty()) return all[0];
    FgDirectSum dom = direct_sum_fg(all);
    FgDirectSum cod = direct_sum_fg(heads);
    FgMorphism diff = FgMorphism::zero(dom.group, cod.group);
    for (size_t i = 0; i < d; ++i) {
        FgMorphism own = compose(cod.inject[i], dom.project[i]);
        FgMorphism next = compose(
            cod.inject[i], compose(t.bond(i), dom.project[i + 1]));
        diff = add_fg(diff, FgMorphism(dom.group, cod.group,
                                       own.mat - next.mat));
    }
    return kernel_fg(diff).group;
}

FgAbGroup lim1_shift_oracle(const TowerOfGroups& t, int depth) {
    validate_tower_groups(t);
    size_t d = static_cast<size_t>(std::max(depth, 0));
    if (!t.tail) d = std::min(d, t.prefix.size() - 1);
    std::vector<FgAbGroup> all, heads;
    for (size_t i = 0; i <= d; ++i) all.push_back(t.at(i));
    for (size_t i = 0; i < d; ++i) heads.push_back(t.at(i));
    if (heads.empty()) return FgAbGroup::zero();
    FgDirectSum dom = direct_sum_fg(all);
    FgDirectSum cod = direct_sum_fg(heads);
    FgMorphism diff = FgMorphism::zero(dom.group, cod.group);
    for (size_t i = 0; i < d; ++i) {
        FgMorphism own = compose(cod.inject[i], dom.project[i]);
        FgMorphism next = compose(
            cod.inject[i], compose(t.bond(i), dom.project[i + 1]));
        diff = add_fg(diff, FgMorphism(dom.group, cod.group,
                                       own.mat - next.mat));
    }
    return cokernel_fg(diff).group;
}

QZGroup TowerOfQZ::at(size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (tail) return *tail;
    throw Error("tower: index beyond a finite tower");
}

QZMorphism TowerOfQZ::bond(size_t i) const {
    if (i + 1 <= prefix_maps.size() && i + 1 <= prefix.size())
        return prefix_maps[i];
    if (tail && tail_map) return *tail_map;
    throw Error("tower: bond index out of range");
}

Lim1Certificate lim1_tower_qz(const TowerOfQZ& t, int depth) {
    Lim1Certificate c;
    if (!t.tail) {
        c.verdict = Lim1Verdict::Zero;
        c.note = "finite tower";
        return c;
    }
    const QZGroup& w = *t.tail;
    const QZMorphism& m = *t.tail_map;
    int cap = std::max(effective_depth(0, depth) + 6,
                       static_cast<int>(w.dim()) + 4);
    QZSubgroup lat = lattice_subgroup(w);
    auto image_at = [&](int k) {
        return add_subgroups(image_subgroup(qz_power(m, k)), lat);
    };
    QZSubgroup cur = image_at(0);
    for (int k = 0; k <= cap; ++k) {
        QZSubgroup nxt = image_at(k + 1);
        if (subgroup_contains(nxt, cur) && subgroup_contains(cur, nxt)) {
            c.verdict = Lim1Verdict::Zero;
            c.depth = k;
            c.note = "Mittag-Leffler: image subgroups stabilize";
            return c;
        }
        cur = nxt;
    }
    c.verdict = Lim1Verdict::Unknown;
    c.depth = cap;
    c.note = "image chain did not stabilize within the tested depth";
    return c;
}

TowerOfGroups hom_tower(const TowerOfComplexes& s, int n,
                        const FgAbGroup& g) {
    validate_tower(s);
    std::vector<HomFgGroup> homs;
    for (const CochainComplex& c : s.prefix)
        homs.push_back(hom_group(c.group(n), g));
    std::optional<HomFgGroup> tail_hom;
    if (s.tail) tail_hom = hom_group(s.tail->group(n), g);
    TowerOfGroups t;
    for (const HomFgGroup& h : homs) t.prefix.push_back(h.group);
    for (size_t i = 0; i < s.prefix_maps.size(); ++i) {
        const HomFgGroup& lower = homs[i];
        const HomFgGroup& upper =
            i + 1 < homs.size() ? homs[i + 1] : *tail_hom;
        t.prefix_maps.push_back(
            hom_induced(s.prefix_maps[i].component(n), upper, lower));
    }
    if (s.tail) {
        t.tail = tail_hom->group;
        t.tail_map =
            hom_induced(s.tail_map->component(n), *tail_hom, *tail_hom);
    }
    return t;
}

TowerOfQZ hom_tower_qz(const TowerOfComplexes& s, int n, const QZGroup& w) {
    validate_tower(s);
    std::vector<HomQZ> homs;
    for (const CochainComplex& c : s.prefix)
        homs.push_back(hom_into(c.group(n), w));
    std::optional<HomQZ> tail_hom;
    if (s.tail) tail_hom = hom_into(s.tail->group(n), w);
    TowerOfQZ t;
    for (const HomQZ& h : homs) t.prefix.push_back(h.group);
    for (size_t i = 0; i < s.prefix_maps.size(); ++i) {
        const HomQZ& lower = homs[i];
        const HomQZ& upper = i + 1 < homs.size() ? homs[i + 1] : *tail_hom;
        t.prefix_maps.push_back(
            hom_induced_qz(s.prefix_maps[i].component(n), upper, lower));
    }
    if (s.tail) {
        t.tail = tail_hom->group;
        t.tail_map =
            hom_induced_qz(s.tail_map->component(n), *tail_hom, *tail_hom);
    }
    return t;
}

const ConeUcf& ConeTower::cone_at(size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (!tail_cone.empty()) return tail_cone[0];
    throw Error("cone tower: index beyond a finite tower");
}

ConeTower build_cone_tower(const TowerOfComplexes& s, const FgAbGroup& g) {
    validate_tower(s);
    ConeTower ct;
    ct.res = standard_resolution(g);
    for (const CochainComplex& c : s.prefix)
        ct.prefix.emplace_back(c, ct.res);
    if (s.tail) {
        ct.tail_index = ct.prefix.size();
        ct.tail_cone.emplace_back(*s.tail, ct.res);
    }
    return ct;
}

TowerOfGroups hbar_tower(const ConeTower& ct, const TowerOfComplexes& s,
                         int n) {
    TowerOfGroups t;
    for (size_t i = 0; i < ct.prefix.size(); ++i)
        t.prefix.push_back(ct.cone_at(i).homology(n).group);
    for (size_t i = 0; i < s.prefix_maps.size(); ++i)
        t.prefix_maps.push_back(cone_induced(ct.cone_at(i), ct.cone_at(i + 1),
                                             s.prefix_maps[i], n));
    if (s.tail) {
        const ConeUcf& tc = ct.cone_at(ct.prefix.size());
        t.tail = tc.homology(n).group;
        t.tail_map = cone_induced(tc, tc, *s.tail_map, n);
    }
    return t;
}

TowerOfGroups ext_tower(const ConeTower& ct, const TowerOfComplexes& s,
                        int n) {
    TowerOfGroups t;
    for (size_t i = 0; i < ct.prefix.size(); ++i)
        t.prefix.push_back(ct.cone_at(i).ext_data(n).group);
    for (size_t i = 0; i < s.prefix_maps.size(); ++i)
        t.prefix_maps.push_back(ext_induced(ct.cone_at(i), ct.cone_at(i + 1),
                                            s.prefix_maps[i], n));
    if (s.tail) {
        const ConeUcf& tc = ct.cone_at(ct.prefix.size());
        t.tail = tc.ext_data(n).group;
        t.tail_map = ext_induced(tc, tc, *s.tail_map, n);
    }
    return t;
}

TowerOfGroups hom_h_tower(const ConeTower& ct, const TowerOfComplexes& s,
                          int n) {
    TowerOfGroups t;
    for (size_t i = 0; i < ct.prefix.size(); ++i)
        t.prefix.push_back(ct.cone_at(i).hom_h(n).group);
    for (size_t i = 0; i < s.prefix_maps.size(); ++i)
        t.prefix_maps.push_back(hom_h_induced(ct.cone_at(i),
                                              ct.cone_at(i + 1),
                                              s.prefix_maps[i], n));
    if (s.tail) {
        const ConeUcf& tc = ct.cone_at(ct.prefix.size());
        t.tail = tc.hom_h(n).group;
        t.tail_map = hom_h_induced(tc, tc, *s.tail_map, n);
    }
    return t;
}

namespace {

// Composite bonding map from prefix level i out to the last stored complex
// (the tail if present, the last prefix complex otherwise).
CochainMap composite_to_end(const TowerOfComplexes& s, size_t i) {
    const CochainComplex& endc =
        s.tail ? *s.tail : s.prefix.back();
    CochainMap r = identity_cochain_map(endc);
    for (size_t k = s.prefix_maps.size(); k-- > i;)
        r = compose(r, s.prefix_maps[k]);
    return r;
}

QZMorphism add_qz(const QZMorphism& f, const QZMorphism& g) {
    return QZMorphism(f.dom, f.cod, f.mat + g.mat);
}

// Tower of the level-n groups of the cones, bonds induced on cone levels.
TowerOfQZ cone_level_tower(const ConeTower& ct, const TowerOfComplexes& s,
                           int n) {
    TowerOfQZ t;
    for (size_t i = 0; i < ct.prefix.size(); ++i)
        t.prefix.push_back(ct.cone_at(i).cone().group(n));
    for (size_t i = 0; i < s.prefix_maps.size(); ++i)
        t.prefix_maps.push_back(cone_level_map(
            ct.cone_at(i), ct.cone_at(i + 1), s.prefix_maps[i], n));
    if (s.tail) {
        const ConeUcf& tc = ct.cone_at(ct.prefix.size());
        t.tail = tc.cone().group(n);
        t.tail_map = cone_level_map(tc, tc, *s.tail_map, n);
    }
    return t;
}

// Iterated pullback of levels 0..d of a QZ tower, as a kernel inside the
// direct sum.
QZKernel qz_pullback(const TowerOfQZ& t, size_t d) {
    std::vector<QZGroup> all, heads;
    for (size_t i = 0; i <= d; ++i) all.push_back(t.at(i));
    for (size_t i = 0; i < d; ++i) heads.push_back(t.at(i));
    QZDirectSum dom = direct_sum_qz(all);
    QZDirectSum cod = direct_sum_qz(heads);
    QZMorphism diff = QZMorphism::zero(dom.group, cod.group);
    for (size_t i = 0; i < d; ++i) {
        QZMorphism own = compose(cod.inject[i], dom.project[i]);
        QZMorphism next = compose(
            cod.inject[i], compose(t.bond(i), dom.project[i + 1]));
        diff = add_qz(diff, QZMorphism(dom.group, cod.group,
                                       own.mat - next.mat));
    }
    return kernel_qz(diff);
}

size_t levels_stored(const TowerOfComplexes& s) {
    return s.prefix.size() + (s.tail ? 1 : 0);
}

}  // namespace

Lemma2Report verify_lemma2(const TowerOfComplexes& s, const FgAbGroup& g,
                           int n, int depth) {
    validate_tower(s);
    Lemma2Report r;
    r.depth = effective_depth(0, depth);
    ConeTower ct = build_cone_tower(s, g);
    TowerOfQZ qt = cone_level_tower(ct, s, n);
    size_t nlev = levels_stored(s);

    bool colim_ok = true;
    CochainComplex colim;
    try {
        colim = colimit(s);
    } catch (const NotFinitelyGeneratedColimit&) {
        colim_ok = false;
    }
    r.exact_mode = colim_ok;
    r.squares_commute = true;
    if (colim_ok) {
        ConeUcf colim_ucf(colim, ct.res);
        // Canonical map from the colimit's cone level into each stored level;
        // the insertion of the last stored complex is the identity.
        std::vector<QZMorphism> can;
        for (size_t i = 0; i < s.prefix.size(); ++i)
            can.push_back(cone_level_map(ct.cone_at(i), colim_ucf,
                                         composite_to_end(s, i), n));
        if (s.tail) {
            const ConeUcf& tc = ct.cone_at(s.prefix.size());
            can.push_back(cone_level_map(
                tc, colim_ucf, identity_cochain_map(*s.tail), n));
        }
        for (size_t i = 0; i + 1 < can.size(); ++i)
            if (!compose(qt.bond(i), can[i + 1]).equals(can[i]))
                r.squares_commute = false;
        r.deep_iso = is_isomorphism_qz(can.back());
        if (s.tail && !is_isomorphism_qz(qt.bond(nlev)))
            r.deep_iso = false;
    }

    // Truncated check: the iterated pullback of the finite sub-tower equals
    // its deepest level, and its projections are compatible with the bonds.
    size_t d = static_cast<size_t>(r.depth);
    if (!s.tail) d = std::min(d, s.prefix.size() - 1);
    QZKernel pk = qz_pullback(qt, d);
    r.pullback_iso = pk.group.isomorphic_to(qt.at(d));
    if (d > 0) {
        std::vector<QZGroup> all;
        for (size_t i = 0; i <= d; ++i) all.push_back(qt.at(i));
        QZDirectSum dom = direct_sum_qz(all);
        for (size_t c = 0; c < pk.group.dim() && r.squares_commute; ++c) {
            // Section columns are representatives in the product already.
            std::vector<Rat> x = dom.group.reduce(pk.canon.section.col(c));
            for (size_t i = 0; i < d; ++i) {
                std::vector<Rat> lhs = dom.project[i].apply(x);
                std::vector<Rat> rhs =
                    qt.bond(i).apply(dom.project[i + 1].apply(x));
                if (!qt.at(i).is_zero_element(
                        qt.at(i).reduce(
                            [&] {
                                std::vector<Rat> dv(lhs.size());
                                for (size_t j = 0; j < lhs.size(); ++j)
                                    dv[j] = lhs[j] - rhs[j];
                                return dv;
                            }())))
                    r.squares_commute = false;
            }
        }
    }
    return r;
}

Cor2Report verify_cor2(const TowerOfComplexes& s, int n, int depth) {
    validate_tower(s);
    Cor2Report r;
    r.depth = effective_depth(0, depth);
    TowerOfQZ tq = hom_tower_qz(s, n, QZGroup::divisible(1, 0));
    TowerOfQZ tqz = hom_tower_qz(s, n, QZGroup::divisible(0, 1));
    r.into_q = lim1_tower_qz(tq, r.depth).verdict;
    r.into_qz = lim1_tower_qz(tqz, r.depth).verdict;
    return r;
}

Lemma4Report verify_lemma4(const TowerOfComplexes& s, const FgAbGroup& g,
                           int n, int depth) {
    validate_tower(s);
    Lemma4Report r;
    r.depth = effective_depth(0, depth);
    ConeTower ct = build_cone_tower(s, g);
    size_t nlev = levels_stored(s);

    std::vector<ConeUcf::OmegaSigma> os;
    for (size_t i = 0; i < nlev; ++i) os.push_back(ct.cone_at(i).omega_sigma(n));

    TowerOfQZ sub, mid;
    for (size_t i = 0; i < s.prefix.size(); ++i) {
        sub.prefix.push_back(os[i].hom_hq_p.group);
        mid.prefix.push_back(os[i].mid.group);
    }
    for (size_t i = 0; i < s.prefix_maps.size(); ++i) {
        sub.prefix_maps.push_back(ker_xi_sub_induced(
            ct.cone_at(i), ct.cone_at(i + 1), s.prefix_maps[i], n));
        mid.prefix_maps.push_back(ker_xi_mid_induced(
            ct.cone_at(i), ct.cone_at(i + 1), s.prefix_maps[i], n));
    }
    if (s.tail) {
        const ConeUcf& tc = ct.cone_at(s.prefix.size());
        sub.tail = os.back().hom_hq_p.group;
        sub.tail_map = ker_xi_sub_induced(tc, tc, *s.tail_map, n);
        mid.tail = os.back().mid.group;
        mid.tail_map = ker_xi_mid_induced(tc, tc, *s.tail_map, n);
    }

    r.levels_exact = true;
    for (size_t i = 0; i < nlev; ++i)
        if (!ct.cone_at(i).verify_ker_xi(n).ok()) r.levels_exact = false;

    r.squares_commute = true;
    auto check_square = [&](size_t lo, size_t hi, const CochainMap& f) {
        QZMorphism sub_b =
            ker_xi_sub_induced(ct.cone_at(lo), ct.cone_at(hi), f, n);
        QZMorphism mid_b =
            ker_xi_mid_induced(ct.cone_at(lo), ct.cone_at(hi), f, n);
        QZMorphism cone_b =
            cone_level_map(ct.cone_at(lo), ct.cone_at(hi), f, n);
        if (!compose(mid_b, os[std::min(hi, nlev - 1)].sigma)
                 .equals(compose(os[std::min(lo, nlev - 1)].sigma, sub_b)))
            r.squares_commute = false;
        if (!compose(os[std::min(lo, nlev - 1)].omega, mid_b)
                 .equals(compose(cone_b, os[std::min(hi, nlev - 1)].omega)))
            r.squares_commute = false;
    };
    for (size_t i = 0; i < s.prefix_maps.size(); ++i)
        check_square(i, i + 1, s.prefix_maps[i]);
    if (s.tail) check_square(nlev - 1, nlev - 1, *s.tail_map);

    r.sub_tower = lim1_tower_qz(sub, r.depth).verdict;
    r.mid_tower = lim1_tower_qz(mid, r.depth).verdict;
    // Short exact sequence of towers 0 -> sub -> mid -> Ker xi -> 0: the
    // six-term lim/lim^1 sequence ends ... -> lim^1(mid) -> lim^1(Ker xi) ->
    // lim^2(sub) = 0, so lim^1(mid) = 0 forces lim^1(Ker xi) = 0.
    r.ker_xi = (r.sub_tower == Lim1Verdict::Zero &&
                r.mid_tower == Lim1Verdict::Zero && r.levels_exact &&
                r.squares_commute)
                   ? Lim1Verdict::Zero
                   : Lim1Verdict::Unknown;
    return r;
}

Cor3Report verify_cor3(const TowerOfComplexes& s, const FgAbGroup& g, int n,
                       int depth) {
    validate_tower(s);
    Cor3Report r;
    r.depth = effective_depth(0, depth);
    r.lemma4 = verify_lemma4(s, g, n, depth);
    ConeTower ct = build_cone_tower(s, g);
    size_t nlev = levels_stored(s);
    r.xi_levelwise_surjective = true;
    for (size_t i = 0; i < nlev; ++i) {
        FgMorphism xi = ct.cone_at(i).xi_bar(n);
        for (size_t j = 0; j < xi.cod.ngens(); ++j) {
            std::vector<Int> e(xi.cod.ngens(), 0);
            e[j] = 1;
            if (!solve_preimage_fg(xi, e)) {
                r.xi_levelwise_surjective = false;
                break;
            }
        }
    }
    r.hom_cert = lim1_tower(hom_h_tower(ct, s, n));
    // 0 -> Ker xi -> Z-bar -> Hom(H^n;G) -> 0 levelwise; lim^1 Ker xi = 0
    // identifies lim^1 of the cycle tower with lim^1 of the Hom tower.
    if (r.lemma4.ker_xi == Lim1Verdict::Zero && r.xi_levelwise_surjective)
        r.zbar = r.hom_cert.verdict;
    return r;
}

namespace {

// Induced map between completed limits through their deep-level inclusions.
std::optional<FgMorphism> lim_induced(const LimResult& src,
                                      const LimResult& dst,
                                      const FgMorphism& deep) {
    const FgMorphism& ps = src.projections.back();
    const FgMorphism& pd = dst.projections.back();
    IntMatrix mat(dst.group.ngens(), src.group.ngens());
    for (size_t j = 0; j < src.group.ngens(); ++j) {
        std::vector<Int> e(src.group.ngens(), 0);
        e[j] = 1;
        auto pre = solve_preimage_fg(pd, deep.apply(ps.apply(e)));
        if (!pre) return std::nullopt;
        mat.set_col(j, *pre);
    }
    return FgMorphism(src.group, dst.group, std::move(mat));
}

bool fg_surjective(const FgMorphism& f) {
    for (size_t j = 0; j < f.cod.ngens(); ++j) {
        std::vector<Int> e(f.cod.ngens(), 0);
        e[j] = 1;
        if (!solve_preimage_fg(f, e)) return false;
    }
    return true;
}

bool image_equals_kernel(const FgMorphism& f, const FgMorphism& g) {
    // im f = ker g inside f.cod == g.dom.
    FgSubgroupResult img = image_fg(f);
    FgSubgroupResult ker = kernel_fg(g);
    return image_contained(img.map, ker.map) &&
           image_contained(ker.map, img.map);
}

Lim1Verdict combine_split(Lim1Verdict a, Lim1Verdict b) {
    if (a == Lim1Verdict::Nonzero || b == Lim1Verdict::Nonzero)
        return Lim1Verdict::Nonzero;
    if (a == Lim1Verdict::Zero && b == Lim1Verdict::Zero)
        return Lim1Verdict::Zero;
    return Lim1Verdict::Unknown;
}

}  // namespace

Theorem3Report verify_theorem3(const TowerOfComplexes& s, const FgAbGroup& g,
                               int n, int i, int depth) {
    validate_tower(s);
    Theorem3Report r;
    r.i = i;
    r.depth = effective_depth(0, depth);
    ConeTower ct = build_cone_tower(s, g);
    size_t nlev = levels_stored(s);
    TowerOfGroups ext_t = ext_tower(ct, s, n);
    TowerOfGroups hbar_t = hbar_tower(ct, s, n);
    TowerOfGroups hom_t = hom_h_tower(ct, s, n);

    r.levelwise_ucf = true;
    for (size_t k = 0; k < nlev; ++k)
        if (!ct.cone_at(k).verify(n).exact()) r.levelwise_ucf = false;

    r.squares_commute = true;
    auto check_square = [&](size_t lo, size_t hi, const FgMorphism& ext_b,
                            const FgMorphism& hbar_b,
                            const FgMorphism& hom_b) {
        const ConeUcf& clo = ct.cone_at(lo);
        const ConeUcf& chi = ct.cone_at(hi);
        if (!compose(hbar_b, chi.chi_bar(n)).equals(
                compose(clo.chi_bar(n), ext_b)))
            r.squares_commute = false;
        if (!compose(hom_b, chi.xi_bar(n)).equals(
                compose(clo.xi_bar(n), hbar_b)))
            r.squares_commute = false;
    };
    for (size_t k = 0; k < s.prefix_maps.size(); ++k)
        check_square(k, k + 1, ext_t.prefix_maps[k], hbar_t.prefix_maps[k],
                     hom_t.prefix_maps[k]);
    if (s.tail)
        check_square(nlev - 1, nlev - 1, *ext_t.tail_map, *hbar_t.tail_map,
                     *hom_t.tail_map);

    if (i == 0) {
        LimResult le = lim_tower(ext_t);
        LimResult lh = lim_tower(hbar_t);
        LimResult lm = lim_tower(hom_t);
        r.lims_complete = le.complete && lh.complete && lm.complete;
        r.lim_ext = le.group;
        r.lim_hbar = lh.group;
        r.lim_hom = lm.group;
        if (r.lims_complete) {
            size_t deep = le.projections.size() - 1;
            const ConeUcf& dc = ct.cone_at(std::min(deep, nlev - 1));
            auto lchi = lim_induced(le, lh, dc.chi_bar(n));
            auto lxi = lim_induced(lh, lm, dc.xi_bar(n));
            if (lchi && lxi) {
                bool inj = kernel_fg(*lchi).group.is_trivial();
                bool mid = image_equals_kernel(*lchi, *lxi);
                // lim^1 Ext vanishes (Ext(H;G) is finite for f.g. inputs),
                // so lim xi is onto.
                bool surj = fg_surjective(*lxi) &&
                            lim1_tower(ext_t).verdict == Lim1Verdict::Zero;
                r.exact = inj && mid && surj;
            }
        }
    } else {
        r.ext_cert = lim1_tower(ext_t);
        r.hom_cert = lim1_tower(hom_t);
        r.hbar_cert = lim1_tower(hbar_t);
        Lim1Verdict combined =
            combine_split(r.ext_cert.verdict, r.hom_cert.verdict);
        r.split_consistent = combined != Lim1Verdict::Unknown &&
                             r.hbar_cert.verdict == combined;
    }
    return r;
}

MilnorReport verify_main_sequence(const TowerOfComplexes& s,
                                  const FgAbGroup& g, int n) {
    validate_tower(s);
    MilnorReport r;
    r.n = n;
    ConeTower ct = build_cone_tower(s, g);
    size_t nlev = levels_stored(s);
    TowerOfGroups hb_n = hbar_tower(ct, s, n);
    TowerOfGroups hb_n1 = hbar_tower(ct, s, n + 1);
    r.lim1_next = lim1_tower(hb_n1);
    r.standing_fact =
        "lim^2 vanishes for towers indexed by the naturals, so the "
        "four-term sequence reduces to 0 -> lim^1 (level n+1) -> "
        "(colimit homology) -> lim (level n) -> 0";

    bool colim_ok = true;
    CochainComplex colim;
    try {
        colim = colimit(s);
    } catch (const NotFinitelyGeneratedColimit& e) {
        colim_ok = false;
        r.diagnostics = std::string(e.what()) +
                        "; reporting certificates instead of group values";
    }
    r.exact_mode = colim_ok;
    if (colim_ok) {
        ConeUcf colim_ucf(colim, ct.res);
        r.hbar_colim = colim_ucf.homology(n).group;
        LimResult lh = lim_tower(hb_n);
        r.lim_hbar = lh.group;
        // pi : (colimit homology) -> lim, solved through the deep level.
        const ConeUcf& dc = ct.cone_at(nlev - 1);
        CochainMap insert = s.tail ? identity_cochain_map(*s.tail)
                                   : identity_cochain_map(s.prefix.back());
        FgMorphism pi_deep = cone_induced(dc, colim_ucf, insert, n);
        const FgMorphism& pd = lh.projections.back();
        IntMatrix mat(lh.group.ngens(), r.hbar_colim.ngens());
        bool solvable = true;
        for (size_t j = 0; j < r.hbar_colim.ngens(); ++j) {
            std::vector<Int> e(r.hbar_colim.ngens(), 0);
            e[j] = 1;
            auto pre = solve_preimage_fg(pd, pi_deep.apply(e));
            if (!pre) {
                solvable = false;
                break;
            }
            mat.set_col(j, *pre);
        }
        if (solvable) {
            FgMorphism pi(r.hbar_colim, lh.group, std::move(mat));
            r.pi_injective = kernel_fg(pi).group.is_trivial();
            r.pi_surjective = fg_surjective(pi);
            // Compatibility through every prefix level.
            for (size_t k = 0; k < s.prefix.size(); ++k) {
                FgMorphism via_lim = compose(lh.projections[k], pi);
                FgMorphism direct = cone_induced(
                    ct.cone_at(k), colim_ucf, composite_to_end(s, k), n);
                if (!via_lim.equals(direct)) {
                    r.pi_injective = r.pi_surjective = false;
                    r.diagnostics +=
                        "projection square failed at level " +
                        std::to_string(k) + "; ";
                }
            }
        } else {
            r.diagnostics += "pi does not land in the computed limit; ";
        }
    } else {
        LimResult lh = lim_tower(hb_n);
        r.lim_complete = lh.complete;
        if (lh.complete) r.lim_hbar = lh.group;
        r.hom_next_cert = lim1_tower(hom_h_tower(ct, s, n + 1));
    }
    return r;
}

Cor5Report verify_cor5(const TowerOfComplexes& s, int n, const QZGroup& g) {
    validate_tower(s);
    Cor5Report r;
    InjectiveResolution res = self_resolution(g);
    CochainComplex colim = colimit(s);
    ConeUcf colim_ucf(colim, res);
    ConeUcf deep_ucf(s.tail ? *s.tail : s.prefix.back(), res);
    r.colim_side_iso = is_isomorphism_qz(colim_ucf.xi_bar_divisible(n).map);
    r.level_side_iso = is_isomorphism_qz(deep_ucf.xi_bar_divisible(n).map);
    r.groups_isomorphic = colim_ucf.homology(n).canon.group.isomorphic_to(
        deep_ucf.homology(n).canon.group);
    return r;
}

}  // namespace wb
