#include "wb/fgab.hpp"

#include <sstream>

namespace wb {

FgAbGroup::FgAbGroup(size_t r, std::vector<Int> tors)
    : rank(r), torsion(std::move(tors)) {
    for (size_t i = 0; i < torsion.size(); ++i) {
        if (torsion[i] < 2) throw Error("FgAbGroup: torsion factor < 2");
        if (i + 1 < torsion.size() && torsion[i + 1] % torsion[i] != 0)
            throw Error("FgAbGroup: torsion factors not a divisibility chain");
    }
}

FgAbGroup FgAbGroup::cyclic(const Int& d) {
    if (d == 0) return free(1);
    if (d == 1 || d == -1) return zero();
    std::vector<Int> t{boost::multiprecision::abs(d)};
    return FgAbGroup(0, std::move(t));
}

std::optional<Int> FgAbGroup::order() const {
    if (rank > 0) return std::nullopt;
    Int n = 1;
    for (const Int& d : torsion) n *= d;
    return n;
}

std::vector<Int> FgAbGroup::reduce(std::vector<Int> x) const {
    if (x.size() != ngens()) throw Error("FgAbGroup::reduce: dim mismatch");
    for (size_t i = 0; i < torsion.size(); ++i) {
        Int& c = x[rank + i];
        c %= torsion[i];
        if (c < 0) c += torsion[i];
    }
    return x;
}

std::string FgAbGroup::describe() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (rank == 1) {
        os << "Z";
        first = false;
    } else if (rank > 1) {
        os << "Z^" << rank;
        first = false;
    }
    for (const Int& d : torsion) {
        if (!first) os << " + ";
        os << "Z/" << d;
        first = false;
    }
    return os.str();
}

FgMorphism::FgMorphism(FgAbGroup d, FgAbGroup c, IntMatrix m)
    : dom(std::move(d)), cod(std::move(c)), mat(std::move(m)) {
    if (mat.rows() != cod.ngens() || mat.cols() != dom.ngens())
        throw Error("FgMorphism: matrix shape mismatch");
    for (size_t j = 0; j < dom.ngens(); ++j) {
        Int d_j = dom.gen_order(j);
        if (d_j == 0) continue;
        std::vector<Int> v = mat.col(j);
        for (Int& e : v) e *= d_j;
        for (const Int& e : cod.reduce(std::move(v)))
            if (e != 0) throw NotWellDefined("FgMorphism: order not respected");
    }
}

bool FgMorphism::is_zero() const {
    for (size_t j = 0; j < mat.cols(); ++j)
        for (const Int& e : cod.reduce(mat.col(j)))
            if (e != 0) return false;
    return true;
}

bool FgMorphism::equals(const FgMorphism& o) const {
    if (!(dom == o.dom) || !(cod == o.cod)) return false;
    return FgMorphism(dom, cod, mat - o.mat).is_zero();
}

FgMorphism compose(const FgMorphism& g, const FgMorphism& f) {
    if (!(f.cod == g.dom)) throw Error("compose: domain mismatch");
    return FgMorphism(f.dom, g.cod, g.mat * f.mat);
}

namespace {

// Relation columns of a canonical-form group inside Z^{ngens}.
IntMatrix relation_columns(const FgAbGroup& g) {
    IntMatrix r(g.ngens(), g.torsion.size());
    for (size_t i = 0; i < g.torsion.size(); ++i)
        r(g.rank + i, i) = g.torsion[i];
    return r;
}

}  // namespace

ZSubquotient z_subquotient(size_t ambient, const IntMatrix& sub,
                           const IntMatrix& rel) {
    if (sub.rows() != ambient || rel.rows() != ambient)
        throw Error("z_subquotient: ambient mismatch");
    ZSubquotient out;
    out.basis = lattice_column_basis(sub);
    const size_t rho = out.basis.cols();

    // Relation generators in basis coordinates (must be integral).
    RatMatrix bq = to_rational(out.basis);
    IntMatrix m(rho, rel.cols());
    for (size_t j = 0; j < rel.cols(); ++j) {
        std::vector<Rat> t;
        if (!rational_solve(bq, to_rational(rel.col(j)), t))
            throw Error("z_subquotient: relation outside subgroup");
        m.set_col(j, to_integral(t));
    }

    SmithForm s = smith_normal_form(m);
    out.umat = s.u;
    out.orders.assign(rho, Int(0));
    for (size_t i = 0; i < s.rank; ++i) out.orders[i] = s.d(i, i);

    // Canonical layout: free generators first, then torsion factors in
    // ascending order; invariant factor 1 means the generator dies.
    std::vector<size_t> free_idx, tors_idx;
    for (size_t i = 0; i < rho; ++i) {
        if (out.orders[i] == 0)
            free_idx.push_back(i);
        else if (out.orders[i] > 1)
            tors_idx.push_back(i);
    }
    std::vector<Int> torsion;
    for (size_t i : tors_idx) torsion.push_back(out.orders[i]);
    out.group = FgAbGroup(free_idx.size(), std::move(torsion));

    out.reps = IntMatrix(ambient, out.group.ngens());
    size_t k = 0;
    for (size_t i : free_idx) {
        IntMatrix g = out.basis * IntMatrix(rho, 1, s.uinv.col(i));
        out.reps.set_col(k++, g.col(0));
    }
    for (size_t i : tors_idx) {
        IntMatrix g = out.basis * IntMatrix(rho, 1, s.uinv.col(i));
        out.reps.set_col(k++, g.col(0));
    }
    return out;
}

bool ZSubquotient::contains(const std::vector<Int>& x) const {
    std::vector<Rat> t;
    if (!rational_solve(to_rational(basis), to_rational(x), t)) return false;
    for (const Rat& v : t)
        if (denominator(v) != 1) return false;
    return true;
}

std::vector<Int> ZSubquotient::express(const std::vector<Int>& x) const {
    std::vector<Rat> tq;
    if (!rational_solve(to_rational(basis), to_rational(x), tq))
        throw Error("ZSubquotient::express: element outside subgroup");
    std::vector<Int> u = umat.apply(to_integral(tq));
    std::vector<Int> coords;
    coords.reserve(group.ngens());
    for (size_t i = 0; i < u.size(); ++i)
        if (orders[i] == 0) coords.push_back(u[i]);
    for (size_t i = 0; i < u.size(); ++i)
        if (orders[i] > 1) coords.push_back(u[i]);
    return group.reduce(std::move(coords));
}

FgSubgroupResult kernel_fg(const FgMorphism& f) {
    const size_t sa = f.dom.ngens();
    IntMatrix rel_a = relation_columns(f.dom);
    IntMatrix rel_b = relation_columns(f.cod);
    IntMatrix ns = integer_nullspace(f.mat.hcat(rel_b));
    IntMatrix ker_part(sa, ns.cols());
    for (size_t i = 0; i < sa; ++i)
        for (size_t j = 0; j < ns.cols(); ++j) ker_part(i, j) = ns(i, j);
    ZSubquotient q = z_subquotient(sa, ker_part.hcat(rel_a), rel_a);
    FgSubgroupResult out;
    out.group = q.group;
    out.map = FgMorphism(q.group, f.dom, q.reps);
    return out;
}

FgSubgroupResult image_fg(const FgMorphism& f) {
    const size_t sb = f.cod.ngens();
    IntMatrix rel_b = relation_columns(f.cod);
    ZSubquotient q = z_subquotient(sb, f.mat.hcat(rel_b), rel_b);
    FgSubgroupResult out;
    out.group = q.group;
    out.map = FgMorphism(q.group, f.cod, q.reps);
    return out;
}

FgCokernelResult cokernel_fg(const FgMorphism& f) {
    const size_t sb = f.cod.ngens();
    IntMatrix rel_b = relation_columns(f.cod);
    ZSubquotient q =
        z_subquotient(sb, IntMatrix::identity(sb), f.mat.hcat(rel_b));
    FgCokernelResult out;
    out.group = q.group;
    IntMatrix proj(q.group.ngens(), sb);
    for (size_t j = 0; j < sb; ++j) {
        std::vector<Int> e(sb, Int(0));
        e[j] = 1;
        proj.set_col(j, q.express(e));
    }
    out.map = FgMorphism(f.cod, q.group, std::move(proj));
    out.section = q.reps;
    return out;
}

bool is_isomorphism_fg(const FgMorphism& f) {
    return kernel_fg(f).group.is_trivial() && cokernel_fg(f).group.is_trivial();
}

std::optional<std::vector<Int>> solve_preimage_fg(const FgMorphism& f,
                                                  const std::vector<Int>& y) {
    IntMatrix rel_b = relation_columns(f.cod);
    std::vector<Int> sol;
    if (!integer_solve(f.mat.hcat(rel_b), f.cod.reduce(y), sol))
        return std::nullopt;
    sol.resize(f.dom.ngens());
    return f.dom.reduce(std::move(sol));
}

FgDirectSum direct_sum_fg(const std::vector<FgAbGroup>& parts) {
    size_t total = 0;
    for (const auto& p : parts) total += p.ngens();
    IntMatrix rel(total, 0);
    {
        std::vector<IntMatrix> cols;
        size_t off = 0;
        IntMatrix r(total, 0);
        for (const auto& p : parts) {
            IntMatrix rp = relation_columns(p);
            IntMatrix lifted(total, rp.cols());
            for (size_t i = 0; i < rp.rows(); ++i)
                for (size_t j = 0; j < rp.cols(); ++j)
                    lifted(off + i, j) = rp(i, j);
            r = r.hcat(lifted);
            off += p.ngens();
        }
        rel = std::move(r);
    }
    ZSubquotient q = z_subquotient(total, IntMatrix::identity(total), rel);
    FgDirectSum out;
    out.group = q.group;
    size_t off = 0;
    for (const auto& p : parts) {
        IntMatrix inj(q.group.ngens(), p.ngens());
        for (size_t j = 0; j < p.ngens(); ++j) {
            std::vector<Int> e(total, Int(0));
            e[off + j] = 1;
            inj.set_col(j, q.express(e));
        }
        out.inject.emplace_back(p, q.group, std::move(inj));
        IntMatrix proj(p.ngens(), q.group.ngens());
        for (size_t k = 0; k < q.group.ngens(); ++k)
            for (size_t j = 0; j < p.ngens(); ++j)
                proj(j, k) = q.reps(off + j, k);
        out.project.emplace_back(q.group, p, std::move(proj));
        off += p.ngens();
    }
    return out;
}

HomFgGroup hom_group(const FgAbGroup& a, const FgAbGroup& b) {
    HomFgGroup out;
    out.a = a;
    out.b = b;
    for (size_t i = 0; i < a.ngens(); ++i) {
        Int da = a.gen_order(i);
        for (size_t j = 0; j < b.ngens(); ++j) {
            Int db = b.gen_order(j);
            Int slot_order, value;
            if (da == 0) {
                slot_order = db;
                value = 1;
            } else {
                if (db == 0) continue;  // Hom(Z/d, Z) = 0
                Int g = boost::multiprecision::gcd(da, db);
                if (g == 1) continue;
                slot_order = g;
                value = db / g;
            }
            IntMatrix m(b.ngens(), a.ngens());
            m(j, i) = value;
            out.cyclic_gens.emplace_back(a, b, std::move(m));
            out.cyclic_orders.push_back(slot_order);
        }
    }
    const size_t n = out.cyclic_orders.size();
    IntMatrix rel(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (out.cyclic_orders[i] == 0) continue;
        IntMatrix c(n, 1);
        c(i, 0) = out.cyclic_orders[i];
        rel = rel.hcat(c);
    }
    out.canon = z_subquotient(n, IntMatrix::identity(n), rel);
    out.group = out.canon.group;
    for (size_t k = 0; k < out.group.ngens(); ++k) {
        IntMatrix m(b.ngens(), a.ngens());
        for (size_t i = 0; i < n; ++i) {
            if (out.canon.reps(i, k) == 0) continue;
            IntMatrix scaled = out.cyclic_gens[i].mat;
            for (size_t r = 0; r < scaled.rows(); ++r)
                for (size_t c = 0; c < scaled.cols(); ++c)
                    scaled(r, c) *= out.canon.reps(i, k);
            m = m + scaled;
        }
        out.gens.emplace_back(a, b, std::move(m));
    }
    return out;
}

FgMorphism HomFgGroup::to_morphism(const std::vector<Int>& coords) const {
    if (coords.size() != group.ngens())
        throw Error("HomFgGroup::to_morphism: dim mismatch");
    IntMatrix m(b.ngens(), a.ngens());
    for (size_t k = 0; k < gens.size(); ++k) {
        if (coords[k] == 0) continue;
        IntMatrix scaled = gens[k].mat;
        for (size_t r = 0; r < scaled.rows(); ++r)
            for (size_t c = 0; c < scaled.cols(); ++c) scaled(r, c) *= coords[k];
        m = m + scaled;
    }
    return FgMorphism(a, b, std::move(m));
}

std::vector<Int> HomFgGroup::coords_of(const FgMorphism& f) const {
    if (!(f.dom == a) || !(f.cod == b))
        throw Error("HomFgGroup::coords_of: morphism shape mismatch");
    std::vector<Int> cyc(cyclic_orders.size(), Int(0));
    size_t slot = 0;
    for (size_t i = 0; i < a.ngens(); ++i) {
        Int da = a.gen_order(i);
        std::vector<Int> v = b.reduce(f.mat.col(i));
        for (size_t j = 0; j < b.ngens(); ++j) {
            Int db = b.gen_order(j);
            if (da == 0) {
                cyc[slot++] = v[j];
            } else {
                if (db == 0) {
                    if (v[j] != 0)
                        throw NotWellDefined("coords_of: torsion into free");
                    continue;
                }
                Int g = boost::multiprecision::gcd(da, db);
                if (g == 1) {
                    continue;
                }
                Int step = db / g;
                if (v[j] % step != 0)
                    throw NotWellDefined("coords_of: value outside Hom image");
                cyc[slot++] = v[j] / step;
            }
        }
    }
    return canon.express(cyc);
}

FgAbGroup ext_group(const FgAbGroup& a, const FgAbGroup& b) {
    std::vector<Int> orders;
    for (const Int& da : a.torsion) {
        for (size_t j = 0; j < b.rank; ++j) orders.push_back(da);
        for (const Int& db : b.torsion) {
            Int g = boost::multiprecision::gcd(da, db);
            if (g > 1) orders.push_back(g);
        }
    }
    const size_t n = orders.size();
    IntMatrix rel(n, n);
    for (size_t i = 0; i < n; ++i) rel(i, i) = orders[i];
    return z_subquotient(n, IntMatrix::identity(n), rel).group;
}

FgMorphism hom_induced(const FgMorphism& u, const HomFgGroup& hom_dom,
                       const HomFgGroup& hom_cod) {
    IntMatrix m(hom_cod.group.ngens(), hom_dom.group.ngens());
    for (size_t k = 0; k < hom_dom.gens.size(); ++k)
        m.set_col(k, hom_cod.coords_of(compose(hom_dom.gens[k], u)));
    return FgMorphism(hom_dom.group, hom_cod.group, std::move(m));
}

FgMorphism hom_postcompose(const FgMorphism& v, const HomFgGroup& hom_dom,
                           const HomFgGroup& hom_cod) {
    IntMatrix m(hom_cod.group.ngens(), hom_dom.group.ngens());
    for (size_t k = 0; k < hom_dom.gens.size(); ++k)
        m.set_col(k, hom_cod.coords_of(compose(v, hom_dom.gens[k])));
    return FgMorphism(hom_dom.group, hom_cod.group, std::move(m));
}

}  // namespace wb

namespace wb {

ZSubquotient group_from_presentation(size_t gens, const IntMatrix& relations) {
    if (relations.rows() != gens)
        throw Error("group_from_presentation: relation columns must have one "
                    "entry per generator");
    return z_subquotient(gens, IntMatrix::identity(gens), relations);
}

}  // namespace wb
