#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gen.hpp"
#include "wb/complexes.hpp"

using namespace wb;
using namespace wbtest;

namespace {

FgMorphism sum_morphism(const FgMorphism& a, const FgMorphism& b) {
    return FgMorphism(a.dom, a.cod, a.mat + b.mat);
}

IntMatrix scaled_identity(size_t n, int s) {
    IntMatrix m = IntMatrix::identity(n);
    for (size_t k = 0; k < n; ++k) m(k, k) = s;
    return m;
}

}  // namespace

TEST_CASE("complex construction and shape validation") {
    FgAbGroup z = FgAbGroup::free(1);
    CHECK_THROWS_AS(make_complex(0, {z, z}, {}), Error);
    CHECK_THROWS_AS(
        make_complex(0, {z, FgAbGroup::free(2)},
                     {FgMorphism::zero(z, z)}),
        Error);
    CochainComplex c = make_complex(3, {z, z}, {FgMorphism::zero(z, z)});
    CHECK(c.lo == 3);
    CHECK(c.hi() == 4);
    CHECK(c.group(3) == z);
    CHECK(c.group(2).is_trivial());
    CHECK(c.group(5).is_trivial());
    CHECK(c.differential(4).cod.is_trivial());
}

TEST_CASE("validate reports the offending degree") {
    CochainComplex empty;
    CHECK(validate(empty).ok);

    CHECK(validate(circle_complex()).ok);

    // d1 . d0 = [[1]]: invalid at degree 0.
    FgAbGroup z = FgAbGroup::free(1);
    IntMatrix one = IntMatrix::identity(1);
    CochainComplex bad =
        make_complex(0, {z, z, z},
                     {FgMorphism(z, z, one), FgMorphism(z, z, one)});
    ComplexReport r = validate(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.degree == 0);
}

TEST_CASE("cohomology anchors") {
    FgAbGroup z = FgAbGroup::free(1);

    SUBCASE("0 -> Z --x2--> Z -> 0") {
        IntMatrix two(1, 1);
        two(0, 0) = 2;
        CochainComplex c = make_complex(0, {z, z}, {FgMorphism(z, z, two)});
        CHECK(cohomology(c, 0).h.is_trivial());
        CHECK(cohomology(c, 1).h == FgAbGroup::cyclic(2));
    }

    SUBCASE("zero differentials give H^n = C^n") {
        Rng rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            FgAbGroup a = random_group(rng), b = random_group(rng);
            CochainComplex c = make_complex(0, {a, b},
                                            {FgMorphism::zero(a, b)});
            CHECK(cohomology(c, 0).h == a);
            CHECK(cohomology(c, 1).h == b);
        }
    }

    SUBCASE("triangle circle") {
        CochainComplex c = circle_complex();
        CHECK(cohomology(c, 0).h == FgAbGroup::free(1));
        CHECK(cohomology(c, 1).h == FgAbGroup::free(1));
    }

    SUBCASE("degrees outside the support are zero") {
        CochainComplex c = circle_complex();
        CHECK(cohomology(c, -1).h.is_trivial());
        CHECK(cohomology(c, 2).h.is_trivial());
    }
}

TEST_CASE("cohomology data invariants on random complexes") {
    Rng rng(20260826);
    for (int trial = 0; trial < 40; ++trial) {
        CochainComplex c = random_complex(rng);
        REQUIRE(validate(c).ok);
        for (int n = c.lo; n <= c.hi(); ++n) {
            CohomologyData hd = cohomology(c, n);

            // j . i . d' equals the incoming differential.
            CHECK(compose(hd.j, compose(hd.i, hd.delta_prime))
                      .equals(c.differential(n - 1)));
            // q kills the outgoing differential.
            CHECK(compose(hd.q, c.differential(n)).is_zero());
            // p is surjective with kernel exactly the image of i.
            CHECK(image_fg(hd.p).group == hd.h);
            CHECK(compose(hd.p, hd.i).is_zero());
            FgSubgroupResult kp = kernel_fg(hd.p);
            CHECK(is_isomorphic(kp.group, image_fg(hd.i).group));
            for (size_t k = 0; k < kp.group.ngens(); ++k)
                CHECK(solve_preimage_fg(hd.i, kp.map.mat.col(k)).has_value());

            // Representatives are cocycles mapping to the unit classes.
            for (size_t k = 0; k < hd.h.ngens(); ++k) {
                std::vector<Int> cls = hd.class_of(hd.reps.col(k));
                for (size_t j2 = 0; j2 < cls.size(); ++j2)
                    CHECK(cls[j2] == (j2 == k ? 1 : 0));
            }
        }
    }
}

TEST_CASE("euler characteristic matches on cohomology") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        CochainComplex c = random_complex(rng, pick(rng, -2, 2));
        Int chi = euler_characteristic(c);
        Int chi_h = 0;
        for (int n = c.lo; n <= c.hi(); ++n) {
            Int r(cohomology(c, n).h.rank);
            chi_h += (n % 2 == 0) ? r : -r;
        }
        CHECK(chi == chi_h);
    }
}

TEST_CASE("shift commutes with cohomology") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        CochainComplex c = random_complex(rng);
        int k = pick(rng, -3, 3);
        CochainComplex s = shift(c, k);
        for (int n = c.lo; n <= c.hi(); ++n)
            CHECK(cohomology(s, n + k).h == cohomology(c, n).h);
    }
}

TEST_CASE("cochain maps: construction and induced maps") {
    SUBCASE("non-commuting square is rejected") {
        FgAbGroup z = FgAbGroup::free(1);
        IntMatrix two(1, 1);
        two(0, 0) = 2;
        CochainComplex c = make_complex(0, {z, z}, {FgMorphism(z, z, two)});
        CochainComplex d = make_complex(0, {z, z}, {FgMorphism::zero(z, z)});
        CHECK_THROWS_AS(make_cochain_map(c, d, 0,
                                         {FgMorphism::identity(z),
                                          FgMorphism::identity(z)}),
                        Error);
    }

    SUBCASE("identity induces the identity") {
        CochainComplex c = circle_complex();
        for (int n = 0; n <= 1; ++n) {
            FgMorphism f = induced_on_cohomology(identity_cochain_map(c), n);
            CHECK(f.equals(FgMorphism::identity(f.dom)));
        }
    }

    SUBCASE("degree-p self-map of the circle is x p on H^1") {
        CochainComplex c = small_circle_complex();
        FgAbGroup z = FgAbGroup::free(1);
        for (int p : {2, 3, 5}) {
            IntMatrix pm(1, 1);
            pm(0, 0) = p;
            CochainMap f = make_cochain_map(
                c, c, 0, {FgMorphism::identity(z), FgMorphism(z, z, pm)});
            FgMorphism h1 = induced_on_cohomology(f, 1);
            CHECK(h1.mat(0, 0) == p);
        }
    }

    SUBCASE("null-homotopic maps vanish on cohomology") {
        Rng rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            CochainComplex c = random_complex(rng, 0, 4, 3, 0, true);
            // f_n = d(n-1) . s_n + s_{n+1} . d(n) for random s.
            std::vector<FgMorphism> s;  // s[k]: C^{lo+k} -> C^{lo+k-1}
            for (int n = c.lo; n <= c.hi(); ++n)
                s.push_back(random_morphism(rng, c.group(n), c.group(n - 1)));
            std::vector<FgMorphism> comps;
            for (int n = c.lo; n <= c.hi(); ++n) {
                FgMorphism left =
                    compose(c.differential(n - 1),
                            s[static_cast<size_t>(n - c.lo)]);
                FgMorphism right =
                    n < c.hi()
                        ? compose(s[static_cast<size_t>(n - c.lo + 1)],
                                  c.differential(n))
                        : FgMorphism::zero(c.group(n), c.group(n));
                comps.push_back(sum_morphism(left, right));
            }
            CochainMap f = make_cochain_map(c, c, c.lo, std::move(comps));
            for (int n = c.lo; n <= c.hi(); ++n)
                CHECK(induced_on_cohomology(f, n).is_zero());
        }
    }

    SUBCASE("induced maps respect composition") {
        Rng rng(31);
        for (int trial = 0; trial < 15; ++trial) {
            // Two-level random maps: c -> c -> c via multiplication maps.
            CochainComplex c = random_complex(rng);
            std::vector<FgMorphism> fs, gs;
            for (int n = c.lo; n <= c.hi(); ++n) {
                size_t ng = c.group(n).ngens();
                fs.push_back(FgMorphism(c.group(n), c.group(n),
                                        scaled_identity(ng, 2)));
                gs.push_back(FgMorphism(c.group(n), c.group(n),
                                        scaled_identity(ng, 3)));
            }
            CochainMap f = make_cochain_map(c, c, c.lo, fs);
            CochainMap g = make_cochain_map(c, c, c.lo, gs);
            CochainMap gf = compose(g, f);
            for (int n = c.lo; n <= c.hi(); ++n) {
                FgMorphism lhs = induced_on_cohomology(gf, n);
                FgMorphism rhs = compose(induced_on_cohomology(g, n),
                                         induced_on_cohomology(f, n));
                CHECK(lhs.equals(rhs));
            }
        }
    }
}

TEST_CASE("towers and colimits") {
    CochainComplex c = circle_complex();

    SUBCASE("constant tower with identity bonding") {
        TowerOfComplexes t;
        t.tail = c;
        t.tail_map = identity_cochain_map(c);
        CochainComplex l = colimit(t);
        CHECK(cohomology(l, 0).h == FgAbGroup::free(1));
        CHECK(cohomology(l, 1).h == FgAbGroup::free(1));
    }

    SUBCASE("prefix-only tower gives the last complex") {
        Rng rng(3);
        CochainComplex a = random_complex(rng);
        TowerOfComplexes t;
        t.prefix = {a, circle_complex()};
        // Zero bonding map is always valid.
        std::vector<FgMorphism> zs;
        for (int n = a.lo; n <= a.hi(); ++n)
            zs.push_back(
                FgMorphism::zero(a.group(n), circle_complex().group(n)));
        t.prefix_maps = {make_cochain_map(a, circle_complex(), a.lo, zs)};
        CochainComplex l = colimit(t);
        CHECK(cohomology(l, 1).h == FgAbGroup::free(1));
    }

    SUBCASE("non-iso tail self-map is rejected with the failing degree") {
        CochainComplex sc = small_circle_complex();
        FgAbGroup z = FgAbGroup::free(1);
        IntMatrix two(1, 1);
        two(0, 0) = 2;
        TowerOfComplexes t;
        t.tail = sc;
        t.tail_map = make_cochain_map(
            sc, sc, 0, {FgMorphism::identity(z), FgMorphism(z, z, two)});
        CHECK_THROWS_AS(colimit(t), NotFinitelyGeneratedColimit);
        try {
            colimit(t);
        } catch (const NotFinitelyGeneratedColimit& e) {
            CHECK(e.degree == 1);
        }
    }

    SUBCASE("eventually-iso tower: bonding maps become isos on cohomology") {
        TowerOfComplexes t;
        t.prefix = {small_circle_complex()};
        CochainComplex sc = small_circle_complex();
        FgAbGroup z = FgAbGroup::free(1);
        t.prefix_maps = {make_cochain_map(
            small_circle_complex(), sc, 0,
            {FgMorphism::identity(z), FgMorphism::identity(z)})};
        t.tail = sc;
        t.tail_map = identity_cochain_map(sc);
        validate_tower(t);
        CochainComplex l = colimit(t);
        for (int n = 0; n <= 1; ++n) {
            FgMorphism ind = induced_on_cohomology(t.bond(0), n);
            CHECK(is_isomorphism_fg(ind));
            CHECK(cohomology(l, n).h == ind.cod);
        }
    }
}
