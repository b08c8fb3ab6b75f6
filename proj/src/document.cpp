#include "wb/document.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace wb {

namespace {

std::string sub(const std::string& path, const std::string& field) {
    return path.empty() ? field : path + "." + field;
}

std::string idx(const std::string& path, size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

const Json& field(const Json& j, const char* name, const std::string& path) {
    if (!j.is_object())
        throw DocumentError(path, "expected an object");
    auto it = j.find(name);
    if (it == j.end())
        throw DocumentError(path, std::string("missing field '") + name + "'");
    return *it;
}

int int_field(const Json& j, const char* name, const std::string& path) {
    const Json& f = field(j, name, path);
    if (!f.is_number_integer())
        throw DocumentError(sub(path, name), "expected an integer");
    return f.get<int>();
}

size_t size_field(const Json& j, const char* name, const std::string& path) {
    int v = int_field(j, name, path);
    if (v < 0) throw DocumentError(sub(path, name), "expected >= 0");
    return static_cast<size_t>(v);
}

const Json& array_field(const Json& j, const char* name,
                        const std::string& path) {
    const Json& f = field(j, name, path);
    if (!f.is_array())
        throw DocumentError(sub(path, name), "expected an array");
    return f;
}

// p/q with an optional sign on p; q omitted means 1.
Rat parse_fraction(const std::string& s, const std::string& path) {
    auto bad = [&] { throw DocumentError(path, "malformed rational '" + s + "'"); };
    std::string num = s, den = "1";
    if (auto slash = s.find('/'); slash != std::string::npos) {
        num = s.substr(0, slash);
        den = s.substr(slash + 1);
    }
    auto digits = [&](const std::string& t, bool sign_ok) {
        if (t.empty()) bad();
        size_t start = (sign_ok && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (start == t.size()) bad();
        for (size_t i = start; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) bad();
    };
    digits(num, true);
    digits(den, false);
    Int d(den);
    if (d == 0) throw DocumentError(path, "zero denominator in '" + s + "'");
    return Rat(Int(num), d);
}

}  // namespace

Json int_to_json(const Int& v) {
    using std::numeric_limits;
    if (v >= Int(numeric_limits<long long>::min()) &&
        v <= Int(numeric_limits<long long>::max()))
        return Json(static_cast<long long>(v));
    return Json(v.str());
}

Int int_from_json(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) {
        try {
            return Int(j.get<std::string>());
        } catch (const std::exception&) {
            throw DocumentError(path, "malformed integer string");
        }
    }
    throw DocumentError(path, "expected an integer");
}

std::string rat_to_string(const Rat& v) {
    return boost::multiprecision::numerator(v).str() + "/" +
           boost::multiprecision::denominator(v).str();
}

Rat rat_from_string(const std::string& s, const std::string& path) {
    return parse_fraction(s, path);
}

std::string qz_elt_to_string(const Rat& v) {
    Int n = boost::multiprecision::numerator(v);
    Int d = boost::multiprecision::denominator(v);
    Int r = n % d;
    if (r < 0) r += d;
    return rat_to_string(Rat(r, d)) + " mod 1";
}

Rat qz_elt_from_string(const std::string& s, const std::string& path) {
    const std::string suffix = " mod 1";
    if (s.size() < suffix.size() ||
        s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0)
        throw DocumentError(path, "expected 'p/q mod 1', got '" + s + "'");
    Rat v = parse_fraction(s.substr(0, s.size() - suffix.size()), path);
    Int n = boost::multiprecision::numerator(v);
    Int d = boost::multiprecision::denominator(v);
    Int r = n % d;
    if (r < 0) r += d;
    return Rat(r, d);
}

Json matrix_to_json(const IntMatrix& m) {
    Json entries = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(int_to_json(m(r, c)));
        entries.push_back(std::move(row));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

IntMatrix matrix_from_json(const Json& j, const std::string& path) {
    size_t rows = size_field(j, "rows", path);
    size_t cols = size_field(j, "cols", path);
    const Json& entries = array_field(j, "entries", path);
    if (entries.size() != rows)
        throw DocumentError(sub(path, "entries"), "expected " +
                            std::to_string(rows) + " rows");
    IntMatrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        const std::string rp = idx(sub(path, "entries"), r);
        if (!entries[r].is_array() || entries[r].size() != cols)
            throw DocumentError(rp, "expected a row of " +
                                std::to_string(cols) + " integers");
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<int>(r), static_cast<int>(c)) =
                int_from_json(entries[r][c], idx(rp, c));
    }
    return m;
}

Json rat_matrix_to_json(const Matrix<Rat>& m) {
    Json entries = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(rat_to_string(m(r, c)));
        entries.push_back(std::move(row));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Matrix<Rat> rat_matrix_from_json(const Json& j, const std::string& path) {
    size_t rows = size_field(j, "rows", path);
    size_t cols = size_field(j, "cols", path);
    const Json& entries = array_field(j, "entries", path);
    if (entries.size() != rows)
        throw DocumentError(sub(path, "entries"), "row count mismatch");
    Matrix<Rat> m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        const std::string rp = idx(sub(path, "entries"), r);
        if (!entries[r].is_array() || entries[r].size() != cols)
            throw DocumentError(rp, "column count mismatch");
        for (size_t c = 0; c < cols; ++c) {
            const Json& e = entries[r][c];
            if (!e.is_string())
                throw DocumentError(idx(rp, c), "expected a 'p/q' string");
            m(static_cast<int>(r), static_cast<int>(c)) =
                rat_from_string(e.get<std::string>(), idx(rp, c));
        }
    }
    return m;
}

Json group_to_json(const FgAbGroup& g) {
    Json tors = Json::array();
    for (const Int& d : g.torsion) tors.push_back(int_to_json(d));
    return Json{{"rank", g.rank}, {"torsion", tors}};
}

FgAbGroup group_from_json(const Json& j, const std::string& path) {
    size_t rank = size_field(j, "rank", path);
    const Json& tors = array_field(j, "torsion", path);
    std::vector<Int> t;
    for (size_t i = 0; i < tors.size(); ++i)
        t.push_back(int_from_json(tors[i], idx(sub(path, "torsion"), i)));
    try {
        return FgAbGroup(rank, std::move(t));
    } catch (const Error& e) {
        throw DocumentError(sub(path, "torsion"), e.what());
    }
}

Json morphism_to_json(const FgMorphism& f) {
    return Json{{"dom", group_to_json(f.dom)},
                {"cod", group_to_json(f.cod)},
                {"matrix", matrix_to_json(f.mat)}};
}

FgMorphism morphism_from_json(const Json& j, const std::string& path) {
    FgAbGroup dom = group_from_json(field(j, "dom", path), sub(path, "dom"));
    FgAbGroup cod = group_from_json(field(j, "cod", path), sub(path, "cod"));
    IntMatrix m = matrix_from_json(field(j, "matrix", path), sub(path, "matrix"));
    try {
        return FgMorphism(std::move(dom), std::move(cod), std::move(m));
    } catch (const Error& e) {
        throw DocumentError(sub(path, "matrix"), e.what());
    }
}

Json complex_to_json(const CochainComplex& c) {
    Json groups = Json::array(), deltas = Json::array();
    for (const auto& g : c.groups) groups.push_back(group_to_json(g));
    for (const auto& d : c.deltas) deltas.push_back(morphism_to_json(d));
    return Json{{"lo", c.lo}, {"groups", groups}, {"deltas", deltas}};
}

CochainComplex complex_from_json(const Json& j, const std::string& path) {
    int lo = int_field(j, "lo", path);
    const Json& gs = array_field(j, "groups", path);
    const Json& ds = array_field(j, "deltas", path);
    std::vector<FgAbGroup> groups;
    for (size_t i = 0; i < gs.size(); ++i)
        groups.push_back(group_from_json(gs[i], idx(sub(path, "groups"), i)));
    std::vector<FgMorphism> deltas;
    for (size_t i = 0; i < ds.size(); ++i)
        deltas.push_back(morphism_from_json(ds[i], idx(sub(path, "deltas"), i)));
    CochainComplex c;
    try {
        c = make_complex(lo, std::move(groups), std::move(deltas));
    } catch (const Error& e) {
        throw DocumentError(path, e.what());
    }
    ComplexReport rep = validate(c);
    if (!rep.ok) throw DocumentError(path, rep.message);
    return c;
}

Json cochain_map_to_json(const CochainMap& f) {
    Json comps = Json::array();
    for (const auto& c : f.comps) comps.push_back(morphism_to_json(c));
    return Json{{"src", complex_to_json(f.src)},
                {"dst", complex_to_json(f.dst)},
                {"lo", f.lo},
                {"components", comps}};
}

CochainMap cochain_map_from_json(const Json& j, const std::string& path) {
    CochainComplex src =
        complex_from_json(field(j, "src", path), sub(path, "src"));
    CochainComplex dst =
        complex_from_json(field(j, "dst", path), sub(path, "dst"));
    int lo = int_field(j, "lo", path);
    const Json& cs = array_field(j, "components", path);
    std::vector<FgMorphism> comps;
    for (size_t i = 0; i < cs.size(); ++i)
        comps.push_back(
            morphism_from_json(cs[i], idx(sub(path, "components"), i)));
    try {
        return make_cochain_map(std::move(src), std::move(dst), lo,
                                std::move(comps));
    } catch (const Error& e) {
        throw DocumentError(path, e.what());
    }
}

Json tower_to_json(const TowerOfGroups& t) {
    Json prefix = Json::array(), maps = Json::array();
    for (const auto& g : t.prefix) prefix.push_back(group_to_json(g));
    for (const auto& m : t.prefix_maps) maps.push_back(morphism_to_json(m));
    Json j{{"prefix", prefix}, {"maps", maps}};
    j["tail"] = t.tail ? group_to_json(*t.tail) : Json();
    j["tail_map"] = t.tail_map ? morphism_to_json(*t.tail_map) : Json();
    if (t.truncation_depth) j["truncation_depth"] = t.truncation_depth;
    return j;
}

TowerOfGroups tower_from_json(const Json& j, const std::string& path) {
    TowerOfGroups t;
    const Json& ps = array_field(j, "prefix", path);
    for (size_t i = 0; i < ps.size(); ++i)
        t.prefix.push_back(group_from_json(ps[i], idx(sub(path, "prefix"), i)));
    const Json& ms = array_field(j, "maps", path);
    for (size_t i = 0; i < ms.size(); ++i)
        t.prefix_maps.push_back(
            morphism_from_json(ms[i], idx(sub(path, "maps"), i)));
    if (j.contains("tail") && !j["tail"].is_null())
        t.tail = group_from_json(j["tail"], sub(path, "tail"));
    if (j.contains("tail_map") && !j["tail_map"].is_null())
        t.tail_map = morphism_from_json(j["tail_map"], sub(path, "tail_map"));
    if (j.contains("truncation_depth")) {
        t.truncation_depth = int_field(j, "truncation_depth", path);
        if (t.truncation_depth < 0)
            throw DocumentError(sub(path, "truncation_depth"),
                                "expected >= 0");
    }
    try {
        validate_tower_groups(t);
    } catch (const Error& e) {
        throw DocumentError(path, e.what());
    }
    return t;
}

Json system_to_json(const TowerOfComplexes& t) {
    Json prefix = Json::array(), maps = Json::array();
    for (const auto& c : t.prefix) prefix.push_back(complex_to_json(c));
    for (const auto& m : t.prefix_maps) maps.push_back(cochain_map_to_json(m));
    Json j{{"prefix", prefix}, {"maps", maps}};
    j["tail"] = t.tail ? complex_to_json(*t.tail) : Json();
    j["tail_map"] = t.tail_map ? cochain_map_to_json(*t.tail_map) : Json();
    return j;
}

TowerOfComplexes system_from_json(const Json& j, const std::string& path) {
    TowerOfComplexes t;
    const Json& ps = array_field(j, "prefix", path);
    for (size_t i = 0; i < ps.size(); ++i)
        t.prefix.push_back(
            complex_from_json(ps[i], idx(sub(path, "prefix"), i)));
    const Json& ms = array_field(j, "maps", path);
    for (size_t i = 0; i < ms.size(); ++i)
        t.prefix_maps.push_back(
            cochain_map_from_json(ms[i], idx(sub(path, "maps"), i)));
    if (j.contains("tail") && !j["tail"].is_null())
        t.tail = complex_from_json(j["tail"], sub(path, "tail"));
    if (j.contains("tail_map") && !j["tail_map"].is_null())
        t.tail_map = cochain_map_from_json(j["tail_map"], sub(path, "tail_map"));
    try {
        validate_tower(t);
    } catch (const Error& e) {
        throw DocumentError(path, e.what());
    }
    return t;
}

Json simplicial_to_json(const SimplicialComplex& k) {
    Json facets = Json::array();
    for (const auto& f : k.facets) facets.push_back(f);
    return Json{{"vertices", k.nvertices}, {"facets", facets}};
}

SimplicialComplex simplicial_from_json(const Json& j,
                                       const std::string& path) {
    size_t nv = size_field(j, "vertices", path);
    const Json& fs = array_field(j, "facets", path);
    std::vector<std::vector<int>> facets;
    for (size_t i = 0; i < fs.size(); ++i) {
        const std::string fp = idx(sub(path, "facets"), i);
        if (!fs[i].is_array()) throw DocumentError(fp, "expected an array");
        std::vector<int> f;
        for (size_t v = 0; v < fs[i].size(); ++v) {
            if (!fs[i][v].is_number_integer())
                throw DocumentError(idx(fp, v), "expected an integer vertex");
            f.push_back(fs[i][v].get<int>());
        }
        facets.push_back(std::move(f));
    }
    try {
        return make_simplicial(nv, std::move(facets));
    } catch (const Error& e) {
        throw DocumentError(sub(path, "facets"), e.what());
    }
}

bool is_divisible_coeff(const Json& j) {
    return j.is_object() && j.contains("divisible");
}

QZGroup divisible_from_json(const Json& j, const std::string& path) {
    const Json& d = field(j, "divisible", path);
    size_t a = size_field(d, "q", sub(path, "divisible"));
    size_t b = size_field(d, "qz", sub(path, "divisible"));
    return QZGroup::divisible(a, b);
}

namespace {

Json group_desc(const FgAbGroup& g) {
    Json j = group_to_json(g);
    j["describe"] = g.describe();
    return j;
}

}  // namespace

Json report_to_json(const UcfReport& r) {
    return Json{{"kind", "ucf"},
                {"degree", r.n},
                {"ext", group_desc(r.ext)},
                {"ext_via_beta", group_desc(r.ext_via_beta)},
                {"hbar", group_desc(r.hbar)},
                {"hom", group_desc(r.hom)},
                {"chi_matrix", matrix_to_json(r.chi_matrix)},
                {"xi_matrix", matrix_to_json(r.xi_matrix)},
                {"ext_routes_agree", r.ext_routes_agree},
                {"chi_well_defined", r.chi_well_defined},
                {"chi_kills_beta", r.chi_kills_beta},
                {"chi_injective", r.chi_injective},
                {"xi_surjective", r.xi_surjective},
                {"xi_chi_zero", r.xi_chi_zero},
                {"ker_xi_hit_by_chi", r.ker_xi_hit_by_chi},
                {"exact", r.exact()}};
}

Json report_to_json(const KerXiReport& r) {
    return Json{{"kind", "ker-xi"},
                {"degree", r.n},
                {"sigma_injective", r.sigma_injective},
                {"omega_lands_in_ker_xi", r.omega_lands_in_ker_xi},
                {"omega_onto_ker_xi", r.omega_onto_ker_xi},
                {"im_sigma_eq_ker_omega", r.im_sigma_eq_ker_omega},
                {"ok", r.ok()}};
}

Json report_to_json(const NaturalityReport& r) {
    return Json{{"kind", "naturality"},
                {"degree", r.n},
                {"cone_map_is_chain_map", r.cone_map_is_chain_map},
                {"square_tau", r.square_tau},
                {"square_mu", r.square_mu},
                {"square_xi", r.square_xi},
                {"square_chi", r.square_chi},
                {"ok", r.ok()}};
}

Json report_to_json(const ClassicalCompare& r) {
    return Json{{"kind", "classical-compare"},
                {"degree", r.n},
                {"classical", group_desc(r.classical)},
                {"hbar", group_desc(r.hbar)},
                {"alpha_star", matrix_to_json(r.alpha_star)},
                {"alpha_star_iso", r.alpha_star_iso},
                {"square_chi", r.square_chi},
                {"square_xi", r.square_xi},
                {"connecting_well_defined", r.connecting_well_defined},
                {"ok", r.ok()}};
}

Json report_to_json(const LimResult& r) {
    Json projections = Json::array();
    for (const auto& p : r.projections)
        projections.push_back(morphism_to_json(p));
    return Json{{"kind", "lim"},
                {"group", group_desc(r.group)},
                {"complete", r.complete},
                {"projections", projections},
                {"stabilization_depth", r.stabilization_depth},
                {"truncated", group_desc(r.truncated)}};
}

Json report_to_json(const Lim1Certificate& r) {
    return Json{{"kind", "lim1"},
                {"verdict", to_string(r.verdict)},
                {"depth", r.depth},
                {"stable_image", matrix_to_json(r.stable_image)},
                {"image_at_depth", matrix_to_json(r.image_at_depth)},
                {"image_at_next", matrix_to_json(r.image_at_next)},
                {"index_factor", int_to_json(r.index_factor)},
                {"note", r.note}};
}

Json report_to_json(const Lemma2Report& r) {
    return Json{{"kind", "continuity"},
                {"exact_mode", r.exact_mode},
                {"depth", r.depth},
                {"squares_commute", r.squares_commute},
                {"deep_iso", r.deep_iso},
                {"pullback_iso", r.pullback_iso},
                {"ok", r.ok()}};
}

Json report_to_json(const Cor2Report& r) {
    return Json{{"kind", "injective-hom-lim1"},
                {"into_q", to_string(r.into_q)},
                {"into_qz", to_string(r.into_qz)},
                {"depth", r.depth},
                {"ok", r.ok()}};
}

Json report_to_json(const Lemma4Report& r) {
    return Json{{"kind", "ker-xi-lim1"},
                {"sub_tower", to_string(r.sub_tower)},
                {"mid_tower", to_string(r.mid_tower)},
                {"levels_exact", r.levels_exact},
                {"squares_commute", r.squares_commute},
                {"ker_xi", to_string(r.ker_xi)},
                {"depth", r.depth},
                {"ok", r.ok()}};
}

Json report_to_json(const Cor3Report& r) {
    return Json{{"kind", "cycle-tower-lim1"},
                {"ker_xi", report_to_json(r.lemma4)},
                {"xi_levelwise_surjective", r.xi_levelwise_surjective},
                {"hom_certificate", report_to_json(r.hom_cert)},
                {"zbar", to_string(r.zbar)},
                {"depth", r.depth},
                {"ok", r.ok()}};
}

Json report_to_json(const Theorem3Report& r) {
    Json j{{"kind", "limit-sequence"},
           {"which", r.i},
           {"depth", r.depth},
           {"levelwise_ucf", r.levelwise_ucf},
           {"squares_commute", r.squares_commute},
           {"ok", r.ok()}};
    if (r.i == 0) {
        j["lims_complete"] = r.lims_complete;
        j["lim_ext"] = group_desc(r.lim_ext);
        j["lim_hbar"] = group_desc(r.lim_hbar);
        j["lim_hom"] = group_desc(r.lim_hom);
        j["exact"] = r.exact;
    } else {
        j["ext_certificate"] = report_to_json(r.ext_cert);
        j["hom_certificate"] = report_to_json(r.hom_cert);
        j["hbar_certificate"] = report_to_json(r.hbar_cert);
        j["split_consistent"] = r.split_consistent;
    }
    return j;
}

Json report_to_json(const MilnorReport& r) {
    Json j{{"kind", "main-sequence"},
           {"degree", r.n},
           {"exact_mode", r.exact_mode},
           {"ok", r.ok()}};
    if (r.exact_mode) {
        j["hbar_colim"] = group_desc(r.hbar_colim);
        j["lim_hbar"] = group_desc(r.lim_hbar);
        j["lim1_next"] = report_to_json(r.lim1_next);
        j["pi_injective"] = r.pi_injective;
        j["pi_surjective"] = r.pi_surjective;
        j["standing_fact"] = r.standing_fact;
    } else {
        j["lim_complete"] = r.lim_complete;
        j["lim1_next"] = report_to_json(r.lim1_next);
        j["hom_next_certificate"] = report_to_json(r.hom_next_cert);
        j["diagnostics"] = r.diagnostics;
    }
    return j;
}

Json report_to_json(const Cor5Report& r) {
    return Json{{"kind", "divisible-xi"},
                {"colim_side_iso", r.colim_side_iso},
                {"level_side_iso", r.level_side_iso},
                {"groups_isomorphic", r.groups_isomorphic},
                {"ok", r.ok()}};
}

Json parse_document(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw DocumentError("byte " + std::to_string(e.byte), e.what());
    }
}

Json load_document(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw DocumentError(filename, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw DocumentError(filename + ", byte " + std::to_string(e.byte),
                            e.what());
    }
}

}  // namespace wb
