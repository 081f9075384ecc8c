#include "logclass/logarith.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace logclass {

namespace {

long vp_z(const mpz_class& n, long p) {
    mpz_class t = n, q, r;
    long v = 0;
    mpz_class pp(p);
    while (t != 0) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), t.get_mpz_t(), pp.get_mpz_t());
        if (r != 0) break;
        t = q;
        ++v;
    }
    return v;
}

// deterministic unit 1 + ell*h(q, seed) used by the perturbed convention
PadicNum perturbation_unit(long q, long ell, unsigned long seed, long m) {
    unsigned long long x = static_cast<unsigned long long>(q) * 0x9e3779b97f4a7c15ULL ^
                           (seed * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL);
    x ^= x >> 31;
    x *= 0xd6e8feb86659fd93ULL;
    x ^= x >> 27;
    mpz_class h(static_cast<unsigned long>(x % 1000003ULL));
    mpz_class u = 1 + mpz_class(ell) * h;
    return PadicNum::from_unit(ell, 0, u, m);
}

PadicNum exact_int(const mpz_class& n, long ell, long m) {
    return PadicNum::from_integer(n, ell, m + 4 + vp_z(n == 0 ? mpz_class(1) : n, ell));
}

long residue_degree(const BaseField& F, const PlaceTag& place) {
    if (F.is_rational()) return 1;
    return place.kind == SplitKind::Inert ? 2 : 1;
}

}  // namespace

unsigned long long LogClassGroup::order() const {
    unsigned long long o = 1;
    for (long e : invariants)
        for (long i = 0; i < e; ++i) {
            unsigned long long next = o * static_cast<unsigned long long>(ell);
            if (next / static_cast<unsigned long long>(ell) != o)
                throw std::overflow_error("LogClassGroup::order: beyond 64 bits");
            o = next;
        }
    return o;
}

long ell_place_exponent(const BaseField& F, const PlaceTag& place, long ell) {
    if (place.p != ell) throw std::invalid_argument("ell_place_exponent: place not above ell");
    long probe = (ell == 2) ? 8 : 6;
    auto val_of_log = [&](const mpq_class& n) -> long {
        PadicNum lg = iwasawa_log_exact(n, ell, probe);
        if (lg.is_zero()) return probe;  // ignored by min unless everything vanishes
        return lg.val();
    };
    if (F.is_rational() || place.kind != SplitKind::Ramified) {
        // local field Q_ell (split) or its unramified quadratic extension
        // (inert): the norm image of the units is the full principal-unit
        // group, whose Log is generated by Log(1+ell) (Log(5) at ell = 2)
        return val_of_log(ell == 2 ? mpq_class(5) : mpq_class(1 + ell));
    }
    // ramified: take the minimum over norms of a generating grid of global
    // integers, which sample the local norm-unit group
    const QuadField& K = *F.K;
    long bound = std::max<long>(2 * ell + 2, 16);
    bound = std::min<long>(bound, 64);
    long k = probe;
    bool odd_disc = mpz_odd_p(K.disc().get_mpz_t());
    for (long u = 0; u <= bound; ++u)
        for (long v = 0; v <= bound; ++v) {
            if (u == 0 && v == 0) continue;
            mpz_class n;
            if (odd_disc)
                n = mpz_class(u) * u + mpz_class(u) * v +
                    mpz_class(v) * v * ((1 - mpz_class(K.d())) / 4);
            else
                n = mpz_class(u) * u - mpz_class(K.d()) * v * v;
            if (n == 0 || mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(ell)))
                continue;
            k = std::min(k, val_of_log(mpq_class(n)));
            if (k == 1) return k;
        }
    // squares of rational principal units are always norms
    k = std::min(k, val_of_log(mpq_class((1 + ell) * (1 + ell))));
    if (ell == 2) k = std::min(k, val_of_log(mpq_class(25)));
    return k;
}

PadicNum place_degree(const BaseField& F, const PlaceTag& place, long ell, long m,
                      const Convention& conv) {
    if (m < 2) throw std::invalid_argument("place_degree: m < 2");
    if (place.p == ell) {
        long k = ell_place_exponent(F, place, ell);
        return PadicNum::from_unit(ell, k, 1, m);
    }
    long f = residue_degree(F, place);
    mpz_class Np = pow_ui(place.p, f);
    PadicNum deg = iwasawa_log_exact(mpq_class(Np), ell, m);
    if (conv.unit_seed != 0)
        deg = deg * perturbation_unit(place.p, ell, conv.unit_seed, std::max<long>(m, 2));
    return deg;
}

PadicNum log_valuation(const BaseField& F, const QuadRat& x, const PlaceTag& place, long ell,
                       long m, const Convention& conv) {
    if (x.num.a == 0 && x.num.b == 0) throw std::domain_error("log_valuation: zero input");
    if (place.p != ell) {
        // classical valuation, exact
        long v;
        if (F.is_rational()) {
            if (x.num.b != 0) throw std::invalid_argument("log_valuation: non-rational over Q");
            v = vp_z(x.num.a, place.p) - vp_z(mpz_class(x.num.den) * x.den_r, place.p);
        } else {
            v = F.K->valuation(x, place);
        }
        PadicNum pv = exact_int(mpz_class(v), ell, m);
        if (conv.unit_seed != 0)
            pv = pv * perturbation_unit(place.p, ell, conv.unit_seed, m + 4).inverse();
        return pv.truncated(m);
    }
    long k = ell_place_exponent(F, place, ell);
    if (F.is_rational() || place.kind == SplitKind::Inert || place.kind == SplitKind::Ramified) {
        // exact local norm: identity over Q, the global norm otherwise
        mpq_class nrm;
        if (F.is_rational()) {
            nrm = mpq_class(x.num.a, mpz_class(x.num.den) * x.den_r);
            nrm.canonicalize();
        } else {
            nrm = x.norm_q();
        }
        PadicNum lg = iwasawa_log_exact(nrm, ell, m + k);
        return (-lg).shifted(-k).truncated(m);
    }
    // split place: embed and take the Iwasawa log of the local image
    const QuadField& K = *F.K;
    long M = m + k + 4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        PadicNum loc = K.embed(x, place, M);
        if (loc.relprec() >= m + k + 1) {
            PadicNum lg = iwasawa_log(loc);
            PadicNum nu = (-lg).shifted(-k);
            if (nu.absprec() >= m) return nu.truncated(m);
        }
        M *= 2;
    }
    throw precision_error("log_valuation: could not certify " + std::to_string(m) + " digits");
}

LogDivisor log_divisor(const BaseField& F, const QuadRat& x, const std::vector<PlaceTag>& S,
                       long ell, long m, const Convention& conv) {
    // S-unit check: the valuation must vanish at every place outside S.
    // Candidate primes are those dividing the rational norm or a denominator.
    {
        mpq_class N = F.is_rational() ? mpq_class(x.num.a, mpz_class(x.num.den) * x.den_r)
                                      : x.norm_q();
        N.canonicalize();
        mpz_class content = abs(N.get_num()) * N.get_den() * x.den_r;
        std::vector<long> sprimes;
        for (const auto& t : S) sprimes.push_back(t.p);
        std::vector<long> candidates;
        mpz_class c = content;
        for (mpz_class p = 2; p * p <= c; ++p) {
            if (c % p != 0) continue;
            while (c % p == 0) c /= p;
            candidates.push_back(p.get_si());
        }
        if (c > 1) candidates.push_back(c.get_si());
        for (long q : candidates) {
            if (std::find(sprimes.begin(), sprimes.end(), q) != sprimes.end()) continue;
            if (F.is_rational()) {
                long v = vp_z(x.num.a, q) - vp_z(mpz_class(x.num.den) * x.den_r, q);
                if (v != 0)
                    throw std::invalid_argument("log_divisor: x is not an S-unit (prime " +
                                                std::to_string(q) + ")");
                continue;
            }
            for (const auto& t : F.K->splitting(q, ell))
                if (F.K->valuation(x, t) != 0)
                    throw std::invalid_argument("log_divisor: x is not an S-unit (prime " +
                                                std::to_string(q) + ")");
        }
    }
    LogDivisor D;
    PadicNum degree = PadicNum::zero(ell, m);
    for (const auto& place : S) {
        PadicNum coeff = log_valuation(F, x, place, ell, m + 2, conv);
        PadicNum deg = place_degree(F, place, ell, m + 2, conv);
        degree = degree + coeff * deg;
        if (!coeff.is_zero()) D.support.push_back({place, coeff});
    }
    if (!degree.is_zero())
        throw std::logic_error("log_divisor: principal divisor of nonzero degree (bug)");
    D.degree = degree;
    return D;
}

// ------------------------------------------------------- S-unit machinery

namespace {

struct PlaceSystem {
    std::vector<PlaceTag> places;
    std::vector<Ideal> ideals;          // prime (or rational-prime) ideal per place
    std::vector<long> aux_primes;       // auxiliary split primes (pairs in `places`)
};

Ideal place_ideal(const QuadField& K, const PlaceTag& t) {
    if (t.kind == SplitKind::Inert) {
        Ideal one = K.ideal_one();
        return Ideal{mpz_class(t.p), one.a, one.b};
    }
    return K.prime_ideal(t.p, t.kind);
}

unsigned long subgroup_order(const QuadField& K, const std::vector<Form>& gens) {
    std::map<Form, bool> seen;
    std::deque<Form> todo;
    Form id = K.class_identity();
    seen[id] = true;
    todo.push_back(id);
    while (!todo.empty()) {
        Form f = todo.front();
        todo.pop_front();
        for (const auto& g : gens) {
            Form h = K.class_compose(f, g);
            if (!seen.count(h)) {
                seen[h] = true;
                todo.push_back(h);
            }
        }
    }
    return seen.size();
}

PlaceSystem build_places(const QuadField& K, long ell, bool force_extra) {
    PlaceSystem ps;
    for (const auto& t : K.splitting(ell, ell)) ps.places.push_back(t);
    std::vector<Form> gens;
    for (const auto& t : ps.places)
        if (t.kind != SplitKind::Inert) gens.push_back(K.class_of_ideal(place_ideal(K, t)));
    unsigned long covered = gens.empty() ? 1 : subgroup_order(K, gens);
    long extra_wanted = force_extra ? 1 : 0;
    long q = 1;
    while ((K.h() / covered) % ell == 0 || extra_wanted > 0) {
        bool needed = (K.h() / covered) % ell == 0;
        // next auxiliary split prime
        do {
            ++q;
            bool isprime = q >= 2;
            for (long t = 2; t * t <= q; ++t)
                if (q % t == 0) {
                    isprime = false;
                    break;
                }
            if (!isprime) continue;
            if (q == ell) continue;
            if (K.splitting_kind(q) == SplitKind::SplitFirst) break;
        } while (q < 2000000);
        if (q >= 2000000) throw std::runtime_error("build_places: no auxiliary prime found");
        Form cq = K.class_of_ideal(K.prime_ideal(q, SplitKind::SplitFirst));
        std::vector<Form> gens2 = gens;
        gens2.push_back(cq);
        unsigned long covered2 = subgroup_order(K, gens2);
        if (!needed || covered2 > covered) {
            gens = gens2;
            covered = covered2;
            ps.aux_primes.push_back(q);
            ps.places.push_back(PlaceTag{q, SplitKind::SplitFirst, false});
            ps.places.push_back(PlaceTag{q, SplitKind::SplitSecond, false});
            if (!needed) --extra_wanted;
        }
    }
    for (const auto& t : ps.places) ps.ideals.push_back(place_ideal(K, t));
    return ps;
}

// kernel lattice of Z^s -> Cl through the classes of the given ideals
IntMat class_kernel(const QuadField& K, const std::vector<Ideal>& ideals) {
    std::size_t s = ideals.size();
    std::vector<Form> cls;
    for (const auto& I : ideals) cls.push_back(K.class_of_ideal(Ideal{1, I.a, I.b}));
    std::map<Form, std::vector<long>> seen;
    std::deque<Form> todo;
    IntMat rel(0, s);
    rel.cols = s;
    Form id = K.class_identity();
    seen[id] = std::vector<long>(s, 0);
    todo.push_back(id);
    while (!todo.empty()) {
        Form f = todo.front();
        todo.pop_front();
        std::vector<long> vec = seen[f];
        for (std::size_t j = 0; j < s; ++j) {
            Form g = K.class_compose(f, cls[j]);
            std::vector<long> nv = vec;
            nv[j] += 1;
            auto it = seen.find(g);
            if (it == seen.end()) {
                seen[g] = nv;
                todo.push_back(g);
            } else {
                std::vector<mpz_class> row(s);
                bool nonzero = false;
                for (std::size_t t = 0; t < s; ++t) {
                    row[t] = mpz_class(nv[t]) - it->second[t];
                    if (row[t] != 0) nonzero = true;
                }
                if (nonzero) rel.append_row(row);
            }
        }
    }
    IntMat V = row_hnf(rel);
    if (V.rows != s) throw std::logic_error("class_kernel: kernel lattice not of full rank");
    return V;
}

}  // namespace

std::vector<PlaceTag> class_group_support(const BaseField& F, long ell, bool force_extra) {
    if (F.is_rational()) return {PlaceTag{ell, SplitKind::SplitFirst, true}};
    return build_places(*F.K, ell, force_extra).places;
}

SUnitSystem s_unit_system(const BaseField& F, long ell, bool force_extra) {
    if (F.is_rational()) {
        // single ell-place; the degree-zero lattice is trivial and needs no
        // generators
        SUnitSystem sys;
        sys.places = class_group_support(F, ell, force_extra);
        return sys;
    }
    const QuadField& K = *F.K;
    PlaceSystem ps = build_places(K, ell, force_extra);
    IntMat V = class_kernel(K, ps.ideals);
    SUnitSystem sys;
    sys.places = ps.places;
    sys.valuation_rows = V;
    for (std::size_t i = 0; i < V.rows; ++i) {
        Ideal num = K.ideal_one();
        mpz_class den = 1;
        for (std::size_t j = 0; j < V.cols; ++j) {
            mpz_class e = V.at(i, j);
            if (e > 0) {
                num = K.ideal_mul(num, K.ideal_pow(ps.ideals[j], e.get_ui()));
            } else if (e < 0) {
                unsigned long k = mpz_class(-e).get_ui();
                num = K.ideal_mul(num, K.ideal_pow(K.ideal_conj(ps.ideals[j]), k));
                den *= pow_ui(ps.places[j].p, k);
            }
        }
        QuadElem g = K.principal_generator(num);
        QuadRat gen(g, den);
        // cross-check the divisor coordinates against the kernel row
        for (std::size_t j = 0; j < V.cols; ++j) {
            long got = K.valuation(gen, ps.places[j]);
            if (mpz_class(got) != V.at(i, j))
                throw std::logic_error("s_unit_system: generator valuation mismatch");
        }
        sys.generators.push_back(gen);
    }
    if (K.is_real()) sys.fundamental_unit = K.fund_unit();
    return sys;
}

// --------------------------------------------------------- class group

namespace {

struct LatticeResult {
    std::vector<CyclicFactor> factors;
};

// rows of nu-values on all places except the dropped first ell-place
LatticeResult lattice_invariants(const BaseField& F, long ell, const SUnitSystem& sys, long m,
                                 const Convention& conv) {
    const auto& places = sys.places;
    std::vector<QuadRat> gens = sys.generators;
    if (sys.fundamental_unit) gens.push_back(QuadRat(*sys.fundamental_unit));
    std::size_t cols = places.size() - 1;
    ZmodMatrix M(ell, m, gens.size(), cols);
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 1; j < places.size(); ++j) {
            PadicNum nu = log_valuation(F, gens[i], places[j], ell, m, conv);
            M.at(i, j - 1) = nu.residue(m);
        }
    return LatticeResult{snf_mod(M)};
}

std::vector<long> exponents_of(const std::vector<CyclicFactor>& f) {
    std::vector<long> e;
    for (const auto& x : f) e.push_back(x.e);
    return e;
}

bool any_saturated(const std::vector<CyclicFactor>& f) {
    for (const auto& x : f)
        if (x.saturated) return true;
    return false;
}

}  // namespace

LogClassGroup log_class_group(const BaseField& F, long ell, const ClassGroupOptions& opt) {
    LogClassGroup out;
    out.ell = ell;
    out.convention = opt.conv.label();
    if (F.is_rational()) {
        // single ell-place, the degree-zero sublattice is 0
        out.stable = true;
        out.certified_at = opt.start_m;
        return out;
    }
    const QuadField& K = *F.K;
    SplitKind kind = K.splitting_kind(ell);
    bool split = (kind == SplitKind::SplitFirst);

    // is the ell-Sylow of Cl' already generated by the ell-places?
    unsigned long covered = 1;
    if (kind != SplitKind::Inert) {
        Ideal l = K.prime_ideal(ell, split ? SplitKind::SplitFirst : SplitKind::Ramified);
        covered = K.class_order(K.class_of_ideal(l));
    }
    bool sylow_trivial = ((K.h() / covered) % ell) != 0;

    if (sylow_trivial && !opt.force_full) {
        if (!split) {
            // one ell-place: the degree-zero lattice vanishes
            out.stable = true;
            out.certified_at = opt.start_m;
            return out;
        }
        // split fast path: one retained coordinate, rows from eta (and the
        // fundamental unit in the real case)
        auto [hp, eta] = K.prime_power_generator(ell);
        (void)hp;
        PlaceTag second{ell, SplitKind::SplitSecond, true};
        std::vector<QuadRat> rows{QuadRat(eta)};
        if (K.is_real()) rows.push_back(QuadRat(K.fund_unit()));
        for (long m = opt.start_m; m <= opt.max_m; m += opt.step_m) {
            long e = m;
            bool found = false;
            for (const auto& g : rows) {
                PadicNum nu = log_valuation(F, g, second, ell, m, opt.conv);
                if (!nu.is_zero()) {
                    e = std::min(e, nu.val());
                    found = true;
                }
            }
            if (found) {
                if (e > 0) out.invariants = {e};
                out.stable = true;
                out.certified_at = m;
                return out;
            }
        }
        out.certified_at = opt.max_m;
        out.stable = false;
        out.invariants = {opt.max_m};  // unresolved lower bound, flagged unstable
        return out;
    }

    // full lattice path
    SUnitSystem sys = s_unit_system(F, ell, opt.force_full && sylow_trivial);
    std::vector<long> prev;
    bool have_prev = false, prev_sat = true;
    for (long m = opt.start_m; m <= opt.max_m; m += opt.step_m) {
        LatticeResult r = lattice_invariants(F, ell, sys, m, opt.conv);
        std::vector<long> exps = exponents_of(r.factors);
        bool sat = any_saturated(r.factors);
        if (have_prev && !sat && !prev_sat && exps == prev) {
            out.invariants = exps;
            out.stable = true;
            out.certified_at = m;
            return out;
        }
        prev = exps;
        prev_sat = sat;
        have_prev = true;
    }
    out.invariants = prev;
    out.stable = false;
    out.certified_at = opt.max_m;
    return out;
}

PrincipalityReport is_log_principal(const BaseField& F, long ell, const ClassGroupOptions& opt) {
    LogClassGroup g = log_class_group(F, ell, opt);
    if (!g.stable) throw precision_error("is_log_principal: class group did not stabilize");
    PrincipalityReport rep;
    rep.principal = g.trivial();
    if (rep.principal) {
        bool mu2ell = (!F.is_rational()) &&
                      ((ell == 3 && F.d() == -3) || (ell == 2 && F.d() == -1));
        if (mu2ell)
            rep.annotations.push_back(
                "CSL: contains the 2*ell-th roots of unity and the logarithmic class group is "
                "trivial, so Gross-Kuz'min and Leopoldt hold in every layer of the cyclotomic "
                "tower");
    }
    return rep;
}

LogUnitCertificate log_unit_certificate(const BaseField& F, long ell,
                                        const ClassGroupOptions& opt) {
    LogUnitCertificate cert;
    LogClassGroup g = log_class_group(F, ell, opt);
    cert.delta_G_zero_certified = g.stable;
    if (F.is_rational()) {
        cert.rank_logunits = 1;  // Z_ell-span of ell itself
        cert.naive_rank = 1;
        cert.note = "over Q the logarithmic units are generated by -1 and ell";
        return cert;
    }
    const QuadField& K = *F.K;
    // ell-unit lattice: kernel generators over the ell-places, plus the
    // fundamental unit in the real case
    std::vector<PlaceTag> lplaces = K.splitting(ell, ell);
    std::vector<Ideal> ideals;
    for (const auto& t : lplaces) ideals.push_back(place_ideal(K, t));
    IntMat V = class_kernel(K, ideals);
    std::vector<QuadRat> gens;
    for (std::size_t i = 0; i < V.rows; ++i) {
        Ideal num = K.ideal_one();
        mpz_class den = 1;
        for (std::size_t j = 0; j < V.cols; ++j) {
            mpz_class e = V.at(i, j);
            if (e > 0)
                num = K.ideal_mul(num, K.ideal_pow(ideals[j], e.get_ui()));
            else if (e < 0) {
                unsigned long k = mpz_class(-e).get_ui();
                num = K.ideal_mul(num, K.ideal_pow(K.ideal_conj(ideals[j]), k));
                den *= pow_ui(lplaces[j].p, k);
            }
        }
        gens.push_back(QuadRat(K.principal_generator(num), den));
    }
    if (K.is_real()) gens.push_back(QuadRat(K.fund_unit()));

    long m = std::max<long>(g.certified_at, opt.start_m);
    ZmodMatrix M(ell, m, gens.size(), lplaces.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < lplaces.size(); ++j)
            M.at(i, j) = log_valuation(F, gens[i], lplaces[j], ell, m, opt.conv).residue(m);
    long rank = snf_mod_rank(M);
    cert.rank_logunits = static_cast<int>(gens.size()) - static_cast<int>(rank);

    SplitKind kind = K.splitting_kind(ell);
    if (K.is_real() && kind != SplitKind::SplitFirst) {
        // N(eps) = +-1 and N(eta) = +-ell^t make every divisor row vanish
        // exactly: the naive cyclotomic norms fill the whole ell-unit lattice
        cert.naive_rank = 2;
        cert.note = "non-split real case: logarithmic units coincide with the ell-units";
    } else if (K.is_real()) {
        // certify Log(eps) != 0 (one-sided): a nonzero digit settles it
        cert.note = "naive rank undetermined";
        for (long mm = opt.start_m; mm <= opt.max_m; mm += opt.step_m) {
            PlaceTag second{ell, SplitKind::SplitSecond, true};
            PadicNum nu = log_valuation(F, QuadRat(K.fund_unit()), second, ell, mm, opt.conv);
            if (!nu.is_zero()) {
                cert.naive_rank = 1;
                cert.note = "split real case: Log(fundamental unit) has a nonzero digit at m=" +
                            std::to_string(mm);
                break;
            }
        }
    } else {
        // imaginary: the eta direction leaves the naive norms once its
        // logarithmic valuation is certified nonzero
        if (kind == SplitKind::SplitFirst) {
            for (long mm = opt.start_m; mm <= opt.max_m; mm += opt.step_m) {
                auto [hp, eta] = K.prime_power_generator(ell);
                (void)hp;
                PlaceTag second{ell, SplitKind::SplitSecond, true};
                PadicNum nu = log_valuation(F, QuadRat(eta), second, ell, mm, opt.conv);
                if (!nu.is_zero()) {
                    cert.naive_rank = 1;
                    break;
                }
            }
        } else {
            cert.naive_rank = 1;  // single ell-place, rows vanish exactly
        }
    }
    return cert;
}

}  // namespace logclass
