#include "logclass/seo.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "logclass/intlat.hpp"

namespace logclass {

using nlohmann::json;

SexticElem SexticElem::zero() { return SexticElem{}; }

SexticElem SexticElem::one() {
    SexticElem x;
    x.c[0][0] = 1;
    return x;
}

SexticElem SexticElem::theta() {
    SexticElem x;
    x.c[1][0] = 1;
    return x;
}

SexticElem SexticElem::from_quad(const mpq_class& a, const mpq_class& b) {
    SexticElem x;
    x.c[0][0] = a;
    x.c[0][1] = b;
    return x;
}

bool SexticElem::operator==(const SexticElem& o) const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            if (c[i][j] != o.c[i][j]) return false;
    return true;
}

SexticElem sextic_add(const SexticElem& x, const SexticElem& y) {
    SexticElem z;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) z.c[i][j] = x.c[i][j] + y.c[i][j];
    return z;
}

namespace {

struct QQ {
    mpq_class a, b;  // a + b sqrt(d)
};

QQ qq_mul(const QQ& x, const QQ& y, long d) {
    return QQ{x.a * y.a + mpq_class(d) * x.b * y.b, x.a * y.b + x.b * y.a};
}

QQ qq_add(const QQ& x, const QQ& y) { return QQ{x.a + y.a, x.b + y.b}; }

QQ qq_scale(const QQ& x, long s) { return QQ{x.a * s, x.b * s}; }

}  // namespace

SexticElem sextic_mul(const SexticElem& x, const SexticElem& y, long d) {
    QQ prod[5];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            QQ xi{x.c[i][0], x.c[i][1]};
            QQ yj{y.c[j][0], y.c[j][1]};
            prod[i + j] = qq_add(prod[i + j], qq_mul(xi, yj, d));
        }
    // theta^3 = 3 theta - 1, theta^4 = 3 theta^2 - theta
    QQ out[3] = {prod[0], prod[1], prod[2]};
    out[1] = qq_add(out[1], qq_scale(prod[3], 3));
    out[0] = qq_add(out[0], qq_scale(prod[3], -1));
    out[2] = qq_add(out[2], qq_scale(prod[4], 3));
    out[1] = qq_add(out[1], qq_scale(prod[4], -1));
    SexticElem z;
    for (int i = 0; i < 3; ++i) {
        z.c[i][0] = out[i].a;
        z.c[i][1] = out[i].b;
    }
    return z;
}

SexticElem sextic_sigma(const SexticElem& x) {
    // sigma(theta) = theta^2 - 2, sigma(theta^2) = -theta^2 - theta + 4
    SexticElem z;
    for (int j = 0; j < 2; ++j) {
        z.c[0][j] = x.c[0][j] - 2 * x.c[1][j] + 4 * x.c[2][j];
        z.c[1][j] = -x.c[2][j];
        z.c[2][j] = x.c[1][j] - x.c[2][j];
    }
    return z;
}

QQuad relative_norm(const SexticElem& x, long d) {
    SexticElem s1 = sextic_sigma(x);
    SexticElem s2 = sextic_sigma(s1);
    SexticElem p = sextic_mul(sextic_mul(x, s1, d), s2, d);
    for (int j = 0; j < 2; ++j)
        if (p.c[1][j] != 0 || p.c[2][j] != 0)
            throw std::logic_error("relative_norm: nonzero theta-coordinates after reduction");
    return QQuad{p.c[0][0], p.c[0][1]};
}

mpq_class absolute_norm(const SexticElem& x, long d) {
    QQuad n = relative_norm(x, d);
    mpq_class v = n.a * n.a - mpq_class(d) * n.b * n.b;
    v.canonicalize();
    return v;
}

// ------------------------------------------------------------- data files

namespace {

mpq_class parse_rat(const json& j) {
    if (j.is_array() && j.size() == 2) {
        auto get = [](const json& v) -> mpz_class {
            if (v.is_string()) return mpz_class(v.get<std::string>());
            return mpz_class(v.get<long>());
        };
        mpq_class q(get(j[0]), get(j[1]));
        q.canonicalize();
        return q;
    }
    throw std::invalid_argument("unit data: rational entries must be [num, den]");
}

json rat_to_json(const mpq_class& q) {
    return json::array({q.get_num().get_str(), q.get_den().get_str()});
}

}  // namespace

SexticUnitData load_units(const std::string& text) {
    json j = json::parse(text);
    SexticUnitData data;
    data.basis = j.at("basis").get<std::string>();
    if (data.basis != "1,theta,theta2 x 1,sqrtd")
        throw std::invalid_argument("unit data: unsupported basis '" + data.basis + "'");
    data.provenance = j.value("provenance", "");
    for (const auto& uj : j.at("units")) {
        if (!uj.is_array() || uj.size() != 6)
            throw std::invalid_argument("unit data: each unit needs 6 coefficients");
        SexticElem u;
        int k = 0;
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 2; ++jj) u.c[i][jj] = parse_rat(uj[k++]);
        data.units.push_back(u);
    }
    return data;
}

SexticUnitData load_units_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_units_file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_units(ss.str());
}

std::string units_to_json(const SexticUnitData& data) {
    json j;
    j["basis"] = data.basis;
    j["provenance"] = data.provenance;
    j["units"] = json::array();
    for (const auto& u : data.units) {
        json uj = json::array();
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 2; ++jj) uj.push_back(rat_to_json(u.c[i][jj]));
        j["units"].push_back(uj);
    }
    return j.dump(2);
}

// --------------------------------------------------------- log-unit check

bool verify_log_unit(long d, long ell, const QuadRat& x) {
    if (ell != 3) throw std::invalid_argument("verify_log_unit: only ell = 3 implemented");
    if (((d % 3) + 3) % 3 != 2)
        throw std::invalid_argument("verify_log_unit: needs d = 2 mod 3 (3 inert)");
    QuadField K = QuadField::init(mpz_class(d));
    if (x.num.a == 0 && x.num.b == 0) return false;
    // classical valuations away from 3 must all vanish
    mpq_class N = x.norm_q();
    mpz_class supp = abs(N.get_num()) * N.get_den() * x.den_r;
    for (mpz_class p = 2; p * p <= supp; ++p) {
        if (supp % p != 0) continue;
        while (supp % p == 0) supp /= p;
        if (p == 3) continue;
        for (const auto& t : K.splitting(p.get_si(), ell))
            if (K.valuation(x, t) != 0) return false;
    }
    if (supp > 1 && supp != 3) {
        for (const auto& t : K.splitting(supp.get_si(), ell))
            if (K.valuation(x, t) != 0) return false;
    }
    // inert place above 3: the logarithmic valuation is -Log(N(x))/deg and
    // vanishes exactly when the norm is a signed power of 3
    mpz_class num = abs(N.get_num()), den = N.get_den();
    while (num % 3 == 0) num /= 3;
    while (den % 3 == 0) den /= 3;
    return num == 1 && den == 1;
}

bool verify_log_unit(long d, long ell) {
    QuadField K = QuadField::init(mpz_class(d));
    return verify_log_unit(d, ell, QuadRat(K.fund_unit()));
}

// --------------------------------------------------------- norm indexing

namespace {

// natural log of a positive mpf, via range reduction to [1, 2) and the
// atanh series, at the precision of the input
mpf_class mpf_log(mpf_class x) {
    if (x <= 0) throw std::domain_error("mpf_log: nonpositive");
    mp_bitcnt_t prec = x.get_prec();
    mpf_class ln2(0, prec);
    {
        // ln 2 = 2 atanh(1/3)
        mpf_class y(mpq_class(1, 3), prec), term = y, sum(0, prec), y2 = y * y;
        for (int k = 1; k < 20000; k += 2) {
            sum += term / k;
            term *= y2;
            if (term < mpf_class(1, prec) >> (prec + 8)) break;
        }
        ln2 = 2 * sum;
    }
    long e = 0;
    while (x >= 2) {
        x /= 2;
        ++e;
    }
    while (x < 1) {
        x *= 2;
        --e;
    }
    mpf_class y = (x - 1) / (x + 1), term = y, sum(0, prec), y2 = y * y;
    for (int k = 1; k < 20000; k += 2) {
        sum += term / k;
        term *= y2;
        if (abs(term) < mpf_class(1, prec) >> (prec + 8)) break;
    }
    return 2 * sum + e * ln2;
}

// QQuad helpers over Q(sqrt d)
QQuad qqu_mul(const QQuad& x, const QQuad& y, long d) {
    return QQuad{x.a * y.a + mpq_class(d) * x.b * y.b, x.a * y.b + x.b * y.a};
}

bool qqu_is_pm1(const QQuad& x, bool& minus) {
    if (x.b != 0) return false;
    if (x.a == 1) {
        minus = false;
        return true;
    }
    if (x.a == -1) {
        minus = true;
        return true;
    }
    return false;
}

}  // namespace

NormIndexReport norm_index(const SexticUnitData& data, long d) {
    NormIndexReport rep;
    if (data.units.size() < 6)
        rep.warnings.push_back("fewer than 6 generators: unit rank 5 plus a 3-unit expected");
    QuadField K = QuadField::init(mpz_class(d));
    if (!K.is_real()) throw std::invalid_argument("norm_index: d must be a real field");
    QuadElem eps = K.fund_unit();
    int neps = K.fund_unit_norm();
    QQuad epsq{mpq_class(eps.a, eps.den), mpq_class(eps.b, eps.den)};
    epsq.a.canonicalize();
    epsq.b.canonicalize();
    QQuad epsinv = qqu_mul(QQuad{epsq.a, -epsq.b}, QQuad{mpq_class(neps), 0}, d);

    // validation: each entry's absolute norm must be a signed power of 3
    for (std::size_t i = 0; i < data.units.size(); ++i) {
        mpq_class an = absolute_norm(data.units[i], d);
        if (an == 0) throw std::invalid_argument("norm_index: zero entry");
        mpz_class num = abs(an.get_num()), den = an.get_den();
        while (num % 3 == 0) num /= 3;
        while (den % 3 == 0) den /= 3;
        if (num != 1 || den != 1)
            throw std::invalid_argument("norm_index: entry " + std::to_string(i) +
                                        " is not a 3-unit (|N| not a power of 3)");
    }

    mpf_class logeps, log3, sqd;
    mp_bitcnt_t prec = 512;
    for (const auto& u : data.units)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j)
                prec = std::max<mp_bitcnt_t>(
                    prec, 4 * (mpz_sizeinbase(u.c[i][j].get_num().get_mpz_t(), 2) +
                               mpz_sizeinbase(u.c[i][j].get_den().get_mpz_t(), 2)));
    sqd = mpf_class(d, prec);
    mpf_sqrt(sqd.get_mpf_t(), sqd.get_mpf_t());
    {
        mpf_class ev(0, prec);
        ev = mpf_class(epsq.a, prec) + mpf_class(epsq.b, prec) * sqd;
        logeps = mpf_log(abs(ev));
        log3 = mpf_log(mpf_class(3, prec));
    }

    IntMat lattice(0, 2);
    lattice.cols = 2;
    for (std::size_t i = 0; i < data.units.size(); ++i) {
        QQuad nr = relative_norm(data.units[i], d);
        // 3-exponent from the exact absolute norm: |N_{k/Q}| = 3^(2b)
        mpq_class an = nr.a * nr.a - mpq_class(d) * nr.b * nr.b;
        an.canonicalize();
        long v3 = 0;
        {
            mpz_class num = abs(an.get_num()), den = an.get_den();
            while (num % 3 == 0) {
                num /= 3;
                ++v3;
            }
            while (den % 3 == 0) {
                den /= 3;
                --v3;
            }
        }
        if (v3 % 2 != 0)
            throw std::invalid_argument("norm_index: odd 3-valuation, not in <-1, eps, 3>");
        long b = v3 / 2;
        // estimate a from the real embedding, then confirm exactly
        mpf_class nrv = mpf_class(nr.a, prec) + mpf_class(nr.b, prec) * sqd;
        if (nrv == 0) throw std::invalid_argument("norm_index: zero relative norm");
        mpf_class target = mpf_log(abs(nrv)) - b * log3;
        mpf_class aest = target / logeps;
        long a0 = std::lround(aest.get_d());
        bool found = false;
        NormIndexEntry entry;
        auto try_a = [&](long a) {
            // cand = nr * eps^-a * 3^-b must come out as +-1
            QQuad inv{mpq_class(1), mpq_class(0)};
            const QQuad& ibase = a >= 0 ? epsinv : epsq;
            for (long t = 0; t < std::labs(a); ++t) inv = qqu_mul(inv, ibase, d);
            QQuad cand = qqu_mul(nr, inv, d);
            mpq_class p3 = 1;
            for (long t = 0; t < std::labs(b); ++t) p3 *= 3;
            cand = (b >= 0) ? QQuad{cand.a / p3, cand.b / p3} : QQuad{cand.a * p3, cand.b * p3};
            cand.a.canonicalize();
            cand.b.canonicalize();
            bool minus = false;
            if (!qqu_is_pm1(cand, minus)) return false;
            entry.a = a;
            entry.b = b;
            entry.sign = minus;
            found = true;
            return true;
        };
        if (!try_a(a0)) {
            for (long a = -64; a <= 64 && !found; ++a) try_a(a);
        }
        if (!found)
            throw std::invalid_argument("norm_index: entry " + std::to_string(i) +
                                        " does not decompose in <-1, eps, 3>");
        rep.entries.push_back(entry);
        lattice.append_row({mpz_class(entry.a), mpz_class(entry.b)});
    }

    auto div = snf_diag(lattice);
    rep.rank = static_cast<long>(div.size());
    if (rep.rank < 2) {
        rep.index = 0;
        rep.warnings.push_back("incomplete lattice: norms span rank " +
                               std::to_string(rep.rank) + " < 2");
        rep.verdict = "incomplete";
        return rep;
    }
    mpz_class idx = div[0] * div[1];
    rep.index = idx.get_ui();
    rep.divisible_by_3 = (idx % 3 == 0);
    rep.verdict = rep.divisible_by_3
                      ? "threefold-obstruction: the fundamental unit is not a norm of a 3-unit "
                        "from the first layer"
                      : "no-threefold-obstruction: index prime to 3 (refutation-failure or "
                        "incomplete data)";
    return rep;
}

std::string norm_index_to_json(const NormIndexReport& r) {
    json j;
    j["entries"] = json::array();
    for (const auto& e : r.entries)
        j["entries"].push_back({{"a", e.a}, {"b", e.b}, {"sign", e.sign ? -1 : 1}});
    j["rank"] = r.rank;
    j["index"] = r.index;
    j["divisible_by_3"] = r.divisible_by_3;
    j["verdict"] = r.verdict;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

}  // namespace logclass
