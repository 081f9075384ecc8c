#include "logclass/cli.hpp"

#include <cstdlib>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "logclass/iwalab.hpp"
#include "logclass/logarith.hpp"
#include "logclass/mirror.hpp"
#include "logclass/scanner.hpp"
#include "logclass/seo.hpp"

namespace logclass {

using nlohmann::json;

namespace {

json compute_record(long d, long ell, const ClassGroupOptions& opt, bool strict) {
    BaseField F = (d == 0) ? BaseField::rationals()
                           : BaseField::quadratic(QuadField::init(mpz_class(d)));
    LogClassGroup g = log_class_group(F, ell, opt);
    if (strict && !g.stable) throw precision_error("unstable result under --strict");
    json j;
    j["d"] = d;
    j["ell"] = ell;
    j["invariants"] = g.invariants;
    j["order"] = g.stable ? g.order() : 0;
    j["stable"] = g.stable;
    j["certified_at"] = g.certified_at;
    j["convention"] = g.convention;
    json ann = json::array();
    if (g.stable && g.trivial()) {
        PrincipalityReport pr = is_log_principal(F, ell, opt);
        for (const auto& a : pr.annotations) ann.push_back(a);
    }
    if (!F.is_rational() && F.K->h() % static_cast<unsigned long>(ell) == 0)
        ann.push_back(std::string(kCaveatEllDividesH));
    else if (ell == 2 && !g.trivial())
        ann.push_back(std::string(kCaveatTwoAdic));
    j["annotations"] = ann;
    return j;
}

std::string compute_to_csv(const json& j) {
    std::ostringstream os;
    os << "d,ell,order,invariants,stable,certified_at,convention,annotations\n";
    os << j["d"].get<long>() << "," << j["ell"].get<long>() << "," << j["order"].get<long long>()
       << ",";
    auto inv = j["invariants"].get<std::vector<long>>();
    for (std::size_t i = 0; i < inv.size(); ++i) os << (i ? "+" : "") << inv[i];
    os << "," << (j["stable"].get<bool>() ? "true" : "false") << ","
       << j["certified_at"].get<long>() << "," << j["convention"].get<std::string>() << ",";
    auto ann = j["annotations"].get<std::vector<std::string>>();
    for (std::size_t i = 0; i < ann.size(); ++i) os << (i ? "|" : "") << ann[i];
    os << "\n";
    return os.str();
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
    CliResult res;
    CLI::App app{"logclass: logarithmic class group toolkit for quadratic fields"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    long d = 0, ell = 3, lmin = 2, lmax = 100, bound = 0, twist = 1;
    long nmin = 1, nmax = 3;
    long precision_cap = 40;
    int workers = 1;
    bool force = false, strict = false;
    std::string format = "json", cache_path, convention = "v1", preset, blocks_spec, units_file;
    unsigned long perturb_seed = 0;
    if (const char* env = std::getenv("LOGARITH_CACHE")) cache_path = env;

    app.add_option("--format", format, "output format: json|csv|text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--cache", cache_path, "result cache path (env LOGARITH_CACHE)");
    app.add_option("--workers", workers, "parallel workers for scans");
    app.add_option("--precision-cap", precision_cap, "max working ell-adic precision");
    app.add_option("--convention", convention, "degree-normalization convention id");
    app.add_option("--perturb-seed", perturb_seed,
                   "unit-perturbation seed for convention-invariance checks");
    app.add_flag("--force", force, "recompute cached scan records");
    app.add_flag("--strict", strict, "exit 1 on unstable results");

    auto* c_compute = app.add_subcommand("compute", "one logarithmic class group");
    c_compute->add_option("-d", d, "squarefree d of Q(sqrt d)")->required();
    c_compute->add_option("-l,--ell", ell, "prime ell")->required();

    auto* c_scan = app.add_subcommand("scan", "scan primes for nontrivial groups");
    c_scan->add_option("-d", d)->required();
    c_scan->add_option("--min", lmin, "first prime (default 2)");
    c_scan->add_option("--max", lmax, "last prime")->required();

    auto* c_table = app.add_subcommand("table", "reproduce a known-answer table");
    c_table->add_option("--preset", preset, "imaginary-six | sqrt-minus-3")->required();
    c_table->add_option("--bound", bound, "scan bound override");

    auto* c_smallest = app.add_subcommand("smallest", "smallest nontrivial prime");
    c_smallest->add_option("-d", d)->required();
    c_smallest->add_option("--bound", bound, "search bound")->required();

    auto* c_lambda = app.add_subcommand("lambda-check", "finite Lambda-module capitulation lab");
    c_lambda->add_option("--blocks", blocks_spec, "block spec, e.g. F:3^2;XL:3")->required();
    c_lambda->add_option("--nmin", nmin, "first level");
    c_lambda->add_option("--nmax", nmax, "last level");

    auto* c_wild = app.add_subcommand("wildkernel", "wild kernel quotients at ell = 3");
    c_wild->add_option("-d", d)->required();
    c_wild->add_option("-i,--twist", twist, "Tate twist i > 0")->required();

    auto* c_seo = app.add_subcommand("seo", "norm-index verification over Q(sqrt 257)");
    c_seo->add_option("--units", units_file, "sextic unit data (JSON)")->required();
    c_seo->add_option("-d", d, "base field (default 257)");

    auto* c_cert = app.add_subcommand("certificate", "logarithmic unit rank certificate");
    c_cert->add_option("-d", d)->required();
    c_cert->add_option("-l,--ell", ell)->required();

    std::vector<std::string> argv = args;
    std::vector<const char*> cargv;
    cargv.push_back("logclass");
    for (const auto& s : argv) cargv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        int code = app.exit(e, os, os);
        res.code = (code == 0) ? 0 : 2;
        res.out = os.str();
        return res;
    }

    ClassGroupOptions copt;
    copt.max_m = precision_cap;
    copt.conv.id = convention;
    copt.conv.unit_seed = perturb_seed;
    ScanOptions sopt;
    sopt.workers = workers;
    sopt.cache_path = cache_path;
    sopt.force = force;
    sopt.conv = copt.conv;
    sopt.max_m = precision_cap;

    try {
        if (*c_compute) {
            json j = compute_record(d, ell, copt, strict);
            if (format == "csv")
                res.out = compute_to_csv(j);
            else if (format == "text") {
                std::ostringstream os;
                os << "d=" << d << " l=" << ell << " order=" << j["order"].get<long long>()
                   << " invariants=[";
                auto inv = j["invariants"].get<std::vector<long>>();
                for (std::size_t i = 0; i < inv.size(); ++i) os << (i ? " " : "") << inv[i];
                os << "] stable=" << (j["stable"].get<bool>() ? "yes" : "no") << "\n";
                for (const auto& a : j["annotations"]) os << "  note: " << a.get<std::string>() << "\n";
                res.out = os.str();
            } else
                res.out = j.dump(2) + "\n";
        } else if (*c_scan) {
            auto recs = scan(d, lmin, lmax, sopt);
            bool unstable = false;
            for (const auto& r : recs)
                if (!r.error.empty() || (!r.stable && r.error.empty())) unstable = true;
            if (format == "csv")
                res.out = records_to_csv(recs);
            else if (format == "text") {
                std::ostringstream os;
                for (const auto& r : recs)
                    if (r.nontrivial())
                        os << "l=" << r.ell << " order=" << r.order
                           << (r.caveat.empty() ? "" : " [" + r.caveat + "]") << "\n";
                res.out = os.str();
            } else
                res.out = records_to_json(recs) + "\n";
            if (strict && unstable) res.code = 1;
        } else if (*c_table) {
            TableDocument doc = table(preset, bound, sopt);
            if (format == "csv")
                res.out = table_to_csv(doc);
            else if (format == "text")
                res.out = table_to_text(doc);
            else
                res.out = table_to_json(doc) + "\n";
        } else if (*c_smallest) {
            SmallestResult s = smallest_nontrivial(d, bound, sopt);
            if (format == "text") {
                res.out = s.ell ? std::to_string(*s.ell) + "\n" : "not-found\n";
            } else {
                json j;
                j["d"] = d;
                j["bound"] = bound;
                if (s.ell)
                    j["ell"] = *s.ell;
                else
                    j["ell"] = nullptr;
                j["flagged"] = json::array();
                for (const auto& f : s.flagged)
                    j["flagged"].push_back(json::parse(record_to_json(f, false)));
                res.out = j.dump(2) + "\n";
            }
        } else if (*c_lambda) {
            auto blocks = parse_blocks(blocks_spec);
            CapReport rep = check_cap_theorem(blocks, nmin, nmax);
            res.out = cap_report_to_json(rep) + "\n";
            if (rep.verdict == "fail") res.code = 1;
        } else if (*c_wild) {
            WildKernelQuotient w = wild_kernel_quotient(d, twist, copt);
            res.out = wkq_to_json(w) + "\n";
        } else if (*c_seo) {
            long dd = (d == 0) ? 257 : d;
            SexticUnitData data = load_units_file(units_file);
            json j;
            j["d"] = dd;
            j["log_unit_verified"] = verify_log_unit(dd, 3);
            NormIndexReport rep = norm_index(data, dd);
            j["norm_index"] = json::parse(norm_index_to_json(rep));
            res.out = j.dump(2) + "\n";
            if (rep.rank >= 2 && !rep.divisible_by_3) res.code = 0;  // reported, not an error
        } else if (*c_cert) {
            BaseField F = (d == 0) ? BaseField::rationals()
                                   : BaseField::quadratic(QuadField::init(mpz_class(d)));
            LogUnitCertificate cert = log_unit_certificate(F, ell, copt);
            json j;
            j["d"] = d;
            j["ell"] = ell;
            j["rank_logunits"] = cert.rank_logunits;
            j["delta_G_zero_certified"] = cert.delta_G_zero_certified;
            if (cert.naive_rank)
                j["naive_rank"] = *cert.naive_rank;
            else
                j["naive_rank"] = "unknown";
            j["note"] = cert.note;
            res.out = j.dump(2) + "\n";
        }
    } catch (const std::invalid_argument& e) {
        res.err = std::string("usage error: ") + e.what() + "\n";
        res.code = 2;
    } catch (const std::exception& e) {
        res.err = std::string("error: ") + e.what() + "\n";
        res.code = 1;
    }
    return res;
}

}  // namespace logclass
