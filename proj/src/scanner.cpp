#include "logclass/scanner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace logclass {

using nlohmann::json;

std::string ScanRecord::key() const {
    return std::to_string(d) + "|" + std::to_string(ell) + "|" + convention;
}

std::vector<long> primes_in(long lo, long hi) {
    std::vector<long> out;
    if (hi < 2) return out;
    std::vector<bool> sieve(hi + 1, true);
    for (long i = 2; i * i <= hi; ++i)
        if (sieve[i])
            for (long j = i * i; j <= hi; j += i) sieve[j] = false;
    for (long p = std::max<long>(lo, 2); p <= hi; ++p)
        if (sieve[p]) out.push_back(p);
    return out;
}

namespace {

ScanRecord compute_one(const BaseField& F, long d, long ell, const ScanOptions& opt) {
    ScanRecord r;
    r.d = d;
    r.ell = ell;
    r.convention = opt.conv.label();
    auto t0 = std::chrono::steady_clock::now();
    try {
        ClassGroupOptions copt;
        copt.conv = opt.conv;
        copt.max_m = opt.max_m;
        LogClassGroup g = log_class_group(F, ell, copt);
        r.invariants = g.invariants;
        r.stable = g.stable;
        r.certified_at = g.certified_at;
        r.order = g.stable ? g.order() : 0;
        if (!F.is_rational() && F.K->h() % static_cast<unsigned long>(ell) == 0)
            r.caveat = kCaveatEllDividesH;
        else if (ell == 2 && !g.trivial())
            r.caveat = kCaveatTwoAdic;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.elapsed_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                         std::chrono::steady_clock::now() - t0)
                                         .count());
    return r;
}

struct Cache {
    std::map<std::string, ScanRecord> entries;
    std::string path;
    std::mutex mtx;

    void load() {
        if (path.empty()) return;
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                ScanRecord r = record_from_json(line);
                entries[r.key()] = r;
            } catch (...) {
                // tolerate malformed lines: they are simply recomputed
            }
        }
    }

    void append(const ScanRecord& r) {
        std::lock_guard<std::mutex> lk(mtx);
        entries[r.key()] = r;
        if (path.empty()) return;
        std::ofstream out(path, std::ios::app);
        out << record_to_json(r, true) << "\n";
    }
};

}  // namespace

std::vector<ScanRecord> scan(long d, long lmin, long lmax, const ScanOptions& opt) {
    BaseField F = BaseField::quadratic(QuadField::init(mpz_class(d)));
    std::vector<long> ps = primes_in(lmin, lmax);
    Cache cache;
    cache.path = opt.cache_path;
    cache.load();

    std::vector<ScanRecord> results(ps.size());
    std::vector<char> done(ps.size(), 0);
    if (!opt.force) {
        for (std::size_t i = 0; i < ps.size(); ++i) {
            ScanRecord probe;
            probe.d = d;
            probe.ell = ps[i];
            probe.convention = opt.conv.label();
            auto it = cache.entries.find(probe.key());
            if (it != cache.entries.end() && it->second.error.empty()) {
                results[i] = it->second;
                done[i] = 1;
            }
        }
    }

    int workers = std::max(1, opt.workers);
    std::mutex pick;
    std::size_t next = 0;
    auto work = [&]() {
        while (true) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lk(pick);
                while (next < ps.size() && done[next]) ++next;
                if (next >= ps.size()) return;
                i = next++;
            }
            ScanRecord r = compute_one(F, d, ps[i], opt);
            results[i] = r;
            cache.append(r);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return results;  // ps is sorted, so results are sorted by ell
}

SmallestResult smallest_nontrivial(long d, long bound, const ScanOptions& opt) {
    SmallestResult out;
    const long block = 2000;
    for (long lo = 2; lo <= bound; lo += block) {
        long hi = std::min(bound, lo + block - 1);
        auto recs = scan(d, lo, hi, opt);
        for (const auto& r : recs) {
            if (!r.error.empty())
                throw std::runtime_error("smallest_nontrivial: prime " + std::to_string(r.ell) +
                                         " failed: " + r.error);
            if (!r.nontrivial()) continue;
            if (r.caveat.empty()) {
                out.ell = r.ell;
                out.record = r;
                return out;
            }
            out.flagged.push_back(r);
        }
    }
    return out;
}

TableDocument table(const std::string& preset, long bound, const ScanOptions& opt) {
    TableDocument doc;
    doc.preset = preset;
    auto check_stable = [](const ScanRecord& r) {
        if (!r.error.empty() || !r.stable)
            throw std::runtime_error("table: unstable entry at ell = " + std::to_string(r.ell) +
                                     ", emission aborted");
    };
    if (preset == "imaginary-six") {
        doc.bound = bound > 0 ? bound : 30000;
        for (long d : {-1, -5, -7, -11, -13, -31}) {
            SmallestResult s = smallest_nontrivial(d, doc.bound, opt);
            TableRow row;
            row.d = d;
            if (s.ell) {
                check_stable(s.record);
                row.ell = *s.ell;
                row.order = s.record.order;
                row.order_exactly_ell =
                    (s.record.invariants.size() == 1 && s.record.invariants[0] == 1);
                row.invariants = s.record.invariants;
                row.stable = s.record.stable;
            }
            std::ostringstream cav;
            for (const auto& f : s.flagged) {
                if (cav.tellp() > 0) cav << " ";
                cav << "l=" << f.ell << " order " << f.order << " [" << f.caveat << "]";
            }
            row.caveat = cav.str();
            doc.rows.push_back(row);
        }
        return doc;
    }
    if (preset == "sqrt-minus-3") {
        doc.bound = bound > 0 ? bound : 3000;
        auto recs = scan(-3, 2, doc.bound, opt);
        for (const auto& r : recs) {
            if (!r.error.empty())
                throw std::runtime_error("table: prime " + std::to_string(r.ell) +
                                         " failed: " + r.error);
            if (!r.nontrivial()) continue;
            check_stable(r);
            TableRow row;
            row.d = -3;
            row.ell = r.ell;
            row.order = r.order;
            row.order_exactly_ell = (r.invariants.size() == 1 && r.invariants[0] == 1);
            row.invariants = r.invariants;
            row.stable = r.stable;
            row.caveat = r.caveat;
            doc.rows.push_back(row);
        }
        return doc;
    }
    throw std::invalid_argument("table: unknown preset '" + preset + "'");
}

// ------------------------------------------------------------ serialization

std::string record_to_json(const ScanRecord& r, bool include_elapsed) {
    json j;
    j["d"] = r.d;
    j["ell"] = r.ell;
    j["invariants"] = r.invariants;
    j["order"] = r.order;
    j["stable"] = r.stable;
    j["certified_at"] = r.certified_at;
    if (include_elapsed) j["elapsed_ms"] = r.elapsed_ms;
    j["convention"] = r.convention;
    j["caveat"] = r.caveat;
    j["error"] = r.error;
    return j.dump();
}

ScanRecord record_from_json(const std::string& line) {
    json j = json::parse(line);
    ScanRecord r;
    r.d = j.at("d").get<long>();
    r.ell = j.at("ell").get<long>();
    r.invariants = j.at("invariants").get<std::vector<long>>();
    r.order = j.at("order").get<unsigned long long>();
    r.stable = j.at("stable").get<bool>();
    r.certified_at = j.at("certified_at").get<long>();
    if (j.contains("elapsed_ms")) r.elapsed_ms = j.at("elapsed_ms").get<long>();
    r.convention = j.at("convention").get<std::string>();
    r.caveat = j.value("caveat", "");
    r.error = j.value("error", "");
    return r;
}

std::string records_to_json(const std::vector<ScanRecord>& rs) {
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(json::parse(record_to_json(r, false)));
    return arr.dump(2);
}

namespace {

std::string join_invariants(const std::vector<long>& inv) {
    std::ostringstream os;
    for (std::size_t i = 0; i < inv.size(); ++i) {
        if (i) os << "+";
        os << inv[i];
    }
    return os.str();
}

}  // namespace

std::string records_to_csv(const std::vector<ScanRecord>& rs) {
    std::ostringstream os;
    os << "d,ell,order,invariants,stable,caveat\n";
    for (const auto& r : rs)
        os << r.d << "," << r.ell << "," << r.order << "," << join_invariants(r.invariants)
           << "," << (r.stable ? "true" : "false") << "," << r.caveat << "\n";
    return os.str();
}

std::string table_to_json(const TableDocument& t) {
    json j;
    j["preset"] = t.preset;
    j["bound"] = t.bound;
    j["rows"] = json::array();
    for (const auto& r : t.rows) {
        json row;
        row["d"] = r.d;
        row["ell"] = r.ell;
        row["order"] = r.order;
        row["order_exactly_ell"] = r.order_exactly_ell;
        row["invariants"] = r.invariants;
        row["stable"] = r.stable;
        row["caveat"] = r.caveat;
        j["rows"].push_back(row);
    }
    return j.dump(2);
}

std::string table_to_csv(const TableDocument& t) {
    std::ostringstream os;
    os << "d,ell,order,order_exactly_ell,invariants,stable,caveat\n";
    for (const auto& r : t.rows)
        os << r.d << "," << r.ell << "," << r.order << ","
           << (r.order_exactly_ell ? "true" : "false") << "," << join_invariants(r.invariants)
           << "," << (r.stable ? "true" : "false") << "," << r.caveat << "\n";
    return os.str();
}

std::string table_to_text(const TableDocument& t) {
    std::ostringstream os;
    os << "table " << t.preset << " (bound " << t.bound << ")\n";
    os << "   d        l     order  exact  stable  caveat\n";
    for (const auto& r : t.rows) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%6ld %8ld %9llu  %-5s  %-6s  %s\n", r.d, r.ell, r.order,
                      r.order_exactly_ell ? "yes" : "no", r.stable ? "yes" : "no",
                      r.caveat.c_str());
        os << buf;
    }
    return os.str();
}

}  // namespace logclass
