#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logclass/logarith.hpp"

namespace logclass {

// caveat markers for calibration-class entries
inline constexpr const char* kCaveatEllDividesH = "ell-divides-h";
inline constexpr const char* kCaveatTwoAdic = "two-adic-convention";

struct ScanRecord {
    long d = 0;
    long ell = 0;
    std::vector<long> invariants;
    unsigned long long order = 1;
    bool stable = false;
    long certified_at = 0;
    long elapsed_ms = 0;
    std::string convention;
    std::string caveat;
    std::string error;

    bool nontrivial() const { return error.empty() && !invariants.empty(); }
    std::string key() const;
};

struct ScanOptions {
    int workers = 1;
    std::string cache_path;  // empty disables the cache
    bool force = false;      // recompute cached keys
    Convention conv;
    long max_m = 40;
};

// One record per prime in [lmin, lmax], sorted by ell.  Per-prime failures
// become error records; the scan continues.
std::vector<ScanRecord> scan(long d, long lmin, long lmax, const ScanOptions& opt = {});

struct SmallestResult {
    std::optional<long> ell;  // smallest caveat-free nontrivial prime
    ScanRecord record;        // its record (when found)
    // nontrivial entries below it that carry a caveat flag (calibration class)
    std::vector<ScanRecord> flagged;
};

SmallestResult smallest_nontrivial(long d, long bound, const ScanOptions& opt = {});

struct TableRow {
    long d = 0;
    long ell = 0;
    unsigned long long order = 1;
    bool order_exactly_ell = false;
    std::vector<long> invariants;
    bool stable = false;
    std::string caveat;
};

struct TableDocument {
    std::string preset;
    long bound = 0;
    std::vector<TableRow> rows;
};

// presets: "imaginary-six" (bound defaults to 30000),
//          "sqrt-minus-3"  (bound defaults to 3000)
TableDocument table(const std::string& preset, long bound, const ScanOptions& opt = {});

// serialization
std::string record_to_json(const ScanRecord& r, bool include_elapsed);
ScanRecord record_from_json(const std::string& line);
std::string records_to_json(const std::vector<ScanRecord>& rs);
std::string records_to_csv(const std::vector<ScanRecord>& rs);
std::string table_to_json(const TableDocument& t);
std::string table_to_csv(const TableDocument& t);
std::string table_to_text(const TableDocument& t);

std::vector<long> primes_in(long lo, long hi);

}  // namespace logclass
