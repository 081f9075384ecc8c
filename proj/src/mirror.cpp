#include "logclass/mirror.hpp"

#include <stdexcept>

#include "json.hpp"

namespace logclass {

long mirror_reflect(long d) {
    if (d == 0 || d == 1) throw std::invalid_argument("mirror_reflect: invalid d");
    if (d == -3) throw std::invalid_argument("mirror_reflect: d = -3 has no mirror field");
    mpz_class r = squarefree_part(mpz_class(-3) * d);
    return static_cast<long>(r.get_si());
}

WildKernelQuotient wild_kernel_quotient(long d, long i, const ClassGroupOptions& opt) {
    if (i <= 0) throw std::invalid_argument("wild_kernel_quotient: twist must be positive");
    mpz_class dsf = squarefree_part(mpz_class(d));
    if (dsf == 0 || dsf == 1) throw std::invalid_argument("wild_kernel_quotient: invalid d");
    WildKernelQuotient w;
    w.d = static_cast<long>(dsf.get_si());
    w.twist = i;
    if (w.d == -3) {
        // the excluded field: both twists collapse to the trivial group
        w.special_path = true;
        w.source_field = -3;
        return w;
    }
    w.source_field = (i % 2 == 0) ? w.d : mirror_reflect(w.d);
    BaseField F = BaseField::quadratic(QuadField::init(mpz_class(w.source_field)));
    LogClassGroup g = log_class_group(F, 3, opt);
    if (!g.stable)
        throw precision_error("wild_kernel_quotient: class group did not stabilize");
    w.group = g.invariants;
    return w;
}

std::string wkq_to_json(const WildKernelQuotient& w) {
    nlohmann::json j;
    j["d"] = w.d;
    j["i"] = w.twist;
    j["source_field"] = w.source_field;
    j["group"] = w.group;
    if (w.special_path) j["special_path"] = true;
    return j.dump(2);
}

}  // namespace logclass
