#pragma once

#include <string>
#include <vector>

#include "logclass/logarith.hpp"

namespace logclass {

// Exponent-3^m quotient of a wild etale kernel, read off from a logarithmic
// class group at ell = 3 through the Scholz reflection d <-> d* with
// d* = squarefree(-3d); even twists read the group of Q(sqrt d), odd twists
// that of Q(sqrt d*).
struct WildKernelQuotient {
    long d = 0;
    long twist = 0;
    long source_field = 0;
    std::vector<long> group;   // exponent list of the 3-group
    bool special_path = false; // d = -3: identically trivial
};

// squarefree part of -3d (the mirror involution; applying it twice returns d)
long mirror_reflect(long d);

WildKernelQuotient wild_kernel_quotient(long d, long i, const ClassGroupOptions& opt = {});

std::string wkq_to_json(const WildKernelQuotient& w);

}  // namespace logclass
