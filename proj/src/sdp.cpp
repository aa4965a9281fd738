#include "pistab/sdp.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace pistab {

namespace {

// shortest-round-trip double formatting, stable across runs
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// recover (i, j) of an upper-triangle index
void tri_unindex(int dim, int t, int& i, int& j) {
    i = 0;
    int rowlen = dim;
    while (t >= rowlen) {
        t -= rowlen;
        --rowlen;
        ++i;
    }
    j = i + t;
}

}  // namespace

void dump_sdp(const SDPProblem& p, std::ostream& os) {
    os << "pistab-sdp 1\n";
    os << "rows " << p.num_rows() << "\n";
    os << "blocks " << p.blocks.size() << "\n";
    for (size_t b = 0; b < p.blocks.size(); ++b)
        os << "block " << b << " " << p.blocks[b].name << " " << p.blocks[b].dim << "\n";
    os << "rhs";
    for (double v : p.rhs) os << " " << fmt(v);
    os << "\n";
    // entry lines: row block i j value  (value multiplies the shared unknown
    // X_ij = X_ji; diagonal entries appear with their full coefficient)
    for (const auto& t : p.triplets) {
        int b = 0, base = 0;
        while (b + 1 < static_cast<int>(p.blocks.size()) && t.var >= base + p.blocks[b].tri_size()) {
            base += p.blocks[b].tri_size();
            ++b;
        }
        int i, j;
        tri_unindex(p.blocks[b].dim, t.var - base, i, j);
        os << t.row << " " << b << " " << i << " " << j << " " << fmt(t.value) << "\n";
    }
}

void dump_sdp_file(const SDPProblem& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write SDP dump to '" + path + "'");
    dump_sdp(p, out);
}

}  // namespace pistab
