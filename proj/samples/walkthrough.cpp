#include <iostream>

#include "ellsplit/ellsplit.hpp"

using namespace ellsplit;

int main()
{
    // Property (S) on the envelope surface in G_m^4
    Variety envelope(corpus_entry("envelope").spec);
    auto report = check_property_S(envelope, 0, 1);
    std::cout << "envelope: " << report.verdict() << "\n";
    if (report.witness) {
        std::cout << "  witness " << to_json(*report.witness)["entries"].dump() << "\n";
        for (auto& s : report.witness_image.generator_strings()) std::cout << "  image: " << s << "\n";
        if (auto split = build_split_witness(envelope, *report.witness, 0))
            std::cout << "  split with dim W1 = " << split->dim_w1 << ", dim W2 = " << split->dim_w2 << "\n";
    }

    auto proj = find_dominant_projection(envelope);
    std::cout << "  dominant coordinates:";
    for (auto i : proj) std::cout << " " << i + 1;
    std::cout << "\n";

    // canonical height of the generator of 37a1
    Curve e(corpus::curve_37a1());
    CurvePoint p(0, 0);
    auto h = canonical_height(e, p, 1e-10);
    std::cout << "hhat(0,0) on 37a1 = " << h.value() << " +- " << h.radius() << "\n";

    // points of S_2(C x E) with growing height
    auto f = check_fibration(*corpus_entry("CxE").fibration);
    auto base = find_base_point(f, 2);
    for (auto& c : generate_unbounded(f, base, {4, 16, 64}, 1)) {
        std::cout << "N = " << c.N << "  column " << c.column[0] << "  ||x|| = " << c.norm.value()
                  << (c.verified() ? "  verified" : "  FAILED") << "\n";
    }
    return 0;
}
