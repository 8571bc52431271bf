// Samples the half-line space, estimates pointwise Lipschitz constants of g
// and reports where the global quotient is attained.

#include <cstdio>

#include "metricgeo/metricgeo.hpp"

int main() {
    using namespace metricgeo;
    auto c = build_halfline(10, 20);
    auto s = c.space();
    const auto& g = c.field("g");
    SchedulePolicy policy(s, {});
    auto sup = sup_lip(lip_field(s, g, policy));
    auto m = classify_membership(s, g, policy, 2.0);
    std::printf("samples            %zu\n", s.size());
    std::printf("sup Lip g          %.6f\n", sup.value);
    std::printf("global LIP         %.6f between t=%g and t=%g\n", m.global.value, c.samples[m.global.x][0],
                c.samples[m.global.y][0]);
    std::printf("in D / LIP / LIPloc %d %d %d\n", m.in_D, m.in_LIP, m.in_LIP_loc);
    return 0;
}
