// Currents and populations at one operating point, numerics next to the
// closed-form estimates.
#include <cstdio>

#include "fqt/fqt.hpp"

int main() {
    using namespace fqt;
    const SystemParams params = SystemParams::canonical(1.0, PiFlip{1.0});
    const BathSpec baths{0.2, 0.0, 0.02, 1.0};

    const CurrentsReport r = evaluate_point(params, baths);
    std::printf("J_E = %.6e  J_B = %.6e  J_C = %.6e  (drive %.3e)\n", r.j_e, r.j_b, r.j_c,
                r.drive_power);

    const LevelTable table = build_level_table(params);
    const Populations cls = class_populations(r.populations, table);
    const ApproxReport a = approximate(baths, harmonic_weights(params, {}));
    for (std::size_t k = 0; k < 4; ++k) {
        std::printf("rho_%-3s numeric %.6e  closed form %.6e\n", cls.labels[k].c_str(), cls[k],
                    a.populations[k]);
    }
    return 0;
}
