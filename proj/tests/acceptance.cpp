// One line per acceptance criterion. Numeric tolerances live in the checks
// (src/validate.cpp); runtime limits are pinned here.
#include "merlang/config.hpp"
#include "merlang/errors.hpp"
#include "merlang/validate.hpp"

#include <cstdio>
#include <exception>
#include <map>

using namespace merlang;

namespace {

const std::map<int, double> kRuntimeLimit = {{1, 1.0}, {2, 300.0}, {5, 60.0}, {6, 600.0}};

}  // namespace

int main() {
    const ExperimentConfig cfg;
    bool all = true;
    for (const validate::CheckInfo& info : validate::checks()) {
        try {
            const validate::CheckResult r = validate::run_check(info.name, cfg);
            const validate::CheckRecord* worst = nullptr;
            double ratio = -1.0;
            for (const auto& rec : r.records) {
                const double x = rec.tolerance > 0.0 ? rec.max_deviation / rec.tolerance : rec.max_deviation;
                if (!rec.pass || x > ratio) {
                    if (worst && !worst->pass && rec.pass) continue;
                    worst = &rec;
                    ratio = x;
                }
            }
            const auto lim = kRuntimeLimit.find(info.criterion);
            const bool in_time = lim == kRuntimeLimit.end() || r.seconds < lim->second;
            const bool pass = r.pass() && in_time;
            all = all && pass;
            std::printf("%s criterion %d %-22s", pass ? "PASS" : "FAIL", info.criterion, info.name);
            if (worst)
                std::printf(" worst %-38s dev %.3g tol %.3g", worst->quantity.c_str(), worst->max_deviation,
                            worst->tolerance);
            std::printf(" time %.1f s", r.seconds);
            if (lim != kRuntimeLimit.end()) std::printf(" (limit %.0f s)", lim->second);
            std::printf("\n");
        } catch (const std::exception& e) {
            all = false;
            std::printf("FAIL criterion %d %-22s error: %s\n", info.criterion, info.name, e.what());
        }
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
