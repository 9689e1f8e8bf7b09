// Runs every acceptance property and prints one PASS/FAIL line per item.
#include "vpatch/checks.hpp"

#include <cstdio>

int main()
{
    int failed = 0;
    for (const auto& c : vpatch::acceptance_checks()) {
        const vpatch::CheckResult r = c.run();
        std::printf("%s  (%.2f s)\n", vpatch::format_result(r).c_str(), r.seconds);
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    std::printf("%d of %zu acceptance properties failed\n", failed, vpatch::acceptance_checks().size());
    return failed == 0 ? 0 : 1;
}
