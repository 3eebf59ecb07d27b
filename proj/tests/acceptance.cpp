// Acceptance gate: runs every criterion with its seeds and tolerances pinned
// in src/harness.cpp, prints one verdict line each, and exits nonzero if any
// failed. Artifacts land under paper_check_out/ in the working directory.
#include <cstdio>

#include "polylearn/errors.hpp"
#include "polylearn/harness.hpp"

int main() {
    const auto results = polylearn::paper_check("paper_check_out");
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s [%.1fs]\n", polylearn::format_criterion_line(r).c_str(), r.seconds);
        if (!r.passed) ++failed;
    }
    std::printf("%d/%d criteria passed\n", static_cast<int>(results.size()) - failed,
                static_cast<int>(results.size()));
    return failed == 0 ? polylearn::exit_ok : polylearn::exit_acceptance;
}
