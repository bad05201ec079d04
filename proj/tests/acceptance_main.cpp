// Acceptance runner: executes the criteria (all, or those given as
// arguments), prints one pass/fail line each, exits 0 only when every
// criterion passed.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "hermspde/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > 10) {
            std::fprintf(stderr, "usage: %s [criterion-id...]  (ids in 1..10)\n", argv[0]);
            return 2;
        }
        only.push_back(id);
    }

    bool all_pass = true;
    for (const auto& result : hermspde::run_acceptance(only)) {
        std::printf("%s runtime %.1fs\n", result.summary().c_str(), result.seconds);
        std::fflush(stdout);
        all_pass = all_pass && result.pass;
    }
    return all_pass ? 0 : 1;
}
