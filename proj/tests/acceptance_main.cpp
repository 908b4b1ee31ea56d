// Dedicated acceptance binary: runs every criterion at its pinned tolerance
// and prints one pass/fail line per criterion. Exit status is nonzero if any
// criterion fails.

#include <cstdio>
#include <cstring>
#include <string>

#include "pflab/runner.hpp"

int main(int argc, char** argv) {
    std::string out_dir = "acceptance_out";
    int workers = 4;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--out-dir") == 0 && i + 1 < argc) out_dir = argv[++i];
        if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) workers = std::atoi(argv[++i]);
    }
    setvbuf(stdout, nullptr, _IONBF, 0);
    const auto res = pflab::reproduce_all(out_dir, workers);
    for (const auto& cr : res.criteria) {
        std::printf("[%s] criterion %2d: %s\n", cr.pass ? "PASS" : "FAIL", cr.id,
                    cr.name.c_str());
        for (const auto& ck : cr.checks) {
            if (ck.skipped)
                std::printf("         skip %-34s %s\n", ck.tag.c_str(), ck.note.c_str());
            else if (!ck.pass)
                std::printf("         FAIL %-34s value=%.6g target=%.6g slack=%.6g %s\n",
                            ck.tag.c_str(), ck.value, ck.target, ck.slack, ck.note.c_str());
        }
    }
    std::printf("acceptance total: %.1f s, reports in %s\n", res.seconds, out_dir.c_str());
    return res.pass ? 0 : 1;
}
