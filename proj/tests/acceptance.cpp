// Acceptance suite: runs the built-in verification matrix at full resolution
// and prints one pass/fail line per criterion.
//
//   acceptance [--criterion N] [--quick]
//
// Exit status: 0 when every executed criterion is verified or skipped with a
// recorded reason, 1 otherwise.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "hardylab/verify.hpp"

using namespace hardylab;

namespace {

const char* tag(ClaimStatus s) {
    switch (s) {
        case ClaimStatus::verified:     return "PASS";
        case ClaimStatus::violated:     return "FAIL";
        case ClaimStatus::inconclusive: return "FAIL";
        case ClaimStatus::skipped:      return "SKIP";
    }
    return "FAIL";
}

std::string summary_of(const ClaimReport& r) {
    if (r.status == ClaimStatus::skipped && r.evidence.contains("reason"))
        return r.evidence["reason"].get<std::string>();
    if (r.evidence.contains("error"))
        return std::string("error: ") + r.evidence["error"].get<std::string>();
    std::string s;
    if (r.evidence.contains("checks")) {
        int shown = 0;
        for (const auto& c : r.evidence["checks"]) {
            if (shown++ >= 3 && r.status == ClaimStatus::verified) {
                s += " ...";
                break;
            }
            s += " [" + c["metric"].get<std::string>() + "=" +
                 c["value"].dump() + (c["pass"].get<bool>() ? "" : " !") + "]";
        }
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    ClaimConfig cfg;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--quick") == 0)
            cfg.quick = true;
        else {
            std::fprintf(stderr, "usage: acceptance [--criterion N] [--quick]\n");
            return 2;
        }
    }
    std::vector<ClaimReport> reports;
    if (only > 0) {
        reports.push_back(run_claim(only, cfg));
    } else {
        for (const auto& c : claim_matrix()) reports.push_back(run_claim(c.index, cfg));
    }
    bool all_ok = true;
    for (const auto& r : reports) {
        std::printf("[%s] C%02d %-32s (%5.1fs)%s\n", tag(r.status), r.index, r.id.c_str(),
                    r.seconds, summary_of(r).c_str());
        if (r.status == ClaimStatus::violated || r.status == ClaimStatus::inconclusive)
            all_ok = false;
    }
    return all_ok ? 0 : 1;
}
