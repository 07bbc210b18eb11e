// Acceptance driver: runs the validation suites and prints one line per
// criterion. Exit code 0 only if every criterion passed.

#include <graphot/validate.hpp>

#include <cstdio>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> suites;
    for (int i = 1; i < argc; ++i) suites.emplace_back(argv[i]);
    if (suites.empty() || (suites.size() == 1 && suites[0] == "all"))
        suites = graphot::validate::suite_names();

    bool all_ok = true;
    for (const std::string& name : suites) {
        graphot::validate::SuiteResult suite;
        try {
            suite = graphot::validate::run_suite(name);
        } catch (const std::exception& ex) {
            std::fprintf(stderr, "suite %s failed to run: %s\n", name.c_str(), ex.what());
            return 2;
        }
        for (const auto& r : suite.results) {
            std::printf("[%s] %-40s value=%-13.6g threshold=%-10.4g %s\n", r.passed ? "PASS" : "FAIL",
                        r.id.c_str(), r.value, r.threshold, r.detail.c_str());
            all_ok = all_ok && r.passed;
        }
        std::fflush(stdout);
    }
    return all_ok ? 0 : 1;
}
