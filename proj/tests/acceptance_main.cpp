// acceptance_main.cpp — Runs the acceptance checks and prints one PASS/FAIL line per check
//
//   qslab_acceptance [--only NAME[,NAME...]] [--jobs N] [--dt X] [--seed N]

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qslab/acceptance.hpp"

int main(int argc, char** argv) {
    qslab::acceptance::Options opt;
    opt.jobs = qslab::default_jobs();
    std::vector<std::string> only;
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "-h" || arg == "--help") {
                std::cout << "usage: qslab_acceptance [--only NAME[,NAME...]] [--jobs N] [--dt X] [--seed N]\n";
                return EXIT_SUCCESS;
            }
            if (i + 1 >= argc) throw qslab::ConfigError("missing value for " + arg);
            const std::string value = argv[++i];
            if (arg == "--only") {
                std::stringstream ss(value);
                for (std::string name; std::getline(ss, name, ',');) only.push_back(name);
            } else if (arg == "--jobs") opt.jobs = qslab::parse_unsigned(value, "jobs");
            else if (arg == "--dt") opt.dt = qslab::parse_double(value, "dt");
            else if (arg == "--seed") opt.seed = qslab::parse_unsigned(value, "seed");
            else throw qslab::ConfigError("unknown option " + arg);
        }
        const auto results = qslab::acceptance::run(only, opt, std::cout);
        bool all = true;
        for (const auto& r : results) all = all && r.passed;
        return all ? EXIT_SUCCESS : 3;
    } catch (const qslab::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }
}
