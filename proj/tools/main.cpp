#include <iostream>

#include "mimome/experiment.hpp"

int main(int argc, char** argv) {
    try {
        const auto parsed = mimome::parse_config(argc, argv, std::cout);
        if (!parsed.config) return parsed.exit_code;
        return mimome::run(*parsed.config, std::cerr);
    } catch (const mimome::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\nRun with --help for the option list.\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
