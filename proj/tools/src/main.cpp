#include <iostream>
#include <vector>

#include "pmqkd/cli/config.hpp"
#include "pmqkd/cli/run.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const pmqkd::cli::RunConfig config = pmqkd::cli::parse_config(args);
        return pmqkd::cli::run(config, std::cout, std::cerr);
    } catch (const pmqkd::cli::HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const pmqkd::cli::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
