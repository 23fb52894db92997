// Stand-alone sampler: commands on stdin, one result line per measured unit on stdout.

#include "kernbench/counters.hpp"
#include "kernbench/error.hpp"
#include "kernbench/sampler.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
    using namespace kernbench;
    try {
        NullCounterProvider counters;
        Sampler sampler(SamplerConfig::from_environment(), counters);
        if (argc > 1 && std::strcmp(argv[1], "--info") == 0) {
            std::cout << sampler_info(sampler, counters);
            return 0;
        }
        if (argc > 1) {
            std::cerr << "usage: " << argv[0] << " [--info] < commands\n";
            return 2;
        }
        std::ios::sync_with_stdio(false);
        sampler.run_text(std::cin, std::cout);
        std::cout.flush();
    } catch (const Error& e) {
        std::cout.flush();
        std::cerr << "kernbench-sampler: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
