#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "coherentcast/synthetic.hpp"
#include "coherentcast/timestamp.hpp"

namespace cc = coherentcast;

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic session, weather and holiday files"};
    cc::SyntheticSpec spec;
    std::string dir = "data/synthetic";
    std::string start;
    app.add_option("--out", dir, "output directory");
    app.add_option("--days", spec.days, "number of days")->check(CLI::PositiveNumber);
    app.add_option("--stations", spec.stations, "number of stations")->check(CLI::PositiveNumber);
    app.add_option("--seed", spec.seed, "random seed");
    app.add_option("--start", start, "first hour, YYYY-MM-DDTHH:MM");
    CLI11_PARSE(app, argc, argv);
    try {
        if (!start.empty()) {
            const auto t = cc::parse_timestamp(start);
            if (!t) throw std::invalid_argument("bad --start '" + start + "'");
            spec.start = *t;
        }
        const auto data = cc::generate_synthetic(spec);
        cc::write_synthetic(data, dir);
        std::cout << "wrote " << data.sessions.size() << " sessions for " << spec.stations << " stations to " << dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
