#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gso/campaign.hpp"
#include "gso/config.hpp"

namespace {

// "0..19" (inclusive) or a comma list "0,3,17".
std::vector<uint64_t> parse_seed_spec(const std::string& spec) {
    std::vector<uint64_t> out;
    size_t dots = spec.find("..");
    if (dots != std::string::npos) {
        uint64_t lo = std::stoull(spec.substr(0, dots));
        uint64_t hi = std::stoull(spec.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("seed range is empty");
        for (uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    size_t pos = 0;
    while (pos < spec.size()) {
        size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        out.push_back(std::stoull(spec.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("no seeds given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe policy optimization on simulated plants"};
    app.require_subcommand(1);

    std::string config_path, seed_spec, algo, out_dir;

    CLI::App* run = app.add_subcommand("run", "Run a seeded campaign and write CSV telemetry");
    run->add_option("--config", config_path, "JSON config path")->required();
    run->add_option("--seeds", seed_spec, "Override seeds, e.g. 0..19 or 0,3,17");
    run->add_option("--algo", algo, "Override algorithm")
        ->check(CLI::IsMember({"gosafeopt", "safeopt"}));
    run->add_option("--out", out_dir, "Override output directory");

    CLI::App* oracle = app.add_subcommand("oracle", "Dump the ground-truth grid table as CSV");
    oracle->add_option("--config", config_path, "JSON config path")->required();
    oracle->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* check = app.add_subcommand("check", "Validate a config and exit");
    check->add_option("--config", config_path, "JSON config path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        gso::RunConfig config = gso::load_config(config_path);
        if (check->parsed()) {
            std::cout << "config ok: env=" << config.env_name << " algo=" << config.algorithm
                      << " seeds=" << config.seeds.size() << "\n";
            return 0;
        }
        if (oracle->parsed()) return gso::write_oracle_csv(config, out_dir);

        if (!seed_spec.empty()) config.seeds = parse_seed_spec(seed_spec);
        if (!algo.empty()) config.algorithm = algo;
        if (!out_dir.empty()) config.out_dir = out_dir;
        return gso::run_campaign(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
