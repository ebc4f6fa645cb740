#include "gso/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace gso {

namespace {

std::string coords_string(const Eigen::VectorXd& c) {
    std::string out;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (i) out += ';';
        out += format_double(c[i]);
    }
    return out;
}

std::string seed_tag(uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03llu", static_cast<unsigned long long>(seed));
    return buf;
}

std::vector<std::uint8_t> oracle_safe_mask(const Eigen::MatrixXd& oracle) {
    std::vector<std::uint8_t> mask(static_cast<size_t>(oracle.rows()), 0);
    for (Eigen::Index a = 0; a < oracle.rows(); ++a)
        mask[static_cast<size_t>(a)] = oracle.row(a).tail(oracle.cols() - 1).minCoeff() >= 0.0;
    return mask;
}

int resolve_oracle_repeats(const RunConfig& config, const Env& env) {
    if (config.oracle_repeats > 0) return config.oracle_repeats;
    return env.stochastic() ? 16 : 1;
}

}  // namespace

uint64_t engine_seed(uint64_t run_seed) {
    uint64_t x = run_seed + 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

SeedRun run_single(const Env& env, const ParamGrid& grid, const EngineOptions& opts,
                   uint64_t seed) {
    Engine engine(env, grid, opts, engine_seed(seed));
    SeedRun out;
    out.seed = seed;
    out.records = engine.run();
    out.episode_min_gbar = engine.episode_min_gbar();
    out.final_safe = engine.safe_set().member;
    out.recommended_index = engine.recommend();
    return out;
}

int discovered_regions(const std::vector<RunRecord>& records, const ParamGrid& grid,
                       const Eigen::MatrixXd& oracle) {
    std::vector<std::uint8_t> mask = oracle_safe_mask(oracle);
    std::vector<int> labels = grid_components(grid, mask);
    std::set<int> seen;
    for (const RunRecord& rec : records) {
        if (rec.triggered || rec.param_index < 0) continue;
        int label = labels[static_cast<size_t>(rec.param_index)];
        if (label >= 0) seen.insert(label);
    }
    return static_cast<int>(seen.size());
}

int CampaignResult::total_violations() const {
    int n = 0;
    for (const SeedSummary& s : per_seed) n += s.violations;
    return n;
}

CampaignResult run_campaign_memory(const RunConfig& config) {
    std::unique_ptr<Env> env = make_env(config);
    ParamGrid grid = make_grid(config);
    EngineOptions opts = engine_options(config, *env, grid);

    CampaignResult result;
    result.oracle = oracle_truth(*env, grid, resolve_oracle_repeats(config, *env));
    if (config.normalize_objective) {
        double f_min = result.oracle.col(0).minCoeff();
        double f_max = result.oracle.col(0).maxCoeff();
        result.obj_shift = f_min;
        result.obj_scale = std::max(f_max - f_min, 1e-12);
    }
    opts.obj_shift = result.obj_shift;
    opts.obj_scale = result.obj_scale;

    for (uint64_t seed : config.seeds) {
        SeedRun run = run_single(*env, grid, opts, seed);

        SeedSummary s;
        s.seed = seed;
        s.iters = static_cast<int>(run.records.size());
        for (double g : run.episode_min_gbar)
            if (g < 0.0) ++s.violations;
        for (const RunRecord& rec : run.records)
            if (rec.triggered) ++s.triggers;
        s.discovered_regions = discovered_regions(run.records, grid, result.oracle);
        s.recommended_index = run.recommended_index;
        if (s.recommended_index >= 0)
            s.recommended_obj =
                (result.oracle(s.recommended_index, 0) - result.obj_shift) / result.obj_scale;
        s.final_safe_count = static_cast<int>(
            std::count(run.final_safe.begin(), run.final_safe.end(), std::uint8_t(1)));
        result.per_seed.push_back(s);
        result.runs.push_back(std::move(run));
    }
    return result;
}

namespace {

void write_records_csv(const std::filesystem::path& path, const SeedRun& run,
                       const ParamGrid& grid) {
    std::ofstream out(path);
    out << "seed,iter,stage,param_index,param_coords,y_obj,y_con_min,triggered,safe,"
           "recommended_index,best_lower_bound\n";
    for (const RunRecord& rec : run.records) {
        double y_obj = rec.measurements.size() > 0 ? rec.measurements[0]
                                                   : std::numeric_limits<double>::quiet_NaN();
        double y_con = std::numeric_limits<double>::quiet_NaN();
        if (rec.measurements.size() > 1) y_con = rec.measurements.tail(rec.measurements.size() - 1).minCoeff();
        out << run.seed << ',' << rec.iter << ','
            << (rec.stage == Stage::Lse ? "lse" : "ge") << ',' << rec.param_index << ','
            << coords_string(grid.points[static_cast<size_t>(rec.param_index)]) << ','
            << format_double(y_obj) << ',' << format_double(y_con) << ','
            << (rec.triggered ? 1 : 0) << ',' << (rec.safe ? 1 : 0) << ','
            << rec.recommended_index << ',' << format_double(rec.best_lower_bound) << '\n';
    }
}

}  // namespace

int run_campaign(const RunConfig& config) {
    namespace fs = std::filesystem;
    CampaignResult result;
    try {
        result = run_campaign_memory(config);
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }

    std::unique_ptr<Env> env = make_env(config);
    ParamGrid grid = make_grid(config);
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << dir << ": " << ec.message() << "\n";
        return 1;
    }

    for (const SeedRun& run : result.runs)
        write_records_csv(dir / ("records_" + config.algorithm + "_seed" + seed_tag(run.seed) + ".csv"),
                          run, grid);

    {
        std::ofstream out(dir / ("summary_" + config.algorithm + ".csv"));
        out << "seed,algo,iters,violations,triggers,discovered_regions,recommended_index,"
               "recommended_coords,recommended_obj,final_safe_count\n";
        for (const SeedSummary& s : result.per_seed) {
            std::string coords = s.recommended_index >= 0
                                     ? coords_string(grid.points[static_cast<size_t>(s.recommended_index)])
                                     : "";
            out << s.seed << ',' << config.algorithm << ',' << s.iters << ',' << s.violations
                << ',' << s.triggers << ',' << s.discovered_regions << ',' << s.recommended_index
                << ',' << coords << ',' << format_double(s.recommended_obj) << ','
                << s.final_safe_count << '\n';
        }
    }

    {
        // Oracle objective of the running recommendation, carried forward for
        // seeds whose run ended early.
        size_t max_iters = 0;
        for (const SeedRun& run : result.runs) max_iters = std::max(max_iters, run.records.size());
        std::ofstream out(dir / ("curve_" + config.algorithm + ".csv"));
        out << "iter,recommended_obj_mean,recommended_obj_min,recommended_obj_max\n";
        for (size_t t = 0; t < max_iters; ++t) {
            double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
            int n = 0;
            for (const SeedRun& run : result.runs) {
                if (run.records.empty()) continue;
                const RunRecord& rec = run.records[std::min(t, run.records.size() - 1)];
                if (rec.recommended_index < 0) continue;
                double v = (result.oracle(rec.recommended_index, 0) - result.obj_shift) /
                           result.obj_scale;
                sum += v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                ++n;
            }
            if (n == 0) continue;
            out << (t + 1) << ',' << format_double(sum / n) << ',' << format_double(lo) << ','
                << format_double(hi) << '\n';
        }
    }

    int violations = result.total_violations();
    std::cout << "campaign " << config.algorithm << ": " << result.per_seed.size()
              << " seeds, " << violations << " violations, outputs in " << dir.string() << "\n";
    return 0;
}

int write_oracle_csv(const RunConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::unique_ptr<Env> env = make_env(config);
    ParamGrid grid = make_grid(config);
    Eigen::MatrixXd oracle = oracle_truth(*env, grid, resolve_oracle_repeats(config, *env));

    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << dir << ": " << ec.message() << "\n";
        return 1;
    }
    std::ofstream out(dir / ("oracle_" + config.env_name + ".csv"));
    out << "param_index,coords";
    out << ",f";
    for (Eigen::Index i = 1; i < oracle.cols(); ++i) out << ",g" << i;
    out << '\n';
    for (Eigen::Index a = 0; a < oracle.rows(); ++a) {
        out << a << ',' << coords_string(grid.points[static_cast<size_t>(a)]);
        for (Eigen::Index c = 0; c < oracle.cols(); ++c) out << ',' << format_double(oracle(a, c));
        out << '\n';
    }
    std::cout << "oracle table: " << oracle.rows() << " rows, outputs in " << dir.string() << "\n";
    return 0;
}

}  // namespace gso
